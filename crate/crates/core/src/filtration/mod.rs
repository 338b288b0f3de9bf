//! Filtered simplicial complexes and their persistence diagrams.
//!
//! Two families of filtrations are supported: Vietoris–Rips on point clouds
//! and lower/upper-level set filtrations of functions sampled on a grid
//! (Freudenthal triangulation). Diagrams come from the standard Z/2
//! boundary-matrix reduction with clearing.

mod diagram;
mod grid;
mod reduce;
mod rips;

use std::cmp::Ordering;
use std::collections::HashMap;

pub use diagram::{PersistenceDiagram, PersistencePoint, Scale};
pub use grid::{build_function_complex, Direction, Grid, GridGeometry};
pub use rips::vr_persistence;

use crate::error::{Error, Result};
use crate::geometry::{euclidean, PointCloud};
use reduce::Reducer;

/// A simplex of dimension at most 3, vertices strictly increasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Simplex {
    verts: [u32; 4],
    len: u8,
}

impl Simplex {
    pub fn new(vertices: &[u32]) -> Result<Self> {
        if vertices.is_empty() || vertices.len() > 4 {
            return Err(Error::InvalidParameter(format!(
                "simplex needs 1 to 4 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("simplex vertices must be strictly increasing".into()));
        }
        let mut verts = [0; 4];
        verts[..vertices.len()].copy_from_slice(vertices);
        Ok(Self { verts, len: vertices.len() as u8 })
    }

    pub(crate) fn from_sorted(vertices: &[u32]) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let mut verts = [0; 4];
        verts[..vertices.len()].copy_from_slice(vertices);
        Self { verts, len: vertices.len() as u8 }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.verts[..self.len as usize]
    }

    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    /// Codimension-one faces, in the order obtained by dropping each vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.len as usize;
        (0..if n > 1 { n } else { 0 }).map(move |skip| {
            let mut verts = [0; 4];
            let mut k = 0;
            for (i, &v) in self.vertices().iter().enumerate() {
                if i != skip {
                    verts[k] = v;
                    k += 1;
                }
            }
            Simplex { verts, len: (n - 1) as u8 }
        })
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Simplex {
    /// Dimension first, then lexicographic vertices.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| self.vertices().cmp(other.vertices()))
    }
}

/// A simplicial complex with a filtration value on every simplex.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    pub simplices: Vec<(Simplex, f64)>,
    pub scale: Scale,
    /// Set by builders whose full complex is known to have trivial H1, which
    /// lets the reduction stop once every 1-cycle has been killed.
    h1_acyclic: bool,
}

impl FilteredComplex {
    pub fn new(simplices: Vec<(Simplex, f64)>, scale: Scale) -> Self {
        Self { simplices, scale, h1_acyclic: false }
    }

    pub(crate) fn with_acyclic_h1(mut self, flag: bool) -> Self {
        self.h1_acyclic = flag;
        self
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Simplex indices in filtration order: (value, dim, lexicographic).
    pub fn filtration_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.simplices.len()).collect();
        order.sort_by(|&a, &b| {
            let (sa, va) = &self.simplices[a];
            let (sb, vb) = &self.simplices[b];
            va.total_cmp(vb).then_with(|| sa.cmp(sb))
        });
        order
    }
}

/// Vietoris–Rips complex up to dimension `max_dim` (at most 2), keeping
/// simplices whose diameter is at most `delta_max`.
pub fn build_vr(cloud: &PointCloud, max_dim: usize, delta_max: f64) -> Result<FilteredComplex> {
    if cloud.is_empty() {
        return Err(Error::EmptySet);
    }
    if max_dim > 2 {
        return Err(Error::InvalidParameter(format!("Rips max_dim must be <= 2, got {max_dim}")));
    }
    if !(delta_max > 0.0) {
        return Err(Error::InvalidParameter(format!("delta_max must be positive, got {delta_max}")));
    }
    let n = cloud.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(cloud.point(i), cloud.point(j));
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let mut simplices: Vec<(Simplex, f64)> = (0..n as u32).map(|i| (Simplex::from_sorted(&[i]), 0.0)).collect();
    if max_dim >= 1 {
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist[i * n + j];
                if d <= delta_max {
                    simplices.push((Simplex::from_sorted(&[i as u32, j as u32]), d));
                }
            }
        }
    }
    if max_dim >= 2 {
        for i in 0..n {
            for j in (i + 1)..n {
                let dij = dist[i * n + j];
                if dij > delta_max {
                    continue;
                }
                for k in (j + 1)..n {
                    let v = dij.max(dist[i * n + k]).max(dist[j * n + k]);
                    if v <= delta_max {
                        simplices.push((Simplex::from_sorted(&[i as u32, j as u32, k as u32]), v));
                    }
                }
            }
        }
    }
    let full = max_dim >= 2 && delta_max >= dist.iter().copied().fold(0.0, f64::max);
    Ok(FilteredComplex::new(simplices, Scale::Distance).with_acyclic_h1(full))
}

/// Counts connected components of the 1-skeleton.
fn component_count(vertices: usize, edges: impl Iterator<Item = (usize, usize)>) -> usize {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut components = vertices;
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components
}

/// Persistence diagram of `complex` in homology dimensions `0..=max_hom_dim`
/// (at most 1). Pairs with zero persistence are dropped.
pub fn compute_persistence(complex: &FilteredComplex, max_hom_dim: usize) -> Result<PersistenceDiagram> {
    if max_hom_dim > 1 {
        return Err(Error::InvalidParameter(format!("homology dimension must be <= 1, got {max_hom_dim}")));
    }
    if complex.is_empty() {
        return Ok(PersistenceDiagram::empty(complex.scale));
    }
    if complex.simplices.iter().any(|(_, v)| v.is_nan()) {
        return Err(Error::InvalidParameter("NaN filtration value".into()));
    }
    let order = complex.filtration_order();
    let total = order.len();
    let mut position: HashMap<Simplex, u32> = HashMap::with_capacity(total);
    for (pos, &idx) in order.iter().enumerate() {
        if position.insert(complex.simplices[idx].0, pos as u32).is_some() {
            return Err(Error::InvalidParameter("duplicate simplex in complex".into()));
        }
    }
    let values: Vec<f64> = order.iter().map(|&i| complex.simplices[i].1).collect();
    let dims: Vec<usize> = order.iter().map(|&i| complex.simplices[i].0.dim()).collect();

    // boundary columns, grouped by dimension
    let top = max_hom_dim + 1;
    let mut columns: Vec<Vec<(u32, Vec<u32>)>> = vec![Vec::new(); top + 1];
    for (pos, &idx) in order.iter().enumerate() {
        let (s, v) = complex.simplices[idx];
        let mut col = Vec::with_capacity(s.dim() + 1);
        for f in s.facets() {
            let fp = *position
                .get(&f)
                .ok_or_else(|| Error::Degenerate(format!("simplex {idx} is missing a face")))?;
            if values[fp as usize] > v {
                return Err(Error::NonMonotone { index: idx });
            }
            col.push(fp);
        }
        if (1..=top).contains(&s.dim()) {
            col.sort_unstable();
            columns[s.dim()].push((pos as u32, col));
        }
    }

    let vertex_count = dims.iter().filter(|&&d| d == 0).count();
    let edge_count = columns.get(1).map_or(0, Vec::len);
    // negative triangles needed before every 1-cycle is dead
    let stop_after = if complex.h1_acyclic && top >= 2 {
        let comps = component_count(
            total,
            columns[1].iter().map(|(_, c)| (c[0] as usize, c[1] as usize)),
        ) - (total - vertex_count);
        Some(edge_count - (vertex_count - comps))
    } else {
        None
    };

    let mut reducer = Reducer::new(total);
    let mut cleared = vec![false; total];
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut zero_columns: Vec<u32> = Vec::new();
    for dim in (1..=top).rev() {
        let mut found = 0usize;
        for (pos, col) in std::mem::take(&mut columns[dim]) {
            if dim == 2 && stop_after.is_some_and(|t| found >= t) {
                break;
            }
            if cleared[pos as usize] {
                continue;
            }
            match reducer.reduce(pos, col) {
                Some(low) => {
                    cleared[low as usize] = true;
                    pairs.push((low, pos));
                    found += 1;
                }
                None => zero_columns.push(pos),
            }
        }
    }

    let mut points = Vec::new();
    for (birth, death) in pairs {
        let dim = dims[birth as usize];
        let (b, d) = (values[birth as usize], values[death as usize]);
        if dim <= max_hom_dim && d > b {
            points.push(PersistencePoint::new(dim, b, d));
        }
    }
    for pos in 0..total {
        let dim = dims[pos];
        if dim == 0 && reducer.owner[pos] == reduce::NONE {
            points.push(PersistencePoint::new(0, values[pos], f64::INFINITY));
        }
    }
    for pos in zero_columns {
        let dim = dims[pos as usize];
        if dim <= max_hom_dim && reducer.owner[pos as usize] == reduce::NONE {
            points.push(PersistencePoint::new(dim, values[pos as usize], f64::INFINITY));
        }
    }
    let mut diagram = PersistenceDiagram::new(points, complex.scale);
    diagram.canonicalize();
    Ok(diagram)
}
