//! Vietoris–Rips persistence without materializing the triangle list.
//!
//! H0 comes from Kruskal's union-find over edges in filtration order. H1 is
//! read off the dual (coboundary) matrix: edge columns are reduced from the
//! longest edge down, each column holding the triangles that contain the
//! edge, with the earliest triangle as pivot. Edges that merge components
//! are skipped outright, since they cannot create a loop. A column's reduced
//! form is never stored: only the list of edges summed into it, from which
//! the coboundary is regenerated when another column needs it.
//!
//! Triangle `{i, j, k}` is keyed by `rank(longest edge) * n + opposite
//! vertex`, a total order compatible with the filtration.

use std::collections::HashMap;

use super::reduce::NONE;
use super::{PersistenceDiagram, PersistencePoint, Scale};
use crate::error::{Error, Result};
use crate::geometry::{euclidean, PointCloud};

/// Rips persistence in dimensions `0..=max_hom_dim` (at most 1).
///
/// `delta_max = None` uses the cloud diameter.
pub fn vr_persistence(cloud: &PointCloud, delta_max: Option<f64>, max_hom_dim: usize) -> Result<PersistenceDiagram> {
    if cloud.is_empty() {
        return Err(Error::EmptySet);
    }
    if max_hom_dim > 1 {
        return Err(Error::InvalidParameter(format!("homology dimension must be <= 1, got {max_hom_dim}")));
    }
    let n = cloud.len();
    let mut diameter = 0.0f64;
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(cloud.point(i), cloud.point(j));
            dist[i * n + j] = d;
            dist[j * n + i] = d;
            diameter = diameter.max(d);
        }
    }
    let delta = delta_max.unwrap_or(diameter);
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta_max must be nonnegative, got {delta}")));
    }

    let mut edges: Vec<(f64, u32, u32)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist[i * n + j];
            if d <= delta {
                edges.push((d, i as u32, j as u32));
            }
        }
    }
    drop(dist);
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut rank = vec![NONE; n * n];
    for (r, &(_, i, j)) in edges.iter().enumerate() {
        rank[i as usize * n + j as usize] = r as u32;
        rank[j as usize * n + i as usize] = r as u32;
    }

    let mut points = Vec::new();

    // H0 by Kruskal; merging edges are the ones skipped below
    let mut parent: Vec<usize> = (0..n).collect();
    let mut merges = vec![false; edges.len()];
    for (r, &(len, i, j)) in edges.iter().enumerate() {
        let (a, b) = (find(&mut parent, i as usize), find(&mut parent, j as usize));
        if a != b {
            parent[a.max(b)] = a.min(b);
            merges[r] = true;
            if len > 0.0 {
                points.push(PersistencePoint::new(0, 0.0, len));
            }
        }
    }
    for v in 0..n {
        if find(&mut parent, v) == v {
            points.push(PersistencePoint::new(0, 0.0, f64::INFINITY));
        }
    }

    if max_hom_dim >= 1 {
        let cob = Coboundary { n, edges: &edges, rank: &rank };
        let mut owner: HashMap<u64, u32> = HashMap::new();
        // edges summed into each paired column, when more than the column itself
        let mut sums: HashMap<u32, Vec<u32>> = HashMap::new();
        let (mut col, mut other, mut scratch) = (Vec::new(), Vec::new(), Vec::new());
        for r in (0..edges.len() as u32).rev() {
            if merges[r as usize] {
                continue;
            }
            cob.fill(r, &mut col);
            let mut summed = vec![r];
            loop {
                let Some(&pivot) = col.first() else {
                    points.push(PersistencePoint::new(1, edges[r as usize].0, f64::INFINITY));
                    break;
                };
                match owner.get(&pivot) {
                    None => {
                        owner.insert(pivot, r);
                        let death = edges[(pivot / n as u64) as usize].0;
                        let birth = edges[r as usize].0;
                        if death > birth {
                            points.push(PersistencePoint::new(1, birth, death));
                        }
                        if summed.len() > 1 {
                            sums.insert(r, summed);
                        }
                        break;
                    }
                    Some(&q) => {
                        let parts = sums.get(&q).map_or(std::slice::from_ref(&q), Vec::as_slice);
                        for &e in parts {
                            cob.fill(e, &mut other);
                            symmetric_difference(&mut col, &other, &mut scratch);
                        }
                        let parts = parts.to_vec();
                        let mut merged = Vec::with_capacity(summed.len() + parts.len());
                        sorted_symmetric_difference(&summed, &sorted(parts), &mut merged);
                        summed = merged;
                    }
                }
            }
        }
    }

    let mut diagram = PersistenceDiagram::new(points, Scale::Distance);
    diagram.canonicalize();
    Ok(diagram)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

struct Coboundary<'a> {
    n: usize,
    edges: &'a [(f64, u32, u32)],
    rank: &'a [u32],
}

impl Coboundary<'_> {
    /// Sorted keys of the triangles containing edge `r`.
    fn fill(&self, r: u32, out: &mut Vec<u64>) {
        out.clear();
        let n = self.n;
        let (_, i, j) = self.edges[r as usize];
        let (i, j) = (i as usize, j as usize);
        for k in 0..n {
            if k == i || k == j {
                continue;
            }
            let (rik, rjk) = (self.rank[i * n + k], self.rank[j * n + k]);
            if rik == NONE || rjk == NONE {
                continue;
            }
            let (top, opposite) = if r > rik && r > rjk {
                (r, k)
            } else if rik > rjk {
                (rik, j)
            } else {
                (rjk, i)
            };
            out.push(top as u64 * n as u64 + opposite as u64);
        }
        out.sort_unstable();
    }
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

fn symmetric_difference(col: &mut Vec<u64>, other: &[u64], scratch: &mut Vec<u64>) {
    sorted_symmetric_difference(col, other, scratch);
    std::mem::swap(col, scratch);
}

fn sorted_symmetric_difference<T: Ord + Copy>(a: &[T], b: &[T], out: &mut Vec<T>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}
