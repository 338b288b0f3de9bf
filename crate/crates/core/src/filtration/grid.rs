use super::{FilteredComplex, Scale, Simplex};
use crate::density::linspace;
use crate::error::{Error, Result};

/// Which level sets are swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `{f >= t}` as `t` decreases.
    Upper,
    /// `{f <= t}` as `t` increases.
    Lower,
}

/// Node placement of a regular grid over an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGeometry {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub shape: Vec<usize>,
}

impl GridGeometry {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        if lower.len() != upper.len() || lower.len() != shape.len() || lower.is_empty() {
            return Err(Error::InvalidParameter("grid corners and shape must share one dimension".into()));
        }
        Ok(Self { lower, upper, shape })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn node_count(&self) -> usize {
        self.shape.iter().product()
    }

    /// Coordinates of every node, row-major (last axis fastest).
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.dim())
            .map(|k| linspace(self.lower[k], self.upper[k], self.shape[k]))
            .collect();
        let mut out = Vec::with_capacity(self.node_count());
        let mut idx = vec![0usize; self.dim()];
        for _ in 0..self.node_count() {
            out.push((0..self.dim()).map(|k| axes[k][idx[k]]).collect());
            for k in (0..self.dim()).rev() {
                idx[k] += 1;
                if idx[k] < self.shape[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    }

    /// Samples `f` at every node.
    pub fn sample(&self, mut f: impl FnMut(&[f64]) -> f64) -> Grid {
        let values = self.nodes().iter().map(|x| f(x)).collect();
        Grid { shape: self.shape.clone(), values }
    }
}

/// Function values on a regular grid, row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn new(shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if shape.iter().product::<usize>() != values.len() {
            return Err(Error::InvalidParameter("grid shape does not match value count".into()));
        }
        Ok(Self { shape, values })
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.shape.len()];
        for k in (0..self.shape.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.shape[k + 1];
        }
        strides
    }

    /// Largest absolute difference to another grid of the same shape.
    pub fn sup_distance(&self, other: &Grid) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::InvalidParameter("grid shapes differ".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// Freudenthal triangulation of the grid (faces up to dimension 2) filtered
/// by the max of vertex values. `Upper` filters the negated function.
pub fn build_function_complex(grid: &Grid, direction: Direction) -> Result<FilteredComplex> {
    let d = grid.shape.len();
    if d == 0 || d > 3 {
        return Err(Error::Degenerate(format!("grid dimension must be 1, 2 or 3, got {d}")));
    }
    if grid.shape.iter().any(|&s| s < 2) {
        return Err(Error::Degenerate("grid needs at least 2 samples per axis".into()));
    }
    if grid.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("grid holds a non-finite value".into()));
    }
    let (sign, scale) = match direction {
        Direction::Lower => (1.0, Scale::FunctionLower),
        Direction::Upper => (-1.0, Scale::FunctionUpper),
    };
    let value = |v: usize| sign * grid.values[v];
    let strides = grid.strides();
    let n = grid.values.len();

    // nonempty axis subsets as bitmasks, and the offset each adds
    let masks: Vec<u32> = (1..(1u32 << d)).collect();
    let offset = |mask: u32| -> usize {
        (0..d).filter(|k| mask & (1 << k) != 0).map(|k| strides[k]).sum()
    };
    // for vertex v, does v + 1_mask stay inside the grid?
    let mut coord = vec![0usize; d];
    let mut simplices: Vec<(Simplex, f64)> = Vec::with_capacity(n * (1 + masks.len() + 6 * (d - 1)));
    for v in 0..n {
        let mut rem = v;
        for k in 0..d {
            coord[k] = rem / strides[k];
            rem %= strides[k];
        }
        let fits = |mask: u32| (0..d).all(|k| mask & (1 << k) == 0 || coord[k] + 1 < grid.shape[k]);
        let fv = value(v);
        simplices.push((Simplex::from_sorted(&[v as u32]), fv));
        for &a in &masks {
            if !fits(a) {
                continue;
            }
            let va = v + offset(a);
            let fa = fv.max(value(va));
            simplices.push((Simplex::from_sorted(&[v as u32, va as u32]), fa));
            for &b in &masks {
                // chains a ⊊ b
                if b == a || b & a != a || !fits(b) {
                    continue;
                }
                let vb = v + offset(b);
                simplices.push((Simplex::from_sorted(&[v as u32, va as u32, vb as u32]), fa.max(value(vb))));
            }
        }
    }
    Ok(FilteredComplex::new(simplices, scale).with_acyclic_h1(true))
}

#[cfg(test)]
mod tests {
    use super::super::compute_persistence;
    use super::*;

    #[test]
    fn freudenthal_counts() {
        let g = Grid::new(vec![3, 4], vec![0.0; 12]).unwrap();
        let k = build_function_complex(&g, Direction::Lower).unwrap();
        let count = |dim| k.simplices.iter().filter(|(s, _)| s.dim() == dim).count();
        assert_eq!(count(0), 12);
        // horizontal 3*3 + vertical 2*4 + diagonals 2*3
        assert_eq!(count(1), 9 + 8 + 6);
        assert_eq!(count(2), 2 * 2 * 3);
        let g3 = Grid::new(vec![2, 2, 2], vec![0.0; 8]).unwrap();
        let k3 = build_function_complex(&g3, Direction::Lower).unwrap();
        let count3 = |dim| k3.simplices.iter().filter(|(s, _)| s.dim() == dim).count();
        // cube: 12 edges + 6 face diagonals + 1 main diagonal
        assert_eq!(count3(1), 19);
        assert_eq!(count3(2), 12 + 6);
        assert_eq!(k3.len(), 8 + 19 + 18);
    }

    #[test]
    fn constant_grid_has_only_one_class() {
        let g = Grid::new(vec![5, 5], vec![2.5; 25]).unwrap();
        let d = compute_persistence(&build_function_complex(&g, Direction::Lower).unwrap(), 1).unwrap();
        assert_eq!(d.points.len(), 1);
        assert!(d.points[0].is_essential());
    }

    #[test]
    fn two_peaks_merge() {
        let g = Grid::new(vec![3], vec![1.0, 0.0, 1.0]).unwrap();
        let d = compute_persistence(&build_function_complex(&g, Direction::Upper).unwrap(), 1).unwrap();
        assert_eq!(d.scale, Scale::FunctionUpper);
        let mut births: Vec<f64> = d.points.iter().map(|p| p.function_values(d.scale).0).collect();
        births.sort_by(f64::total_cmp);
        assert_eq!(births, vec![1.0, 1.0]);
        let finite: Vec<_> = d.finite(0).collect();
        assert_eq!(finite.len(), 1);
        assert_eq!(finite[0].function_values(d.scale), (1.0, 0.0));
    }

    #[test]
    fn degenerate_grid_rejected() {
        let g = Grid::new(vec![1, 4], vec![0.0; 4]).unwrap();
        assert!(build_function_complex(&g, Direction::Lower).is_err());
    }

    #[test]
    fn ring_function_has_one_loop() {
        // value 1 on the boundary ring of a 5x5 grid, 0 inside: a loop born at 1 under upper filtration
        let mut values = vec![0.0; 25];
        for i in 0..5 {
            for j in 0..5 {
                if i == 0 || j == 0 || i == 4 || j == 4 {
                    values[i * 5 + j] = 1.0;
                }
            }
        }
        let g = Grid::new(vec![5, 5], values).unwrap();
        let d = compute_persistence(&build_function_complex(&g, Direction::Upper).unwrap(), 1).unwrap();
        let h1: Vec<_> = d.finite(1).collect();
        assert_eq!(h1.len(), 1);
        assert_eq!(h1[0].function_values(d.scale), (1.0, 0.0));
    }
}
