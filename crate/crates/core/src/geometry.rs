//! Point clouds and Euclidean set distances.
//!
//! Everything here is brute force: desk-scale clouds (a few thousand points)
//! make the O(n²) scans cheap enough, and exactness matters more than speed.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// An ordered list of points in ℝ^d, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from flat row-major coordinates.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point dimension must be positive".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not split into rows of {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().ok_or(Error::EmptySet)?.as_ref().len();
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Cloud made of the points at `indices` (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointCloud { dim: self.dim, coords }
    }

    /// Concatenation of two clouds of equal dimension.
    pub fn union(&self, other: &PointCloud) -> Result<PointCloud> {
        check_dim(self.dim, other.dim)?;
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(PointCloud { dim: self.dim, coords })
    }

    /// Componentwise (min, max) corners. `None` for an empty cloud.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut pts = self.points();
        let first = pts.next()?;
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in pts {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Some((lo, hi))
    }

    /// Largest pairwise distance; 0 for fewer than two points.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(euclidean(self.point(i), self.point(j)));
            }
        }
        best
    }

    /// Reads the CSV point format: one point per row, optional `#` header.
    ///
    /// A header naming a `label` column causes that column to be dropped.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text)
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut label_col = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                if rows.is_empty() {
                    label_col = header.split(',').position(|h| h.trim() == "label");
                }
                continue;
            }
            let mut row = Vec::new();
            for (col, field) in line.split(',').enumerate() {
                if Some(col) == label_col {
                    continue;
                }
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad number {:?}", lineno + 1, field.trim()))
                })?;
                row.push(v);
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::EmptySet);
        }
        Self::from_rows(&rows)
    }

    /// Writes the cloud as CSV, with an optional integer label column.
    pub fn to_csv(&self, labels: Option<&[u8]>) -> String {
        let mut out = String::from("#");
        let names = ["x", "y", "z"];
        for k in 0..self.dim {
            if k > 0 {
                out.push(',');
            }
            out.push_str(names.get(k).copied().unwrap_or("c"));
            if k >= names.len() {
                let _ = write!(out, "{k}");
            }
        }
        if labels.is_some() {
            out.push_str(",label");
        }
        out.push('\n');
        for (i, p) in self.points().enumerate() {
            for (k, v) in p.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v:?}");
            }
            if let Some(l) = labels {
                let _ = write!(out, ",{}", l[i]);
            }
            out.push('\n');
        }
        out
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

/// Distance from `x` to the nearest point of `set`.
pub fn dist_to_set(x: &[f64], set: &PointCloud) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    check_dim(set.dim(), x.len())?;
    let best = set
        .points()
        .map(|y| squared_euclidean(x, y))
        .fold(f64::INFINITY, f64::min);
    Ok(best.sqrt())
}

fn directed_hausdorff(from: &PointCloud, to: &PointCloud) -> f64 {
    from.points()
        .map(|p| {
            to.points()
                .map(|q| squared_euclidean(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        .sqrt()
}

/// Symmetric Hausdorff distance between two finite sets.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    check_dim(a.dim(), b.dim())?;
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// Sorted distances from point `i` to every other point of the cloud.
/// Ties keep index order.
fn neighbor_distances(cloud: &PointCloud, i: usize) -> Vec<f64> {
    let p = cloud.point(i);
    let mut d: Vec<f64> = (0..cloud.len())
        .filter(|&j| j != i)
        .map(|j| euclidean(p, cloud.point(j)))
        .collect();
    d.sort_by(f64::total_cmp);
    d
}

/// Mean over all points of the distance to their k-th nearest neighbor,
/// the point itself excluded.
pub fn mean_knn_distance(cloud: &PointCloud, k: usize) -> Result<f64> {
    Ok(mean_knn_distances(cloud, &[k])?[0])
}

/// `mean_knn_distance` for several k at once, sharing the neighbor scans.
pub fn mean_knn_distances(cloud: &PointCloud, ks: &[usize]) -> Result<Vec<f64>> {
    let n = cloud.len();
    for &k in ks {
        if k == 0 || k >= n {
            return Err(Error::InvalidParameter(format!(
                "k = {k} needs 1 <= k < n = {n}"
            )));
        }
    }
    let mut sums = vec![0.0; ks.len()];
    for i in 0..n {
        let d = neighbor_distances(cloud, i);
        for (s, &k) in sums.iter_mut().zip(ks) {
            *s += d[k - 1];
        }
    }
    Ok(sums.into_iter().map(|s| s / n as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(rows: &[&[f64]]) -> PointCloud {
        PointCloud::from_rows(rows).unwrap()
    }

    #[test]
    fn dist_to_single_point() {
        let a = cloud(&[&[3.0, 4.0]]);
        assert_eq!(dist_to_set(&[0.0, 0.0], &a).unwrap(), 5.0);
    }

    #[test]
    fn dist_to_member_is_zero() {
        let a = cloud(&[&[1.0, 2.0], &[-3.0, 0.5]]);
        assert_eq!(dist_to_set(&[-3.0, 0.5], &a).unwrap(), 0.0);
    }

    #[test]
    fn dist_picks_nearest() {
        let a = cloud(&[&[0.0, 0.0], &[3.0, 0.0]]);
        assert_eq!(dist_to_set(&[1.0, 0.0], &a).unwrap(), 1.0);
    }

    #[test]
    fn dist_to_empty_set_errors() {
        let empty = PointCloud::new(2, vec![]).unwrap();
        assert!(matches!(dist_to_set(&[0.0, 0.0], &empty), Err(Error::EmptySet)));
    }

    #[test]
    fn hausdorff_examples() {
        let a = cloud(&[&[0.0, 0.0], &[2.0, 0.0]]);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        let p = cloud(&[&[0.0, 0.0]]);
        let q = cloud(&[&[0.0, 3.0]]);
        assert_eq!(hausdorff(&p, &q).unwrap(), 3.0);
        let mid = cloud(&[&[1.0, 0.0]]);
        assert_eq!(hausdorff(&a, &mid).unwrap(), 1.0);
    }

    #[test]
    fn hausdorff_rejects_empty() {
        let empty = PointCloud::new(2, vec![]).unwrap();
        let a = cloud(&[&[0.0, 0.0]]);
        assert!(hausdorff(&a, &empty).is_err());
    }

    #[test]
    fn knn_collinear() {
        let c = cloud(&[&[0.0], &[1.0], &[2.0]]);
        assert_eq!(mean_knn_distance(&c, 1).unwrap(), 1.0);
    }

    #[test]
    fn knn_duplicates_are_zero() {
        let c = cloud(&[&[0.0, 1.0], &[0.0, 1.0], &[5.0, 2.0], &[5.0, 2.0]]);
        assert_eq!(mean_knn_distance(&c, 1).unwrap(), 0.0);
    }

    #[test]
    fn knn_k_too_large() {
        let c = cloud(&[&[0.0], &[1.0]]);
        assert!(mean_knn_distance(&c, 2).is_err());
    }

    #[test]
    fn csv_drops_label_column() {
        let c = PointCloud::parse_csv("# x,y,label\n1.0,2.0,1\n3.5,-1,0\n").unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.point(1), &[3.5, -1.0]);
        let again = PointCloud::parse_csv(&c.to_csv(Some(&[1, 0]))).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        assert!(PointCloud::parse_csv("1,2\n3\n").is_err());
        assert!(PointCloud::parse_csv("1,x\n").is_err());
    }
}
