//! Delay embeddings of scalar series and the periodicity score.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::filtration::PersistenceDiagram;
use crate::geometry::PointCloud;
use crate::metrics::max_persistence;

/// Uniformly sampled scalar series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    /// Time units per step; carried along, never used in computations.
    pub cadence: f64,
    pub start: f64,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, cadence: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter("a series needs at least 2 values".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("series values must be finite".into()));
        }
        if !(cadence > 0.0 && cadence.is_finite()) {
            return Err(Error::InvalidParameter(format!("cadence must be positive, got {cadence}")));
        }
        Ok(Self { values, cadence, start: 0.0 })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.start + i as f64 * self.cadence)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    /// Parses `time,value` rows; an optional header line is skipped. Times
    /// must increase with a constant step.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 2 {
                return Err(Error::Parse(format!("line {}: expected time,value", lineno + 1)));
            }
            match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
                (Ok(t), Ok(v)) => {
                    times.push(t);
                    values.push(v);
                }
                _ if times.is_empty() && fields[0].eq_ignore_ascii_case("time") => {}
                _ => return Err(Error::Parse(format!("line {}: not numeric", lineno + 1))),
            }
        }
        if times.len() < 2 {
            return Err(Error::Parse("series needs at least 2 rows".into()));
        }
        let cadence = times[1] - times[0];
        if !(cadence > 0.0) {
            return Err(Error::Parse("time must be strictly increasing".into()));
        }
        let tol = 1e-6 * cadence;
        for (i, w) in times.windows(2).enumerate() {
            let step = w[1] - w[0];
            if !(step > 0.0) {
                return Err(Error::Parse("time must be strictly increasing".into()));
            }
            if (step - cadence).abs() > tol {
                return Err(Error::Parse(format!("non-uniform cadence at row {}", i + 2)));
            }
        }
        let mut series = Self::new(values, cadence).map_err(|e| Error::Parse(e.to_string()))?;
        series.start = times[0];
        Ok(series)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,value\n");
        for (t, v) in self.times().zip(&self.values) {
            out.push_str(&format!("{t:?},{v:?}\n"));
        }
        out
    }
}

/// Delay `tau` (steps) and `m + 1` delayed coordinates per row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingConfig {
    pub tau: usize,
    pub m: usize,
}

impl EmbeddingConfig {
    pub fn rows(&self, n: usize) -> Option<usize> {
        n.checked_sub(self.m * self.tau).filter(|&r| r >= 1)
    }
}

/// Rows `(x(t), x(t + tau), ..., x(t + m tau))` for `t = 0..n - m tau`.
pub fn delay_embed(series: &TimeSeries, cfg: EmbeddingConfig) -> Result<PointCloud> {
    if cfg.tau == 0 {
        return Err(Error::InvalidParameter("delay must be at least 1".into()));
    }
    let n = series.len();
    let rows = cfg
        .rows(n)
        .filter(|_| cfg.m * cfg.tau < n)
        .ok_or_else(|| Error::InvalidParameter(format!("embedding span {} exceeds series length {n}", cfg.m * cfg.tau)))?;
    let dim = cfg.m + 1;
    let mut coords = Vec::with_capacity(rows * dim);
    for t in 0..rows {
        coords.extend((0..dim).map(|k| series.values[t + k * cfg.tau]));
    }
    PointCloud::new(dim, coords)
}

/// Default histogram bin count for mutual information.
pub const AMI_BINS: usize = 16;

/// Mutual information profile and the delay picked from it.
#[derive(Debug, Clone, PartialEq)]
pub struct AmiProfile {
    /// `values[i]` is I(i + 1).
    pub values: Vec<f64>,
    pub selected: usize,
    /// False when no interior local minimum exists and the global minimum
    /// was returned instead.
    pub local_minimum: bool,
}

/// Average mutual information between `x(t)` and `x(t + tau)` for
/// `tau = 1..=tau_max`, from an equal-width histogram of the series range.
pub fn ami_profile(series: &TimeSeries, tau_max: usize, bins: usize) -> Result<AmiProfile> {
    let n = series.len();
    if tau_max == 0 || 2 * tau_max >= n {
        return Err(Error::InvalidParameter(format!("tau_max must lie in [1, n/2), got {tau_max} for n = {n}")));
    }
    if bins < 2 {
        return Err(Error::InvalidParameter("need at least 2 bins".into()));
    }
    let (lo, hi) = series.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if !(hi > lo) {
        return Err(Error::DegenerateRange);
    }
    let width = (hi - lo) / bins as f64;
    let labels: Vec<usize> = series
        .values
        .iter()
        .map(|&v| (((v - lo) / width) as usize).min(bins - 1))
        .collect();

    let mut joint = vec![0u32; bins * bins];
    let mut values = Vec::with_capacity(tau_max);
    for tau in 1..=tau_max {
        joint.iter_mut().for_each(|c| *c = 0);
        let pairs = n - tau;
        let mut left = vec![0u32; bins];
        let mut right = vec![0u32; bins];
        for t in 0..pairs {
            let (a, b) = (labels[t], labels[t + tau]);
            joint[a * bins + b] += 1;
            left[a] += 1;
            right[b] += 1;
        }
        let total = pairs as f64;
        let mut info = 0.0;
        for a in 0..bins {
            for b in 0..bins {
                let c = joint[a * bins + b];
                if c > 0 {
                    let p = c as f64 / total;
                    info += p * (p * total * total / (left[a] as f64 * right[b] as f64)).ln();
                }
            }
        }
        values.push(info.max(0.0));
    }

    let interior = (1..values.len().saturating_sub(1)).find(|&i| values[i - 1] > values[i] && values[i] < values[i + 1]);
    let (selected, local_minimum) = match interior {
        Some(i) => (i + 1, true),
        None => {
            let i = (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
            (i + 1, false)
        }
    };
    Ok(AmiProfile { values, selected, local_minimum })
}

/// Default saturation threshold for Cao's E1 statistic.
pub const CAO_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CaoResult {
    /// `e1[i]` is E1(i + 1).
    pub e1: Vec<f64>,
    /// Embedding dimension `M + 1`.
    pub dimension: usize,
    /// False when E1 never settled below the threshold and `d_max` was returned.
    pub saturated: bool,
}

/// Cao's method: E1(d) = E(d + 1) / E(d), where E(d) is the mean L∞
/// expansion ratio of nearest neighbors when going from dimension d to d + 1.
/// Returns the smallest d with |E1(d + 1) - E1(d)| < threshold.
pub fn cao_dimension(series: &TimeSeries, tau: usize, d_max: usize, threshold: f64) -> Result<CaoResult> {
    if tau == 0 || d_max < 2 {
        return Err(Error::InvalidParameter("Cao's method needs tau >= 1 and d_max >= 2".into()));
    }
    let n = series.len();
    // E(d) for d = 1..=d_max + 1 needs rows in dimension d_max + 2
    if (d_max + 1) * tau + 2 > n {
        return Err(Error::InvalidParameter(format!("series of length {n} too short for d_max = {d_max}, tau = {tau}")));
    }
    let x = &series.values;
    let mut e = Vec::with_capacity(d_max + 1);
    for d in 1..=d_max + 1 {
        e.push(mean_expansion(x, tau, d)?);
    }
    let e1: Vec<f64> = e.windows(2).map(|w| w[1] / w[0]).collect();
    let found = (0..e1.len() - 1).find(|&i| (e1[i + 1] - e1[i]).abs() < threshold);
    Ok(match found {
        Some(i) => CaoResult { e1, dimension: i + 1, saturated: true },
        None => CaoResult { e1, dimension: d_max, saturated: false },
    })
}

fn mean_expansion(x: &[f64], tau: usize, d: usize) -> Result<f64> {
    let rows = x.len() - d * tau;
    let coord = |i: usize, k: usize| x[i + k * tau];
    let mut sum = 0.0;
    let mut used = 0usize;
    for i in 0..rows {
        let mut best = (f64::INFINITY, usize::MAX);
        for j in 0..rows {
            if j == i {
                continue;
            }
            let dist = (0..d).map(|k| (coord(i, k) - coord(j, k)).abs()).fold(0.0, f64::max);
            // exact duplicates carry no expansion information
            if dist > 0.0 && dist < best.0 {
                best = (dist, j);
            }
        }
        if best.1 == usize::MAX {
            continue;
        }
        let j = best.1;
        let next = best.0.max((coord(i, d) - coord(j, d)).abs());
        sum += next / best.0;
        used += 1;
    }
    if used == 0 {
        return Err(Error::Degenerate("all embedded rows are identical".into()));
    }
    Ok(sum / used as f64)
}

/// Principal component projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub projected: PointCloud,
    /// Explained variance fraction of every component, descending.
    pub explained: Vec<f64>,
    /// Loadings of the kept components, one row per component.
    pub components: Vec<Vec<f64>>,
}

/// Standardizes columns (zero-variance columns are only centered) and
/// projects onto the leading `ncomp` principal axes.
pub fn pca_project(cloud: &PointCloud, ncomp: usize) -> Result<Pca> {
    pca_with(cloud, ncomp, true)
}

/// PCA on centered but unscaled columns.
pub fn pca_project_centered(cloud: &PointCloud, ncomp: usize) -> Result<Pca> {
    pca_with(cloud, ncomp, false)
}

fn pca_with(cloud: &PointCloud, ncomp: usize, standardize: bool) -> Result<Pca> {
    let (n, d) = (cloud.len(), cloud.dim());
    if n < 2 {
        return Err(Error::InvalidParameter("PCA needs at least 2 points".into()));
    }
    if ncomp == 0 || ncomp > d {
        return Err(Error::InvalidParameter(format!("ncomp must lie in 1..={d}, got {ncomp}")));
    }
    let mut data = DMatrix::from_row_slice(n, d, cloud.coords());
    for k in 0..d {
        let mut col = data.column_mut(k);
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        if standardize {
            let sd = (col.norm_squared() / (n - 1) as f64).sqrt();
            if sd > 0.0 {
                col /= sd;
            }
        }
    }
    let cov = data.transpose() * &data / (n - 1) as f64;
    let eigen = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]).then(a.cmp(&b)));
    let total: f64 = eigen.eigenvalues.iter().map(|v| v.max(0.0)).sum();
    let explained = order
        .iter()
        .map(|&i| if total > 0.0 { eigen.eigenvalues[i].max(0.0) / total } else { 0.0 })
        .collect();

    let mut components = Vec::with_capacity(ncomp);
    for &i in order.iter().take(ncomp) {
        let mut v: Vec<f64> = eigen.eigenvectors.column(i).iter().copied().collect();
        let lead = (0..d).fold(0, |best, k| if v[k].abs() > v[best].abs() { k } else { best });
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components.push(v);
    }
    let mut coords = Vec::with_capacity(n * ncomp);
    for r in 0..n {
        let row = data.row(r);
        for c in &components {
            coords.push(row.iter().zip(c).map(|(a, b)| a * b).sum());
        }
    }
    Ok(Pca { projected: PointCloud::new(ncomp, coords)?, explained, components })
}

/// Maximal H1 persistence, divided by √3 when `normalized`.
pub fn periodicity_score(d: &PersistenceDiagram, normalized: bool) -> f64 {
    let mp = max_persistence(d, 1);
    if normalized {
        mp / 3f64.sqrt()
    } else {
        mp
    }
}
