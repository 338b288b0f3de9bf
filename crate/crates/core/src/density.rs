//! Gaussian kernel density estimates, the empirical distance-to-measure, and
//! rejection sampling from a thresholded KDE (smooth subsampling).

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::geometry::{squared_euclidean, PointCloud};
use crate::rng::{rng_from_seed, Rng};

/// A Gaussian KDE fitted to a sample.
#[derive(Debug, Clone)]
pub struct KdeModel {
    sample: PointCloud,
    bandwidth: f64,
    inv_two_var: f64,
    // (2π)^(-d/2) σ^(-d) / n
    scale: f64,
    cells: Option<CellIndex>,
}

/// Kernels farther than this many bandwidths contribute less than 1e-16 of
/// their peak and are skipped.
pub const KDE_CUTOFF: f64 = 8.6;

/// Sample points bucketed into cubes of side `KDE_CUTOFF σ`, so that an
/// evaluation only visits the 3^d cubes around the query.
#[derive(Debug, Clone)]
struct CellIndex {
    lower: Vec<f64>,
    inv_side: f64,
    shape: Vec<usize>,
    // cell c holds points[start[c]..start[c + 1]] (coordinates interleaved)
    start: Vec<u32>,
    points: Vec<f64>,
}

impl CellIndex {
    // below this many points, or with a single cell, scanning everything is as fast
    const MIN_POINTS: usize = 64;
    const MAX_CELLS: usize = 1 << 20;

    fn build(sample: &PointCloud, side: f64) -> Option<Self> {
        let d = sample.dim();
        if sample.len() < Self::MIN_POINTS || d > 3 {
            return None;
        }
        let (lower, upper) = sample.bounding_box()?;
        let shape: Vec<usize> = (0..d).map(|k| ((upper[k] - lower[k]) / side).floor() as usize + 1).collect();
        let total = shape.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s))?;
        if !(2..=Self::MAX_CELLS).contains(&total) {
            return None;
        }
        let inv_side = 1.0 / side;
        let cell_of = |p: &[f64]| -> usize {
            (0..d).fold(0, |acc, k| acc * shape[k] + (((p[k] - lower[k]) * inv_side) as usize).min(shape[k] - 1))
        };
        let mut counts = vec![0u32; total + 1];
        let ids: Vec<usize> = sample.points().map(cell_of).collect();
        for &c in &ids {
            counts[c + 1] += 1;
        }
        for c in 0..total {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut points = vec![0.0; sample.coords().len()];
        for (i, &c) in ids.iter().enumerate() {
            let slot = fill[c] as usize;
            points[slot * d..(slot + 1) * d].copy_from_slice(sample.point(i));
            fill[c] += 1;
        }
        Some(Self { lower, inv_side, shape, start: counts, points })
    }

    fn sum(&self, x: &[f64], inv_two_var: f64) -> f64 {
        let d = self.shape.len();
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        for k in 0..d {
            let c = ((x[k] - self.lower[k]) * self.inv_side).floor();
            let last = (self.shape[k] - 1) as f64;
            // neighbors of c, clipped to the grid
            if c + 1.0 < 0.0 || c - 1.0 > last {
                return 0.0;
            }
            lo[k] = (c - 1.0).max(0.0) as usize;
            hi[k] = (c + 1.0).min(last) as usize;
        }
        let mut total = 0.0;
        let mut idx = lo;
        loop {
            let cell = (0..d).fold(0, |acc, k| acc * self.shape[k] + idx[k]);
            let (a, b) = (self.start[cell] as usize, self.start[cell + 1] as usize);
            for p in self.points[a * d..b * d].chunks_exact(d) {
                total += (-squared_euclidean(x, p) * inv_two_var).exp();
            }
            let mut k = d;
            loop {
                if k == 0 {
                    return total;
                }
                k -= 1;
                if idx[k] < hi[k] {
                    idx[k] += 1;
                    break;
                }
                idx[k] = lo[k];
            }
        }
    }
}

impl KdeModel {
    pub fn new(sample: PointCloud, bandwidth: f64) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySet);
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        let d = sample.dim() as f64;
        let n = sample.len() as f64;
        let scale = (2.0 * std::f64::consts::PI).powf(-d / 2.0) * bandwidth.powf(-d) / n;
        let cells = CellIndex::build(&sample, KDE_CUTOFF * bandwidth);
        Ok(Self {
            sample,
            bandwidth,
            inv_two_var: 1.0 / (2.0 * bandwidth * bandwidth),
            scale,
            cells,
        })
    }

    pub fn sample(&self) -> &PointCloud {
        &self.sample
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn dim(&self) -> usize {
        self.sample.dim()
    }

    /// Density at `x`. The caller guarantees `x.len() == self.dim()`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        if let Some(cells) = &self.cells {
            return cells.sum(x, self.inv_two_var) * self.scale;
        }
        self.eval_exact(x)
    }

    /// Density at `x` summing every kernel, however far.
    pub fn eval_exact(&self, x: &[f64]) -> f64 {
        let sum: f64 = self
            .sample
            .points()
            .map(|p| (-squared_euclidean(x, p) * self.inv_two_var).exp())
            .sum();
        sum * self.scale
    }
}

/// Checked density evaluation.
pub fn kde_eval(model: &KdeModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: x.len() });
    }
    Ok(model.eval(x))
}

/// Number of neighbors used by the DTM at mass `m`: `ceil(m n)`.
pub fn dtm_neighbor_count(m: f64, n: usize) -> Result<usize> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::InvalidParameter(format!("DTM mass must lie in (0,1), got {m}")));
    }
    Ok(((m * n as f64).ceil() as usize).clamp(1, n))
}

/// Empirical distance-to-measure: root mean squared distance from `x` to its
/// `ceil(m n)` nearest sample points.
pub fn dtm_eval(cloud: &PointCloud, m: f64, x: &[f64]) -> Result<f64> {
    if cloud.is_empty() {
        return Err(Error::EmptySet);
    }
    if x.len() != cloud.dim() {
        return Err(Error::DimensionMismatch { expected: cloud.dim(), got: x.len() });
    }
    let k = dtm_neighbor_count(m, cloud.len())?;
    let mut scratch = Vec::with_capacity(cloud.len());
    Ok(dtm_with_scratch(cloud, k, x, &mut scratch))
}

pub(crate) fn dtm_with_scratch(cloud: &PointCloud, k: usize, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend(cloud.points().map(|p| squared_euclidean(x, p)));
    if k < scratch.len() {
        scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
    }
    let sum: f64 = scratch[..k].iter().sum();
    (sum / k as f64).sqrt()
}

/// Axis-aligned box from which proposals are drawn uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalRegion {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ProposalRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidParameter("region corners must share a positive dimension".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::InvalidParameter("region needs lower < upper componentwise".into()));
        }
        Ok(Self { lower, upper })
    }

    /// Bounding box of `cloud` padded by `pad` on every side.
    pub fn around(cloud: &PointCloud, pad: f64) -> Result<Self> {
        let (mut lo, mut hi) = cloud.bounding_box().ok_or(Error::EmptySet)?;
        for k in 0..lo.len() {
            lo[k] -= pad;
            hi[k] += pad;
        }
        Self::new(lo, hi)
    }

    /// The default proposal box for bandwidth `sigma`: data box padded by 3σ.
    pub fn for_bandwidth(cloud: &PointCloud, sigma: f64) -> Result<Self> {
        Self::around(cloud, 3.0 * sigma)
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    fn draw(&self, rng: &mut Rng, out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = rng.random_range(self.lower[k]..self.upper[k]);
        }
    }
}

/// Upper bound Γ on the KDE over a proposal region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub gamma: f64,
}

pub const ENVELOPE_SAFETY: f64 = 1.1;

/// Default probe (and filtration grid) resolution per axis for dimension `d`.
pub fn default_resolution(d: usize) -> usize {
    match d {
        0..=2 => 64,
        3 => 32,
        _ => ((50_000f64).powf(1.0 / d as f64).floor() as usize).max(2),
    }
}

/// Γ = 1.1 × the largest density seen on a `probe_resolution`^d grid over
/// the region and at every sample point.
pub fn estimate_envelope(model: &KdeModel, region: &ProposalRegion, probe_resolution: usize) -> Result<Envelope> {
    if region.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: region.dim() });
    }
    if probe_resolution == 0 {
        return Err(Error::InvalidParameter("probe resolution must be positive".into()));
    }
    if let Some(i) = (0..model.sample().len()).find(|&i| !region.contains(model.sample().point(i))) {
        return Err(Error::InvalidParameter(format!("proposal region excludes sample point {i}")));
    }
    let mut best = model.sample().points().map(|p| model.eval(p)).fold(0.0, f64::max);
    let d = model.dim();
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|k| linspace(region.lower[k], region.upper[k], probe_resolution))
        .collect();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    loop {
        for k in 0..d {
            x[k] = axes[k][idx[k]];
        }
        best = best.max(model.eval(&x));
        // odometer increment
        let mut k = 0;
        loop {
            if k == d {
                return Ok(Envelope { gamma: ENVELOPE_SAFETY * best });
            }
            idx[k] += 1;
            if idx[k] < probe_resolution {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
}

/// Proposals tolerated without a single acceptance before giving up.
pub const STALL_WINDOW: u64 = 1_000_000;

/// A fitted KDE with its proposal box and envelope, ready to draw from.
#[derive(Debug, Clone)]
pub struct Subsampler {
    model: KdeModel,
    region: ProposalRegion,
    envelope: Envelope,
}

impl Subsampler {
    pub fn new(model: KdeModel, region: ProposalRegion) -> Result<Self> {
        let res = default_resolution(model.dim());
        let envelope = estimate_envelope(&model, &region, res)?;
        Ok(Self { model, region, envelope })
    }

    pub fn model(&self) -> &KdeModel {
        &self.model
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    pub fn region(&self) -> &ProposalRegion {
        &self.region
    }

    /// Draws `count` points from the KDE restricted to `{f >= level}`.
    pub fn draw(&self, level: f64, count: usize, rng: &mut Rng) -> Result<PointCloud> {
        if !(level >= 0.0) {
            return Err(Error::InvalidParameter(format!("threshold must be nonnegative, got {level}")));
        }
        if count == 0 {
            return Err(Error::InvalidParameter("subsample size must be positive".into()));
        }
        let gamma = self.envelope.gamma;
        if level >= gamma {
            return Err(Error::ThresholdUnreachable);
        }
        let d = self.model.dim();
        let mut out = Vec::with_capacity(count * d);
        let mut x = vec![0.0; d];
        let mut stalled = 0u64;
        while out.len() < count * d {
            self.region.draw(rng, &mut x);
            let u = rng.random_range(0.0..gamma);
            let f = self.model.eval(&x);
            if f > gamma {
                return Err(Error::EnvelopeViolation { value: f, envelope: gamma });
            }
            if u <= f && f >= level {
                out.extend_from_slice(&x);
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_WINDOW {
                    return Err(Error::ThresholdUnreachable);
                }
            }
        }
        PointCloud::new(d, out)
    }
}

/// Smooth subsampling: `count` rejection samples from the KDE of `cloud`
/// (bandwidth `sigma`) restricted to the level set `{f >= level}`.
pub fn smooth_subsample(
    cloud: &PointCloud,
    level: f64,
    sigma: f64,
    count: usize,
    seed: u64,
    region: &ProposalRegion,
) -> Result<PointCloud> {
    let sampler = Subsampler::new(KdeModel::new(cloud.clone(), sigma)?, region.clone())?;
    sampler.draw(level, count, &mut rng_from_seed(seed))
}
