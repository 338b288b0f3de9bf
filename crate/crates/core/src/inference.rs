//! Parameter selection, bootstrap rejection bands, and feature classification.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::density::{KdeModel, ProposalRegion, Subsampler};
use crate::error::{Error, Result};
use crate::filtration::{PersistenceDiagram, PersistencePoint};
use crate::geometry::{mean_knn_distances, PointCloud};
use crate::metrics::bottleneck;
use crate::pipeline::Pipeline;
use crate::rng::stream;

/// Candidate thresholds and bandwidths scored by the weighted sum of the
/// `top` largest lifetimes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterGrid {
    pub lambdas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub top: usize,
    pub weights: Vec<f64>,
}

impl ParameterGrid {
    /// Unit weights.
    pub fn new(lambdas: Vec<f64>, sigmas: Vec<f64>, top: usize) -> Result<Self> {
        Self::with_weights(lambdas, sigmas, vec![1.0; top])
    }

    pub fn with_weights(lambdas: Vec<f64>, sigmas: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let grid = Self { lambdas, sigmas, top: weights.len(), weights };
        grid.validate()?;
        Ok(grid)
    }

    /// Bandwidth candidates taken as mean k-NN distances for each `k`.
    pub fn from_knn(cloud: &PointCloud, lambdas: Vec<f64>, ks: &[usize], top: usize) -> Result<Self> {
        Self::new(lambdas, mean_knn_distances(cloud, ks)?, top)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.sigmas.is_empty() {
            return Err(Error::InvalidParameter("parameter grid needs at least one λ and one σ".into()));
        }
        if self.top == 0 || self.weights.len() != self.top {
            return Err(Error::InvalidParameter("feature count T must be positive with T weights".into()));
        }
        if self.lambdas.iter().any(|l| !(*l >= 0.0)) || self.sigmas.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::InvalidParameter("λ must be nonnegative and σ positive".into()));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Weighted sum of the `weights.len()` largest lifetimes, zero-padded.
pub fn cumulative_persistence(lifetimes_desc: &[f64], weights: &[f64]) -> f64 {
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * lifetimes_desc.get(i).copied().unwrap_or(0.0))
        .sum()
}

/// One scored grid cell. `score` is `None` when subsampling failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScore {
    pub lambda: f64,
    pub sigma: f64,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub lambda: f64,
    pub sigma: f64,
    pub score: f64,
    pub table: Vec<GridScore>,
}

/// Grid search for the (λ, σ) maximizing cumulative persistence of the
/// subsample's diagram. Ties go to the smaller λ, then the smaller σ.
pub fn select_parameters(
    cloud: &PointCloud,
    grid: &ParameterGrid,
    pipeline: &Pipeline,
    dim: usize,
    count: usize,
    seed: u64,
) -> Result<Selection> {
    grid.validate()?;
    let mut lambdas = grid.lambdas.clone();
    let mut sigmas = grid.sigmas.clone();
    lambdas.sort_by(f64::total_cmp);
    sigmas.sort_by(f64::total_cmp);

    let samplers: Vec<Subsampler> = sigmas
        .par_iter()
        .map(|&s| Subsampler::new(KdeModel::new(cloud.clone(), s)?, ProposalRegion::for_bandwidth(cloud, s)?))
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize)> = (0..lambdas.len())
        .flat_map(|i| (0..sigmas.len()).map(move |j| (i, j)))
        .collect();
    let table: Vec<GridScore> = cells
        .par_iter()
        .enumerate()
        .map(|(cell, &(i, j))| {
            let (lambda, sigma) = (lambdas[i], sigmas[j]);
            let mut rng = stream(seed, cell as u64);
            let score = match samplers[j].draw(lambda, count, &mut rng) {
                Ok(sub) => {
                    let d = pipeline.diagram(&sub, Some(sigma))?;
                    Some(cumulative_persistence(&d.lifetimes(dim), &grid.weights))
                }
                Err(Error::ThresholdUnreachable) => None,
                Err(e) => return Err(e),
            };
            Ok(GridScore { lambda, sigma, score })
        })
        .collect::<Result<_>>()?;

    let mut best: Option<&GridScore> = None;
    for cell in &table {
        if let Some(s) = cell.score {
            if best.is_none_or(|b| s > b.score.unwrap()) {
                best = Some(cell);
            }
        }
    }
    let best = best.ok_or(Error::ThresholdUnreachable)?;
    Ok(Selection { lambda: best.lambda, sigma: best.sigma, score: best.score.unwrap(), table: table.clone() })
}

/// Quantiles `qs` of the KDE (bandwidth `sigma`) evaluated at the data
/// points, nearest-rank. A data-driven set of λ candidates.
pub fn level_quantiles(cloud: &PointCloud, sigma: f64, qs: &[f64]) -> Result<Vec<f64>> {
    let model = KdeModel::new(cloud.clone(), sigma)?;
    let mut values: Vec<f64> = cloud.points().map(|p| model.eval(p)).collect();
    values.sort_by(f64::total_cmp);
    let last = values.len() - 1;
    qs.iter()
        .map(|&q| {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidParameter(format!("quantile must lie in [0,1], got {q}")));
            }
            Ok(values[(q * last as f64).round() as usize])
        })
        .collect()
}

/// Number of leading features before the largest ratio drop between
/// consecutive lifetimes; `None` with fewer than two positive lifetimes.
pub fn adaptive_top(lifetimes_desc: &[f64]) -> Option<usize> {
    let positive: Vec<f64> = lifetimes_desc.iter().copied().filter(|l| *l > 0.0).collect();
    if positive.len() < 2 {
        return None;
    }
    let mut best = (0usize, 0.0f64);
    for i in 0..positive.len() - 1 {
        let ratio = positive[i] / positive[i + 1];
        if ratio > best.1 {
            best = (i + 1, ratio);
        }
    }
    Some(best.0)
}

/// Smooth subsampling settings used inside the bootstrap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsampleSpec {
    pub lambda: f64,
    pub sigma: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub pipeline: Pipeline,
    /// `None` builds diagrams from the (resampled) data directly.
    pub subsample: Option<SubsampleSpec>,
    pub dim: usize,
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapRecord {
    pub index: usize,
    pub value: f64,
}

/// Half-width `t_alpha` of the diagonal rejection band `{d - b <= 2 t_alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RejectionBand {
    pub alpha: f64,
    pub t_alpha: f64,
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult {
    pub band: RejectionBand,
    pub records: Vec<BootstrapRecord>,
    pub reference: PersistenceDiagram,
    /// The cloud (subsample or data) behind `reference`.
    pub reference_cloud: PointCloud,
    pub failed: usize,
}

impl BootstrapResult {
    pub fn to_json_value(&self) -> Value {
        band_json(&self.band, &self.records)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("band serializes")
    }
}

pub fn band_json(band: &RejectionBand, records: &[BootstrapRecord]) -> Value {
    json!({
        "alpha": band.alpha,
        "t_alpha": band.t_alpha,
        "dim": band.dim,
        "N": band.n,
        "records": records.iter().map(|r| r.value).collect::<Vec<_>>(),
    })
}

/// Reads the band part of a band JSON file.
pub fn parse_band(text: &str) -> Result<RejectionBand> {
    let v: Value = serde_json::from_str(text)?;
    let num = |k: &str| v.get(k).and_then(Value::as_f64).ok_or_else(|| Error::Parse(format!("band field {k:?} missing")));
    let int = |k: &str| v.get(k).and_then(Value::as_u64).ok_or_else(|| Error::Parse(format!("band field {k:?} missing")));
    let band = RejectionBand { alpha: num("alpha")?, t_alpha: num("t_alpha")?, dim: int("dim")? as usize, n: int("N")? as usize };
    if !(band.t_alpha >= 0.0) {
        return Err(Error::Parse("t_alpha must be nonnegative".into()));
    }
    Ok(band)
}

/// Higher order statistic `ceil((1 - alpha) n)` of `values`.
pub fn upper_quantile(values: &[f64], alpha: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0,1), got {alpha}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // the slack keeps exact products such as 0.95 * 100 from rounding up
    let rank = (((1.0 - alpha) * n as f64) - 1e-9).ceil() as usize;
    Ok(sorted[rank.clamp(1, n) - 1])
}

/// Largest failure share tolerated among bootstrap replicates.
pub const MAX_FAILURE_RATE: f64 = 0.05;

/// Bootstrap estimate of the `1 - alpha` quantile of the bottleneck distance
/// between replicate diagrams and the reference diagram of `cloud`.
///
/// Replicate `b` (1-based) draws its resample and subsample from stream `b`
/// of the run seed; the reference uses stream 0. Function pipelines
/// evaluate every replicate on the reference grid box.
pub fn bootstrap_talpha(cloud: &PointCloud, cfg: &BootstrapConfig) -> Result<BootstrapResult> {
    if cloud.is_empty() {
        return Err(Error::EmptySet);
    }
    if cfg.replicates == 0 {
        return Err(Error::InvalidParameter("bootstrap needs at least one replicate".into()));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0,1), got {}", cfg.alpha)));
    }
    let sigma = cfg.subsample.map(|s| s.sigma);
    let build = |data: &PointCloud, rng: &mut crate::rng::Rng| -> Result<PointCloud> {
        match cfg.subsample {
            None => Ok(data.clone()),
            Some(s) => {
                let sampler = Subsampler::new(KdeModel::new(data.clone(), s.sigma)?, ProposalRegion::for_bandwidth(data, s.sigma)?)?;
                sampler.draw(s.lambda, s.count, rng)
            }
        }
    };

    let reference_cloud = build(cloud, &mut stream(cfg.seed, 0))?;
    let grid_box = cfg.pipeline.grid_box(&reference_cloud, sigma)?;
    let reference = cfg.pipeline.diagram_in(&reference_cloud, sigma, grid_box.as_ref())?;

    let n = cloud.len();
    let outcomes: Vec<Result<f64>> = (1..=cfg.replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(cfg.seed, b as u64);
            let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let resample = cloud.select(&indices);
            let data = build(&resample, &mut rng)?;
            let region = match &grid_box {
                Some(r) => Some(enclose(r, &data)?),
                None => None,
            };
            let d = cfg.pipeline.diagram_in(&data, sigma, region.as_ref())?;
            bottleneck(&d, &reference, cfg.dim)
        })
        .collect();

    let mut records = Vec::with_capacity(cfg.replicates);
    let mut failed = 0;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(value) => records.push(BootstrapRecord { index: i + 1, value }),
            Err(Error::ThresholdUnreachable | Error::IncomparableEssential) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    if failed as f64 > MAX_FAILURE_RATE * cfg.replicates as f64 || records.is_empty() {
        return Err(Error::TooManyFailures { failed, total: cfg.replicates });
    }
    let values: Vec<f64> = records.iter().map(|r| r.value).collect();
    let t_alpha = upper_quantile(&values, cfg.alpha)?;
    Ok(BootstrapResult {
        band: RejectionBand { alpha: cfg.alpha, t_alpha, dim: cfg.dim, n: cfg.replicates },
        records,
        reference,
        reference_cloud,
        failed,
    })
}

/// The reference grid box, grown if needed so it still contains `data`.
fn enclose(region: &ProposalRegion, data: &PointCloud) -> Result<ProposalRegion> {
    let (lo, hi) = data.bounding_box().ok_or(Error::EmptySet)?;
    if region.contains(&lo) && region.contains(&hi) {
        return Ok(region.clone());
    }
    let lower = region.lower().iter().zip(&lo).map(|(a, b)| a.min(*b)).collect();
    let upper = region.upper().iter().zip(&hi).map(|(a, b)| a.max(*b)).collect();
    ProposalRegion::new(lower, upper)
}

/// Points of `band.dim` split by the band. Essential points are kept apart:
/// they have no finite lifetime to compare.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Classification {
    pub significant: Vec<PersistencePoint>,
    pub rejected: Vec<PersistencePoint>,
    pub essential: Vec<PersistencePoint>,
}

pub fn classify_features(d: &PersistenceDiagram, band: &RejectionBand) -> Classification {
    let mut out = Classification::default();
    for p in d.points.iter().filter(|p| p.dim == band.dim) {
        if p.is_essential() {
            out.essential.push(*p);
        } else if p.persistence() > 2.0 * band.t_alpha {
            out.significant.push(*p);
        } else {
            out.rejected.push(*p);
        }
    }
    out
}
