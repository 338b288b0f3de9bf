//! Reference experiment presets for `maxtda reproduce`.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use super::{kv_lines, pretty, usage, CliResult, Session};
use crate::datagen::{gen_ellipses3d, gen_rv_series, gen_two_circles, RvConfig, RvSignal};
use crate::geometry::{mean_knn_distances, PointCloud};
use crate::inference::{
    bootstrap_talpha, classify_features, level_quantiles, select_parameters, BootstrapConfig, BootstrapResult,
    ParameterGrid, SubsampleSpec,
};
use crate::metrics::max_persistence;
use crate::pipeline::Pipeline;
use crate::plot::diagram_svg;
use crate::rng::derive_seed;
use crate::timeseries::{ami_profile, cao_dimension, delay_embed, pca_project, periodicity_score, EmbeddingConfig, AMI_BINS, CAO_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Two noisy circles in clutter, KDE pipeline.
    Annulus,
    /// Four ellipses of unequal density in 3-D, KDE pipeline.
    Ellipses,
    /// Radial-velocity periodicity via delay embeddings and Rips.
    Rv,
}

#[derive(Args, Debug, Serialize)]
pub(super) struct ReproduceArgs {
    preset: Preset,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Artifact directory (default: `reproduce-<preset>`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Bootstrap replicates (default: 200 for annulus, 100 otherwise).
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Grid nodes per axis (default: 64 for annulus, 24 for ellipses).
    #[arg(long)]
    grid_res: Option<usize>,
    /// Diagram KDE bandwidth for annulus (default 0.1); ellipses use the selected σ.
    #[arg(long)]
    bandwidth: Option<f64>,
}

/// Seed indices of the preset stages.
const SELECT: u64 = 1;
const BAND_RAW: u64 = 2;
const BAND_SMOOTH: u64 = 3;

pub(super) fn run(a: &ReproduceArgs, s: &mut Session) -> CliResult<()> {
    super::positive("scale", a.scale)?;
    super::check_alpha(a.alpha)?;
    if a.n == Some(0) {
        return Err(usage("--N must be at least 1"));
    }
    let dir = a.out_dir.clone().unwrap_or_else(|| PathBuf::from(format!("reproduce-{}", name(a.preset))));
    std::fs::create_dir_all(&dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    s.manifest_path = Some(dir.join("manifest.json"));
    match a.preset {
        Preset::Annulus => annulus(a, &dir, s),
        Preset::Ellipses => ellipses(a, &dir, s),
        Preset::Rv => rv(a, &dir, s),
    }
}

fn name(p: Preset) -> &'static str {
    match p {
        Preset::Annulus => "annulus",
        Preset::Ellipses => "ellipses",
        Preset::Rv => "rv",
    }
}

/// Bootstraps one pipeline and writes its diagram, band and figure.
fn assess(s: &mut Session, dir: &Path, tag: &str, cloud: &PointCloud, cfg: &BootstrapConfig) -> CliResult<BootstrapResult> {
    let result = bootstrap_talpha(cloud, cfg)?;
    let class = classify_features(&result.reference, &result.band);
    s.write(&dir.join(format!("diagram_{tag}.json")), &format!("{}\n", result.reference.to_json()))?;
    s.write(&dir.join(format!("band_{tag}.json")), &format!("{}\n", result.to_json()))?;
    s.write(&dir.join(format!("diagram_{tag}.svg")), &diagram_svg(&result.reference, Some(&result.band)))?;
    s.note(
        tag,
        json!({
            "max_persistence": max_persistence(&result.reference, cfg.dim),
            "t_alpha": result.band.t_alpha,
            "significant": class.significant.len(),
            "failed_replicates": result.failed,
        }),
    );
    Ok(result)
}

/// Raw and smoothed bootstraps for a selected (λ, σ).
#[allow(clippy::too_many_arguments)]
fn raw_and_smoothed(
    a: &ArgsView,
    s: &mut Session,
    dir: &Path,
    cloud: &PointCloud,
    raw: Pipeline,
    smooth: Pipeline,
    lambda: f64,
    sigma: f64,
) -> CliResult<BootstrapResult> {
    let base = BootstrapConfig { pipeline: raw, subsample: None, dim: 1, replicates: a.n, alpha: a.alpha, seed: derive_seed(a.seed, BAND_RAW) };
    let r = assess(s, dir, "raw", cloud, &base)?;
    let cfg = BootstrapConfig {
        pipeline: smooth,
        subsample: Some(SubsampleSpec { lambda, sigma, count: cloud.len() }),
        seed: derive_seed(a.seed, BAND_SMOOTH),
        ..base
    };
    let m = assess(s, dir, "subsample", cloud, &cfg)?;
    s.write(&dir.join("subsample.csv"), &m.reference_cloud.to_csv(None))?;
    print!(
        "{}",
        kv_lines(&[
            ("mp_raw", max_persistence(&r.reference, 1)),
            ("t_alpha_raw", r.band.t_alpha),
            ("mp_subsample", max_persistence(&m.reference, 1)),
            ("t_alpha_subsample", m.band.t_alpha),
        ])
    );
    Ok(m)
}

struct ArgsView {
    seed: u64,
    n: usize,
    alpha: f64,
}

fn annulus(a: &ReproduceArgs, dir: &Path, s: &mut Session) -> CliResult<()> {
    let view = ArgsView { seed: s.seed, n: a.n.unwrap_or(200), alpha: a.alpha };
    let data = gen_two_circles(s.seed, a.scale)?;
    s.write(&dir.join("data.csv"), &data.to_csv())?;
    let cloud = data.cloud;
    let pipeline = Pipeline::Kde { bandwidth: Some(a.bandwidth.unwrap_or(0.1)), grid_res: Some(a.grid_res.unwrap_or(64)) };
    let grid = ParameterGrid::from_knn(&cloud, vec![0.2, 0.4, 0.6, 0.8, 1.0, 1.2], &[2, 5, 10], 1)?;
    let sel = select_parameters(&cloud, &grid, &pipeline, 1, cloud.len(), derive_seed(s.seed, SELECT))?;
    s.write(&dir.join("selection.json"), &pretty(&sel))?;
    raw_and_smoothed(&view, s, dir, &cloud, pipeline, pipeline, sel.lambda, sel.sigma)?;
    Ok(())
}

fn ellipses(a: &ReproduceArgs, dir: &Path, s: &mut Session) -> CliResult<()> {
    let view = ArgsView { seed: s.seed, n: a.n.unwrap_or(100), alpha: a.alpha };
    let data = gen_ellipses3d(s.seed, a.scale)?;
    s.write(&dir.join("data.csv"), &data.to_csv())?;
    let cloud = data.cloud;
    let grid_res = Some(a.grid_res.unwrap_or(24));
    let sigmas = mean_knn_distances(&cloud, &[1, 2, 3])?;
    let lambdas = level_quantiles(&cloud, sigmas[1], &[0.25, 0.5, 0.75])?;
    let smooth = Pipeline::Kde { bandwidth: a.bandwidth, grid_res };
    let grid = ParameterGrid::new(lambdas, sigmas, 1)?;
    let sel = select_parameters(&cloud, &grid, &smooth, 1, cloud.len(), derive_seed(s.seed, SELECT))?;
    s.write(&dir.join("selection.json"), &pretty(&sel))?;
    let raw = Pipeline::Kde { bandwidth: Some(a.bandwidth.unwrap_or(sel.sigma)), grid_res };
    raw_and_smoothed(&view, s, dir, &cloud, raw, smooth, sel.lambda, sel.sigma)?;
    Ok(())
}

/// Delay and dimension used for each series.
const PLANET_EMBED: EmbeddingConfig = EmbeddingConfig { tau: 4, m: 15 };
const SPOT_EMBED: EmbeddingConfig = EmbeddingConfig { tau: 12, m: 7 };

fn rv(a: &ReproduceArgs, dir: &Path, s: &mut Session) -> CliResult<()> {
    let samples = ((400.0 * a.scale).round() as usize).max(2);
    let cfg = RvConfig { cadence: 0.25, samples, noise_sd: 1.0 };
    let view = ArgsView { seed: s.seed, n: a.n.unwrap_or(100), alpha: a.alpha };
    let vr = Pipeline::Vr { delta_max: None };
    let mut scores = Vec::new();
    let mut combined = None;
    for (tag, which, emb) in [
        ("planet", RvSignal::Planet, PLANET_EMBED),
        ("spot", RvSignal::Spot, SPOT_EMBED),
        ("combined", RvSignal::Combined, PLANET_EMBED),
    ] {
        let series = gen_rv_series(s.seed, which, &cfg)?;
        s.write(&dir.join(format!("series_{tag}.csv")), &series.to_csv())?;
        // delay and dimension diagnostics are recorded but the embedding
        // uses the fixed per-signal settings
        let tau_max = 20.min((series.len() - 1) / 2);
        if let Ok(ami) = ami_profile(&series, tau_max, AMI_BINS) {
            s.note(&format!("ami_tau_{tag}"), ami.selected);
        }
        if let Ok(cao) = cao_dimension(&series, emb.tau, 12, CAO_THRESHOLD) {
            s.note(&format!("cao_dim_{tag}"), cao.dimension);
        }
        let cloud = pca_project(&delay_embed(&series, emb)?, 2)?.projected;
        s.write(&dir.join(format!("embedding_{tag}.csv")), &cloud.to_csv(None))?;
        let d = vr.diagram(&cloud, None)?;
        s.write(&dir.join(format!("diagram_{tag}.json")), &format!("{}\n", d.to_json()))?;
        scores.push((format!("score_{tag}"), periodicity_score(&d, false)));
        scores.push((format!("score_{tag}_normalized"), periodicity_score(&d, true)));
        if which == RvSignal::Combined {
            combined = Some(cloud);
        }
    }
    let cloud = combined.expect("combined series is embedded");
    let sigmas = mean_knn_distances(&cloud, &[5, 10, 20])?;
    let lambdas = level_quantiles(&cloud, sigmas[1], &[0.1, 0.25, 0.5])?;
    let grid = ParameterGrid::new(lambdas, sigmas, 1)?;
    let sel = select_parameters(&cloud, &grid, &vr, 1, cloud.len(), derive_seed(s.seed, SELECT))?;
    s.write(&dir.join("selection.json"), &pretty(&sel))?;
    let d = raw_and_smoothed(&view, s, dir, &cloud, vr, vr, sel.lambda, sel.sigma)?.reference;
    scores.push(("score_smoothed".into(), periodicity_score(&d, false)));
    scores.push(("score_smoothed_normalized".into(), periodicity_score(&d, true)));
    let table: serde_json::Map<String, serde_json::Value> = scores.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    s.write(&dir.join("scores.json"), &pretty(&table))?;
    print!("{}", kv_lines(&scores));
    Ok(())
}
