//! Acceptance criteria. Each test prints one PASS/FAIL line straight to
//! stdout (bypassing the harness capture) and then asserts.

use std::io::Write;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use maxtda::datagen::{circles, gen_rv_series, gen_two_circles, RvConfig, RvSignal};
use maxtda::density::{KdeModel, ProposalRegion, Subsampler};
use maxtda::filtration::vr_persistence;
use maxtda::geometry::{euclidean, hausdorff, mean_knn_distance, mean_knn_distances};
use maxtda::inference::{bootstrap_talpha, classify_features, level_quantiles, select_parameters, BootstrapConfig, ParameterGrid};
use maxtda::metrics::{bottleneck, bottleneck_points, bottleneck_to_diagonal, max_persistence};
use maxtda::pipeline::Pipeline;
use maxtda::rng::stream;
use maxtda::timeseries::{delay_embed, pca_project, periodicity_score, EmbeddingConfig, TimeSeries};
use maxtda::{PersistenceDiagram, PersistencePoint, PointCloud, Scale};

fn report(n: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {n:>2} [{verdict}] {name}: {detail}");
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn random_points(rng: &mut impl Rng, max: usize, dim: usize) -> Vec<PersistencePoint> {
    let k = rng.random_range(0..=max);
    (0..k)
        .map(|_| {
            let a: f64 = rng.random_range(0.0..10.0);
            let b: f64 = rng.random_range(0.0..10.0);
            PersistencePoint::new(dim, a.min(b), a.max(b))
        })
        .collect()
}

/// Minimum over all partial injections left -> right of the largest cost,
/// unmatched points going to the diagonal.
fn brute_force_bottleneck(left: &[PersistencePoint], right: &[PersistencePoint]) -> f64 {
    fn diag(p: &PersistencePoint) -> f64 {
        (p.death - p.birth) / 2.0
    }
    fn linf(a: &PersistencePoint, b: &PersistencePoint) -> f64 {
        (a.birth - b.birth).abs().max((a.death - b.death).abs())
    }
    fn go(i: usize, left: &[PersistencePoint], right: &[PersistencePoint], used: &mut Vec<bool>, cost: f64, best: &mut f64) {
        if cost >= *best {
            return;
        }
        if i == left.len() {
            let rest = right.iter().zip(used.iter()).filter(|(_, u)| !**u).map(|(q, _)| diag(q)).fold(cost, f64::max);
            *best = best.min(rest);
            return;
        }
        go(i + 1, left, right, used, cost.max(diag(&left[i])), best);
        for j in 0..right.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, left, right, used, cost.max(linf(&left[i], &right[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, left, right, &mut vec![false; right.len()], 0.0, &mut best);
    best
}

#[test]
fn criterion_01_bottleneck_oracle() {
    let start = Instant::now();
    let mut rng = stream(101, 0);
    let mut mismatches = 0;
    for _ in 0..200 {
        let a = random_points(&mut rng, 5, 1);
        let b = random_points(&mut rng, 5, 1);
        if bottleneck_points(&a, &b) != brute_force_bottleneck(&a, &b) {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = mismatches == 0 && secs < 10.0;
    report(1, "bottleneck oracle", pass, &format!("{mismatches} mismatches in 200 pairs, {secs:.2} s"));
    assert!(pass);
}

/// Prim's algorithm on the complete Euclidean graph.
fn mst_edges(cloud: &PointCloud) -> Vec<f64> {
    let n = cloud.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut edges = Vec::new();
    for _ in 0..n {
        let u = (0..n).filter(|&i| !in_tree[i]).min_by(|&i, &j| best[i].total_cmp(&best[j])).unwrap();
        in_tree[u] = true;
        if u != 0 {
            edges.push(best[u]);
        }
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(euclidean(cloud.point(u), cloud.point(v)));
            }
        }
    }
    edges.sort_by(f64::total_cmp);
    edges
}

#[test]
fn criterion_02_h0_equals_mst() {
    let mut rng = stream(102, 0);
    let mut worst = 0.0f64;
    let mut count_errors = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=40);
        let coords: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cloud = PointCloud::new(2, coords).unwrap();
        let d = vr_persistence(&cloud, None, 1).unwrap();
        let mut deaths: Vec<f64> = d.finite(0).map(|p| p.death).collect();
        deaths.sort_by(f64::total_cmp);
        let mst = mst_edges(&cloud);
        if deaths.len() != mst.len() {
            count_errors += 1;
            continue;
        }
        for (a, b) in deaths.iter().zip(&mst) {
            worst = worst.max((a - b).abs());
        }
    }
    let pass = count_errors == 0 && worst <= 1e-9;
    report(2, "H0 deaths equal MST edges", pass, &format!("{count_errors} count mismatches, max error {worst:e}"));
    assert!(pass);
}

#[test]
fn criterion_03_unit_square() {
    let square = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    let d = vr_persistence(&square, None, 1).unwrap();
    let h1: Vec<&PersistencePoint> = d.points.iter().filter(|p| p.dim == 1).collect();
    let pass = h1.len() == 1 && (h1[0].birth - 1.0).abs() <= 1e-12 && (h1[0].death - 2f64.sqrt()).abs() <= 1e-12;
    report(3, "unit square Rips", pass, &format!("H1 = {:?}", h1.iter().map(|p| (p.birth, p.death)).collect::<Vec<_>>()));
    assert!(pass);
}

#[test]
fn criterion_04_stability() {
    let mut rng = stream(104, 0);
    let mut violations = 0;
    let mut worst_ratio = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(5..=30);
        let eps: f64 = rng.random_range(0.001..0.2);
        let x: Vec<[f64; 2]> = (0..n).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let y: Vec<[f64; 2]> = x
            .iter()
            .map(|p| {
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                let r = eps * rng.random_range(0.0..1.0f64);
                [p[0] + r * t.cos(), p[1] + r * t.sin()]
            })
            .collect();
        let (cx, cy) = (PointCloud::from_rows(&x).unwrap(), PointCloud::from_rows(&y).unwrap());
        let dh = hausdorff(&cx, &cy).unwrap();
        let (dx, dy) = (vr_persistence(&cx, None, 1).unwrap(), vr_persistence(&cy, None, 1).unwrap());
        for dim in 0..=1 {
            let db = bottleneck(&dx, &dy, dim).unwrap();
            if db > 2.0 * dh + 1e-9 {
                violations += 1;
            }
            if dh > 0.0 {
                worst_ratio = worst_ratio.max(db / dh);
            }
        }
    }
    let pass = violations == 0;
    report(4, "stability d_B <= 2 d_H", pass, &format!("{violations} violations, max d_B/d_H {worst_ratio:.3}"));
    assert!(pass);
}

fn random_diagram(rng: &mut impl Rng) -> PersistenceDiagram {
    PersistenceDiagram::new(random_points(rng, 8, 1), Scale::Distance)
}

#[test]
fn criterion_05_lemma_identities() {
    let mut rng = stream(105, 0);
    let mut worst_identity = 0.0f64;
    let mut violations = 0;
    for _ in 0..500 {
        let d = random_diagram(&mut rng);
        worst_identity = worst_identity.max((max_persistence(&d, 1) - 2.0 * bottleneck_to_diagonal(&d, 1)).abs());
    }
    for _ in 0..500 {
        let (a, b) = (random_diagram(&mut rng), random_diagram(&mut rng));
        let gap = (max_persistence(&a, 1) - max_persistence(&b, 1)).abs();
        if gap > 2.0 * bottleneck(&a, &b, 1).unwrap() + 1e-12 {
            violations += 1;
        }
    }
    let pass = worst_identity <= 1e-12 && violations == 0;
    report(5, "mp = 2 d_B(D, diagonal); |mp1 - mp2| <= 2 d_B", pass, &format!("identity error {worst_identity:e}, {violations} inequality violations"));
    assert!(pass);
}

#[test]
fn criterion_06_sampler() {
    let start = Instant::now();
    let mut rng = stream(106, 0);
    let (left, right) = (Normal::new(-1.0, 0.3).unwrap(), Normal::new(1.0, 0.5).unwrap());
    let data: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { left.sample(&mut rng) } else { right.sample(&mut rng) }).collect();
    let cloud = PointCloud::new(1, data).unwrap();
    let sigma = 0.2;
    let model = KdeModel::new(cloud.clone(), sigma).unwrap();
    let region = ProposalRegion::for_bandwidth(&cloud, sigma).unwrap();
    let sampler = Subsampler::new(model.clone(), region.clone()).unwrap();
    let level = 0.3 * sampler.envelope().gamma;
    let draws = sampler.draw(level, 10_000, &mut stream(106, 1)).unwrap();
    let below = draws.points().filter(|p| model.eval(p) < level).count();

    // expected bin masses of the truncated, renormalized KDE
    let (lo, hi) = (region.lower()[0], region.upper()[0]);
    let bins = 20;
    let width = (hi - lo) / bins as f64;
    let fine = 4000;
    let mut mass = vec![0.0; bins];
    for (b, m) in mass.iter_mut().enumerate() {
        for k in 0..fine {
            let x = lo + width * (b as f64 + (k as f64 + 0.5) / fine as f64);
            let f = model.eval(&[x]);
            if f >= level {
                *m += f;
            }
        }
    }
    let total: f64 = mass.iter().sum();
    let mut observed = vec![0usize; bins];
    for p in draws.points() {
        let b = (((p[0] - lo) / width) as usize).min(bins - 1);
        observed[b] += 1;
    }
    let mut stat = 0.0;
    let mut cells = 0;
    let mut impossible = 0;
    for b in 0..bins {
        let expected = 10_000.0 * mass[b] / total;
        if expected == 0.0 {
            impossible += observed[b];
            continue;
        }
        stat += (observed[b] as f64 - expected).powi(2) / expected;
        cells += 1;
    }
    let p = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
    let secs = start.elapsed().as_secs_f64();
    let pass = below == 0 && impossible == 0 && p > 0.01 && secs < 30.0;
    report(
        6,
        "sampler correctness",
        pass,
        &format!("{below} points below level, chi2 = {stat:.2} on {} df, p = {p:.3}, {secs:.2} s", cells - 1),
    );
    assert!(pass);
}

#[test]
fn criterion_07_bias_reduction() {
    let start = Instant::now();
    let pipeline = Pipeline::Kde { bandwidth: Some(0.1), grid_res: Some(64) };
    let lambdas = vec![0.2, 0.4, 0.6, 0.8, 1.0, 1.2];
    let (mut raw_err, mut sub_err) = (Vec::new(), Vec::new());
    for trial in 0..20u64 {
        let data = gen_two_circles(trial, 0.5).unwrap();
        let cloud = &data.cloud;
        let truth = max_persistence(&pipeline.diagram(&data.subset(circles::SIGNAL), None).unwrap(), 1);
        let raw = max_persistence(&pipeline.diagram(cloud, None).unwrap(), 1);
        let grid = ParameterGrid::from_knn(cloud, lambdas.clone(), &[2, 5, 10], 1).unwrap();
        let sel = select_parameters(cloud, &grid, &pipeline, 1, 500, trial).unwrap();
        let sampler = Subsampler::new(
            KdeModel::new(cloud.clone(), sel.sigma).unwrap(),
            ProposalRegion::for_bandwidth(cloud, sel.sigma).unwrap(),
        )
        .unwrap();
        let sub = sampler.draw(sel.lambda, 500, &mut stream(trial, 999)).unwrap();
        let est = max_persistence(&pipeline.diagram(&sub, None).unwrap(), 1);
        raw_err.push((raw - truth).abs());
        sub_err.push((est - truth).abs());
    }
    let (r, s) = (median(raw_err), median(sub_err));
    let secs = start.elapsed().as_secs_f64();
    let pass = s < r && secs < 600.0;
    report(7, "smoothing reduces mp bias", pass, &format!("median |error| raw {r:.4} vs subsample {s:.4}, {secs:.1} s"));
    assert!(pass);
}

#[test]
fn criterion_08_convergence() {
    let truth_rows: Vec<[f64; 2]> = (0..2000)
        .map(|i| {
            let t = i as f64 / 2000.0 * std::f64::consts::TAU;
            [t.cos(), t.sin()]
        })
        .collect();
    let truth = PointCloud::from_rows(&truth_rows).unwrap();
    let sizes = [200usize, 800, 3200];
    let mut medians = Vec::new();
    for &n in &sizes {
        let mut dists = Vec::new();
        for trial in 0..10u64 {
            let mut rng = stream(trial, n as u64);
            let rows: Vec<[f64; 2]> = (0..n)
                .map(|_| {
                    let t = rng.random_range(0.0..std::f64::consts::TAU);
                    [t.cos(), t.sin()]
                })
                .collect();
            let cloud = PointCloud::from_rows(&rows).unwrap();
            let sigma = mean_knn_distance(&cloud, 5).unwrap();
            let sampler = Subsampler::new(
                KdeModel::new(cloud.clone(), sigma).unwrap(),
                ProposalRegion::for_bandwidth(&cloud, sigma).unwrap(),
            )
            .unwrap();
            let level = 0.3 * sampler.envelope().gamma;
            let sub = sampler.draw(level, n, &mut stream(trial, 1000 + n as u64)).unwrap();
            dists.push(hausdorff(&sub, &truth).unwrap());
        }
        medians.push(median(dists));
    }
    let pass = medians.windows(2).all(|w| w[1] <= w[0]);
    report(8, "Hausdorff convergence", pass, &format!("median d_H at n = {sizes:?}: {medians:.4?}"));
    assert!(pass);
}

#[test]
fn criterion_09_rejection_band() {
    let cfg = |seed| BootstrapConfig {
        pipeline: Pipeline::Kde { bandwidth: Some(0.25), grid_res: Some(40) },
        subsample: None,
        dim: 1,
        replicates: 200,
        alpha: 0.05,
        seed,
    };
    let noise = Normal::new(0.0, 0.05).unwrap();
    let (mut circle_hits, mut noise_clean) = (0, 0);
    for trial in 0..20u64 {
        let mut rng = stream(trial, 7);
        let circle: Vec<[f64; 2]> = (0..500)
            .map(|_| {
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                let r = 1.0 + noise.sample(&mut rng);
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        let square: Vec<[f64; 2]> = (0..500).map(|_| [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)]).collect();

        let res = bootstrap_talpha(&PointCloud::from_rows(&circle).unwrap(), &cfg(trial)).unwrap();
        if max_persistence(&res.reference, 1) > 2.0 * res.band.t_alpha {
            circle_hits += 1;
        }
        let res = bootstrap_talpha(&PointCloud::from_rows(&square).unwrap(), &cfg(trial)).unwrap();
        if classify_features(&res.reference, &res.band).significant.is_empty() {
            noise_clean += 1;
        }
    }
    let pass = circle_hits >= 18 && noise_clean >= 18;
    report(
        9,
        "rejection band separates circle from noise",
        pass,
        &format!("circle significant in {circle_hits}/20, noise clean in {noise_clean}/20"),
    );
    assert!(pass);
}

fn embed_score(series: &TimeSeries, tau: usize, m: usize) -> (PointCloud, f64) {
    let cloud = pca_project(&delay_embed(series, EmbeddingConfig { tau, m }).unwrap(), 2).unwrap().projected;
    let d = Pipeline::Vr { delta_max: None }.diagram(&cloud, None).unwrap();
    (cloud, periodicity_score(&d, false))
}

#[test]
fn criterion_10_periodicity() {
    let (cadence, samples) = (0.25, 400);
    let mut sine_wins = 0;
    for trial in 0..20u64 {
        let mut rng = stream(trial, 0);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let sine: Vec<f64> =
            (0..samples).map(|i| (std::f64::consts::TAU * i as f64 * cadence / 4.0 + phase).sin()).collect();
        let white = Normal::new(0.0, 1.0).unwrap();
        let noise: Vec<f64> = (0..samples).map(|_| white.sample(&mut rng)).collect();
        let (_, s) = embed_score(&TimeSeries::new(sine, cadence).unwrap(), 4, 15);
        let (_, w) = embed_score(&TimeSeries::new(noise, cadence).unwrap(), 4, 15);
        if s > w {
            sine_wins += 1;
        }
    }

    let cfg = RvConfig { cadence, samples, noise_sd: 1.0 };
    let vr = Pipeline::Vr { delta_max: None };
    let mut smoothing_wins = 0;
    for trial in 0..20u64 {
        let series = gen_rv_series(trial, RvSignal::Combined, &cfg).unwrap();
        let (cloud, raw) = embed_score(&series, 4, 15);
        let sigmas = mean_knn_distances(&cloud, &[5, 10, 20]).unwrap();
        let lambdas = level_quantiles(&cloud, sigmas[1], &[0.1, 0.25, 0.5]).unwrap();
        let grid = ParameterGrid::new(lambdas, sigmas, 1).unwrap();
        let sel = select_parameters(&cloud, &grid, &vr, 1, cloud.len(), trial).unwrap();
        let sampler = Subsampler::new(
            KdeModel::new(cloud.clone(), sel.sigma).unwrap(),
            ProposalRegion::for_bandwidth(&cloud, sel.sigma).unwrap(),
        )
        .unwrap();
        let sub = sampler.draw(sel.lambda, cloud.len(), &mut stream(trial, 77)).unwrap();
        let smoothed = max_persistence(&vr.diagram(&sub, None).unwrap(), 1);
        if smoothed > raw {
            smoothing_wins += 1;
        }
    }
    let pass = sine_wins == 20 && smoothing_wins >= 16;
    report(
        10,
        "periodicity discrimination",
        pass,
        &format!("sinusoid beats noise {sine_wins}/20, smoothing raises mp {smoothing_wins}/20"),
    );
    assert!(pass);
}

#[test]
fn criterion_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str| {
        let out = dir.path().join(format!("jobs{jobs}"));
        let status = Command::new(env!("CARGO_BIN_EXE_maxtda"))
            .args(["reproduce", "annulus", "--scale", "0.25", "--seed", "1", "--jobs", jobs, "--out-dir"])
            .arg(&out)
            .env_remove("MAXTDA_SEED")
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        out
    };
    let (one, eight) = (run("1"), run("8"));
    let mut compared = 0;
    let mut differing = Vec::new();
    for entry in std::fs::read_dir(&one).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if (name.starts_with("diagram_") || name.starts_with("band_")) && name.ends_with(".json") {
            compared += 1;
            if std::fs::read(one.join(&name)).unwrap() != std::fs::read(eight.join(&name)).unwrap() {
                differing.push(name);
            }
        }
    }
    let pass = compared >= 4 && differing.is_empty();
    report(11, "jobs-independent output", pass, &format!("{compared} diagram/band files compared, differing: {differing:?}"));
    assert!(pass);
}
