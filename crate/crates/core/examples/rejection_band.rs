//! Bootstrap rejection band: a circle's loop is significant, noise is not.
//!
//! Run with `cargo run --release --example rejection_band`.

use maxtda::inference::{bootstrap_talpha, classify_features, BootstrapConfig};
use maxtda::pipeline::Pipeline;
use maxtda::rng::stream;
use maxtda::PointCloud;
use rand::Rng;
use rand_distr::{Distribution, Normal};

fn main() -> maxtda::Result<()> {
    let mut rng = stream(1, 0);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let circle: Vec<[f64; 2]> = (0..400)
        .map(|_| {
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            let r = 1.0 + noise.sample(&mut rng);
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let square: Vec<[f64; 2]> = (0..400).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();

    let cfg = BootstrapConfig {
        pipeline: Pipeline::Kde { bandwidth: Some(0.25), grid_res: Some(40) },
        subsample: None,
        dim: 1,
        replicates: 100,
        alpha: 0.05,
        seed: 1,
    };
    for (name, rows) in [("circle", circle), ("uniform", square)] {
        let result = bootstrap_talpha(&PointCloud::from_rows(&rows)?, &cfg)?;
        let class = classify_features(&result.reference, &result.band);
        println!(
            "{name:>8}: t_alpha = {:.4}, significant H1 features = {}, rejected = {}",
            result.band.t_alpha,
            class.significant.len(),
            class.rejected.len()
        );
    }
    Ok(())
}
