//! Draw a dense subsample from a KDE level set of a cluttered circle.
//!
//! The clutter sits in low-density regions, so thresholding the KDE before
//! resampling strips it while keeping the circle.
//!
//! Run with `cargo run --release --example smooth_subsampling`.

use maxtda::density::{KdeModel, ProposalRegion, Subsampler};
use maxtda::geometry::mean_knn_distance;
use maxtda::rng::stream;
use maxtda::PointCloud;
use rand::Rng;

fn main() -> maxtda::Result<()> {
    let mut rng = stream(3, 0);
    let mut rows = Vec::new();
    for _ in 0..400 {
        let t = rng.random_range(0.0..std::f64::consts::TAU);
        let r = 1.0 + rng.random_range(-0.05..0.05);
        rows.push([r * t.cos(), r * t.sin()]);
    }
    for _ in 0..200 {
        rows.push([rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)]);
    }
    let cloud = PointCloud::from_rows(&rows)?;

    let sigma = mean_knn_distance(&cloud, 5)?;
    let sampler = Subsampler::new(KdeModel::new(cloud.clone(), sigma)?, ProposalRegion::for_bandwidth(&cloud, sigma)?)?;
    let gamma = sampler.envelope().gamma;
    println!("sigma = {sigma:.4}, envelope = {gamma:.4}");

    for frac in [0.0, 0.1, 0.2, 0.3] {
        let level = frac * gamma;
        let sub = sampler.draw(level, 600, &mut stream(3, 1))?;
        let off = sub
            .points()
            .filter(|p| ((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() > 0.15)
            .count();
        println!("level {level:.4}: {off:>3} of {} points farther than 0.15 from the circle", sub.len());
    }

    // levels above the envelope are rejected up front
    match sampler.draw(2.0 * gamma, 10, &mut stream(3, 2)) {
        Err(e) => println!("level 2Γ: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
