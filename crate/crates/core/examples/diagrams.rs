//! Persistence diagrams of one noisy circle under the three filtrations.
//!
//! Run with `cargo run --release --example diagrams`.

use maxtda::datagen::gen_two_circles;
use maxtda::datagen::circles::SIGNAL;
use maxtda::metrics::max_persistence;
use maxtda::pipeline::Pipeline;

fn main() -> maxtda::Result<()> {
    let cloud = gen_two_circles(5, 0.4)?.subset(SIGNAL);
    println!("{} points near the radius-0.5 circle", cloud.len());

    let pipelines = [
        Pipeline::Vr { delta_max: None },
        Pipeline::Dtm { m: 0.05, grid_res: Some(48) },
        Pipeline::Kde { bandwidth: Some(0.08), grid_res: Some(48) },
    ];
    for p in pipelines {
        let d = p.diagram(&cloud, None)?;
        let h1 = d.finite(1).count();
        println!(
            "{:>3}: {:>4} H0 points, {:>3} H1 points, max H1 persistence {:.4} ({} scale)",
            p.name(),
            d.points.iter().filter(|q| q.dim == 0).count(),
            h1,
            max_persistence(&d, 1),
            d.scale.as_str(),
        );
    }

    // the unit square: one loop born at side length, dying at the diagonal
    let square = maxtda::PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])?;
    let d = Pipeline::Vr { delta_max: None }.diagram(&square, None)?;
    for p in d.finite(1) {
        println!("square H1 bar: ({}, {:.6})", p.birth, p.death);
    }
    Ok(())
}
