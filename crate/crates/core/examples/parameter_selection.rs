//! Pick the subsampling threshold and bandwidth by cumulative persistence.
//!
//! Run with `cargo run --release --example parameter_selection`.

use maxtda::datagen::{circles, gen_two_circles};
use maxtda::inference::{select_parameters, ParameterGrid};
use maxtda::metrics::max_persistence;
use maxtda::pipeline::Pipeline;

fn main() -> maxtda::Result<()> {
    let data = gen_two_circles(11, 0.3)?;
    let cloud = &data.cloud;
    let pipeline = Pipeline::Kde { bandwidth: Some(0.1), grid_res: Some(48) };

    let grid = ParameterGrid::from_knn(cloud, vec![0.2, 0.4, 0.6, 0.8, 1.0], &[2, 5, 10], 1)?;
    let sel = select_parameters(cloud, &grid, &pipeline, 1, cloud.len(), 11)?;

    println!("{:>8} {:>8} {:>10}", "lambda", "sigma", "score");
    for cell in &sel.table {
        let score = cell.score.map_or("unreachable".to_string(), |s| format!("{s:.4}"));
        println!("{:>8.3} {:>8.4} {:>10}", cell.lambda, cell.sigma, score);
    }
    println!("selected lambda = {}, sigma = {:.4}", sel.lambda, sel.sigma);

    let truth = max_persistence(&pipeline.diagram(&data.subset(circles::SIGNAL), None)?, 1);
    let raw = max_persistence(&pipeline.diagram(cloud, None)?, 1);
    println!("mp of the signal circle alone: {truth:.4}");
    println!("mp of the cluttered data:      {raw:.4}");
    println!("mp of the best subsample:      {:.4}", sel.score);
    Ok(())
}
