//! Point clouds, set distances and k-NN bandwidth summaries.
//!
//! Run with `cargo run --example point_clouds`.

use maxtda::geometry::{dist_to_set, hausdorff, mean_knn_distances};
use maxtda::PointCloud;

fn circle(n: usize, r: f64) -> PointCloud {
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64 * std::f64::consts::TAU;
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    PointCloud::from_rows(&rows).unwrap()
}

fn main() -> maxtda::Result<()> {
    let coarse = circle(12, 1.0);
    let fine = circle(240, 1.0);
    let shrunk = circle(240, 0.8);

    println!("dist((0,0), circle)     = {:.4}", dist_to_set(&[0.0, 0.0], &fine)?);
    println!("d_H(coarse, fine)       = {:.4}", hausdorff(&coarse, &fine)?);
    println!("d_H(fine, radius 0.8)   = {:.4}", hausdorff(&fine, &shrunk)?);

    let ks = [1, 5, 10];
    for (k, s) in ks.iter().zip(mean_knn_distances(&fine, &ks)?) {
        println!("mean {k:>2}-NN distance   = {s:.5}");
    }

    // round-trip through the CSV format
    let text = fine.to_csv(None);
    let back = PointCloud::parse_csv(&text)?;
    assert_eq!(back, fine);
    println!("CSV round trip ok ({} rows)", back.len());
    Ok(())
}
