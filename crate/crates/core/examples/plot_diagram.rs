//! Render a diagram with its rejection band to SVG.
//!
//! Run with `cargo run --release --example plot_diagram -- out.svg`.

use maxtda::inference::RejectionBand;
use maxtda::pipeline::Pipeline;
use maxtda::plot::render_diagram_svg;
use maxtda::PointCloud;

fn main() -> maxtda::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "diagram.svg".into());
    let rows: Vec<[f64; 2]> = (0..60)
        .map(|i| {
            let t = i as f64 / 60.0 * std::f64::consts::TAU;
            let wobble = 1.0 + 0.1 * (5.0 * t).sin();
            [wobble * t.cos(), wobble * t.sin()]
        })
        .collect();
    let d = Pipeline::Vr { delta_max: None }.diagram(&PointCloud::from_rows(&rows)?, None)?;
    let band = RejectionBand { alpha: 0.05, t_alpha: 0.1, dim: 1, n: 0 };
    render_diagram_svg(&d, Some(&band), &path)?;
    println!("wrote {path}");
    Ok(())
}
