//! Time-delay embedding and periodicity scores for radial-velocity signals.
//!
//! Run with `cargo run --release --example periodicity`.

use maxtda::datagen::{gen_rv_series, RvConfig, RvSignal};
use maxtda::pipeline::Pipeline;
use maxtda::timeseries::{ami_profile, cao_dimension, delay_embed, pca_project, periodicity_score, EmbeddingConfig, AMI_BINS, CAO_THRESHOLD};

fn main() -> maxtda::Result<()> {
    let cfg = RvConfig { cadence: 0.25, samples: 400, noise_sd: 1.0 };
    let vr = Pipeline::Vr { delta_max: None };

    for (name, which, emb) in [
        ("planet", RvSignal::Planet, EmbeddingConfig { tau: 4, m: 15 }),
        ("spot", RvSignal::Spot, EmbeddingConfig { tau: 12, m: 7 }),
        ("combined", RvSignal::Combined, EmbeddingConfig { tau: 4, m: 15 }),
    ] {
        let series = gen_rv_series(2, which, &cfg)?;
        let ami = ami_profile(&series, 20, AMI_BINS)?;
        let cao = cao_dimension(&series, emb.tau, 12, CAO_THRESHOLD)?;
        let pca = pca_project(&delay_embed(&series, emb)?, 2)?;
        let d = vr.diagram(&pca.projected, None)?;
        println!(
            "{name:>8}: AMI tau {:>2}, Cao dim {:>2}, PC1+PC2 {:.2}, score {:.4} (normalized {:.4})",
            ami.selected,
            cao.dimension,
            pca.explained[0] + pca.explained[1],
            periodicity_score(&d, false),
            periodicity_score(&d, true),
        );
    }
    Ok(())
}
