//! Robust estimation and inference for maximal persistence.
//!
//! The crate fits a Gaussian KDE to a noisy point cloud, draws a dense
//! "smooth subsample" from a density level set by rejection sampling, and
//! measures the most persistent topological feature of the result. Bootstrap
//! quantiles of the bottleneck distance turn that estimate into a rejection
//! band separating significant features from noise.
//!
//! Module map:
//!
//! - [`geometry`]: point clouds, set distances, k-NN summaries
//! - [`density`]: KDE, distance-to-measure, smooth subsampling
//! - [`filtration`]: Rips and grid-function filtrations, persistence
//! - [`metrics`]: bottleneck distance, maximal persistence
//! - [`pipeline`]: point cloud → diagram recipes (Rips, DTM, KDE)
//! - [`inference`]: parameter selection, bootstrap bands, classification
//! - [`timeseries`]: delay embeddings, AMI, Cao, PCA, periodicity score
//! - [`datagen`]: seeded generators for the reference experiments
//! - [`plot`]: SVG persistence diagrams
//! - [`cli`]: the `maxtda` command line
//!
//! See the `examples/` directory for one runnable program per capability.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod datagen;
pub mod density;
pub mod error;
pub mod filtration;
pub mod geometry;
pub mod inference;
pub mod metrics;
pub mod pipeline;
pub mod plot;
pub mod rng;
pub mod timeseries;

pub use error::{Error, Result};
pub use filtration::{PersistenceDiagram, PersistencePoint, Scale};
pub use geometry::PointCloud;
