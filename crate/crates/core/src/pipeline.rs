//! Point cloud to persistence diagram recipes.

use serde::{Deserialize, Serialize};

use crate::density::{default_resolution, dtm_neighbor_count, dtm_with_scratch, KdeModel, ProposalRegion};
use crate::error::{Error, Result};
use crate::filtration::{
    build_function_complex, compute_persistence, vr_persistence, Direction, GridGeometry, PersistenceDiagram,
};
use crate::geometry::PointCloud;

/// Which filtration turns a cloud into a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Pipeline {
    /// Rips filtration; `delta_max = None` means the cloud diameter.
    Vr { delta_max: Option<f64> },
    /// Lower-level sets of the distance-to-measure at mass `m` on a grid.
    Dtm { m: f64, grid_res: Option<usize> },
    /// Upper-level sets of a Gaussian KDE on a grid. `bandwidth = None`
    /// reuses the subsampling bandwidth.
    Kde { bandwidth: Option<f64>, grid_res: Option<usize> },
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::Vr { .. } => "vr",
            Pipeline::Dtm { .. } => "dtm",
            Pipeline::Kde { .. } => "kde",
        }
    }

    /// Grid box for a function pipeline. KDE pads the data box by three
    /// bandwidths, DTM by a tenth of the widest extent.
    pub fn grid_box(&self, cloud: &PointCloud, sigma: Option<f64>) -> Result<Option<ProposalRegion>> {
        match *self {
            Pipeline::Vr { .. } => Ok(None),
            Pipeline::Kde { bandwidth, .. } => {
                let h = kde_bandwidth(bandwidth, sigma)?;
                ProposalRegion::for_bandwidth(cloud, h).map(Some)
            }
            Pipeline::Dtm { .. } => {
                let (lo, hi) = cloud.bounding_box().ok_or(Error::EmptySet)?;
                let extent = lo.iter().zip(&hi).map(|(l, u)| u - l).fold(0.0, f64::max);
                let pad = if extent > 0.0 { 0.1 * extent } else { 1.0 };
                ProposalRegion::around(cloud, pad).map(Some)
            }
        }
    }

    /// Diagram of `cloud` in dimensions 0 and 1. `sigma` is the fallback
    /// KDE bandwidth; the grid box is derived from the cloud.
    pub fn diagram(&self, cloud: &PointCloud, sigma: Option<f64>) -> Result<PersistenceDiagram> {
        let region = self.grid_box(cloud, sigma)?;
        self.diagram_in(cloud, sigma, region.as_ref())
    }

    /// Like [`Pipeline::diagram`] but with a caller-fixed grid box, so that
    /// diagrams of related clouds share one grid.
    pub fn diagram_in(
        &self,
        cloud: &PointCloud,
        sigma: Option<f64>,
        region: Option<&ProposalRegion>,
    ) -> Result<PersistenceDiagram> {
        if cloud.is_empty() {
            return Err(Error::EmptySet);
        }
        match *self {
            Pipeline::Vr { delta_max } => vr_persistence(cloud, delta_max, 1),
            Pipeline::Kde { bandwidth, grid_res } => {
                let h = kde_bandwidth(bandwidth, sigma)?;
                let model = KdeModel::new(cloud.clone(), h)?;
                let geometry = grid_geometry(cloud, region, grid_res)?;
                let grid = geometry.sample(|x| model.eval(x));
                compute_persistence(&build_function_complex(&grid, Direction::Upper)?, 1)
            }
            Pipeline::Dtm { m, grid_res } => {
                let k = dtm_neighbor_count(m, cloud.len())?;
                let geometry = grid_geometry(cloud, region, grid_res)?;
                let mut scratch = Vec::with_capacity(cloud.len());
                let grid = geometry.sample(|x| dtm_with_scratch(cloud, k, x, &mut scratch));
                compute_persistence(&build_function_complex(&grid, Direction::Lower)?, 1)
            }
        }
    }
}

fn kde_bandwidth(bandwidth: Option<f64>, sigma: Option<f64>) -> Result<f64> {
    bandwidth
        .or(sigma)
        .ok_or_else(|| Error::InvalidParameter("KDE pipeline needs a bandwidth".into()))
}

fn grid_geometry(cloud: &PointCloud, region: Option<&ProposalRegion>, res: Option<usize>) -> Result<GridGeometry> {
    let region = region.ok_or_else(|| Error::InvalidParameter("function pipeline needs a grid box".into()))?;
    if region.dim() != cloud.dim() {
        return Err(Error::DimensionMismatch { expected: cloud.dim(), got: region.dim() });
    }
    let res = res.unwrap_or_else(|| default_resolution(cloud.dim()));
    if res < 2 {
        return Err(Error::InvalidParameter(format!("grid resolution must be at least 2, got {res}")));
    }
    GridGeometry::new(region.lower().to_vec(), region.upper().to_vec(), vec![res; cloud.dim()])
}
