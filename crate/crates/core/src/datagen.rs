//! Seeded generators for the reference experiments.
//!
//! Every generator is a pure function of `(seed, scale)`: identical inputs
//! give bit-identical output.

use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::rng::stream;
use crate::timeseries::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    TwoCircles,
    Ellipses3d,
    RvSignals,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: Experiment,
    pub seed: u64,
    pub scale: f64,
}

/// A cloud with one integer label per point.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeled {
    pub cloud: PointCloud,
    pub labels: Vec<u8>,
}

impl Labeled {
    /// The points carrying `label`.
    pub fn subset(&self, label: u8) -> PointCloud {
        let idx: Vec<usize> = (0..self.labels.len()).filter(|&i| self.labels[i] == label).collect();
        self.cloud.select(&idx)
    }

    pub fn count(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn to_csv(&self) -> String {
        self.cloud.to_csv(Some(&self.labels))
    }
}

fn scaled(count: usize, scale: f64) -> Result<usize> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
    }
    Ok(((count as f64 * scale).round() as usize).max(1))
}

/// Two-circle labels.
pub mod circles {
    /// 50 points near the unit circle.
    pub const OUTER: u8 = 0;
    /// 500 points near the radius-0.5 circle: the signal.
    pub const SIGNAL: u8 = 1;
    /// 450 uniform points in [-1, 1]^2.
    pub const UNIFORM: u8 = 2;
}

/// Radial noise standard deviation for both circles.
pub const CIRCLE_NOISE_SD: f64 = 0.05;

/// Sparse unit circle, dense radius-0.5 circle, and uniform clutter, in
/// counts 50/500/450 times `scale`.
pub fn gen_two_circles(seed: u64, scale: f64) -> Result<Labeled> {
    let counts = [scaled(50, scale)?, scaled(500, scale)?, scaled(450, scale)?];
    let mut rng = stream(seed, 0);
    let noise = Normal::new(0.0, CIRCLE_NOISE_SD).expect("valid sd");
    let total: usize = counts.iter().sum();
    let mut coords = Vec::with_capacity(2 * total);
    let mut labels = Vec::with_capacity(total);
    for (label, radius, count) in [(circles::OUTER, 1.0, counts[0]), (circles::SIGNAL, 0.5, counts[1])] {
        for _ in 0..count {
            let t = rng.random_range(0.0..2.0 * PI);
            let r = radius + noise.sample(&mut rng);
            coords.extend_from_slice(&[r * t.cos(), r * t.sin()]);
            labels.push(label);
        }
    }
    for _ in 0..counts[2] {
        coords.push(rng.random_range(-1.0..=1.0));
        coords.push(rng.random_range(-1.0..=1.0));
        labels.push(circles::UNIFORM);
    }
    Ok(Labeled { cloud: PointCloud::new(2, coords)?, labels })
}

/// A planar ellipse placed in space: `center + a cos(t) u + b sin(t) v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center: [f64; 3],
    pub u: [f64; 3],
    pub v: [f64; 3],
    pub a: f64,
    pub b: f64,
    pub count: usize,
}

impl Ellipse {
    /// Ramanujan's perimeter approximation.
    pub fn perimeter(&self) -> f64 {
        let (a, b) = (self.a, self.b);
        let h = ((a - b) / (a + b)).powi(2);
        PI * (a + b) * (1.0 + 3.0 * h / (10.0 + (4.0 - 3.0 * h).sqrt()))
    }

    pub fn point(&self, t: f64) -> [f64; 3] {
        let (c, s) = (t.cos(), t.sin());
        std::array::from_fn(|k| self.center[k] + self.a * c * self.u[k] + self.b * s * self.v[k])
    }
}

/// Label of the dense ellipse; sparse ellipses carry 1, 2, 3.
pub const DENSE_ELLIPSE: u8 = 0;

/// Isotropic jitter added to ellipse points.
pub const ELLIPSE_JITTER_SD: f64 = 0.01;

/// The four ellipses at `scale`: semi-axes 0.3 and 0.15, one dense
/// (153 points) and three sparse (60 points each).
pub fn ellipse_layout(scale: f64) -> Result<[Ellipse; 4]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let dense = scaled(153, scale)?;
    let sparse = scaled(60, scale)?;
    let e = |center, u, v, count| Ellipse { center, u, v, a: 0.3, b: 0.15, count };
    Ok([
        e([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], dense),
        e([0.8, 0.0, 0.1], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], sparse),
        e([0.0, 0.8, -0.1], [s, 0.0, s], [-s, 0.0, s], sparse),
        e([0.8, 0.8, 0.0], [s, s, 0.0], [0.0, 0.0, 1.0], sparse),
    ])
}

/// Four ellipses in R^3, the first markedly denser; n = 333 at scale 1.
pub fn gen_ellipses3d(seed: u64, scale: f64) -> Result<Labeled> {
    let layout = ellipse_layout(scale)?;
    let mut rng = stream(seed, 0);
    let jitter = Normal::new(0.0, ELLIPSE_JITTER_SD).expect("valid sd");
    let mut coords = Vec::new();
    let mut labels = Vec::new();
    for (label, e) in layout.iter().enumerate() {
        for _ in 0..e.count {
            let p = e.point(rng.random_range(0.0..2.0 * PI));
            coords.extend(p.iter().map(|x| x + jitter.sample(&mut rng)));
            labels.push(label as u8);
        }
    }
    Ok(Labeled { cloud: PointCloud::new(3, coords)?, labels })
}

pub const PLANET_PERIOD: f64 = 4.0;
pub const PLANET_AMPLITUDE: f64 = 0.87;
pub const SPOT_PERIOD: f64 = 25.05;
pub const SPOT_AMPLITUDE: f64 = 0.58;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RvSignal {
    Planet,
    Spot,
    Combined,
}

/// Sampling of the radial-velocity series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RvConfig {
    /// Days per sample.
    pub cadence: f64,
    pub samples: usize,
    pub noise_sd: f64,
}

impl Default for RvConfig {
    fn default() -> Self {
        Self { cadence: 1.0, samples: 200, noise_sd: 1.0 }
    }
}

/// The three ingredients of the combined series on a shared time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RvComponents {
    pub planet: Vec<f64>,
    pub spot: Vec<f64>,
    pub noise: Vec<f64>,
    pub cadence: f64,
}

pub fn rv_components(seed: u64, cfg: &RvConfig) -> Result<RvComponents> {
    if cfg.samples < 2 || !(cfg.cadence > 0.0) || !(cfg.noise_sd >= 0.0) {
        return Err(Error::InvalidParameter("RV config needs >= 2 samples, positive cadence, nonnegative noise".into()));
    }
    let times = (0..cfg.samples).map(|i| i as f64 * cfg.cadence);
    let planet = times.clone().map(|t| PLANET_AMPLITUDE * (2.0 * PI * t / PLANET_PERIOD).sin()).collect();
    let spot = times.map(|t| SPOT_AMPLITUDE * (2.0 * PI * t / SPOT_PERIOD).sin()).collect();
    let mut rng = stream(seed, 0);
    let noise = match cfg.noise_sd {
        0.0 => vec![0.0; cfg.samples],
        sd => {
            let normal = Normal::new(0.0, sd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            (0..cfg.samples).map(|_| normal.sample(&mut rng)).collect()
        }
    };
    Ok(RvComponents { planet, spot, noise, cadence: cfg.cadence })
}

/// Planet and spot are noiseless sinusoids; the combined series adds both
/// and Gaussian noise.
pub fn gen_rv_series(seed: u64, which: RvSignal, cfg: &RvConfig) -> Result<TimeSeries> {
    let c = rv_components(seed, cfg)?;
    let values = match which {
        RvSignal::Planet => c.planet,
        RvSignal::Spot => c.spot,
        RvSignal::Combined => (0..cfg.samples).map(|i| c.planet[i] + c.spot[i] + c.noise[i]).collect(),
    };
    TimeSeries::new(values, cfg.cadence)
}
