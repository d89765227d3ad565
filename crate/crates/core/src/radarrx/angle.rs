use alloc::vec::Vec;
use num_complex::Complex64;

use super::array::ArrayModel;
use super::cfar::Detection;
use super::rdm::RangeDopplerMap;
use crate::error::{bail, Result};

/// Uniform azimuth grid of `points` values over `[min, max]` degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl AngleGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if points < 2 || !(min < max) || min <= -90.0 || max >= 90.0 {
            bail!(
                Domain,
                "angle grid needs >= 2 points inside (-90, 90) degrees"
            );
        }
        Ok(AngleGrid { min, max, points })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn angle(&self, l: usize) -> f64 {
        self.min + l as f64 * self.step()
    }
}

impl Default for AngleGrid {
    fn default() -> Self {
        AngleGrid {
            min: -30.0,
            max: 30.0,
            points: 4096,
        }
    }
}

/// Calibration vector from an anchor at known azimuth: channel `p` is
/// scaled by `(z_0 / z_p) a_p / a_0` so the calibrated anchor response is
/// `z_0` times the ideal steering vector normalised to its first element.
pub fn calibrate(z: &[Complex64], anchor_deg: f64, array: &ArrayModel) -> Result<Vec<Complex64>> {
    if z.len() != array.virtual_count() {
        bail!(
            Dimension,
            "anchor vector has {} channels, array has {}",
            z.len(),
            array.virtual_count()
        );
    }
    let peak = z.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    if !(peak > 0.0) || z.iter().any(|v| v.norm() < 1e-6 * peak) {
        bail!(Calibration, "anchor response vanishes on some channel");
    }
    let a = array.virtual_steering(anchor_deg);
    Ok(z.iter()
        .zip(&a)
        .map(|(zp, ap)| z[0] / zp * ap / a[0])
        .collect())
}

/// Applies a calibration vector element-wise.
pub fn apply_calibration(z: &[Complex64], calibration: &[Complex64]) -> Vec<Complex64> {
    z.iter().zip(calibration).map(|(a, b)| a * b).collect()
}

/// Conjugated ideal steering vectors of a grid, for repeated scans.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    grid: AngleGrid,
    channels: usize,
    weights: Vec<Complex64>,
}

impl Beamformer {
    pub fn new(array: &ArrayModel, grid: &AngleGrid) -> Self {
        let weights = (0..grid.points)
            .flat_map(|l| array.virtual_steering(grid.angle(l)))
            .map(|a| a.conj())
            .collect();
        Beamformer {
            grid: *grid,
            channels: array.virtual_count(),
            weights,
        }
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    /// Beam power `|a(theta)^H z|^2` on every grid point.
    pub fn spectrum(&self, z: &[Complex64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.channels)
            .map(|w| {
                w.iter()
                    .zip(z)
                    .map(|(a, z)| a * z)
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .collect()
    }

    /// Grid maximiser of the beam power.
    pub fn estimate(&self, z: &[Complex64]) -> Result<f64> {
        if z.len() != self.channels {
            bail!(
                Dimension,
                "vector has {} channels, array has {}",
                z.len(),
                self.channels
            );
        }
        let best =
            self.spectrum(z)
                .into_iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (l, v)| if v > acc.1 { (l, v) } else { acc },
                );
        Ok(self.grid.angle(best.0))
    }
}

/// Beam power `|a(theta)^H z|^2` on every grid point.
pub fn angle_spectrum(z: &[Complex64], array: &ArrayModel, grid: &AngleGrid) -> Vec<f64> {
    Beamformer::new(array, grid).spectrum(z)
}

/// Grid maximiser of the beam power.
pub fn estimate_angle(z: &[Complex64], array: &ArrayModel, grid: &AngleGrid) -> Result<f64> {
    Beamformer::new(array, grid).estimate(z)
}

/// Physical parameters of one detection.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetEstimate {
    pub detection: Detection,
    pub range: f64,
    pub velocity: f64,
    pub azimuth: f64,
    /// Channel vector at the detection (uncalibrated).
    pub z: Vec<Complex64>,
}

/// Range from the delay bin, velocity from the Doppler bin and azimuth
/// from the (optionally calibrated) channel vector.
pub fn estimate_params(
    detection: &Detection,
    map: &RangeDopplerMap,
    beamformer: &Beamformer,
    calibration: Option<&[Complex64]>,
) -> Result<TargetEstimate> {
    let z = map.channel_vector(detection.doppler_bin, detection.range_bin);
    let azimuth = match calibration {
        Some(c) => beamformer.estimate(&apply_calibration(&z, c))?,
        None => beamformer.estimate(&z)?,
    };
    Ok(TargetEstimate {
        detection: detection.clone(),
        range: map.range_of(detection.range_bin),
        velocity: map.velocity_of(detection.doppler_bin),
        azimuth,
        z,
    })
}
