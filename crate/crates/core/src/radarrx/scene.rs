use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Uniform};

use crate::error::{bail, Result};
use crate::math::cis;
use crate::{RadarConfig, SPEED_OF_LIGHT};

/// Point target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    /// Range (m).
    pub range: f64,
    /// Radial velocity (m/s), positive towards the radar.
    pub velocity: f64,
    /// Azimuth (degrees).
    pub azimuth: f64,
    /// Complex scattering coefficient.
    pub coefficient: Complex64,
}

impl Target {
    pub fn new(range: f64, velocity: f64, azimuth: f64) -> Self {
        Target {
            range,
            velocity,
            azimuth,
            coefficient: Complex64::new(1.0, 0.0),
        }
    }

    /// Round-trip delay `2R/c` (s).
    pub fn delay(&self) -> f64 {
        2.0 * self.range / SPEED_OF_LIGHT
    }

    /// Doppler shift `2v/lambda` (Hz).
    pub fn doppler(&self, cfg: &RadarConfig) -> f64 {
        2.0 * self.velocity / cfg.wavelength()
    }

    /// Delay rounded to the sample grid.
    pub fn delay_samples(&self, cfg: &RadarConfig) -> usize {
        libm::round(self.delay() * cfg.sample_rate).max(0.0) as usize
    }
}

/// Why a target produces no usable echo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    /// Echo starts while the radar is still transmitting.
    BlindZone,
    /// Echo does not end within the PRT.
    BeyondUnambiguousRange,
    /// `|f_d| >= 1/(2 T_p)`.
    DopplerAmbiguous,
}

impl Exclusion {
    pub fn describe(self) -> &'static str {
        match self {
            Exclusion::BlindZone => "inside the blind zone",
            Exclusion::BeyondUnambiguousRange => "beyond the unambiguous range",
            Exclusion::DopplerAmbiguous => "Doppler-ambiguous",
        }
    }
}

/// Checks whether a target's echo is observable.
pub fn classify_target(target: &Target, cfg: &RadarConfig) -> Option<Exclusion> {
    let d = target.delay_samples(cfg);
    if d < cfg.active_samples() {
        Some(Exclusion::BlindZone)
    } else if d + cfg.active_samples() > cfg.samples_per_prt() {
        Some(Exclusion::BeyondUnambiguousRange)
    } else if target.doppler(cfg).abs() * cfg.prt >= 0.5 {
        Some(Exclusion::DopplerAmbiguous)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TargetScene {
    pub targets: Vec<Target>,
}

/// Uniform ranges for random scenes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneSpec {
    pub targets: usize,
    /// `(min, max)` velocity (m/s).
    pub velocity: (f64, f64),
    /// `(min, max)` range (m).
    pub range: (f64, f64),
    /// `(min, max)` azimuth (deg).
    pub azimuth: (f64, f64),
}

impl Default for SceneSpec {
    fn default() -> Self {
        SceneSpec {
            targets: 50,
            velocity: (-170.0, 170.0),
            range: (750.0, 4185.0),
            azimuth: (-4.0, 4.0),
        }
    }
}

impl SceneSpec {
    pub fn validate(&self, cfg: &RadarConfig) -> Result<()> {
        for (name, (lo, hi)) in [
            ("velocity", self.velocity),
            ("range", self.range),
            ("azimuth", self.azimuth),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                bail!(Config, "scene {name} interval [{lo}, {hi}] is invalid");
            }
        }
        if self.range.0 < cfg.blind_zone() || self.range.1 > cfg.max_unambiguous_range() {
            bail!(
                Config,
                "scene ranges must lie within [{}, {}] m",
                cfg.blind_zone(),
                cfg.max_unambiguous_range()
            );
        }
        let vmax = self.velocity.0.abs().max(self.velocity.1.abs());
        if vmax >= cfg.max_unambiguous_velocity() {
            bail!(
                Config,
                "scene speeds must stay below {} m/s",
                cfg.max_unambiguous_velocity()
            );
        }
        if self.azimuth.0 <= -90.0 || self.azimuth.1 >= 90.0 {
            bail!(Config, "azimuth must lie inside (-90, 90) degrees");
        }
        Ok(())
    }

    /// Draws a scene with unit-magnitude, random-phase coefficients.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> TargetScene {
        let u = |lo: f64, hi: f64, rng: &mut R| {
            if hi > lo {
                Uniform::new(lo, hi).expect("valid interval").sample(rng)
            } else {
                lo
            }
        };
        let targets = (0..self.targets)
            .map(|_| {
                let range = u(self.range.0, self.range.1, rng);
                let velocity = u(self.velocity.0, self.velocity.1, rng);
                let azimuth = u(self.azimuth.0, self.azimuth.1, rng);
                let phase = u(0.0, TAU, rng);
                Target {
                    range,
                    velocity,
                    azimuth,
                    coefficient: cis(phase),
                }
            })
            .collect();
        TargetScene { targets }
    }
}
