use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Uniform};

use crate::error::{bail, Result};
use crate::math::{cis, db_to_linear};

/// Transmit and receive uniform linear arrays with per-element errors.
///
/// Virtual channel `p = n M + m` pairs receive element `n` with transmit
/// element `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayModel {
    /// Transmit element spacing (wavelengths).
    pub tx_spacing: f64,
    /// Receive element spacing (wavelengths).
    pub rx_spacing: f64,
    pub tx_errors: Vec<Complex64>,
    pub rx_errors: Vec<Complex64>,
}

impl ArrayModel {
    /// Error-free array.
    pub fn ideal(tx: usize, rx: usize, tx_spacing: f64, rx_spacing: f64) -> Self {
        ArrayModel {
            tx_spacing,
            rx_spacing,
            tx_errors: vec![Complex64::new(1.0, 0.0); tx],
            rx_errors: vec![Complex64::new(1.0, 0.0); rx],
        }
    }

    /// `M` transmitters `6 lambda` apart and 12 half-wavelength receivers,
    /// which fill a 24-element virtual array for `M = 2`.
    pub fn experiment(tx: usize) -> Self {
        Self::ideal(tx, 12, 6.0, 0.5)
    }

    /// Draws independent gain/phase errors for every element: magnitude
    /// uniform within `+-magnitude_db`, phase uniform within `+-phase_rad`.
    pub fn with_random_errors<R: Rng + ?Sized>(
        mut self,
        magnitude_db: f64,
        phase_rad: f64,
        rng: &mut R,
    ) -> Self {
        let mag = Uniform::new_inclusive(-magnitude_db, magnitude_db).expect("valid interval");
        let ph = Uniform::new_inclusive(-phase_rad, phase_rad).expect("valid interval");
        let mut draw = |e: &mut Complex64| {
            *e = cis(ph.sample(rng)) * libm::sqrt(db_to_linear(mag.sample(rng)));
        };
        self.tx_errors.iter_mut().for_each(&mut draw);
        self.rx_errors.iter_mut().for_each(&mut draw);
        self
    }

    pub fn tx_count(&self) -> usize {
        self.tx_errors.len()
    }

    pub fn rx_count(&self) -> usize {
        self.rx_errors.len()
    }

    pub fn virtual_count(&self) -> usize {
        self.tx_count() * self.rx_count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.tx_count() == 0 || self.rx_count() == 0 {
            bail!(
                Dimension,
                "array needs at least one transmit and one receive element"
            );
        }
        let bad = |e: &Complex64| !(e.norm() > 0.0 && e.norm().is_finite());
        if self.tx_errors.iter().chain(&self.rx_errors).any(bad) {
            bail!(Domain, "array error terms must be finite and non-zero");
        }
        if !(self.tx_spacing.is_finite() && self.rx_spacing.is_finite()) {
            bail!(Domain, "element spacings must be finite");
        }
        Ok(())
    }

    /// Ideal transmit steering vector at azimuth `deg`.
    pub fn tx_steering(&self, deg: f64) -> Vec<Complex64> {
        steering(self.tx_count(), self.tx_spacing, deg)
    }

    pub fn rx_steering(&self, deg: f64) -> Vec<Complex64> {
        steering(self.rx_count(), self.rx_spacing, deg)
    }

    /// Ideal virtual steering vector `a_r (x) a_t`.
    pub fn virtual_steering(&self, deg: f64) -> Vec<Complex64> {
        let at = self.tx_steering(deg);
        let ar = self.rx_steering(deg);
        ar.iter()
            .flat_map(|r| at.iter().map(move |t| r * t))
            .collect()
    }

    /// Virtual response including element errors.
    pub fn true_virtual_steering(&self, deg: f64) -> Vec<Complex64> {
        let at = self.tx_steering(deg);
        let ar = self.rx_steering(deg);
        let mut out = Vec::with_capacity(self.virtual_count());
        for (r, er) in ar.iter().zip(&self.rx_errors) {
            for (t, et) in at.iter().zip(&self.tx_errors) {
                out.push(r * er * t * et);
            }
        }
        out
    }
}

fn steering(count: usize, spacing: f64, deg: f64) -> Vec<Complex64> {
    let s = libm::sin(deg.to_radians());
    (0..count)
        .map(|i| cis(TAU * spacing * i as f64 * s))
        .collect()
}
