//! Signal-processing core for frequency-hopping MIMO dual-function
//! radar-communications.
//!
//! The crate is `no_std` (it needs `alloc`) and contains the numerical
//! pieces only:
//!
//! - [`fhwave`]: constraint-satisfying hop plans, FHCS and PSK payload
//!   embedding, pilot pinning and baseband synthesis.
//! - [`impair`]: the transmitter/receiver hardware-error model (accumulating
//!   sampling-timing offset, carrier-frequency offset, frequency-dependent
//!   front-end gains, AWGN).
//! - [`commrx`]: per-hop spectral analysis, offset estimation, pilot-ratio
//!   tables and payload demodulation.
//! - [`radarrx`]: echo synthesis, matched filtering, Doppler processing,
//!   CA-CFAR, array calibration and angle estimation.
//!
//! File formats, configuration files, Monte-Carlo sweeps and the command
//! line live in the `fhjrc` companion crate.
#![no_std]
// `!(x > 0.0)` is used on purpose to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod commrx;
pub mod config;
pub mod error;
pub mod fft;
pub mod fhwave;
pub mod impair;
pub mod math;
pub mod radarrx;

pub use config::RadarConfig;
pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Propagation speed used for all range/delay conversions (m/s).
///
/// The rounded value reproduces the published blind-zone and range-bin
/// figures exactly (750 m, 3.75 m).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Seeded generator used everywhere randomness is needed.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Builds the simulation generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    use rand::SeedableRng;
    SimRng::seed_from_u64(seed)
}
