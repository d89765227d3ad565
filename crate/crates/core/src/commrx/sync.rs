use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use super::spectrum::CpiSpectra;
use crate::error::{bail, Result};
use crate::impair::sto_from_rho;
use crate::math::circular_mean;
use crate::RadarConfig;

/// Pairwise phases closer to `pi` than this are flagged as ambiguous.
pub const AMBIGUITY_MARGIN: f64 = 0.1;

/// Carrier and clock offsets estimated from the zero-frequency pilots.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncEstimate {
    /// CFO (rad/s).
    pub cfo: f64,
    /// Clock error (fractional).
    pub rho: f64,
    /// Per-sample timing offset (s).
    pub sto_step: f64,
    /// Raw CFO of every PRT pair and antenna, in `(pair, antenna)` order.
    pub pair_estimates: Vec<f64>,
    /// Some pairwise phase came within [`AMBIGUITY_MARGIN`] of `pi`.
    pub ambiguous: bool,
}

/// Clock error and sampling-period offset implied by a CFO estimate.
pub fn estimate_clock(cfo: f64, cfg: &RadarConfig) -> (f64, f64) {
    let rho = cfo / (TAU * cfg.carrier);
    (rho, sto_from_rho(rho, cfg.sample_rate))
}

/// Combines pairwise CFO estimates by the circular mean of the phase they
/// imply over one PRT.
pub fn combine_cfo(pair_estimates: &[f64], cfg: &RadarConfig) -> Option<f64> {
    let n_p = cfg.samples_per_prt() as f64;
    let phases = pair_estimates
        .iter()
        .map(|&w| w * (cfg.prt + n_p * estimate_clock(w, cfg).1));
    circular_mean(phases).map(|p| cfo_from_phase(p, cfg))
}

/// CFO from the pilot phase advance over one PRT. The receiver's PRT is
/// `T_p + N_p dT_s` long and `dT_s` itself follows from the CFO, so the
/// relation is solved by fixed-point iteration.
fn cfo_from_phase(phase: f64, cfg: &RadarConfig) -> f64 {
    let n_p = cfg.samples_per_prt() as f64;
    let mut cfo = phase / cfg.prt;
    for _ in 0..4 {
        let (_, step) = estimate_clock(cfo, cfg);
        cfo = phase / (cfg.prt + n_p * step);
    }
    cfo
}

/// CFO from the phase progression of each antenna's zero-frequency pilot
/// across consecutive PRTs.
pub fn estimate_cfo(spectra: &CpiSpectra, cfg: &RadarConfig) -> Result<SyncEstimate> {
    if spectra.prts < 2 {
        bail!(
            InputLength,
            "CFO estimation needs at least 2 PRTs, got {}",
            spectra.prts
        );
    }
    let k0 = cfg.zero_subband();
    let mut pair_estimates = Vec::with_capacity((spectra.prts - 1) * cfg.tx_antennas);
    let mut phases = Vec::with_capacity(pair_estimates.capacity());
    let mut ambiguous = false;
    for i in 0..spectra.prts - 1 {
        for m in 0..cfg.tx_antennas {
            let a = spectra.get(i, m).subband(cfg, k0);
            let b = spectra.get(i + 1, m).subband(cfg, k0);
            let phase = (b * a.conj()).arg();
            ambiguous |= PI - phase.abs() < AMBIGUITY_MARGIN;
            phases.push(phase);
            pair_estimates.push(cfo_from_phase(phase, cfg));
        }
    }
    let Some(mean) = circular_mean(phases) else {
        bail!(Domain, "pilot phases cancel; CFO undefined");
    };
    let cfo = cfo_from_phase(mean, cfg);
    let (rho, sto_step) = estimate_clock(cfo, cfg);
    Ok(SyncEstimate {
        cfo,
        rho,
        sto_step,
        pair_estimates,
        ambiguous,
    })
}

impl SyncEstimate {
    /// Exact offsets, for receivers that are told the impairment.
    pub fn known(cfo: f64, sto_step: f64, cfg: &RadarConfig) -> Self {
        SyncEstimate {
            cfo,
            rho: crate::impair::rho_from_sto(sto_step, cfg.sample_rate),
            sto_step,
            pair_estimates: Vec::new(),
            ambiguous: false,
        }
    }
}
