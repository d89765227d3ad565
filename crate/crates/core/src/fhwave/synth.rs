use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;

use super::frame::IqFrame;
use super::plan::HopPlan;
use super::psk::PskGrid;
use crate::error::{bail, Result};
use crate::math::cis;
use crate::RadarConfig;

/// Phase of sample `n` of a tone with `cycles` cycles per `n_h` samples,
/// reduced exactly in integer arithmetic.
pub fn tone_phase(cycles: i64, n: usize, n_h: usize) -> f64 {
    let r = (cycles as i128 * n as i128).rem_euclid(n_h as i128);
    TAU * r as f64 / n_h as f64
}

fn check_dims(plan: &HopPlan, psk: &PskGrid, cfg: &RadarConfig) -> Result<()> {
    if plan.hops() != cfg.hops_per_pulse || plan.antennas() != cfg.tx_antennas {
        bail!(
            Dimension,
            "plan is {}x{} (hops x antennas), config is {}x{}",
            plan.hops(),
            plan.antennas(),
            cfg.hops_per_pulse,
            cfg.tx_antennas
        );
    }
    if psk.len_slots() != plan.slots().len() {
        bail!(Dimension, "PSK grid does not match the plan");
    }
    Ok(())
}

/// Active part (`H * N_h` samples) of the pulse of `antenna` in PRT `prt`.
pub fn pulse(
    plan: &HopPlan,
    psk: &PskGrid,
    cfg: &RadarConfig,
    prt: usize,
    antenna: usize,
) -> Vec<Complex64> {
    let n_h = cfg.samples_per_hop();
    let mut out = Vec::with_capacity(cfg.active_samples());
    for h in 0..cfg.hops_per_pulse {
        let cycles = cfg.subband_cycles(plan.slot(prt, h, antenna).subband);
        let phi = psk.phase(prt, h, antenna);
        out.extend((0..n_h).map(|n| cis(phi + tone_phase(cycles, n, n_h))));
    }
    out
}

/// Transmit frame: one channel per antenna, `N_p` samples per PRT, hops
/// back to back from the start of each PRT, silence afterwards.
pub fn synthesize(plan: &HopPlan, psk: &PskGrid, cfg: &RadarConfig) -> Result<IqFrame> {
    cfg.validate()?;
    check_dims(plan, psk, cfg)?;
    let n_p = cfg.samples_per_prt();
    let len = plan.prts() * n_p;
    let mut channels = vec![vec![Complex64::new(0.0, 0.0); len]; cfg.tx_antennas];
    for (m, ch) in channels.iter_mut().enumerate() {
        for i in 0..plan.prts() {
            let p = pulse(plan, psk, cfg, i, m);
            ch[i * n_p..i * n_p + p.len()].copy_from_slice(&p);
        }
    }
    Ok(IqFrame {
        sample_rate: cfg.sample_rate,
        prt_len: n_p,
        channels,
    })
}
