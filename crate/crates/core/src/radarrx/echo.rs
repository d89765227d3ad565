use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_complex::Complex64;
use rand::Rng;

use super::array::ArrayModel;
use super::scene::{classify_target, Exclusion, TargetScene};
use crate::error::{bail, Result};
use crate::fhwave::{pulse, HopPlan, IqFrame, PskGrid};
use crate::impair::add_noise;
use crate::math::cis;
use crate::RadarConfig;

/// Receive-array frames of one CPI and the targets left out of them.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoFrames {
    /// One channel per receive element.
    pub frame: IqFrame,
    /// `(target index, reason)` of every excluded target.
    pub excluded: Vec<(usize, Exclusion)>,
}

/// Transmit pulses `pulses[i][m]` of every PRT and antenna.
pub fn reference_pulses(
    plan: &HopPlan,
    psk: &PskGrid,
    cfg: &RadarConfig,
) -> Vec<Vec<Vec<Complex64>>> {
    (0..plan.prts())
        .map(|i| {
            (0..cfg.tx_antennas)
                .map(|m| pulse(plan, psk, cfg, i, m))
                .collect()
        })
        .collect()
}

/// Echoes of `scene` at every receive element.
///
/// Delays are rounded to the sample grid and Doppler is applied per PRT
/// (stop-and-hop). The receiver is blanked while transmitting, so the first
/// `H N_h` samples of each PRT are zero; noise of variance
/// `noise_variance` is added everywhere else.
pub fn synthesize_echo<R: Rng + ?Sized>(
    plan: &HopPlan,
    psk: &PskGrid,
    scene: &TargetScene,
    array: &ArrayModel,
    cfg: &RadarConfig,
    noise_variance: f64,
    rng: &mut R,
) -> Result<EchoFrames> {
    cfg.validate()?;
    array.validate()?;
    if array.tx_count() != cfg.tx_antennas {
        bail!(
            Dimension,
            "array has {} transmitters, config has {}",
            array.tx_count(),
            cfg.tx_antennas
        );
    }
    if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
        bail!(Domain, "noise variance must be finite and non-negative");
    }
    let n_p = cfg.samples_per_prt();
    let active = cfg.active_samples();
    let prts = plan.prts();
    let rx = array.rx_count();
    let pulses = reference_pulses(plan, psk, cfg);
    let mut channels = vec![vec![Complex64::new(0.0, 0.0); prts * n_p]; rx];
    let mut excluded = Vec::new();

    for (idx, target) in scene.targets.iter().enumerate() {
        if let Some(reason) = classify_target(target, cfg) {
            excluded.push((idx, reason));
            continue;
        }
        let d = target.delay_samples(cfg);
        let fd = target.doppler(cfg);
        let at = array.tx_steering(target.azimuth);
        let ar = array.rx_steering(target.azimuth);
        let tx_gain: Vec<Complex64> = at
            .iter()
            .zip(&array.tx_errors)
            .map(|(a, e)| a * e)
            .collect();
        for (i, pulse) in pulses.iter().enumerate().take(prts) {
            let amp = target.coefficient * cis(TAU * fd * i as f64 * cfg.prt);
            // superposition of the transmit antennas as seen from the target
            let mut echo = vec![Complex64::new(0.0, 0.0); active];
            for (m, g) in tx_gain.iter().enumerate() {
                for (e, s) in echo.iter_mut().zip(&pulse[m]) {
                    *e += g * s;
                }
            }
            for (n, ch) in channels.iter_mut().enumerate() {
                let g = amp * ar[n] * array.rx_errors[n];
                let start = i * n_p + d;
                for (o, e) in ch[start..start + active].iter_mut().zip(&echo) {
                    *o += g * e;
                }
            }
        }
    }
    for ch in &mut channels {
        add_noise(ch, noise_variance, rng);
        for i in 0..prts {
            ch[i * n_p..i * n_p + active].fill(Complex64::new(0.0, 0.0));
        }
    }
    Ok(EchoFrames {
        frame: IqFrame {
            sample_rate: cfg.sample_rate,
            prt_len: n_p,
            channels,
        },
        excluded,
    })
}
