//! Transmitter/receiver hardware-error model of the communication link.
//!
//! The receiver sees, in hop `h` of PRT `i` and at within-hop sample `n`,
//!
//! ```text
//! sum_m a_ihm * beta_m(k) * exp(j [w_k (n/f_s + dt_ih) + dw (t_ih + n/f_s + dt_ih)]) + noise
//! ```
//!
//! where `a_ihm` is the complex amplitude of antenna `m`'s tone (its PSK
//! symbol), `w_k` the planned baseband frequency, `dt_ih` the accumulated
//! sampling-timing offset and `dw` the carrier-frequency offset. Because
//! every transmitted hop is a pure tone the model is applied analytically,
//! hop by hop, instead of resampling.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{bail, Result};
use crate::fhwave::{tone_phase, HopPlan, IqFrame};
use crate::math::{cis, db_to_linear, sinc};
use crate::RadarConfig;

/// Sampling-period offset `dT_s = -rho / (f_s (1 - rho))` for a clock error
/// of `rho` (fractional).
pub fn sto_from_rho(rho: f64, sample_rate: f64) -> f64 {
    -rho / (sample_rate * (1.0 - rho))
}

/// Inverse of [`sto_from_rho`].
pub fn rho_from_sto(sto_step: f64, sample_rate: f64) -> f64 {
    let x = sto_step * sample_rate;
    -x / (1.0 - x)
}

/// Continuous integration-window gain of a hop under CFO:
/// `T sinc(dw T / 2) e^{j dw T / 2}`.
pub fn window_gain(cfo: f64, hop_duration: f64) -> Complex64 {
    let half = cfo * hop_duration / 2.0;
    cis(half) * (hop_duration * sinc(half))
}

/// Discrete counterpart of [`window_gain`], normalised to 1 at zero CFO:
/// `(1/N) sum_n e^{j dw n / f_s}`.
pub fn discrete_window_gain(cfo: f64, samples: usize, sample_rate: f64) -> Complex64 {
    let step = cfo / sample_rate;
    let half = step / 2.0;
    let n = samples as f64;
    if libm::fabs(libm::sin(half)) < 1e-300 {
        return Complex64::new(1.0, 0.0);
    }
    cis(half * (n - 1.0)) * (libm::sin(half * n) / (n * libm::sin(half)))
}

/// Per-antenna complex gain `beta_m(k) = c_m g_m(k)` over the sub-bands.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontEndProfile {
    /// `gains[m][k]`: frequency response of antenna `m`'s chain.
    pub gains: Vec<Vec<Complex64>>,
    /// Channel scalar per antenna.
    pub channel: Vec<Complex64>,
}

impl FrontEndProfile {
    /// Unit gains everywhere.
    pub fn flat(antennas: usize, subbands: usize) -> Self {
        FrontEndProfile {
            gains: vec![vec![Complex64::new(1.0, 0.0); subbands]; antennas],
            channel: vec![Complex64::new(1.0, 0.0); antennas],
        }
    }

    /// Smooth random ripple: log-magnitude and phase follow independent
    /// random cubic polynomials over the band, scaled so their peak
    /// excursions over the sub-bands are exactly `magnitude_db` and
    /// `phase_rad`. Channel scalars get unit magnitude and uniform phase.
    pub fn random_ripple<R: Rng + ?Sized>(
        antennas: usize,
        subbands: usize,
        magnitude_db: f64,
        phase_rad: f64,
        rng: &mut R,
    ) -> Self {
        let coef = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
        let curve = |rng: &mut R, peak: f64| -> Vec<f64> {
            let c: [f64; 4] = core::array::from_fn(|_| coef.sample(rng));
            let raw: Vec<f64> = (0..subbands)
                .map(|k| {
                    let x = if subbands > 1 {
                        2.0 * k as f64 / (subbands - 1) as f64 - 1.0
                    } else {
                        0.0
                    };
                    c[0] + x * (c[1] + x * (c[2] + x * c[3]))
                })
                .collect();
            let max = raw.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let scale = if max > 0.0 { peak / max } else { 0.0 };
            raw.into_iter().map(|v| v * scale).collect()
        };
        let mut gains = Vec::with_capacity(antennas);
        for _ in 0..antennas {
            let mag = curve(rng, magnitude_db);
            let ph = curve(rng, phase_rad);
            gains.push(
                mag.iter()
                    .zip(&ph)
                    .map(|(&db, &p)| cis(p) * libm::sqrt(db_to_linear(db)))
                    .collect(),
            );
        }
        let phase = Uniform::new(0.0, TAU).expect("valid range");
        let channel = (0..antennas).map(|_| cis(phase.sample(rng))).collect();
        FrontEndProfile { gains, channel }
    }

    /// Combined gain `c_m g_m(k)`.
    pub fn beta(&self, antenna: usize, subband: usize) -> Complex64 {
        self.channel[antenna] * self.gains[antenna][subband]
    }

    fn validate(&self, cfg: &RadarConfig) -> Result<()> {
        if self.gains.len() != cfg.tx_antennas || self.channel.len() != cfg.tx_antennas {
            bail!(
                Dimension,
                "front-end profile covers {} antennas, config has {}",
                self.gains.len(),
                cfg.tx_antennas
            );
        }
        if self.gains.iter().any(|g| g.len() != cfg.subbands) {
            bail!(
                Dimension,
                "front-end gain curves must have K = {} points",
                cfg.subbands
            );
        }
        let bad = |v: &Complex64| !(v.norm() > 0.0 && v.norm().is_finite());
        if self.gains.iter().flatten().any(bad) || self.channel.iter().any(bad) {
            bail!(Domain, "front-end gains must be finite and non-zero");
        }
        Ok(())
    }
}

/// Hardware-error parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpairmentSpec {
    /// Initial sampling-timing offset `dt_0` (s).
    pub initial_sto: f64,
    /// Per-sample timing offset `dT_s` (s).
    pub sto_step: f64,
    /// Carrier-frequency offset `dw` (rad/s).
    pub cfo: f64,
    /// Complex AWGN variance per sample.
    pub noise_variance: f64,
    pub front_end: FrontEndProfile,
    /// Later front-end states as `(first PRT, profile)`, ascending in PRT.
    pub front_end_changes: Vec<(usize, FrontEndProfile)>,
}

impl ImpairmentSpec {
    /// No impairment at all.
    pub fn identity(cfg: &RadarConfig) -> Self {
        ImpairmentSpec {
            initial_sto: 0.0,
            sto_step: 0.0,
            cfo: 0.0,
            noise_variance: 0.0,
            front_end: FrontEndProfile::flat(cfg.tx_antennas, cfg.subbands),
            front_end_changes: Vec::new(),
        }
    }

    /// Offsets derived from a common clock error `rho`: the sampling clock
    /// gives `dT_s`, the local oscillator gives `dw = 2 pi f_c rho`.
    pub fn from_clock(cfg: &RadarConfig, rho: f64, initial_sto: f64) -> Self {
        ImpairmentSpec {
            initial_sto,
            sto_step: sto_from_rho(rho, cfg.sample_rate),
            cfo: TAU * cfg.carrier * rho,
            ..Self::identity(cfg)
        }
    }

    /// Clock error implied by `sto_step`.
    pub fn rho(&self, cfg: &RadarConfig) -> f64 {
        rho_from_sto(self.sto_step, cfg.sample_rate)
    }

    /// Front-end state in force during PRT `prt`.
    pub fn front_end_at(&self, prt: usize) -> &FrontEndProfile {
        self.front_end_changes
            .iter()
            .rev()
            .find(|(start, _)| *start <= prt)
            .map_or(&self.front_end, |(_, p)| p)
    }

    pub fn validate(&self, cfg: &RadarConfig) -> Result<()> {
        cfg.validate()?;
        let finite = [
            self.initial_sto,
            self.sto_step,
            self.cfo,
            self.noise_variance,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            bail!(Domain, "impairment parameters must be finite");
        }
        if self.noise_variance < 0.0 {
            bail!(Domain, "noise variance must be non-negative");
        }
        if self.cfo.abs() * cfg.prt >= PI {
            bail!(
                Domain,
                "|CFO| * T_p = {} must stay below pi",
                self.cfo.abs() * cfg.prt
            );
        }
        if self.rho(cfg).abs() >= 1e-3 {
            bail!(Domain, "clock error {} exceeds 1e-3", self.rho(cfg));
        }
        self.front_end.validate(cfg)?;
        let mut last = 0;
        for (start, p) in &self.front_end_changes {
            if *start < last {
                bail!(Config, "front-end changes must be in ascending PRT order");
            }
            last = *start;
            p.validate(cfg)?;
        }
        Ok(())
    }
}

/// Accumulated sampling-timing offset `dt_ih = dt_0 + (i N_p + h N_h) dT_s`.
pub fn accumulated_sto(prt: usize, hop: usize, spec: &ImpairmentSpec, cfg: &RadarConfig) -> f64 {
    let samples = prt * cfg.samples_per_prt() + hop * cfg.samples_per_hop();
    spec.initial_sto + samples as f64 * spec.sto_step
}

/// Adds circular complex Gaussian noise of variance `variance`.
pub fn add_noise<R: Rng + ?Sized>(samples: &mut [Complex64], variance: f64, rng: &mut R) {
    if variance <= 0.0 {
        return;
    }
    let sigma = libm::sqrt(variance / 2.0);
    for s in samples {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *s += Complex64::new(re, im) * sigma;
    }
}

/// Communication-receiver view of a transmit frame.
///
/// Each antenna's hop segment is projected onto its planned tone to obtain
/// the transmitted amplitude, then re-synthesised with the timing,
/// frequency and gain offsets of the hop. The result is a single-channel
/// frame of the same length; samples outside the active part of each PRT
/// contain noise only.
pub fn apply<R: Rng + ?Sized>(
    frame: &IqFrame,
    plan: &HopPlan,
    spec: &ImpairmentSpec,
    cfg: &RadarConfig,
    rng: &mut R,
) -> Result<IqFrame> {
    spec.validate(cfg)?;
    let n_p = cfg.samples_per_prt();
    let n_h = cfg.samples_per_hop();
    frame.check_shape(cfg.tx_antennas, plan.prts() * n_p)?;
    if plan.hops() != cfg.hops_per_pulse || plan.antennas() != cfg.tx_antennas {
        bail!(Dimension, "plan dimensions do not match the configuration");
    }
    let mut out = vec![Complex64::new(0.0, 0.0); frame.len()];
    let dt_s = 1.0 / cfg.sample_rate;
    for i in 0..plan.prts() {
        let fe = spec.front_end_at(i);
        for h in 0..cfg.hops_per_pulse {
            let start = i * n_p + h * n_h;
            let dt = accumulated_sto(i, h, spec, cfg);
            let t_ih = cfg.hop_start_time(i, h);
            for m in 0..cfg.tx_antennas {
                let k = plan.slot(i, h, m).subband;
                let cycles = cfg.subband_cycles(k);
                let seg = &frame.channels[m][start..start + n_h];
                let amp: Complex64 = seg
                    .iter()
                    .enumerate()
                    .map(|(n, v)| v * cis(-tone_phase(cycles, n, n_h)))
                    .sum::<Complex64>()
                    / n_h as f64;
                let w = cfg.subband_omega(k);
                let common = amp * fe.beta(m, k) * cis(w * dt + spec.cfo * (t_ih + dt));
                for (n, o) in out[start..start + n_h].iter_mut().enumerate() {
                    let t = n as f64 * dt_s;
                    *o += common * cis(tone_phase(cycles, n, n_h) + spec.cfo * t);
                }
            }
        }
    }
    add_noise(&mut out, spec.noise_variance, rng);
    Ok(IqFrame {
        sample_rate: cfg.sample_rate,
        prt_len: n_p,
        channels: vec![out],
    })
}
