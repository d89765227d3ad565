use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::echo::reference_pulses;
use crate::error::{bail, Result};
use crate::fft::{Direction, Fft};
use crate::fhwave::{HopPlan, IqFrame, PskGrid};
use crate::RadarConfig;

/// Matched-filter outputs `data[(i * P + p) * bins + t]` for PRT `i`,
/// virtual channel `p` and range bin `t` (lag `first_bin + t` samples).
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfiles {
    pub prts: usize,
    pub channels: usize,
    pub bins: usize,
    pub first_bin: usize,
    pub data: Vec<Complex64>,
}

impl RangeProfiles {
    pub fn profile(&self, prt: usize, channel: usize) -> &[Complex64] {
        let start = (prt * self.channels + channel) * self.bins;
        &self.data[start..start + self.bins]
    }
}

/// FFT length used for the linear correlation of one PRT.
pub fn correlation_len(cfg: &RadarConfig) -> usize {
    (cfg.samples_per_prt() + cfg.active_samples()).next_power_of_two()
}

/// Correlates every receive channel with every transmit pulse of the same
/// PRT. Output lags cover the receive window `[H N_h, N_p)`.
pub fn matched_filter(
    frame: &IqFrame,
    plan: &HopPlan,
    psk: &PskGrid,
    cfg: &RadarConfig,
) -> Result<RangeProfiles> {
    let n_p = cfg.samples_per_prt();
    let prts = plan.prts();
    if frame.channel_count() == 0 {
        bail!(Dimension, "echo frame has no channels");
    }
    frame.check_shape(frame.channel_count(), prts * n_p)?;
    let m_count = cfg.tx_antennas;
    let rx = frame.channel_count();
    let first_bin = cfg.active_samples();
    let bins = n_p - first_bin;
    let len = correlation_len(cfg);
    let fwd = Fft::new(len, Direction::Forward);
    let inv = Fft::new(len, Direction::Inverse);
    let pulses = reference_pulses(plan, psk, cfg);
    let channels = rx * m_count;
    let mut data = vec![Complex64::new(0.0, 0.0); prts * channels * bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let mut refs: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); len]; m_count];
    let scale = 1.0 / len as f64;
    for i in 0..prts {
        for (m, r) in refs.iter_mut().enumerate() {
            r.fill(Complex64::new(0.0, 0.0));
            r[..pulses[i][m].len()].copy_from_slice(&pulses[i][m]);
            fwd.process(r);
        }
        for n in 0..rx {
            let mut y = vec![Complex64::new(0.0, 0.0); len];
            y[..n_p].copy_from_slice(&frame.channels[n][i * n_p..(i + 1) * n_p]);
            fwd.process(&mut y);
            for (m, r) in refs.iter().enumerate() {
                for ((b, a), s) in buf.iter_mut().zip(&y).zip(r) {
                    *b = a * s.conj();
                }
                inv.process(&mut buf);
                let p = n * m_count + m;
                let start = (i * channels + p) * bins;
                for (o, v) in data[start..start + bins]
                    .iter_mut()
                    .zip(&buf[first_bin..n_p])
                {
                    *o = v * scale;
                }
            }
        }
    }
    Ok(RangeProfiles {
        prts,
        channels,
        bins,
        first_bin,
        data,
    })
}

/// Range-Doppler cube `data[(f * P + p) * bins + t]`.
///
/// Doppler bin `f` is the FFT index; [`RangeDopplerMap::signed_doppler`]
/// maps it to `-N_c/2..N_c/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerMap {
    pub doppler_bins: usize,
    pub channels: usize,
    pub range_bins: usize,
    /// Sample lag of range bin 0.
    pub first_range_bin: usize,
    /// Metres per range bin.
    pub range_bin_width: f64,
    /// Hz per Doppler bin.
    pub doppler_bin_width: f64,
    pub wavelength: f64,
    pub data: Vec<Complex64>,
}

impl RangeDopplerMap {
    pub fn get(&self, doppler: usize, channel: usize, range: usize) -> Complex64 {
        self.data[(doppler * self.channels + channel) * self.range_bins + range]
    }

    /// Channel vector at one cell.
    pub fn channel_vector(&self, doppler: usize, range: usize) -> Vec<Complex64> {
        (0..self.channels)
            .map(|p| self.get(doppler, p, range))
            .collect()
    }

    /// Incoherent statistic `sum_p |Y|` of every cell, `[f * bins + t]`.
    pub fn statistic(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.doppler_bins * self.range_bins];
        for f in 0..self.doppler_bins {
            for p in 0..self.channels {
                let start = (f * self.channels + p) * self.range_bins;
                let row = &mut out[f * self.range_bins..(f + 1) * self.range_bins];
                for (o, v) in row
                    .iter_mut()
                    .zip(&self.data[start..start + self.range_bins])
                {
                    *o += v.norm();
                }
            }
        }
        out
    }

    /// Signed Doppler index of FFT bin `f`.
    pub fn signed_doppler(&self, f: usize) -> i64 {
        let n = self.doppler_bins as i64;
        let f = f as i64;
        if f >= (n + 1) / 2 {
            f - n
        } else {
            f
        }
    }

    pub fn range_of(&self, range_bin: usize) -> f64 {
        (self.first_range_bin + range_bin) as f64 * self.range_bin_width
    }

    pub fn velocity_of(&self, doppler_bin: usize) -> f64 {
        self.wavelength / 2.0 * self.signed_doppler(doppler_bin) as f64 * self.doppler_bin_width
    }
}

/// Slow-time FFT of every (channel, range bin).
pub fn mtd(profiles: &RangeProfiles, cfg: &RadarConfig) -> RangeDopplerMap {
    let nc = profiles.prts;
    let (pc, bins) = (profiles.channels, profiles.bins);
    let fft = Fft::new(nc, Direction::Forward);
    let mut data = vec![Complex64::new(0.0, 0.0); nc * pc * bins];
    let mut col = vec![Complex64::new(0.0, 0.0); nc];
    for p in 0..pc {
        for t in 0..bins {
            for (i, c) in col.iter_mut().enumerate() {
                *c = profiles.data[(i * pc + p) * bins + t];
            }
            fft.process(&mut col);
            for (f, c) in col.iter().enumerate() {
                data[(f * pc + p) * bins + t] = *c;
            }
        }
    }
    RangeDopplerMap {
        doppler_bins: nc,
        channels: pc,
        range_bins: bins,
        first_range_bin: profiles.first_bin,
        range_bin_width: cfg.range_bin_width(),
        doppler_bin_width: 1.0 / (nc as f64 * cfg.prt),
        wavelength: cfg.wavelength(),
        data,
    }
}
