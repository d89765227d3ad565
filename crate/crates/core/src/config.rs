//! Static radar/waveform parameters.

use core::f64::consts::PI;

use crate::error::{bail, Result};
use crate::math::as_integer;
use crate::SPEED_OF_LIGHT;

/// All static waveform and clock parameters of the FH-MIMO radar.
///
/// Sub-band `k` (`0 <= k < K`) sits at baseband frequency
/// `(floor(-K/2) + k) * B / K`; sub-band `ceil(K/2)` is the zero-frequency
/// one.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarConfig {
    /// Number of sub-bands `K`.
    pub subbands: usize,
    /// Number of transmit antennas `M`.
    pub tx_antennas: usize,
    /// Hops per pulse `H`.
    pub hops_per_pulse: usize,
    /// Hop duration `T` (s).
    pub hop_duration: f64,
    /// Pulse repetition time `T_p` (s).
    pub prt: f64,
    /// Radar bandwidth `B` (Hz).
    pub bandwidth: f64,
    /// Complex sampling rate `f_s` (Hz).
    pub sample_rate: f64,
    /// Carrier frequency `f_c` (Hz).
    pub carrier: f64,
    /// PRTs per coherent processing interval `N_c`.
    pub prts_per_cpi: usize,
}

impl Default for RadarConfig {
    /// The experiment parameters: K=20, M=2, H=5, T=1 us, T_p=40 us,
    /// B=20 MHz, f_s=40 MHz, f_c=5.5 GHz, N_c=128.
    fn default() -> Self {
        RadarConfig {
            subbands: 20,
            tx_antennas: 2,
            hops_per_pulse: 5,
            hop_duration: 1e-6,
            prt: 40e-6,
            bandwidth: 20e6,
            sample_rate: 40e6,
            carrier: 5.5e9,
            prts_per_cpi: 128,
        }
    }
}

const INT_TOL: f64 = 1e-9;

impl RadarConfig {
    /// Checks every waveform constraint and returns the config on success.
    pub fn validate(&self) -> Result<()> {
        let k = self.subbands;
        let m = self.tx_antennas;
        if k < 2 {
            bail!(Config, "need at least 2 sub-bands, got {k}");
        }
        if m == 0 || m > k {
            bail!(Config, "transmit antenna count {m} must be in 1..={k}");
        }
        if self.hops_per_pulse < m + 1 {
            bail!(
                Config,
                "pilot design needs H >= M+1 (H={}, M={m})",
                self.hops_per_pulse
            );
        }
        for (name, v) in [
            ("hop duration", self.hop_duration),
            ("PRT", self.prt),
            ("bandwidth", self.bandwidth),
            ("sample rate", self.sample_rate),
            ("carrier", self.carrier),
        ] {
            if !(v.is_finite() && v > 0.0) {
                bail!(Config, "{name} must be positive and finite, got {v}");
            }
        }
        if self.prts_per_cpi == 0 {
            bail!(Config, "a CPI needs at least one PRT");
        }
        if self.sample_rate < self.bandwidth * (1.0 - INT_TOL) {
            bail!(
                Config,
                "sample rate {} below bandwidth {}",
                self.sample_rate,
                self.bandwidth
            );
        }
        let cycles = self.bandwidth * self.hop_duration / k as f64;
        match as_integer(cycles, INT_TOL) {
            Some(c) if c >= 1 => {}
            _ => bail!(Config, "B*T/K = {cycles} is not a positive integer"),
        }
        let n_h = self.sample_rate * self.hop_duration;
        if as_integer(n_h, INT_TOL).unwrap_or(0) == 0 {
            bail!(
                Config,
                "samples per hop f_s*T = {n_h} is not a positive integer"
            );
        }
        let n_p = self.sample_rate * self.prt;
        if as_integer(n_p, INT_TOL).is_none() {
            bail!(Config, "samples per PRT f_s*T_p = {n_p} is not an integer");
        }
        if self.hops_per_pulse as f64 * self.hop_duration > self.prt * (1.0 + INT_TOL) {
            bail!(Config, "H*T exceeds the PRT");
        }
        Ok(())
    }

    /// Samples per hop `N_h = f_s T`.
    pub fn samples_per_hop(&self) -> usize {
        libm::round(self.sample_rate * self.hop_duration) as usize
    }

    /// Samples per PRT `N_p = f_s T_p`.
    pub fn samples_per_prt(&self) -> usize {
        libm::round(self.sample_rate * self.prt) as usize
    }

    /// Samples carrying the transmitted pulse (`H * N_h`).
    pub fn active_samples(&self) -> usize {
        self.hops_per_pulse * self.samples_per_hop()
    }

    /// Integer number of tone cycles per hop between adjacent sub-bands
    /// (`B T / K`).
    pub fn cycles_per_subband(&self) -> usize {
        libm::round(self.bandwidth * self.hop_duration / self.subbands as f64) as usize
    }

    /// Index of the zero-frequency sub-band, `ceil(K/2)`.
    pub fn zero_subband(&self) -> usize {
        self.subbands.div_ceil(2)
    }

    /// Signed sub-band number `floor(-K/2) + k`.
    pub fn signed_subband(&self, k: usize) -> i64 {
        k as i64 - self.zero_subband() as i64
    }

    /// Baseband frequency of sub-band `k` in Hz.
    pub fn subband_frequency(&self, k: usize) -> Result<f64> {
        if k >= self.subbands {
            bail!(Domain, "sub-band {k} outside 0..{}", self.subbands);
        }
        Ok(self.signed_subband(k) as f64 * self.bandwidth / self.subbands as f64)
    }

    /// Angular baseband frequency of sub-band `k` (rad/s). Panics on an
    /// out-of-range index.
    pub fn subband_omega(&self, k: usize) -> f64 {
        2.0 * PI * self.subband_frequency(k).expect("sub-band index in range")
    }

    /// Signed tone cycles per hop of sub-band `k`.
    pub fn subband_cycles(&self, k: usize) -> i64 {
        self.signed_subband(k) * self.cycles_per_subband() as i64
    }

    /// DFT bin of sub-band `k` in an `N_h`-point per-hop transform.
    pub fn subband_bin(&self, k: usize) -> usize {
        let n = self.samples_per_hop() as i64;
        self.subband_cycles(k).rem_euclid(n) as usize
    }

    /// Pilot offset index `kappa = <k - k0>_K`.
    pub fn pilot_offset(&self, k: usize) -> usize {
        (k + self.subbands - self.zero_subband()) % self.subbands
    }

    /// Sub-band carrying pilot offset `kappa`.
    pub fn subband_from_offset(&self, kappa: usize) -> usize {
        (self.zero_subband() + kappa) % self.subbands
    }

    /// Number of PRTs in one pilot cycle. Offset 0 (the zero-frequency
    /// sub-band) never needs a cycled pilot, so the cycle visits offsets
    /// `1..K` only.
    pub fn pilot_cycle_len(&self) -> usize {
        self.subbands - 1
    }

    /// Cycled-pilot offset transmitted in PRT `i`: `1 + <i>_{K-1}`.
    pub fn pilot_offset_for_prt(&self, prt: usize) -> usize {
        1 + prt % self.pilot_cycle_len()
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier
    }

    /// Range hidden behind the transmit window, `c H T / 2` (m).
    pub fn blind_zone(&self) -> f64 {
        SPEED_OF_LIGHT * self.hops_per_pulse as f64 * self.hop_duration / 2.0
    }

    /// Range covered by one fast-time sample, `c / (2 f_s)` (m).
    pub fn range_bin_width(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.sample_rate)
    }

    /// Doppler resolution `1 / (N_c T_p)` (Hz).
    pub fn doppler_bin_width(&self) -> f64 {
        1.0 / (self.prts_per_cpi as f64 * self.prt)
    }

    /// Radial velocity per Doppler bin, `lambda / 2 * df` (m/s).
    pub fn velocity_bin_width(&self) -> f64 {
        self.wavelength() / 2.0 * self.doppler_bin_width()
    }

    /// Largest unambiguous radial speed, `lambda / (4 T_p)` (m/s).
    pub fn max_unambiguous_velocity(&self) -> f64 {
        self.wavelength() / (4.0 * self.prt)
    }

    /// Largest unambiguous range for echoes fully inside one PRT (m).
    pub fn max_unambiguous_range(&self) -> f64 {
        SPEED_OF_LIGHT * (self.prt - self.hops_per_pulse as f64 * self.hop_duration) / 2.0
    }

    /// Time offset of hop `h` in PRT `i` from the start of the CPI (s).
    pub fn hop_start_time(&self, prt: usize, hop: usize) -> f64 {
        prt as f64 * self.prt + hop as f64 * self.hop_duration
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_defaults() {
        let cfg = RadarConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.samples_per_prt(), 1600);
        assert_eq!(cfg.samples_per_hop(), 40);
        assert_eq!(cfg.active_samples(), 200);
        assert_eq!(cfg.zero_subband(), 10);
        assert!((cfg.blind_zone() - 750.0).abs() < 1e-9);
        assert!((cfg.range_bin_width() - 3.75).abs() < 1e-12);
        assert!((cfg.doppler_bin_width() - 195.3125).abs() < 1e-9);
    }

    #[test]
    fn subband_frequencies() {
        let cfg = RadarConfig::default();
        assert_eq!(cfg.subband_frequency(0).unwrap(), -10e6);
        assert_eq!(cfg.subband_frequency(19).unwrap(), 9e6);
        assert_eq!(cfg.subband_frequency(10).unwrap(), 0.0);
        assert!(matches!(
            cfg.subband_frequency(20),
            Err(crate::Error::Domain(_))
        ));
        // odd K: zero sub-band is ceil(K/2)
        let odd = RadarConfig {
            subbands: 5,
            bandwidth: 5e6,
            sample_rate: 5e6,
            ..RadarConfig::default()
        };
        assert_eq!(odd.zero_subband(), 3);
        assert_eq!(odd.subband_frequency(3).unwrap(), 0.0);
        assert_eq!(odd.subband_frequency(0).unwrap(), -3e6);
    }

    #[test]
    fn bins_are_one_apart_at_twice_oversampling() {
        // 1 MHz spacing against a 40 MHz / 40-point grid is one bin
        let cfg = RadarConfig::default();
        assert_eq!(cfg.subband_bin(10), 0);
        assert_eq!(cfg.subband_bin(11), 1);
        assert_eq!(cfg.subband_bin(9), 39);
        assert_eq!(cfg.subband_bin(0), 30);
        // with T = 2 us the spacing becomes two bins
        let long = RadarConfig {
            hop_duration: 2e-6,
            ..RadarConfig::default()
        };
        long.validate().unwrap();
        assert_eq!(long.subband_bin(11), 2);
    }

    #[test]
    fn pilot_offsets() {
        let cfg = RadarConfig::default();
        assert_eq!(cfg.pilot_offset(10), 0);
        assert_eq!(cfg.pilot_offset(5), 15);
        assert_eq!(cfg.subband_from_offset(15), 5);
        assert_eq!(cfg.pilot_offset_for_prt(0), 1);
        assert_eq!(cfg.pilot_offset_for_prt(18), 19);
        assert_eq!(cfg.pilot_offset_for_prt(19), 1);
        assert_eq!(cfg.pilot_offset_for_prt(23), 5);
    }

    #[test]
    fn rejects_broken_configs() {
        let bad_cycles = RadarConfig {
            hop_duration: 0.5e-6,
            ..RadarConfig::default()
        };
        assert!(bad_cycles.validate().is_err());
        let few_hops = RadarConfig {
            hops_per_pulse: 2,
            ..RadarConfig::default()
        };
        assert!(few_hops.validate().is_err());
        let long_pulse = RadarConfig {
            hops_per_pulse: 41,
            ..RadarConfig::default()
        };
        assert!(long_pulse.validate().is_err());
    }
}
