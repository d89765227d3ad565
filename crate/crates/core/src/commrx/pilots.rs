use alloc::vec::Vec;
use num_complex::Complex64;

use super::spectrum::CpiSpectra;
use super::sync::SyncEstimate;
use crate::math::cis;
use crate::RadarConfig;

/// Pilot ratios `d_{m kappa} = S(i, m+1, m) / S(i, m, m)` of every PRT and
/// antenna; PRT `i` observes offset `kappa = 1 + <i>_{K-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotRatioTable {
    prts: usize,
    antennas: usize,
    subbands: usize,
    cycle: usize,
    /// `entries[i * M + m]`; `None` when a pilot was not detected.
    entries: Vec<Option<Complex64>>,
}

/// Ratio of the cycled pilot to the zero-frequency pilot per PRT and
/// antenna.
pub fn build_pilot_ratios(spectra: &CpiSpectra, cfg: &RadarConfig) -> PilotRatioTable {
    let k0 = cfg.zero_subband();
    let mut entries = Vec::with_capacity(spectra.prts * cfg.tx_antennas);
    for i in 0..spectra.prts {
        let k = cfg.subband_from_offset(cfg.pilot_offset_for_prt(i));
        for m in 0..cfg.tx_antennas {
            let zero = spectra.get(i, m);
            let cycled = spectra.get(i, m + 1);
            let ok = zero.is_peak(cfg, k0) && cycled.is_peak(cfg, k);
            entries.push(ok.then(|| cycled.subband(cfg, k) / zero.subband(cfg, k0)));
        }
    }
    PilotRatioTable {
        prts: spectra.prts,
        antennas: cfg.tx_antennas,
        subbands: cfg.subbands,
        cycle: cfg.pilot_cycle_len(),
        entries,
    }
}

/// Ratio of antenna `m`'s pilot for offset 0 (zero frequency against
/// itself one hop later): only the CFO term survives.
pub fn zero_offset_ratio(sync: &SyncEstimate, cfg: &RadarConfig) -> Complex64 {
    cis(sync.cfo * (cfg.hop_duration + cfg.samples_per_hop() as f64 * sync.sto_step))
}

impl PilotRatioTable {
    pub fn prts(&self) -> usize {
        self.prts
    }

    /// Offset observed in PRT `prt`.
    pub fn offset(&self, prt: usize) -> usize {
        1 + prt % self.cycle
    }

    /// Ratio measured in PRT `prt` for antenna `m`.
    pub fn get(&self, prt: usize, antenna: usize) -> Option<Complex64> {
        self.entries[prt * self.antennas + antenna]
    }

    /// Which offsets antenna `m` has observed within PRTs `range`.
    pub fn fill_state(&self, antenna: usize, range: core::ops::Range<usize>) -> Vec<bool> {
        let mut seen = alloc::vec![false; self.subbands];
        seen[0] = true;
        for i in range.filter(|&i| i < self.prts) {
            if self.get(i, antenna).is_some() {
                seen[self.offset(i)] = true;
            }
        }
        seen
    }

    /// Ratio for `(antenna, kappa)` from the group of `group_len` PRTs that
    /// contains `prt`, falling back to the nearest group that has it.
    /// Returns the PRT the ratio was measured in.
    pub fn lookup(
        &self,
        antenna: usize,
        kappa: usize,
        prt: usize,
        group_len: usize,
    ) -> Option<(usize, Complex64)> {
        let group_len = group_len.max(1);
        let groups = self.prts.div_ceil(group_len);
        let home = prt / group_len;
        let in_group = |g: usize| {
            (g * group_len..((g + 1) * group_len).min(self.prts))
                .filter(|&i| self.offset(i) == kappa)
                .find_map(|i| self.get(i, antenna).map(|d| (i, d)))
        };
        (0..groups).find_map(|dist| {
            let below = home.checked_sub(dist).and_then(in_group);
            below.or_else(|| {
                let g = home + dist;
                (dist > 0 && g < groups).then(|| in_group(g)).flatten()
            })
        })
    }

    /// All measurements of `(antenna, kappa)` as `(prt, ratio)`.
    pub fn observations(
        &self,
        antenna: usize,
        kappa: usize,
    ) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (0..self.prts)
            .filter(move |&i| self.offset(i) == kappa)
            .filter_map(move |i| self.get(i, antenna).map(|d| (i, d)))
    }
}
