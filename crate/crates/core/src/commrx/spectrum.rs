use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{bail, Result};
use crate::fft::Dft;
use crate::fhwave::{HopLayout, IqFrame};
use crate::math::{cis, median};
use crate::RadarConfig;

/// A peak must exceed this multiple of the median bin magnitude.
pub const PEAK_FLOOR_FACTOR: f64 = 3.0;

/// DFT of one hop of the received stream, normalised by `N_h` so that a
/// unit tone on an integer bin yields a coefficient of magnitude 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HopSpectrum {
    pub prt: usize,
    pub hop: usize,
    pub coeffs: Vec<Complex64>,
    /// Median coefficient magnitude (noise-floor proxy).
    pub floor: f64,
}

impl HopSpectrum {
    /// Coefficient at the bin of sub-band `k`.
    pub fn subband(&self, cfg: &RadarConfig, k: usize) -> Complex64 {
        self.coeffs[cfg.subband_bin(k)]
    }

    /// Whether sub-band `k` stands above the noise floor.
    pub fn is_peak(&self, cfg: &RadarConfig, k: usize) -> bool {
        self.subband(cfg, k).norm() > PEAK_FLOOR_FACTOR * self.floor
    }
}

/// Per-hop transforms with a cached twiddle table.
#[derive(Debug, Clone)]
pub struct SpectrumAnalyzer {
    cfg: RadarConfig,
    dft: Dft,
}

impl SpectrumAnalyzer {
    pub fn new(cfg: &RadarConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(SpectrumAnalyzer {
            cfg: cfg.clone(),
            dft: Dft::new(cfg.samples_per_hop()),
        })
    }

    /// Spectrum of hop `hop` of PRT `prt` in `stream`. When `cfo` is
    /// non-zero the hop is first de-rotated by `e^{-j cfo n / f_s}`
    /// (within-hop time only).
    pub fn hop(&self, stream: &[Complex64], prt: usize, hop: usize, cfo: f64) -> HopSpectrum {
        let n_h = self.cfg.samples_per_hop();
        let start = prt * self.cfg.samples_per_prt() + hop * n_h;
        let seg = &stream[start..start + n_h];
        let coeffs: Vec<Complex64> = if cfo == 0.0 {
            self.dft.transform(seg)
        } else {
            let step = -cfo / self.cfg.sample_rate;
            let rotated: Vec<Complex64> = seg
                .iter()
                .enumerate()
                .map(|(n, v)| v * cis(step * n as f64))
                .collect();
            self.dft.transform(&rotated)
        }
        .into_iter()
        .map(|c| c / n_h as f64)
        .collect();
        let mags: Vec<f64> = coeffs.iter().map(|c: &Complex64| c.norm()).collect();
        HopSpectrum {
            prt,
            hop,
            coeffs,
            floor: median(&mags),
        }
    }

    /// Spectra of every hop of every whole PRT in `stream`.
    pub fn cpi(&self, stream: &[Complex64], cfo: f64) -> CpiSpectra {
        let prts = stream.len() / self.cfg.samples_per_prt();
        let hops = self.cfg.hops_per_pulse;
        let items = (0..prts)
            .flat_map(|i| (0..hops).map(move |h| (i, h)))
            .map(|(i, h)| self.hop(stream, i, h, cfo))
            .collect();
        CpiSpectra { prts, hops, items }
    }
}

/// Hop spectra of a CPI in `(prt, hop)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct CpiSpectra {
    pub prts: usize,
    pub hops: usize,
    pub items: Vec<HopSpectrum>,
}

impl CpiSpectra {
    pub fn get(&self, prt: usize, hop: usize) -> &HopSpectrum {
        &self.items[prt * self.hops + hop]
    }
}

/// Spectrum of hop `hop` in PRT `prt` of a single-channel frame.
pub fn hop_spectrum(
    frame: &IqFrame,
    prt: usize,
    hop: usize,
    cfg: &RadarConfig,
) -> Result<HopSpectrum> {
    frame.check_shape(1, (prt + 1) * cfg.samples_per_prt())?;
    if hop >= cfg.hops_per_pulse {
        bail!(Domain, "hop {hop} outside 0..{}", cfg.hops_per_pulse);
    }
    Ok(SpectrumAnalyzer::new(cfg)?.hop(&frame.channels[0], prt, hop, 0.0))
}

/// Sub-band of every antenna in one hop as read by the receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeakAssignment {
    /// Sub-band per antenna.
    pub subbands: Vec<usize>,
    /// Fewer than `M` usable peaks, or a pinned bin not among the `M`
    /// strongest.
    pub erased: bool,
    /// FHCS codeword index of the free sub-bands; `None` when it falls
    /// outside the usable part of the codebook.
    pub codeword: Option<u128>,
}

/// Assigns peaks to antennas: pinned slots take their known sub-band, the
/// strongest remaining sub-bands go to the free antennas in ascending
/// order.
pub fn assign_peaks(
    spectrum: &HopSpectrum,
    layout: &HopLayout,
    cfg: &RadarConfig,
) -> PeakAssignment {
    let m_count = cfg.tx_antennas;
    let mags: Vec<f64> = (0..cfg.subbands)
        .map(|k| spectrum.subband(cfg, k).norm())
        .collect();
    let mut subbands = alloc::vec![0; m_count];
    let mut erased = false;

    let mut order: Vec<usize> = (0..cfg.subbands).collect();
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));
    let top = &order[..m_count.min(order.len())];
    for &(m, _, k) in &layout.pinned {
        subbands[m] = k;
        if !top.contains(&k) || !spectrum.is_peak(cfg, k) {
            erased = true;
        }
    }

    let mut free: Vec<usize> = layout.available.clone();
    free.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));
    free.truncate(layout.free_antennas.len());
    if free.iter().any(|&k| !spectrum.is_peak(cfg, k)) {
        erased = true;
    }
    free.sort_unstable();
    for (&m, &k) in layout.free_antennas.iter().zip(&free) {
        subbands[m] = k;
    }
    let positions: Vec<usize> = free
        .iter()
        .map(|k| {
            layout
                .available
                .binary_search(k)
                .expect("chosen from available")
        })
        .collect();
    let codeword = layout
        .codebook
        .rank(&positions)
        .filter(|&r| r < layout.codebook.usable());
    PeakAssignment {
        subbands,
        erased,
        codeword,
    }
}
