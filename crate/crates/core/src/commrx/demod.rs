use alloc::vec::Vec;
use num_complex::Complex64;

use super::pilots::{build_pilot_ratios, zero_offset_ratio, PilotRatioTable};
use super::spectrum::{assign_peaks, CpiSpectra, SpectrumAnalyzer};
use super::sync::{estimate_cfo, SyncEstimate};
use crate::error::{bail, Result};
use crate::fhwave::{
    gray_encode, hop_layout, nearest_phase_index, push_index_bits, HopPlan, IqFrame, PskGrid,
};
use crate::impair::{accumulated_sto, ImpairmentSpec};
use crate::math::{cis, wrap_phase};
use crate::RadarConfig;

/// How payload phases are referenced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DemodMethod {
    /// Assumes frequency-flat front ends: only a common timing offset is
    /// fitted to the pilot ratios.
    FlatGain,
    /// Pilot ratio from the same PRT group, corrected by the timing/CFO
    /// progression between pilot and payload.
    Proposed,
    /// As `Proposed`, but every ratio is first referred back to the start
    /// of the CPI and averaged over all PRTs with the same offset.
    Averaged,
    /// Receiver is told the true impairment (simulation bound).
    KnownChannel,
}

impl DemodMethod {
    pub fn name(self) -> &'static str {
        match self {
            DemodMethod::FlatGain => "flat-gain",
            DemodMethod::Proposed => "proposed",
            DemodMethod::Averaged => "averaged",
            DemodMethod::KnownChannel => "known-channel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemodOptions {
    pub method: DemodMethod,
    /// PSK bits per symbol (0 = FHCS only).
    pub psk_order: u32,
    /// PRTs per pilot group; `0` selects one pilot cycle (`K - 1`).
    pub group_len: usize,
}

impl DemodOptions {
    pub fn new(method: DemodMethod, psk_order: u32) -> Self {
        DemodOptions {
            method,
            psk_order,
            group_len: 0,
        }
    }
}

/// Decision for one hop.
#[derive(Debug, Clone, PartialEq)]
pub struct HopDecision {
    pub prt: usize,
    pub hop: usize,
    /// Sub-band read for every antenna.
    pub subbands: Vec<usize>,
    /// Peak detection failed.
    pub erased: bool,
    /// Codeword index was in the usable codebook.
    pub fhcs_valid: bool,
    pub fhcs_bits: Vec<u8>,
}

impl HopDecision {
    pub fn fhcs_erased(&self) -> bool {
        self.erased || !self.fhcs_valid
    }
}

/// One demodulated PSK symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolRecord {
    pub prt: usize,
    pub hop: usize,
    pub antenna: usize,
    pub subband: usize,
    /// Pilot offset of the sub-band.
    pub offset: usize,
    /// Corrected phase estimate (rad), wrapped to `(-pi, pi]`.
    pub phase: f64,
    /// Nearest constellation index.
    pub index: u32,
    /// `phase` minus the nearest constellation phase.
    pub residual: f64,
    pub erased: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemodReport {
    pub method: DemodMethod,
    pub psk_order: u32,
    pub sync: SyncEstimate,
    pub hops: Vec<HopDecision>,
    /// Payload slots in `(prt, hop, antenna)` order.
    pub symbols: Vec<SymbolRecord>,
}

/// Bit/symbol error tallies; erasures count as half their bits wrong and
/// as one symbol error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorCounts {
    pub fhcs_bits: usize,
    pub fhcs_bit_errors: f64,
    pub fhcs_erased_hops: usize,
    pub psk_symbols: usize,
    pub psk_symbol_errors: f64,
    pub psk_bits: usize,
    pub psk_bit_errors: f64,
    pub psk_erased_symbols: usize,
}

impl ErrorCounts {
    pub fn fhcs_ber(&self) -> f64 {
        ratio(self.fhcs_bit_errors, self.fhcs_bits)
    }

    pub fn psk_ber(&self) -> f64 {
        ratio(self.psk_bit_errors, self.psk_bits)
    }

    pub fn psk_ser(&self) -> f64 {
        ratio(self.psk_symbol_errors, self.psk_symbols)
    }

    pub fn merge(&mut self, o: &ErrorCounts) {
        self.fhcs_bits += o.fhcs_bits;
        self.fhcs_bit_errors += o.fhcs_bit_errors;
        self.fhcs_erased_hops += o.fhcs_erased_hops;
        self.psk_symbols += o.psk_symbols;
        self.psk_symbol_errors += o.psk_symbol_errors;
        self.psk_bits += o.psk_bits;
        self.psk_bit_errors += o.psk_bit_errors;
        self.psk_erased_symbols += o.psk_erased_symbols;
    }
}

fn ratio(errors: f64, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        errors / total as f64
    }
}

impl DemodReport {
    /// Recovered FHCS stream (erased hops contribute zeros).
    pub fn fhcs_bits(&self) -> Vec<u8> {
        self.hops
            .iter()
            .flat_map(|h| h.fhcs_bits.iter().copied())
            .collect()
    }

    /// Recovered PSK stream, Gray-labelled, `psk_order` bits per symbol.
    pub fn psk_bits(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.symbols.len() * self.psk_order as usize);
        for s in &self.symbols {
            push_index_bits(gray_encode(s.index) as u128, self.psk_order, &mut out);
        }
        out
    }

    /// Compares against the transmitted plan and phases.
    pub fn score(&self, plan: &HopPlan, psk: &PskGrid, cfg: &RadarConfig) -> Result<ErrorCounts> {
        let truth = plan.fhcs_bits(cfg)?;
        let mut c = ErrorCounts::default();
        let mut cursor = 0;
        for hop in &self.hops {
            let width = hop.fhcs_bits.len();
            let Some(sent) = truth.get(cursor..cursor + width) else {
                bail!(Dimension, "report has more FHCS bits than the plan");
            };
            cursor += width;
            c.fhcs_bits += width;
            if hop.fhcs_erased() {
                if width > 0 {
                    c.fhcs_erased_hops += 1;
                }
                c.fhcs_bit_errors += width as f64 / 2.0;
            } else {
                c.fhcs_bit_errors += sent
                    .iter()
                    .zip(&hop.fhcs_bits)
                    .filter(|(a, b)| a != b)
                    .count() as f64;
            }
        }
        if cursor != truth.len() {
            bail!(
                Dimension,
                "report covers {cursor} of {} FHCS bits",
                truth.len()
            );
        }
        if self.symbols.len() != plan.payload_slot_count() {
            bail!(
                Dimension,
                "report has {} symbols, plan has {}",
                self.symbols.len(),
                plan.payload_slot_count()
            );
        }
        let order = psk.order();
        if order != self.psk_order {
            bail!(
                Dimension,
                "PSK order {} does not match the report's {}",
                order,
                self.psk_order
            );
        }
        for s in &self.symbols {
            c.psk_symbols += 1;
            c.psk_bits += order as usize;
            if s.erased {
                c.psk_erased_symbols += 1;
                c.psk_symbol_errors += 1.0;
                c.psk_bit_errors += order as f64 / 2.0;
                continue;
            }
            let sent = psk.index(s.prt, s.hop, s.antenna);
            if sent != s.index {
                c.psk_symbol_errors += 1.0;
                c.psk_bit_errors += (gray_encode(sent) ^ gray_encode(s.index)).count_ones() as f64;
            }
        }
        Ok(c)
    }
}

/// Timing/CFO progression of sub-band `k` at `(prt, hop)` for antenna `m`,
/// relative to the zero-frequency pilot of the same PRT and the initial
/// timing offset.
pub fn progression_factor(
    prt: usize,
    hop: usize,
    antenna: usize,
    k: usize,
    sync: &SyncEstimate,
    cfg: &RadarConfig,
) -> Complex64 {
    let samples = (prt * cfg.samples_per_prt() + hop * cfg.samples_per_hop()) as f64;
    let hops = hop as f64 - antenna as f64;
    let per_hop = cfg.hop_duration + cfg.samples_per_hop() as f64 * sync.sto_step;
    cis(cfg.subband_omega(k) * samples * sync.sto_step + sync.cfo * hops * per_hop)
}

/// Phase correction between a pilot ratio measured at `(i1, h1)` and a
/// payload at `(i2, h2)` on the same sub-band `k`.
pub fn correction_factor(
    i1: usize,
    h1: usize,
    i2: usize,
    h2: usize,
    k: usize,
    sync: &SyncEstimate,
    cfg: &RadarConfig,
) -> Complex64 {
    let samples = (i2 as f64 - i1 as f64) * cfg.samples_per_prt() as f64
        + (h2 as f64 - h1 as f64) * cfg.samples_per_hop() as f64;
    let per_hop = cfg.hop_duration + cfg.samples_per_hop() as f64 * sync.sto_step;
    cis(cfg.subband_omega(k) * samples * sync.sto_step
        + sync.cfo * (h2 as f64 - h1 as f64) * per_hop)
}

/// Method-specific pilot state.
enum Reference<'a> {
    Flat {
        initial_sto: f64,
    },
    Proposed {
        ratios: &'a PilotRatioTable,
        group_len: usize,
    },
    Averaged {
        means: Vec<Option<Complex64>>,
    },
    Known(&'a ImpairmentSpec),
}

/// Least-squares common timing offset from the pilot ratios, ignoring any
/// frequency dependence of the front ends.
fn fit_initial_sto(ratios: &PilotRatioTable, sync: &SyncEstimate, cfg: &RadarConfig) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for m in 0..cfg.tx_antennas {
        for kappa in 1..cfg.subbands {
            let k = cfg.subband_from_offset(kappa);
            let w = cfg.subband_omega(k);
            for (i, d) in ratios.observations(m, kappa) {
                let phase = (d / progression_factor(i, m + 1, m, k, sync, cfg)).arg();
                num += w * phase;
                den += w * w;
            }
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Mean of each `(antenna, kappa)` ratio referred back to the CPI start.
fn averaged_ratios(
    ratios: &PilotRatioTable,
    sync: &SyncEstimate,
    cfg: &RadarConfig,
) -> Vec<Option<Complex64>> {
    let mut out = Vec::with_capacity(cfg.tx_antennas * cfg.subbands);
    for m in 0..cfg.tx_antennas {
        for kappa in 0..cfg.subbands {
            if kappa == 0 {
                out.push(Some(Complex64::new(1.0, 0.0)));
                continue;
            }
            let k = cfg.subband_from_offset(kappa);
            let (mut sum, mut n) = (Complex64::new(0.0, 0.0), 0usize);
            for (i, d) in ratios.observations(m, kappa) {
                sum += d / progression_factor(i, m + 1, m, k, sync, cfg);
                n += 1;
            }
            out.push((n > 0).then(|| sum / n as f64));
        }
    }
    out
}

/// Recovers FHCS and PSK payload from a single-channel received frame.
///
/// The receiver knows only the pilot positions. Estimated-channel methods
/// derive the CFO from the zero-frequency pilots (re-estimated once after
/// de-rotating every hop by the first estimate), build the pilot-ratio
/// table and reference each payload peak to its antenna's zero-frequency
/// pilot in the same PRT. `known` must be supplied for
/// [`DemodMethod::KnownChannel`].
pub fn demodulate(
    frame: &IqFrame,
    cfg: &RadarConfig,
    options: &DemodOptions,
    known: Option<&ImpairmentSpec>,
) -> Result<DemodReport> {
    let prts = frame.prts();
    frame.check_shape(1, cfg.samples_per_prt())?;
    if prts == 0 {
        bail!(InputLength, "frame holds no complete PRT");
    }
    if options.psk_order > 15 {
        bail!(Domain, "PSK order {} not supported", options.psk_order);
    }
    let analyzer = SpectrumAnalyzer::new(cfg)?;
    let stream = &frame.channels[0];
    let group_len = if options.group_len == 0 {
        cfg.pilot_cycle_len()
    } else {
        options.group_len
    };

    let (spectra, sync): (CpiSpectra, SyncEstimate) = match options.method {
        DemodMethod::KnownChannel => {
            let Some(spec) = known else {
                bail!(Config, "known-channel demodulation needs the impairment");
            };
            (
                analyzer.cpi(stream, spec.cfo),
                SyncEstimate::known(spec.cfo, spec.sto_step, cfg),
            )
        }
        _ => {
            // de-rotating within each hop removes CFO leakage between tones
            // but leaves the PRT-to-PRT pilot progression intact
            let coarse = estimate_cfo(&analyzer.cpi(stream, 0.0), cfg)?;
            let sync = estimate_cfo(&analyzer.cpi(stream, coarse.cfo), cfg)?;
            let cfo = sync.cfo;
            (analyzer.cpi(stream, cfo), sync)
        }
    };

    let ratios = build_pilot_ratios(&spectra, cfg);
    let reference = match options.method {
        DemodMethod::FlatGain => Reference::Flat {
            initial_sto: fit_initial_sto(&ratios, &sync, cfg),
        },
        DemodMethod::Proposed => Reference::Proposed {
            ratios: &ratios,
            group_len,
        },
        DemodMethod::Averaged => Reference::Averaged {
            means: averaged_ratios(&ratios, &sync, cfg),
        },
        DemodMethod::KnownChannel => Reference::Known(known.expect("checked above")),
    };

    let k0 = cfg.zero_subband();
    let mut hops = Vec::with_capacity(prts * cfg.hops_per_pulse);
    let mut symbols = Vec::new();
    for i in 0..prts {
        for h in 0..cfg.hops_per_pulse {
            let layout = hop_layout(cfg, i, h)?;
            let spectrum = spectra.get(i, h);
            let peaks = assign_peaks(spectrum, &layout, cfg);
            let mut fhcs_bits = Vec::with_capacity(layout.codebook.bits() as usize);
            push_index_bits(
                peaks.codeword.unwrap_or(0),
                layout.codebook.bits(),
                &mut fhcs_bits,
            );

            for &m in &layout.free_antennas {
                let k = peaks.subbands[m];
                let kappa = cfg.pilot_offset(k);
                let s = spectrum.subband(cfg, k);
                let zero = spectra.get(i, m);
                let zero_ok = zero.is_peak(cfg, k0);
                let pilot = zero.subband(cfg, k0);
                let r = match &reference {
                    Reference::Known(spec) => {
                        let dt = accumulated_sto(i, h, spec, cfg);
                        let t = cfg.hop_start_time(i, h);
                        Some(
                            spec.front_end_at(i).beta(m, k)
                                * cis(cfg.subband_omega(k) * dt + spec.cfo * (t + dt)),
                        )
                    }
                    Reference::Flat { initial_sto } => zero_ok.then(|| {
                        pilot
                            * cis(cfg.subband_omega(k) * initial_sto)
                            * progression_factor(i, h, m, k, &sync, cfg)
                    }),
                    Reference::Averaged { means } => means[m * cfg.subbands + kappa]
                        .filter(|_| zero_ok)
                        .map(|d| pilot * d * progression_factor(i, h, m, k, &sync, cfg)),
                    Reference::Proposed { ratios, group_len } => {
                        let found = if kappa == 0 {
                            Some((i, zero_offset_ratio(&sync, cfg)))
                        } else {
                            ratios.lookup(m, kappa, i, *group_len)
                        };
                        found.filter(|_| zero_ok).map(|(i1, d)| {
                            pilot * d * correction_factor(i1, m + 1, i, h, k, &sync, cfg)
                        })
                    }
                };
                let erased = peaks.erased || r.is_none();
                let phase = r.map_or(0.0, |r| wrap_phase((s / r).arg()));
                let index = if options.psk_order == 0 {
                    0
                } else {
                    nearest_phase_index(phase, options.psk_order)
                };
                let points = (1u32 << options.psk_order) as f64;
                let residual = wrap_phase(phase - core::f64::consts::TAU * index as f64 / points);
                symbols.push(SymbolRecord {
                    prt: i,
                    hop: h,
                    antenna: m,
                    subband: k,
                    offset: kappa,
                    phase,
                    index,
                    residual,
                    erased,
                });
            }
            hops.push(HopDecision {
                prt: i,
                hop: h,
                subbands: peaks.subbands,
                erased: peaks.erased,
                fhcs_valid: peaks.codeword.is_some(),
                fhcs_bits,
            });
        }
    }
    Ok(DemodReport {
        method: options.method,
        psk_order: options.psk_order,
        sync,
        hops,
        symbols,
    })
}
