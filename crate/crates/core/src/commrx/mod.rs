//! Communication receiver: per-hop spectra, peak-to-antenna assignment,
//! CFO and clock estimation, pilot-ratio tables and payload demodulation.
//!
//! Notation used throughout: `S(i, h, m)` is the normalised DFT coefficient
//! of antenna `m`'s tone in hop `h` of PRT `i`. Antenna `m` sends its
//! zero-frequency pilot in hop `m` and its cycled pilot (offset
//! `kappa_i = 1 + <i>_{K-1}`) in hop `m + 1`, so the ratio
//! `d = S(i, m+1, m) / S(i, m, m)` carries the front-end response at
//! `kappa_i` relative to zero frequency, plus known timing/CFO terms.

mod demod;
mod pilots;
mod spectrum;
mod sync;

pub use demod::{
    correction_factor, demodulate, progression_factor, DemodMethod, DemodOptions, DemodReport,
    ErrorCounts, HopDecision, SymbolRecord,
};
pub use pilots::{build_pilot_ratios, zero_offset_ratio, PilotRatioTable};
pub use spectrum::{
    assign_peaks, hop_spectrum, CpiSpectra, HopSpectrum, PeakAssignment, SpectrumAnalyzer,
    PEAK_FLOOR_FACTOR,
};
pub use sync::{combine_cfo, estimate_cfo, estimate_clock, SyncEstimate, AMBIGUITY_MARGIN};
