//! FH-MIMO transmit waveforms.
//!
//! A [`HopPlan`] fixes the sub-band of every (PRT, hop, antenna) slot and a
//! [`PskGrid`] fixes its phase. Two slots per antenna and PRT are pinned for
//! the communication receiver:
//!
//! - hop `m`: antenna `m` on the zero-frequency sub-band with zero phase,
//! - hop `m + 1`: antenna `m` on the cycled pilot sub-band (offset
//!   `1 + <i>_{K-1}` from the zero-frequency sub-band) with zero phase.
//!
//! Every other slot carries payload: the set of sub-bands used by the free
//! antennas of a hop encodes FHCS bits, and each payload slot carries one
//! Gray-mapped PSK symbol. Free antennas take their sub-bands in ascending
//! order so that a receiver can tell which peak belongs to which antenna.

mod codebook;
mod frame;
mod plan;
mod psk;
mod synth;

pub use codebook::{build_fhcs_codebook, FhcsCodebook};
pub use frame::IqFrame;
pub use plan::{
    hop_layout, pinned_slot, plan_hops, HopLayout, HopPlan, HopSlot, PlanKind, SlotRole,
};
pub use psk::{gray_decode, gray_encode, nearest_phase_index, PskGrid};
pub use synth::{pulse, synthesize, tone_phase};

use alloc::vec::Vec;
use rand::Rng;

use crate::{RadarConfig, Result};

/// Packs `bits` (0/1 values, most significant first) into an integer.
pub fn bits_to_index(bits: &[u8]) -> u128 {
    bits.iter()
        .fold(0u128, |acc, &b| (acc << 1) | (b & 1) as u128)
}

/// Appends the `width` low bits of `value`, most significant first.
pub fn push_index_bits(value: u128, width: u32, out: &mut Vec<u8>) {
    for s in (0..width).rev() {
        out.push(((value >> s) & 1) as u8);
    }
}

/// Uniform random 0/1 bits.
pub fn random_bits<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<u8> {
    (0..count).map(|_| rng.random::<bool>() as u8).collect()
}

/// A hop plan together with its PSK phases.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub plan: HopPlan,
    pub psk: PskGrid,
}

impl Waveform {
    /// Pilot-pinned waveform carrying random FHCS and PSK payload.
    pub fn random_dfrc<R: Rng + ?Sized>(
        cfg: &RadarConfig,
        prts: usize,
        psk_order: u32,
        rng: &mut R,
    ) -> Result<Self> {
        let fhcs = random_bits(HopPlan::fhcs_bits_needed(cfg, prts), rng);
        let plan = plan_hops(cfg, prts, &fhcs)?;
        let psk_bits = random_bits(plan.payload_slot_count() * psk_order as usize, rng);
        let psk = PskGrid::from_bits(&plan, psk_order, &psk_bits)?;
        Ok(Waveform { plan, psk })
    }

    /// Conventional FH-MIMO radar waveform: random distinct sub-bands per
    /// hop, no pilots, no phase coding.
    pub fn random_traditional<R: Rng + ?Sized>(
        cfg: &RadarConfig,
        prts: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let plan = HopPlan::traditional(cfg, prts, rng)?;
        let psk = PskGrid::zeros(&plan);
        Ok(Waveform { plan, psk })
    }
}
