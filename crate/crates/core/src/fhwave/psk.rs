use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::plan::HopPlan;
use super::{bits_to_index, push_index_bits};
use crate::error::{bail, Result};

/// Binary-reflected Gray code of `index`.
pub fn gray_encode(index: u32) -> u32 {
    index ^ (index >> 1)
}

/// Inverse of [`gray_encode`].
pub fn gray_decode(mut code: u32) -> u32 {
    let mut shift = code >> 1;
    while shift != 0 {
        code ^= shift;
        shift >>= 1;
    }
    code
}

/// Index of the constellation point of `2^order`-PSK closest to `phase`.
pub fn nearest_phase_index(phase: f64, order: u32) -> u32 {
    let points = 1u32 << order;
    let scaled = libm::round(phase / TAU * points as f64) as i64;
    scaled.rem_euclid(points as i64) as u32
}

/// PSK phase index of every `(prt, hop, antenna)` slot.
///
/// Phase index `p` means `2 pi p / 2^order`. Pinned slots always hold 0.
/// Bits are Gray-mapped: a group of `order` bits read as an integer is the
/// Gray label of the phase index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PskGrid {
    order: u32,
    hops: usize,
    antennas: usize,
    indices: Vec<u16>,
}

impl PskGrid {
    /// All-zero phases (no PSK payload), order 0.
    pub fn zeros(plan: &HopPlan) -> Self {
        PskGrid {
            order: 0,
            hops: plan.hops(),
            antennas: plan.antennas(),
            indices: vec![0; plan.slots().len()],
        }
    }

    /// Fills payload slots in `(prt, hop, antenna)` order, `order` bits each.
    pub fn from_bits(plan: &HopPlan, order: u32, bits: &[u8]) -> Result<Self> {
        if order > 15 {
            bail!(Domain, "PSK order {order} not supported");
        }
        let width = order as usize;
        let needed = plan.payload_slot_count() * width;
        if bits.len() < needed {
            bail!(
                InputLength,
                "PSK payload has {} bits, plan needs {needed}",
                bits.len()
            );
        }
        let mut cursor = 0;
        let indices = plan
            .slots()
            .iter()
            .map(|s| {
                if s.role.is_pinned() {
                    0
                } else {
                    let label = bits_to_index(&bits[cursor..cursor + width]) as u32;
                    cursor += width;
                    gray_decode(label) as u16
                }
            })
            .collect();
        Ok(PskGrid {
            order,
            hops: plan.hops(),
            antennas: plan.antennas(),
            indices,
        })
    }

    /// Grid from explicit phase indices in `(prt, hop, antenna)` order.
    /// Pinned slots must hold 0.
    pub fn from_indices(plan: &HopPlan, order: u32, indices: &[u32]) -> Result<Self> {
        if order > 15 {
            bail!(Domain, "PSK order {order} not supported");
        }
        if indices.len() != plan.slots().len() {
            bail!(
                Dimension,
                "{} phase indices for a plan of {} slots",
                indices.len(),
                plan.slots().len()
            );
        }
        for (s, &p) in plan.slots().iter().zip(indices) {
            if p >> order != 0 || (s.role.is_pinned() && p != 0) {
                bail!(Domain, "phase index {p} invalid for order {order} slot");
            }
        }
        Ok(PskGrid {
            order,
            hops: plan.hops(),
            antennas: plan.antennas(),
            indices: indices.iter().map(|&p| p as u16).collect(),
        })
    }

    /// Bits per symbol `J`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub(crate) fn len_slots(&self) -> usize {
        self.indices.len()
    }

    pub fn points(&self) -> u32 {
        1 << self.order
    }

    pub fn index(&self, prt: usize, hop: usize, antenna: usize) -> u32 {
        self.indices[(prt * self.hops + hop) * self.antennas + antenna] as u32
    }

    /// Phase of a slot in radians.
    pub fn phase(&self, prt: usize, hop: usize, antenna: usize) -> f64 {
        TAU * self.index(prt, hop, antenna) as f64 / self.points() as f64
    }

    /// Bits of the payload slots of `plan`, in the order consumed by
    /// [`PskGrid::from_bits`].
    pub fn bits(&self, plan: &HopPlan) -> Vec<u8> {
        let mut out = Vec::new();
        for (s, &p) in plan.slots().iter().zip(&self.indices) {
            if !s.role.is_pinned() {
                push_index_bits(gray_encode(p as u32) as u128, self.order, &mut out);
            }
        }
        out
    }
}
