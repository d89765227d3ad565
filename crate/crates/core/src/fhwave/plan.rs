use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::Rng;

use super::codebook::FhcsCodebook;
use super::{bits_to_index, push_index_bits};
use crate::error::{bail, Result};
use crate::RadarConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotRole {
    /// Zero-frequency, zero-phase reference (hop `m`, antenna `m`).
    ZeroPilot,
    /// Cycled-frequency, zero-phase reference (hop `m+1`, antenna `m`).
    CycledPilot,
    /// FHCS/PSK payload.
    Payload,
}

impl SlotRole {
    pub fn is_pinned(self) -> bool {
        !matches!(self, SlotRole::Payload)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HopSlot {
    pub subband: usize,
    pub role: SlotRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanKind {
    /// Pilot-pinned plan carrying FHCS payload.
    Dfrc,
    /// Unconstrained random hopping (no pilots, no payload).
    Traditional,
}

/// The pinned role and sub-band of slot `(prt, hop, antenna)`, if any.
///
/// This is the only plan knowledge a communication receiver needs.
pub fn pinned_slot(
    cfg: &RadarConfig,
    prt: usize,
    hop: usize,
    antenna: usize,
) -> Option<(SlotRole, usize)> {
    if hop == antenna {
        Some((SlotRole::ZeroPilot, cfg.zero_subband()))
    } else if hop == antenna + 1 {
        let kappa = cfg.pilot_offset_for_prt(prt);
        Some((SlotRole::CycledPilot, cfg.subband_from_offset(kappa)))
    } else {
        None
    }
}

/// Pinned/free split of one hop and the reduced FHCS codebook of its free
/// antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct HopLayout {
    /// `(antenna, role, sub-band)` of pinned slots.
    pub pinned: Vec<(usize, SlotRole, usize)>,
    /// Antennas carrying payload, ascending.
    pub free_antennas: Vec<usize>,
    /// Sub-bands not taken by a pinned slot, ascending.
    pub available: Vec<usize>,
    pub codebook: FhcsCodebook,
}

pub fn hop_layout(cfg: &RadarConfig, prt: usize, hop: usize) -> Result<HopLayout> {
    let mut pinned = Vec::new();
    let mut free_antennas = Vec::new();
    for m in 0..cfg.tx_antennas {
        match pinned_slot(cfg, prt, hop, m) {
            Some((role, k)) => pinned.push((m, role, k)),
            None => free_antennas.push(m),
        }
    }
    let available: Vec<usize> = (0..cfg.subbands)
        .filter(|k| !pinned.iter().any(|&(_, _, p)| p == *k))
        .collect();
    if available.len() + pinned.len() != cfg.subbands {
        bail!(Config, "pilot slots collide in PRT {prt}, hop {hop}");
    }
    if free_antennas.len() > available.len() {
        bail!(
            Config,
            "hop {hop} has {} free antennas but only {} free sub-bands",
            free_antennas.len(),
            available.len()
        );
    }
    let codebook = FhcsCodebook::new(available.len(), free_antennas.len())?;
    Ok(HopLayout {
        pinned,
        free_antennas,
        available,
        codebook,
    })
}

/// Sub-band and role of every `(prt, hop, antenna)` slot.
#[derive(Debug, Clone, PartialEq)]
pub struct HopPlan {
    kind: PlanKind,
    prts: usize,
    hops: usize,
    antennas: usize,
    slots: Vec<HopSlot>,
}

/// Builds a pilot-pinned plan whose free slots encode `fhcs_bits`.
///
/// Each hop consumes `floor(log2 C(K - pinned, M - pinned))` bits, most
/// significant first. Surplus bits are ignored; too few bits is an error.
pub fn plan_hops(cfg: &RadarConfig, prts: usize, fhcs_bits: &[u8]) -> Result<HopPlan> {
    cfg.validate()?;
    let (h_count, m_count) = (cfg.hops_per_pulse, cfg.tx_antennas);
    let mut slots = Vec::with_capacity(prts * h_count * m_count);
    let mut cursor = 0usize;
    for i in 0..prts {
        for h in 0..h_count {
            let layout = hop_layout(cfg, i, h)?;
            let width = layout.codebook.bits() as usize;
            let Some(chunk) = fhcs_bits.get(cursor..cursor + width) else {
                bail!(
                    InputLength,
                    "FHCS payload exhausted at PRT {i}, hop {h} after {cursor} bits"
                );
            };
            cursor += width;
            let positions = layout.codebook.unrank(bits_to_index(chunk))?;
            let mut hop_slots = [HopSlot {
                subband: 0,
                role: SlotRole::Payload,
            }]
            .repeat(m_count);
            for &(m, role, k) in &layout.pinned {
                hop_slots[m] = HopSlot { subband: k, role };
            }
            // positions are ascending, so the free antennas get ascending sub-bands
            for (&m, &p) in layout.free_antennas.iter().zip(&positions) {
                hop_slots[m] = HopSlot {
                    subband: layout.available[p],
                    role: SlotRole::Payload,
                };
            }
            slots.extend_from_slice(&hop_slots);
        }
    }
    Ok(HopPlan {
        kind: PlanKind::Dfrc,
        prts,
        hops: h_count,
        antennas: m_count,
        slots,
    })
}

impl HopPlan {
    /// Unconstrained random plan: every hop draws `M` distinct sub-bands and
    /// assigns them to antennas in random order.
    pub fn traditional<R: Rng + ?Sized>(
        cfg: &RadarConfig,
        prts: usize,
        rng: &mut R,
    ) -> Result<Self> {
        cfg.validate()?;
        let mut pool: Vec<usize> = (0..cfg.subbands).collect();
        let mut slots = Vec::with_capacity(prts * cfg.hops_per_pulse * cfg.tx_antennas);
        for _ in 0..prts * cfg.hops_per_pulse {
            let (chosen, _) = pool.partial_shuffle(rng, cfg.tx_antennas);
            slots.extend(chosen.iter().map(|&k| HopSlot {
                subband: k,
                role: SlotRole::Payload,
            }));
        }
        Ok(HopPlan {
            kind: PlanKind::Traditional,
            prts,
            hops: cfg.hops_per_pulse,
            antennas: cfg.tx_antennas,
            slots,
        })
    }

    /// Rebuilds a plan from its slots in `(prt, hop, antenna)` order, e.g.
    /// after reading it from disk.
    ///
    /// Sub-bands must be in range and distinct within each hop. For a
    /// pilot-pinned plan every pinned slot must sit where [`pinned_slot`]
    /// puts it and no payload slot may claim a pilot role.
    pub fn from_slots(
        cfg: &RadarConfig,
        kind: PlanKind,
        prts: usize,
        slots: Vec<HopSlot>,
    ) -> Result<Self> {
        cfg.validate()?;
        let (hops, antennas) = (cfg.hops_per_pulse, cfg.tx_antennas);
        if slots.len() != prts * hops * antennas {
            bail!(
                Dimension,
                "plan has {} slots, expected {prts} x {hops} x {antennas}",
                slots.len()
            );
        }
        for (n, hop) in slots.chunks(antennas).enumerate() {
            let (i, h) = (n / hops, n % hops);
            for (m, s) in hop.iter().enumerate() {
                if s.subband >= cfg.subbands {
                    bail!(
                        Domain,
                        "PRT {i}, hop {h}: sub-band {} out of range",
                        s.subband
                    );
                }
                if hop[..m].iter().any(|o| o.subband == s.subband) {
                    bail!(
                        Domain,
                        "PRT {i}, hop {h}: sub-band {} used twice",
                        s.subband
                    );
                }
                let expected = match kind {
                    PlanKind::Traditional => None,
                    PlanKind::Dfrc => pinned_slot(cfg, i, h, m),
                };
                let ok = match expected {
                    Some((role, k)) => s.role == role && s.subband == k,
                    None => s.role == SlotRole::Payload,
                };
                if !ok {
                    bail!(
                        Domain,
                        "PRT {i}, hop {h}, antenna {m}: pilot placement violated"
                    );
                }
            }
        }
        Ok(HopPlan {
            kind,
            prts,
            hops,
            antennas,
            slots,
        })
    }

    /// FHCS bits a pilot-pinned plan of `prts` PRTs consumes.
    pub fn fhcs_bits_needed(cfg: &RadarConfig, prts: usize) -> usize {
        Self::fhcs_bits_per_prt(cfg) * prts
    }

    /// FHCS bits per PRT under pilot pinning (independent of the PRT index).
    pub fn fhcs_bits_per_prt(cfg: &RadarConfig) -> usize {
        (0..cfg.hops_per_pulse)
            .map(|h| hop_layout(cfg, 0, h).map_or(0, |l| l.codebook.bits() as usize))
            .sum()
    }

    /// Payload slots per PRT under pilot pinning.
    pub fn payload_slots_per_prt(cfg: &RadarConfig) -> usize {
        (0..cfg.hops_per_pulse)
            .flat_map(|h| (0..cfg.tx_antennas).map(move |m| (h, m)))
            .filter(|&(h, m)| pinned_slot(cfg, 0, h, m).is_none())
            .count()
    }

    pub fn kind(&self) -> PlanKind {
        self.kind
    }

    pub fn prts(&self) -> usize {
        self.prts
    }

    pub fn hops(&self) -> usize {
        self.hops
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    fn index(&self, prt: usize, hop: usize, antenna: usize) -> usize {
        debug_assert!(prt < self.prts && hop < self.hops && antenna < self.antennas);
        (prt * self.hops + hop) * self.antennas + antenna
    }

    pub fn slot(&self, prt: usize, hop: usize, antenna: usize) -> HopSlot {
        self.slots[self.index(prt, hop, antenna)]
    }

    /// Sub-bands of all antennas in one hop.
    pub fn hop(&self, prt: usize, hop: usize) -> &[HopSlot] {
        let start = self.index(prt, hop, 0);
        &self.slots[start..start + self.antennas]
    }

    /// All slots in `(prt, hop, antenna)` order.
    pub fn slots(&self) -> &[HopSlot] {
        &self.slots
    }

    pub fn payload_slot_count(&self) -> usize {
        self.slots.iter().filter(|s| !s.role.is_pinned()).count()
    }

    /// Recovers the FHCS bit stream from a pilot-pinned plan by sorting the
    /// free sub-bands of every hop.
    pub fn fhcs_bits(&self, cfg: &RadarConfig) -> Result<Vec<u8>> {
        if self.kind != PlanKind::Dfrc {
            bail!(Domain, "a traditional plan carries no FHCS payload");
        }
        let mut out = Vec::new();
        for i in 0..self.prts {
            for h in 0..self.hops {
                let layout = hop_layout(cfg, i, h)?;
                let mut free: Vec<usize> = layout
                    .free_antennas
                    .iter()
                    .map(|&m| self.slot(i, h, m).subband)
                    .collect();
                free.sort_unstable();
                let Some(positions) = free
                    .iter()
                    .map(|k| layout.available.iter().position(|a| a == k))
                    .collect::<Option<Vec<_>>>()
                else {
                    bail!(Domain, "payload collides with a pilot in PRT {i}, hop {h}");
                };
                let Some(rank) = layout.codebook.rank(&positions) else {
                    bail!(Domain, "repeated sub-band in PRT {i}, hop {h}");
                };
                push_index_bits(rank, layout.codebook.bits(), &mut out);
            }
        }
        Ok(out)
    }
}
