use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::math::{binomial, floor_log2};
use crate::RadarConfig;

/// Lexicographically ordered `choose`-subsets of `{0..alphabet}`.
///
/// Only the first `2^bits` subsets carry data; `bits = floor(log2 C(n, m))`.
/// Subsets are ranked and unranked on the fly instead of being stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FhcsCodebook {
    alphabet: usize,
    choose: usize,
    combinations: u128,
    bits: u32,
}

/// FHCS codebook over all `K` sub-bands for `M` antennas.
pub fn build_fhcs_codebook(cfg: &RadarConfig) -> Result<FhcsCodebook> {
    FhcsCodebook::new(cfg.subbands, cfg.tx_antennas)
}

impl FhcsCodebook {
    pub fn new(alphabet: usize, choose: usize) -> Result<Self> {
        if choose > alphabet {
            bail!(Domain, "cannot choose {choose} of {alphabet} sub-bands");
        }
        let Some(combinations) = binomial(alphabet, choose) else {
            bail!(Domain, "C({alphabet}, {choose}) overflows");
        };
        let bits = floor_log2(combinations);
        if bits > 64 {
            bail!(Domain, "codebook of {bits} bits per hop is not supported");
        }
        Ok(FhcsCodebook {
            alphabet,
            choose,
            combinations,
            bits,
        })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn choose(&self) -> usize {
        self.choose
    }

    /// `C(alphabet, choose)`.
    pub fn combinations(&self) -> u128 {
        self.combinations
    }

    /// Number of codewords that carry data, `2^bits`.
    pub fn usable(&self) -> u128 {
        1u128 << self.bits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The subset with lexicographic rank `index` (ascending elements).
    pub fn unrank(&self, mut index: u128) -> Result<Vec<usize>> {
        if index >= self.combinations {
            bail!(Domain, "codeword {index} outside 0..{}", self.combinations);
        }
        let mut out = Vec::with_capacity(self.choose);
        let mut next = 0usize;
        for slot in 0..self.choose {
            let remaining = self.choose - slot - 1;
            loop {
                let count = binomial(self.alphabet - next - 1, remaining).unwrap_or(u128::MAX);
                if index < count {
                    break;
                }
                index -= count;
                next += 1;
            }
            out.push(next);
            next += 1;
        }
        Ok(out)
    }

    /// Lexicographic rank of an ascending subset, `None` if it is not a
    /// strictly ascending `choose`-subset of the alphabet.
    pub fn rank(&self, subset: &[usize]) -> Option<u128> {
        if subset.len() != self.choose {
            return None;
        }
        let mut rank = 0u128;
        let mut next = 0usize;
        for (slot, &v) in subset.iter().enumerate() {
            if v < next || v >= self.alphabet {
                return None;
            }
            let remaining = self.choose - slot - 1;
            for skipped in next..v {
                rank += binomial(self.alphabet - skipped - 1, remaining)?;
            }
            next = v + 1;
        }
        Some(rank)
    }

    /// All subsets in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.combinations).map(move |r| self.unrank(r).expect("rank in range"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn experiment_codebook() {
        let cb = build_fhcs_codebook(&RadarConfig::default()).unwrap();
        assert_eq!(cb.combinations(), 190);
        assert_eq!(cb.usable(), 128);
        assert_eq!(cb.bits(), 7);
    }

    #[test]
    fn degenerate_and_small() {
        let full = FhcsCodebook::new(4, 4).unwrap();
        assert_eq!(full.combinations(), 1);
        assert_eq!(full.bits(), 0);
        assert_eq!(full.unrank(0).unwrap(), vec![0, 1, 2, 3]);

        // brute-force oracle: nested loops give lexicographic 2-subsets of {0..4}
        let mut brute = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                brute.push(vec![a, b]);
            }
        }
        let cb = FhcsCodebook::new(4, 2).unwrap();
        assert_eq!(cb.combinations(), 6);
        assert_eq!(cb.usable(), 4);
        assert_eq!(cb.bits(), 2);
        let listed: Vec<_> = cb.entries().collect();
        assert_eq!(listed, brute);
        assert_eq!(cb.unrank(0).unwrap(), vec![0, 1]);

        assert!(FhcsCodebook::new(2, 3).is_err());
    }

    #[test]
    fn rank_inverts_unrank() {
        let cb = FhcsCodebook::new(12, 3).unwrap();
        for r in 0..cb.combinations() {
            let s = cb.unrank(r).unwrap();
            assert_eq!(cb.rank(&s), Some(r));
        }
        assert_eq!(cb.rank(&[3, 2, 5]), None);
        assert_eq!(cb.rank(&[1, 2]), None);
        assert_eq!(cb.rank(&[1, 2, 12]), None);
    }

    #[test]
    fn empty_selection() {
        let cb = FhcsCodebook::new(19, 0).unwrap();
        assert_eq!(cb.combinations(), 1);
        assert_eq!(cb.bits(), 0);
        assert_eq!(cb.rank(&[]), Some(0));
        assert!(cb.unrank(0).unwrap().is_empty());
    }
}
