use fhjrc_core::fhwave::*;
use fhjrc_core::{rng_from_seed, Complex64, Error, RadarConfig};
use proptest::prelude::*;

fn cfg() -> RadarConfig {
    RadarConfig::default()
}

#[test]
fn subband_frequencies() {
    let c = cfg();
    assert_eq!(c.subband_frequency(0).unwrap(), -10e6);
    assert_eq!(c.subband_frequency(19).unwrap(), 9e6);
    assert_eq!(c.subband_frequency(10).unwrap(), 0.0);
    assert_eq!(c.zero_subband(), 10);
    assert!(matches!(c.subband_frequency(20), Err(Error::Domain(_))));
}

#[test]
fn codebook_sizes() {
    let cb = build_fhcs_codebook(&cfg()).unwrap();
    assert_eq!((cb.combinations(), cb.usable(), cb.bits()), (190, 128, 7));

    let full = RadarConfig {
        subbands: 2,
        tx_antennas: 2,
        hops_per_pulse: 3,
        bandwidth: 2e6,
        sample_rate: 4e6,
        ..cfg()
    };
    let cb = build_fhcs_codebook(&full).unwrap();
    assert_eq!((cb.combinations(), cb.bits()), (1, 0));

    assert!(matches!(FhcsCodebook::new(3, 4), Err(Error::Domain(_))));
}

#[test]
fn small_codebook_matches_enumeration() {
    let cb = FhcsCodebook::new(4, 2).unwrap();
    let mut brute = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            brute.push(vec![a, b]);
        }
    }
    let entries: Vec<Vec<usize>> = cb.entries().collect();
    assert_eq!(entries, brute);
    assert_eq!((cb.combinations(), cb.usable(), cb.bits()), (6, 4, 2));
    assert_eq!(cb.unrank(0).unwrap(), vec![0, 1]);
}

#[test]
fn pinned_slots_for_two_antennas() {
    let c = cfg();
    let k0 = c.zero_subband();
    let plan = plan_hops(&c, 40, &random_bits(40 * 22, &mut rng_from_seed(1))).unwrap();
    for i in 0..40 {
        let pilot = c.subband_from_offset(c.pilot_offset_for_prt(i));
        assert_eq!(plan.slot(i, 0, 0).subband, k0);
        assert_eq!(plan.slot(i, 1, 1).subband, k0);
        assert_eq!(plan.slot(i, 1, 0).subband, pilot);
        assert_eq!(plan.slot(i, 2, 1).subband, pilot);
        assert_eq!(plan.slot(i, 0, 1).role, SlotRole::Payload);
        assert_eq!(plan.slot(i, 2, 0).role, SlotRole::Payload);
        for h in 3..5 {
            assert!(plan.hop(i, h).iter().all(|s| s.role == SlotRole::Payload));
        }
    }
}

#[test]
fn pilot_offset_cycles_over_nonzero_offsets() {
    let c = cfg();
    // offset 0 is reserved for the zero-frequency pilot
    assert_eq!(c.pilot_cycle_len(), 19);
    assert_eq!(c.pilot_offset_for_prt(0), 1);
    assert_eq!(c.pilot_offset_for_prt(18), 19);
    assert_eq!(c.pilot_offset_for_prt(19), 1);
    assert_eq!(c.pilot_offset_for_prt(23), 5);
}

#[test]
fn every_antenna_has_one_pilot_of_each_kind_per_prt() {
    let c = RadarConfig {
        tx_antennas: 3,
        hops_per_pulse: 6,
        ..cfg()
    };
    let bits = random_bits(HopPlan::fhcs_bits_needed(&c, 30), &mut rng_from_seed(2));
    let plan = plan_hops(&c, 30, &bits).unwrap();
    for i in 0..30 {
        for m in 0..3 {
            let roles: Vec<SlotRole> = (0..6).map(|h| plan.slot(i, h, m).role).collect();
            assert_eq!(
                roles.iter().filter(|r| **r == SlotRole::ZeroPilot).count(),
                1
            );
            assert_eq!(
                roles
                    .iter()
                    .filter(|r| **r == SlotRole::CycledPilot)
                    .count(),
                1
            );
        }
    }
}

#[test]
fn plans_never_repeat_a_subband_within_a_hop() {
    let c = cfg();
    let mut rng = rng_from_seed(3);
    for trial in 0..10_000 {
        let plan = if trial % 2 == 0 {
            plan_hops(&c, 1, &random_bits(22, &mut rng)).unwrap()
        } else {
            HopPlan::traditional(&c, 1, &mut rng).unwrap()
        };
        for h in 0..c.hops_per_pulse {
            let hop = plan.hop(0, h);
            assert_ne!(hop[0].subband, hop[1].subband, "trial {trial} hop {h}");
        }
    }
}

#[test]
fn payload_subbands_ascend_over_free_antennas() {
    let c = RadarConfig {
        tx_antennas: 4,
        hops_per_pulse: 6,
        ..cfg()
    };
    let bits = random_bits(HopPlan::fhcs_bits_needed(&c, 25), &mut rng_from_seed(4));
    let plan = plan_hops(&c, 25, &bits).unwrap();
    for i in 0..25 {
        for h in 0..6 {
            let free: Vec<usize> = plan
                .hop(i, h)
                .iter()
                .filter(|s| s.role == SlotRole::Payload)
                .map(|s| s.subband)
                .collect();
            assert!(free.windows(2).all(|w| w[0] < w[1]), "{free:?}");
        }
    }
}

#[test]
fn zero_payload_gives_pilots_and_lowest_codewords() {
    let c = cfg();
    let plan = plan_hops(&c, 3, &[0; 66]).unwrap();
    let psk = PskGrid::zeros(&plan);
    for i in 0..3 {
        assert_eq!(plan.slot(i, 3, 0).subband, 0);
        assert_eq!(plan.slot(i, 3, 1).subband, 1);
        for h in 0..5 {
            for m in 0..2 {
                assert_eq!(psk.index(i, h, m), 0);
            }
        }
    }
}

#[test]
fn exhausted_payload_is_an_input_length_error() {
    let err = plan_hops(&cfg(), 4, &[1; 80]).unwrap_err();
    assert_eq!(err.category(), "input-length");
}

#[test]
fn psk_phases_are_constellation_points_and_zero_on_pilots() {
    let c = cfg();
    let mut rng = rng_from_seed(5);
    let w = Waveform::random_dfrc(&c, 20, 4, &mut rng).unwrap();
    for i in 0..20 {
        for h in 0..5 {
            for m in 0..2 {
                let p = w.psk.phase(i, h, m);
                let steps = p / (std::f64::consts::TAU / 16.0);
                assert!((steps - steps.round()).abs() < 1e-12);
                if w.plan.slot(i, h, m).role.is_pinned() {
                    assert_eq!(p, 0.0);
                }
            }
        }
    }
    let bits = w.psk.bits(&w.plan);
    assert_eq!(bits.len(), 20 * 6 * 4);
    assert_eq!(PskGrid::from_bits(&w.plan, 4, &bits).unwrap(), w.psk);
}

#[test]
fn gray_labels_of_neighbours_differ_in_one_bit() {
    for order in 1..=4u32 {
        let n = 1u32 << order;
        for p in 0..n {
            let a = gray_encode(p);
            let b = gray_encode((p + 1) % n);
            assert_eq!((a ^ b).count_ones(), 1);
        }
    }
}

#[test]
fn pinned_zero_frequency_hop_is_constant() {
    let c = cfg();
    let plan = plan_hops(&c, 1, &[0; 22]).unwrap();
    let frame = synthesize(&plan, &PskGrid::zeros(&plan), &c).unwrap();
    assert!(frame.channels[0][..40]
        .iter()
        .all(|v| *v == Complex64::new(1.0, 0.0)));
}

#[test]
fn frame_layout_matches_the_configuration() {
    let c = cfg();
    let mut rng = rng_from_seed(6);
    let w = Waveform::random_dfrc(&c, 2, 3, &mut rng).unwrap();
    let frame = synthesize(&w.plan, &w.psk, &c).unwrap();
    assert_eq!(frame.prt_len, 1600);
    assert_eq!(frame.len(), 3200);
    for ch in &frame.channels {
        for i in 0..2 {
            assert!(ch[i * 1600..i * 1600 + 200]
                .iter()
                .all(|v| (v.norm() - 1.0).abs() < 1e-12));
            assert!(ch[i * 1600 + 200..(i + 1) * 1600]
                .iter()
                .all(|v| v.norm() == 0.0));
        }
    }
}

#[test]
fn hop_segments_are_tones_of_the_planned_frequency() {
    let c = cfg();
    let mut rng = rng_from_seed(7);
    let w = Waveform::random_dfrc(&c, 3, 3, &mut rng).unwrap();
    let frame = synthesize(&w.plan, &w.psk, &c).unwrap();
    for i in 0..3 {
        for h in 0..5 {
            for m in 0..2 {
                let f = c.subband_frequency(w.plan.slot(i, h, m).subband).unwrap();
                let phi = w.psk.phase(i, h, m);
                for n in 0..40 {
                    let expect = Complex64::from_polar(
                        1.0,
                        phi + std::f64::consts::TAU * f * n as f64 / c.sample_rate,
                    );
                    let got = frame.channels[m][i * 1600 + h * 40 + n];
                    assert!((got - expect).norm() < 1e-9);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hop_cross_correlation_is_zero(seed in any::<u64>(), order in 0u32..5, traditional in any::<bool>()) {
        let c = cfg();
        let mut rng = rng_from_seed(seed);
        let w = if traditional {
            Waveform::random_traditional(&c, 4, &mut rng).unwrap()
        } else {
            Waveform::random_dfrc(&c, 4, order, &mut rng).unwrap()
        };
        let frame = synthesize(&w.plan, &w.psk, &c).unwrap();
        for i in 0..4 {
            for h in 0..5 {
                let s = i * 1600 + h * 40;
                let ip: Complex64 = (s..s + 40)
                    .map(|n| frame.channels[0][n] * frame.channels[1][n].conj())
                    .sum();
                prop_assert!(ip.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fhcs_bits_round_trip(seed in any::<u64>(), m in 1usize..5, extra in 1usize..4, prts in 1usize..30) {
        let c = RadarConfig { tx_antennas: m, hops_per_pulse: m + extra, ..cfg() };
        let bits = random_bits(HopPlan::fhcs_bits_needed(&c, prts), &mut rng_from_seed(seed));
        let plan = plan_hops(&c, prts, &bits).unwrap();
        prop_assert_eq!(plan.fhcs_bits(&c).unwrap(), bits);
    }

    #[test]
    fn codebook_rank_inverts_unrank(alphabet in 1usize..25, choose in 0usize..6, index in any::<u64>()) {
        prop_assume!(choose <= alphabet);
        let cb = FhcsCodebook::new(alphabet, choose).unwrap();
        let idx = index as u128 % cb.combinations();
        let subset = cb.unrank(idx).unwrap();
        prop_assert!(subset.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(cb.rank(&subset), Some(idx));
    }
}
