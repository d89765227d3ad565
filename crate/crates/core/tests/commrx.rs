use std::f64::consts::{PI, TAU};

use fhjrc_core::commrx::*;
use fhjrc_core::fhwave::{
    hop_layout, random_bits, synthesize, tone_phase, HopPlan, IqFrame, PskGrid, Waveform,
};
use fhjrc_core::impair::{accumulated_sto, apply, sto_from_rho, FrontEndProfile, ImpairmentSpec};
use fhjrc_core::math::cis;
use fhjrc_core::{rng_from_seed, Complex64, RadarConfig, SimRng};
use rand::Rng;

fn cfg() -> RadarConfig {
    RadarConfig::default()
}

struct Link {
    w: Waveform,
    spec: ImpairmentSpec,
    rx: IqFrame,
}

fn link(c: &RadarConfig, prts: usize, order: u32, spec: ImpairmentSpec, rng: &mut SimRng) -> Link {
    let w = Waveform::random_dfrc(c, prts, order, rng).unwrap();
    let tx = synthesize(&w.plan, &w.psk, c).unwrap();
    let rx = apply(&tx, &w.plan, &spec, c, rng).unwrap();
    Link { w, spec, rx }
}

/// Ripple plus a clock error `rho` and initial offset; `|rho| < 2.2e-6`
/// keeps the CFO unambiguous at the default carrier.
fn impaired(c: &RadarConfig, rho: f64, dt0: f64, noise: f64, rng: &mut SimRng) -> ImpairmentSpec {
    ImpairmentSpec {
        noise_variance: noise,
        front_end: FrontEndProfile::random_ripple(c.tx_antennas, c.subbands, 1.0, 0.2, rng),
        ..ImpairmentSpec::from_clock(c, rho, dt0)
    }
}

fn single_tone(c: &RadarConfig, k: usize) -> IqFrame {
    let mut f = IqFrame::zeros(c.sample_rate, c.samples_per_prt(), 1, c.samples_per_prt());
    let n_h = c.samples_per_hop();
    for n in 0..n_h {
        f.channels[0][n] = cis(tone_phase(c.subband_cycles(k), n, n_h));
    }
    f
}

#[test]
fn single_tone_lands_on_its_bin() {
    let c = cfg();
    for k in 0..c.subbands {
        let s = hop_spectrum(&single_tone(&c, k), 0, 0, &c).unwrap();
        let b = c.subband_bin(k);
        assert_eq!(b as i64, (k as i64 - 10).rem_euclid(40));
        // normalised by N_h: magnitude 1 rather than N_h
        assert!((s.coeffs[b] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for (j, v) in s.coeffs.iter().enumerate() {
            if j != b {
                assert!(v.norm() < 1e-12);
            }
        }
    }
    assert_eq!(c.subband_bin(c.zero_subband()), 0);
}

#[test]
fn subband_spacing_is_one_bin() {
    // B T / K = 20 MHz * 1 us / 20
    let c = cfg();
    for k in 0..c.subbands - 1 {
        assert_eq!((c.subband_bin(k + 1) + 40 - c.subband_bin(k)) % 40, 1);
    }
}

fn spectrum_with_peaks(bins: &[(usize, f64)]) -> HopSpectrum {
    let mut coeffs = vec![Complex64::new(0.01, 0.0); 40];
    for &(b, mag) in bins {
        coeffs[b] = Complex64::new(mag, 0.0);
    }
    HopSpectrum {
        prt: 0,
        hop: 3,
        coeffs,
        floor: 0.01,
    }
}

#[test]
fn payload_peaks_go_to_antennas_in_ascending_frequency() {
    let c = cfg();
    let layout = hop_layout(&c, 0, 3).unwrap();
    // bin 6 is +6 MHz (sub-band 16), bin 30 is -10 MHz (sub-band 0)
    let a = assign_peaks(&spectrum_with_peaks(&[(6, 1.0), (30, 0.8)]), &layout, &c);
    assert_eq!(a.subbands, vec![0, 16]);
    assert!(!a.erased);
}

#[test]
fn pinned_antenna_takes_the_zero_frequency_bin() {
    let c = cfg();
    for m in 0..2 {
        let layout = hop_layout(&c, 5, m).unwrap();
        let a = assign_peaks(
            &spectrum_with_peaks(&[(0, 1.0), (6, 1.2), (33, 0.9)]),
            &layout,
            &c,
        );
        assert_eq!(a.subbands[m], c.zero_subband());
        // zero-frequency pilot missing from the top M
        let b = assign_peaks(
            &spectrum_with_peaks(&[(0, 0.5), (6, 1.2), (33, 0.9)]),
            &layout,
            &c,
        );
        assert_eq!(b.subbands[m], c.zero_subband());
        assert!(b.erased);
    }
}

#[test]
fn missing_peak_is_an_erasure() {
    let c = cfg();
    let layout = hop_layout(&c, 0, 3).unwrap();
    let a = assign_peaks(&spectrum_with_peaks(&[(6, 1.0)]), &layout, &c);
    assert!(a.erased);
}

#[test]
fn assignment_inverts_the_generator() {
    let c = cfg();
    let mut rng = rng_from_seed(1);
    let l = link(&c, 2000, 0, ImpairmentSpec::identity(&c), &mut rng);
    let spectra = SpectrumAnalyzer::new(&c)
        .unwrap()
        .cpi(&l.rx.channels[0], 0.0);
    for i in 0..2000 {
        for h in 0..5 {
            let layout = hop_layout(&c, i, h).unwrap();
            let a = assign_peaks(spectra.get(i, h), &layout, &c);
            let sent: Vec<usize> = l.w.plan.hop(i, h).iter().map(|s| s.subband).collect();
            assert_eq!(a.subbands, sent, "prt {i} hop {h}");
            assert!(!a.erased && a.codeword.is_some());
        }
    }
}

fn spectra_of(l: &Link, c: &RadarConfig, cfo: f64) -> CpiSpectra {
    SpectrumAnalyzer::new(c)
        .unwrap()
        .cpi(&l.rx.channels[0], cfo)
}

#[test]
fn cfo_example_100_hz() {
    let c = cfg();
    let l = link(
        &c,
        128,
        3,
        ImpairmentSpec::from_clock(&c, 100.0 / c.carrier, 0.0),
        &mut rng_from_seed(2),
    );
    // de-rotated within each hop, so the other antenna's tone does not leak
    let spectra = spectra_of(&l, &c, l.spec.cfo);
    let k0 = c.zero_subband();
    let phase = (spectra.get(1, 0).subband(&c, k0) / spectra.get(0, 0).subband(&c, k0)).arg();
    assert!((phase - 0.025133).abs() < 1e-6, "{phase}");
    let sync = estimate_cfo(&spectra, &c).unwrap();
    assert!(((sync.cfo - TAU * 100.0) / (TAU * 100.0)).abs() < 1e-6);
    // 127 consecutive pairs per antenna
    assert_eq!(sync.pair_estimates.len(), 127 * 2);
    assert!(!sync.ambiguous);
}

#[test]
fn zero_cfo_is_estimated_exactly() {
    let c = cfg();
    let l = link(
        &c,
        16,
        3,
        ImpairmentSpec::identity(&c),
        &mut rng_from_seed(3),
    );
    let sync = estimate_cfo(&spectra_of(&l, &c, 0.0), &c).unwrap();
    // exact up to the rounding of the transform
    assert!(sync.cfo.abs() < 1e-9);
    assert!(sync.sto_step.abs() < 1e-30);
}

#[test]
fn cfo_needs_two_prts() {
    let c = cfg();
    let l = link(
        &c,
        1,
        3,
        ImpairmentSpec::identity(&c),
        &mut rng_from_seed(3),
    );
    assert_eq!(
        estimate_cfo(&spectra_of(&l, &c, 0.0), &c)
            .unwrap_err()
            .category(),
        "input-length"
    );
}

#[test]
fn clock_examples() {
    let c = cfg();
    let (rho, step) = estimate_clock(TAU * 5.5e3, &c);
    assert!((rho - 1e-6).abs() < 1e-18);
    assert!((step - sto_from_rho(1e-6, c.sample_rate)).abs() < 1e-25);
    assert_eq!(estimate_clock(0.0, &c), (0.0, 0.0));

    let l = link(
        &c,
        32,
        3,
        ImpairmentSpec::from_clock(&c, 1e-6, 0.0),
        &mut rng_from_seed(4),
    );
    let report = demodulate(
        &l.rx,
        &c,
        &DemodOptions::new(DemodMethod::Proposed, 3),
        None,
    )
    .unwrap();
    let rel = (report.sync.sto_step - l.spec.sto_step) / l.spec.sto_step;
    assert!(rel.abs() < 0.01, "{rel}");
}

#[test]
fn cfo_is_consistent_across_the_allowed_range() {
    let c = cfg();
    let max_rho = PI / c.prt / (TAU * c.carrier);
    let mut rng = rng_from_seed(5);
    for frac in [-0.95, -0.6, -0.2, -0.01, 0.01, 0.3, 0.7, 0.95] {
        let spec = impaired(&c, frac * max_rho, 5e-9, 0.0, &mut rng);
        let l = link(&c, 128, 3, spec, &mut rng);
        let report = demodulate(
            &l.rx,
            &c,
            &DemodOptions::new(DemodMethod::Proposed, 3),
            None,
        )
        .unwrap();
        let rel = ((report.sync.cfo - l.spec.cfo) / l.spec.cfo).abs();
        assert!(rel < 1e-4, "frac {frac}: {rel}");
    }
}

#[test]
fn averaging_more_pairs_reduces_cfo_variance() {
    let c = cfg();
    let mut rng = rng_from_seed(6);
    let counts = [1usize, 16, 127];
    let mut sums = [0.0; 3];
    let trials = 200;
    for _ in 0..trials {
        let spec = impaired(&c, 1e-6, 5e-9, 1.0, &mut rng);
        let l = link(&c, 128, 3, spec, &mut rng);
        let sync = estimate_cfo(&spectra_of(&l, &c, l.spec.cfo), &c).unwrap();
        for (j, &n) in counts.iter().enumerate() {
            let est = combine_cfo(&sync.pair_estimates[..n * 2], &c).unwrap();
            sums[j] += (est - l.spec.cfo).powi(2);
        }
    }
    let var: Vec<f64> = sums.iter().map(|s| s / trials as f64).collect();
    println!("CFO MSE for 1/16/127 pairs at 0 dB: {var:?}");
    assert!(var[0] > var[1] && var[1] > var[2]);
}

#[test]
fn identity_channel_gives_unit_pilot_ratios() {
    let c = cfg();
    let l = link(
        &c,
        38,
        4,
        ImpairmentSpec::identity(&c),
        &mut rng_from_seed(7),
    );
    let table = build_pilot_ratios(&spectra_of(&l, &c, 0.0), &c);
    for i in 0..38 {
        for m in 0..2 {
            assert!((table.get(i, m).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
    assert!(table.fill_state(0, 0..19).iter().all(|&s| s));
    assert!(!table.fill_state(0, 0..5).iter().all(|&s| s));
}

#[test]
fn initial_offset_tilts_pilot_ratio_phase() {
    let c = cfg();
    let dt0 = 0.3 / c.sample_rate;
    let spec = ImpairmentSpec {
        initial_sto: dt0,
        ..ImpairmentSpec::identity(&c)
    };
    let l = link(&c, 19, 3, spec, &mut rng_from_seed(8));
    let table = build_pilot_ratios(&spectra_of(&l, &c, 0.0), &c);
    for i in 0..19 {
        let kappa = c.pilot_offset_for_prt(i);
        let signed = c.signed_subband(c.subband_from_offset(kappa)) as f64;
        let expect = TAU * signed * (c.bandwidth / c.subbands as f64) * dt0;
        for m in 0..2 {
            let got = table.get(i, m).unwrap().arg();
            assert!((got - expect).abs() < 1e-12, "prt {i}: {got} vs {expect}");
        }
    }
}

#[test]
fn pilot_ratio_phase_increases_with_prt() {
    let c = cfg();
    let spec = ImpairmentSpec {
        noise_variance: 1e-3,
        ..ImpairmentSpec::from_clock(&c, 2e-6, 6e-9)
    };
    let l = link(&c, 19, 3, spec, &mut rng_from_seed(9));
    let table = build_pilot_ratios(&spectra_of(&l, &c, l.spec.cfo), &c);
    // positive-frequency half of the cycle
    for m in 0..2 {
        let phases: Vec<f64> = (0..9).map(|i| table.get(i, m).unwrap().arg()).collect();
        assert!(phases.windows(2).all(|w| w[1] > w[0]), "{phases:?}");
    }
}

#[test]
fn correction_factor_trivial_cases() {
    let c = cfg();
    let zero = SyncEstimate::known(0.0, 0.0, &c);
    assert_eq!(
        correction_factor(3, 1, 40, 4, 7, &zero, &c),
        Complex64::new(1.0, 0.0)
    );
    let sync = SyncEstimate::known(2e4, -3e-13, &c);
    assert!(
        (correction_factor(5, 2, 5, 2, 13, &sync, &c) - Complex64::new(1.0, 0.0)).norm() < 1e-15
    );
    // D is the ratio of the progression factors
    let d = correction_factor(3, 1, 40, 4, 7, &sync, &c);
    let p = progression_factor(40, 4, 0, 7, &sync, &c) / progression_factor(3, 1, 0, 7, &sync, &c);
    assert!((d - p).norm() < 1e-12);
}

/// Ratio of a payload tone to its antenna's zero-frequency pilot in the
/// same PRT, from the closed-form received tones.
fn closed_form_ratio(
    spec: &ImpairmentSpec,
    c: &RadarConfig,
    i: usize,
    h: usize,
    m: usize,
    k: usize,
) -> Complex64 {
    let tone = |h: usize, k: usize| {
        let dt = accumulated_sto(i, h, spec, c);
        spec.front_end_at(i).beta(m, k)
            * cis(c.subband_omega(k) * dt + spec.cfo * (c.hop_start_time(i, h) + dt))
    };
    tone(h, k) / tone(m, c.zero_subband())
}

#[test]
fn correction_factor_matches_closed_form_tones() {
    let c = cfg();
    let mut rng = rng_from_seed(10);
    for _ in 0..200 {
        let spec = impaired(
            &c,
            rng.random_range(-2e-6..2e-6),
            rng.random_range(-1e-8..1e-8),
            0.0,
            &mut rng,
        );
        let sync = SyncEstimate::known(spec.cfo, spec.sto_step, &c);
        let m = rng.random_range(0..2);
        let k = rng.random_range(0..20);
        let i1 = rng.random_range(0..128);
        let i2 = rng.random_range(0..128);
        let h2 = rng.random_range(0..5);
        let oracle = closed_form_ratio(&spec, &c, i2, h2, m, k)
            / closed_form_ratio(&spec, &c, i1, m + 1, m, k);
        let d = correction_factor(i1, m + 1, i2, h2, k, &sync, &c);
        assert!((d - oracle).norm() < 1e-9, "{d} vs {oracle}");
    }
}

/// First payload slot of antenna `m` on sub-band `k` at or after PRT `from`.
fn find_payload(plan: &HopPlan, m: usize, k: usize, from: usize) -> Option<(usize, usize)> {
    (from..plan.prts())
        .flat_map(|i| (0..plan.hops()).map(move |h| (i, h)))
        .find(|&(i, h)| {
            let s = plan.slot(i, h, m);
            s.subband == k && !s.role.is_pinned()
        })
}

fn lemma_pairs(
    frame: &IqFrame,
    plan: &HopPlan,
    spec: &ImpairmentSpec,
    c: &RadarConfig,
) -> Vec<(Complex64, Complex64)> {
    let spectra = SpectrumAnalyzer::new(c)
        .unwrap()
        .cpi(&frame.channels[0], spec.cfo);
    let table = build_pilot_ratios(&spectra, c);
    let sync = SyncEstimate::known(spec.cfo, spec.sto_step, c);
    let k0 = c.zero_subband();
    let mut out = Vec::new();
    for i1 in 0..19 {
        let k = c.subband_from_offset(c.pilot_offset_for_prt(i1));
        for m in 0..2 {
            let Some((i2, h2)) = find_payload(plan, m, k, 40) else {
                continue;
            };
            let d = table.get(i1, m).unwrap();
            let d2 = spectra.get(i2, h2).subband(c, k)
                / spectra.get(i2, m).subband(c, k0)
                / correction_factor(i1, m + 1, i2, h2, k, &sync, c);
            out.push((d, d2));
        }
    }
    out
}

#[test]
fn pilot_ratio_carries_over_while_the_front_end_is_stable() {
    let c = cfg();
    let mut rng = rng_from_seed(11);
    let plan_bits = random_bits(HopPlan::fhcs_bits_needed(&c, 128), &mut rng);
    let plan = fhjrc_core::fhwave::plan_hops(&c, 128, &plan_bits).unwrap();
    let psk = PskGrid::zeros(&plan);
    let tx = synthesize(&plan, &psk, &c).unwrap();

    let stable = impaired(&c, 1.7e-6, 8e-9, 0.0, &mut rng);
    let rx = apply(&tx, &plan, &stable, &c, &mut rng).unwrap();
    let pairs = lemma_pairs(&rx, &plan, &stable, &c);
    assert!(pairs.len() > 20);
    for (d, d2) in &pairs {
        assert!((d2 - d).norm() / d.norm() < 1e-6);
    }

    let mut changed = stable.clone();
    changed.front_end_changes.push((
        30,
        FrontEndProfile::random_ripple(2, 20, 1.0, 0.2, &mut rng),
    ));
    let rx = apply(&tx, &plan, &changed, &c, &mut rng).unwrap();
    let pairs = lemma_pairs(&rx, &plan, &changed, &c);
    let broken = pairs
        .iter()
        .filter(|(d, d2)| (d2 - d).norm() / d.norm() > 1e-3)
        .count();
    assert!(broken > pairs.len() / 2, "{broken} of {}", pairs.len());
}

#[test]
fn identity_link_is_error_free_for_every_method() {
    let c = cfg();
    let mut rng = rng_from_seed(12);
    for seed in 0..1000u64 {
        let order = [0, 3, 4][seed as usize % 3];
        // one full pilot cycle
        let l = link(&c, 19, order, ImpairmentSpec::identity(&c), &mut rng);
        for method in [
            DemodMethod::FlatGain,
            DemodMethod::Proposed,
            DemodMethod::Averaged,
            DemodMethod::KnownChannel,
        ] {
            let r =
                demodulate(&l.rx, &c, &DemodOptions::new(method, order), Some(&l.spec)).unwrap();
            let e = r.score(&l.w.plan, &l.w.psk, &c).unwrap();
            assert_eq!(e.fhcs_bit_errors, 0.0, "seed {seed} {method:?}");
            assert_eq!(e.psk_bit_errors, 0.0, "seed {seed} {method:?}");
            assert_eq!(r.fhcs_bits(), l.w.plan.fhcs_bits(&c).unwrap());
            assert_eq!(r.psk_bits(), l.w.psk.bits(&l.w.plan));
        }
    }
}

#[test]
fn long_identity_run_is_error_free() {
    let c = cfg();
    let mut rng = rng_from_seed(13);
    for order in [3, 4] {
        let l = link(&c, 10_000, order, ImpairmentSpec::identity(&c), &mut rng);
        let r = demodulate(
            &l.rx,
            &c,
            &DemodOptions::new(DemodMethod::Proposed, order),
            None,
        )
        .unwrap();
        let e = r.score(&l.w.plan, &l.w.psk, &c).unwrap();
        assert_eq!(e.fhcs_bits, 220_000);
        assert_eq!(e.psk_symbols, 60_000);
        assert_eq!((e.fhcs_bit_errors, e.psk_bit_errors), (0.0, 0.0));
    }
}

#[test]
fn fhcs_decisions_ignore_psk_phases() {
    let c = cfg();
    let mut rng = rng_from_seed(14);
    let spec = impaired(&c, -1.2e-6, 3e-9, 0.0, &mut rng);
    let w = Waveform::random_dfrc(&c, 64, 4, &mut rng).unwrap();
    let zeros = PskGrid::zeros(&w.plan);
    let opts = DemodOptions::new(DemodMethod::Proposed, 0);
    let fhcs = |psk: &PskGrid, rng: &mut SimRng| {
        let rx = apply(
            &synthesize(&w.plan, psk, &c).unwrap(),
            &w.plan,
            &spec,
            &c,
            rng,
        )
        .unwrap();
        let r = demodulate(&rx, &c, &opts, None).unwrap();
        (
            r.fhcs_bits(),
            r.hops.iter().map(|h| h.fhcs_erased()).collect::<Vec<_>>(),
        )
    };
    let a = fhcs(&w.psk, &mut rng);
    let b = fhcs(&zeros, &mut rng);
    assert_eq!(a, b);
    assert_eq!(a.0, w.plan.fhcs_bits(&c).unwrap());
}

#[test]
fn impaired_8psk_clusters_at_20_db() {
    let c = cfg();
    let mut rng = rng_from_seed(15);
    let mut total = 0.0;
    let mut n = 0usize;
    for _ in 0..4 {
        let spec = impaired(&c, 1.8e-6, 6e-9, 0.01, &mut rng);
        let l = link(&c, 128, 3, spec, &mut rng);
        let r = demodulate(
            &l.rx,
            &c,
            &DemodOptions::new(DemodMethod::Proposed, 3),
            None,
        )
        .unwrap();
        for s in r.symbols.iter().filter(|s| !s.erased) {
            total += s.residual.abs();
            n += 1;
        }
    }
    let mean = total / n as f64;
    println!("mean |residual| = {mean:.4} rad over {n} symbols");
    assert!(mean < TAU / 16.0);
}

#[test]
fn flat_gain_assumption_costs_symbol_errors() {
    let c = cfg();
    let mut rng = rng_from_seed(16);
    let mut flat = ErrorCounts::default();
    let mut proposed = ErrorCounts::default();
    for _ in 0..6 {
        let spec = impaired(&c, 1.1e-6, 4e-9, 0.01, &mut rng);
        let l = link(&c, 128, 4, spec, &mut rng);
        for (method, acc) in [
            (DemodMethod::FlatGain, &mut flat),
            (DemodMethod::Proposed, &mut proposed),
        ] {
            let r = demodulate(&l.rx, &c, &DemodOptions::new(method, 4), None).unwrap();
            acc.merge(&r.score(&l.w.plan, &l.w.psk, &c).unwrap());
        }
    }
    println!(
        "16PSK SER flat-gain {:.4}, proposed {:.4}",
        flat.psk_ser(),
        proposed.psk_ser()
    );
    assert!(flat.psk_ser() > proposed.psk_ser());
}

#[test]
fn known_channel_needs_the_impairment() {
    let c = cfg();
    let l = link(
        &c,
        2,
        3,
        ImpairmentSpec::identity(&c),
        &mut rng_from_seed(17),
    );
    let err = demodulate(
        &l.rx,
        &c,
        &DemodOptions::new(DemodMethod::KnownChannel, 3),
        None,
    )
    .unwrap_err();
    assert_eq!(err.category(), "config");
}
