use fhjrc::config::{hop_variant, noise_variance, Modulation, Overrides, RunConfig};
use fhjrc_core::RadarConfig;

#[test]
fn defaults_are_the_experiment_parameters() {
    let run = RunConfig::default();
    assert_eq!(run.radar_config(), RadarConfig::default());
    let c = run.radar_config();
    assert_eq!((c.samples_per_prt(), c.samples_per_hop()), (1600, 40));
    assert_eq!(run.scene.rx_antennas * c.tx_antennas, 24);
    run.validate().unwrap();
}

#[test]
fn empty_file_gives_defaults() {
    assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
}

#[test]
fn toml_round_trip() {
    let mut run = RunConfig::default();
    run.seed = 99;
    run.comm.modulation = Modulation::Psk8;
    run.sweep.snr_db = vec![0.0, 3.5];
    run.impairment.cfo = Some(1234.5);
    let back = RunConfig::from_toml(&run.to_toml()).unwrap();
    // the output directory is deliberately not serialised
    assert_eq!(back.out, RunConfig::default().out);
    run.out = back.out.clone();
    assert_eq!(back, run);
}

#[test]
fn hash_ignores_the_output_directory() {
    let a = RunConfig::default();
    let mut b = a.clone();
    b.out = "elsewhere".into();
    assert_eq!(a.hash(), b.hash());
    b.seed = 2;
    assert_ne!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn unknown_keys_are_rejected() {
    for text in [
        "bogus = 1",
        "[radar]\nsubband = 20",
        "[sweep]\nkind = \"ber\"\nextra = true",
        "[nope]",
    ] {
        let e = RunConfig::from_toml(text).unwrap_err();
        assert_eq!(e.category(), "config", "{text}");
    }
}

#[test]
fn bad_values_fail_validation() {
    let cases = [
        "[radar]\nsubbands = 7",
        "[radar]\nhops_per_pulse = 2",
        "[impairment]\nrho = 1e-5",
        "[scene]\nrange = [100.0, 4000.0]",
        "[processing]\npfa = 0.0",
        "[processing]\nangle_points = 1",
        "[sweep]\ntrials = 0",
        "[sweep]\nsnr_db = []",
        "[sweep]\nhop_durations = [0.3e-6]",
    ];
    for text in cases {
        let run = RunConfig::from_toml(text).unwrap();
        assert!(run.validate().is_err(), "{text}");
    }
}

#[test]
fn overrides_take_precedence() {
    let mut run = RunConfig::from_toml("seed = 5\n[comm]\nmodulation = \"fhcs\"").unwrap();
    run.apply_overrides(&Overrides {
        seed: Some(7),
        out: Some("o".into()),
        snr_db: Some(-3.0),
        modulation: Some(Modulation::Psk16),
        trials: Some(4),
    });
    assert_eq!(run.seed, 7);
    assert_eq!(run.out, std::path::PathBuf::from("o"));
    assert_eq!(run.impairment.snr_db, -3.0);
    assert_eq!(run.scene.snr_db, -3.0);
    assert_eq!(run.sweep.snr_db, vec![-3.0]);
    assert_eq!(run.sweep.radar_snr_db, vec![-3.0]);
    assert_eq!(run.comm.modulation, Modulation::Psk16);
    assert_eq!(run.sweep.modulations, vec![Modulation::Psk16]);
    assert_eq!(run.sweep.trials, 4);
}

#[test]
fn half_microsecond_hops_double_the_bandwidth() {
    let c = hop_variant(&RadarConfig::default(), 0.5e-6).unwrap();
    c.validate().unwrap();
    assert!((c.bandwidth - 40e6).abs() < 1e-3);
    assert_eq!(c.sample_rate, 40e6);
    assert_eq!(c.samples_per_hop(), 20);
    assert_eq!(c.cycles_per_subband(), 1);
    assert_eq!(c.samples_per_prt(), 1600);
    assert_eq!(
        hop_variant(&RadarConfig::default(), 1e-6).unwrap(),
        RadarConfig::default()
    );
}

#[test]
fn noise_variance_convention() {
    assert_eq!(noise_variance(f64::INFINITY), 0.0);
    assert!((noise_variance(10.0) - 0.1).abs() < 1e-15);
    assert!((noise_variance(-10.0) - 10.0).abs() < 1e-12);
    let run = RunConfig::from_toml("[impairment]\nsnr_db = inf").unwrap();
    run.validate().unwrap();
}

#[test]
fn modulation_names() {
    for m in [Modulation::Fhcs, Modulation::Psk8, Modulation::Psk16] {
        assert_eq!(m.name().parse::<Modulation>().unwrap(), m);
    }
    assert_eq!("16PSK".parse::<Modulation>().unwrap().order(), 4);
    assert!("qam".parse::<Modulation>().is_err());
}
