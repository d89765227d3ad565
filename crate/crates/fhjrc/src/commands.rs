//! The four subcommands. Each writes into `run.out`, starting with the
//! effective `config.toml`.

use std::path::Path;

use fhjrc_core::commrx::{demodulate, DemodReport, ErrorCounts};
use fhjrc_core::fhwave::{plan_hops, synthesize, HopPlan, IqFrame, PskGrid, Waveform};
use fhjrc_core::impair::apply;
use fhjrc_core::radarrx::{process_cpi, synthesize_echo, Exclusion};
use fhjrc_core::{rng_from_seed, RadarConfig};
use serde::Serialize;

use crate::bench::{associate, comm_frame, derive_seed, run_sweep, SNR_NOTE};
use crate::config::{noise_variance, RunConfig};
use crate::io::{
    echo_config, ensure_dir, plan_rows, read_iq, read_plan, write_csv, write_iq, write_rdm,
};
use crate::{Error, Result};

const TAG_TXGEN: u64 = 10;
const TAG_COMM: u64 = 11;
const TAG_RADAR: u64 = 12;

fn prepare(run: &RunConfig) -> Result<()> {
    run.validate()?;
    ensure_dir(&run.out)?;
    echo_config(&run.out, run)
}

fn frame_prts(run: &RunConfig, cfg: &RadarConfig) -> usize {
    run.comm.prts.unwrap_or(cfg.prts_per_cpi)
}

/// Payload bits from a text file of `0`/`1` characters (whitespace
/// ignored). An empty file is the all-zero payload.
fn read_payload(path: &Path, needed: usize) -> Result<Vec<u8>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut bits = Vec::new();
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        match c {
            '0' => bits.push(0),
            '1' => bits.push(1),
            _ => {
                return Err(Error::format(
                    path,
                    format!("payload character '{c}' is not a bit"),
                ))
            }
        }
    }
    if bits.is_empty() {
        bits = vec![0; needed];
    }
    Ok(bits)
}

/// Transmit frame (`tx.iq`, one channel per antenna) and its ground-truth
/// plan (`plan.csv`). Payload comes from `comm.payload` or the seed.
pub fn cmd_txgen(run: &RunConfig) -> Result<Waveform> {
    prepare(run)?;
    let cfg = run.radar_config();
    let prts = frame_prts(run, &cfg);
    let order = run.comm.modulation.order();
    let waveform = match &run.comm.payload {
        Some(path) => {
            let fhcs_len = HopPlan::fhcs_bits_needed(&cfg, prts);
            let psk_len = prts * HopPlan::payload_slots_per_prt(&cfg) * order as usize;
            let bits = read_payload(path, fhcs_len + psk_len)?;
            if bits.len() < fhcs_len + psk_len {
                return Err(fhjrc_core::Error::InputLength(format!(
                    "payload has {} bits, {prts} PRTs need {}",
                    bits.len(),
                    fhcs_len + psk_len
                ))
                .into());
            }
            let plan = plan_hops(&cfg, prts, &bits[..fhcs_len])?;
            let psk = PskGrid::from_bits(&plan, order, &bits[fhcs_len..])?;
            Waveform { plan, psk }
        }
        None => {
            let mut rng = rng_from_seed(derive_seed(run.seed, &[TAG_TXGEN]));
            Waveform::random_dfrc(&cfg, prts, order, &mut rng)?
        }
    };
    let frame = synthesize(&waveform.plan, &waveform.psk, &cfg)?;
    write_iq(&run.out.join("tx.iq"), &frame)?;
    write_csv(
        &run.out.join("plan.csv"),
        run,
        &[],
        &plan_rows(&waveform.plan, &waveform.psk, &cfg),
    )?;
    Ok(waveform)
}

#[derive(Serialize)]
struct SymbolRow {
    prt: usize,
    hop: usize,
    antenna: usize,
    subband: usize,
    offset: usize,
    phase: f64,
    index: u32,
    residual: f64,
    erased: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommSummary {
    pub method: &'static str,
    pub modulation: &'static str,
    pub prts: usize,
    pub cfo_hat: f64,
    pub rho_hat: f64,
    pub sto_step_hat: f64,
    pub cfo_true: Option<f64>,
    pub rho_true: Option<f64>,
    pub sto_step_true: Option<f64>,
    pub symbols: usize,
    pub erased_symbols: usize,
    pub fhcs_bits: Option<usize>,
    pub fhcs_ber: Option<f64>,
    pub psk_ser: Option<f64>,
    pub psk_ber: Option<f64>,
}

/// Demodulates a synthetic impaired frame, or `comm.input`. A
/// multi-antenna input is treated as a transmit frame (impaired here, plan
/// required); a single-channel input as already received. Writes
/// `symbols.csv` (one row per payload symbol) and `summary.csv`.
pub fn cmd_comm(run: &RunConfig) -> Result<CommSummary> {
    prepare(run)?;
    let cfg = run.radar_config();
    let order = run.comm.modulation.order();
    let snr = run.impairment.snr_db;
    let mut rng = rng_from_seed(derive_seed(run.seed, &[TAG_COMM]));
    let truth: Option<(HopPlan, PskGrid)>;
    let spec;
    let rx: IqFrame;
    match &run.comm.input {
        None => {
            let f = comm_frame(run, &cfg, frame_prts(run, &cfg), order, snr, &mut rng)?;
            truth = Some((f.waveform.plan, f.waveform.psk));
            spec = f.spec;
            rx = f.rx;
        }
        Some(path) => {
            let frame = read_iq(path)?;
            if frame.prt_len != cfg.samples_per_prt()
                || (frame.sample_rate - cfg.sample_rate).abs() > 1e-6 * cfg.sample_rate
            {
                return Err(Error::format(
                    path,
                    "sample rate or PRT length differs from the configuration",
                ));
            }
            truth = run
                .comm
                .plan
                .as_ref()
                .map(|p| read_plan(p, &cfg))
                .transpose()?;
            spec = run.impairment.build(&cfg, snr, &mut rng)?;
            rx = if frame.channel_count() == 1 {
                frame
            } else {
                let Some((plan, _)) = &truth else {
                    return Err(Error::Config(
                        "a multi-antenna input needs comm.plan".into(),
                    ));
                };
                apply(&frame, plan, &spec, &cfg, &mut rng)?
            };
        }
    }
    let report = demodulate(&rx, &cfg, &run.comm.options(), Some(&spec))?;
    let counts = match &truth {
        Some((plan, psk)) if psk.order() == order => Some(report.score(plan, psk, &cfg)?),
        Some(_) => {
            return Err(fhjrc_core::Error::Dimension(format!(
                "plan file PSK order differs from modulation {}",
                run.comm.modulation
            ))
            .into())
        }
        None => None,
    };
    write_symbols(run, &cfg, &report)?;
    let summary = summarise(
        run,
        &cfg,
        rx.prts(),
        &report,
        counts.as_ref(),
        run.comm.input.is_none().then_some(&spec),
    );
    write_csv(
        &run.out.join("summary.csv"),
        run,
        &[SNR_NOTE],
        std::slice::from_ref(&summary),
    )?;
    Ok(summary)
}

fn write_symbols(run: &RunConfig, cfg: &RadarConfig, report: &DemodReport) -> Result<()> {
    let rows: Vec<SymbolRow> = report
        .symbols
        .iter()
        .map(|s| SymbolRow {
            prt: s.prt,
            hop: s.hop,
            antenna: s.antenna,
            subband: s.subband,
            offset: cfg.pilot_offset(s.subband),
            phase: s.phase,
            index: s.index,
            residual: s.residual,
            erased: s.erased,
        })
        .collect();
    write_csv(&run.out.join("symbols.csv"), run, &[], &rows)
}

fn summarise(
    run: &RunConfig,
    cfg: &RadarConfig,
    prts: usize,
    report: &DemodReport,
    counts: Option<&ErrorCounts>,
    spec: Option<&fhjrc_core::impair::ImpairmentSpec>,
) -> CommSummary {
    CommSummary {
        method: report.method.name(),
        modulation: run.comm.modulation.name(),
        prts,
        cfo_hat: report.sync.cfo,
        rho_hat: report.sync.rho,
        sto_step_hat: report.sync.sto_step,
        cfo_true: spec.map(|s| s.cfo),
        rho_true: spec.map(|s| s.rho(cfg)),
        sto_step_true: spec.map(|s| s.sto_step),
        symbols: report.symbols.len(),
        erased_symbols: report.symbols.iter().filter(|s| s.erased).count(),
        fhcs_bits: counts.map(|c| c.fhcs_bits),
        fhcs_ber: counts.map(|c| c.fhcs_ber()),
        psk_ser: counts.filter(|_| report.psk_order > 0).map(|c| c.psk_ser()),
        psk_ber: counts.filter(|_| report.psk_order > 0).map(|c| c.psk_ber()),
    }
}

#[derive(Serialize)]
struct DetectionRow {
    doppler_bin: usize,
    range_bin: usize,
    range: f64,
    velocity: f64,
    azimuth: f64,
    statistic: f64,
    threshold: f64,
}

#[derive(Serialize)]
struct TargetRow {
    target: usize,
    range: f64,
    velocity: f64,
    azimuth: f64,
    excluded: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadarSummary {
    pub targets: usize,
    pub eligible: usize,
    pub detections: usize,
    pub matched: usize,
    pub detection_rate: f64,
}

/// One CPI of the configured scene through the radar chain. Writes
/// `detections.csv`, `targets.csv`, `summary.csv` and `rdm.bin`, and warns
/// on stderr about targets the waveform cannot see.
pub fn cmd_radar(run: &RunConfig) -> Result<RadarSummary> {
    prepare(run)?;
    let cfg = run.radar_config();
    let sc = &run.scene;
    let mut rng = rng_from_seed(derive_seed(run.seed, &[TAG_RADAR]));
    let scene = sc.scene(&mut rng);
    let w = sc.waveform(sc.waveform, &cfg, run.comm.modulation.order(), &mut rng)?;
    let array = sc.array(&cfg);
    let echo = synthesize_echo(
        &w.plan,
        &w.psk,
        &scene,
        &array,
        &cfg,
        noise_variance(sc.snr_db),
        &mut rng,
    )?;
    for (i, why) in &echo.excluded {
        let t = &scene.targets[*i];
        eprintln!(
            "warning: target {i} (range {:.1} m, velocity {:.1} m/s) excluded: {}",
            t.range,
            t.velocity,
            why.describe()
        );
    }
    let processing = run.processing.processing()?;
    let (map, estimates) = process_cpi(&echo.frame, &w.plan, &w.psk, &array, &cfg, &processing)?;
    let rows: Vec<DetectionRow> = estimates
        .iter()
        .map(|e| DetectionRow {
            doppler_bin: e.detection.doppler_bin,
            range_bin: e.detection.range_bin,
            range: e.range,
            velocity: e.velocity,
            azimuth: e.azimuth,
            statistic: e.detection.statistic,
            threshold: e.detection.threshold,
        })
        .collect();
    write_csv(&run.out.join("detections.csv"), run, &[SNR_NOTE], &rows)?;
    let excluded = |i: usize| -> &'static str {
        match echo.excluded.iter().find(|(j, _)| *j == i).map(|e| e.1) {
            None => "",
            Some(Exclusion::BlindZone) => "blind-zone",
            Some(Exclusion::BeyondUnambiguousRange) => "beyond-range",
            Some(Exclusion::DopplerAmbiguous) => "doppler-ambiguous",
        }
    };
    let targets: Vec<TargetRow> = scene
        .targets
        .iter()
        .enumerate()
        .map(|(i, t)| TargetRow {
            target: i,
            range: t.range,
            velocity: t.velocity,
            azimuth: t.azimuth,
            excluded: excluded(i),
        })
        .collect();
    write_csv(&run.out.join("targets.csv"), run, &[], &targets)?;
    let outcome = associate(&scene, &echo.excluded, &estimates, &map);
    let summary = RadarSummary {
        targets: scene.targets.len(),
        eligible: outcome.eligible,
        detections: outcome.detections,
        matched: outcome.errors.len(),
        detection_rate: outcome.errors.len() as f64 / outcome.eligible.max(1) as f64,
    };
    write_csv(
        &run.out.join("summary.csv"),
        run,
        &[SNR_NOTE],
        std::slice::from_ref(&summary),
    )?;
    write_rdm(&run.out.join("rdm.bin"), &map, run.processing.rdm_export)?;
    Ok(summary)
}

/// Runs the configured sweep (see [`crate::bench`]).
pub fn cmd_sweep(run: &RunConfig) -> Result<()> {
    prepare(run)?;
    run_sweep(&run.out, run)
}
