//! Monte-Carlo harness.
//!
//! Every unit of work (one frame or one radar trial) gets its own generator
//! seeded from the run seed and the unit's grid coordinates. Units run on
//! the rayon pool and are reduced in index order, so the thread count never
//! changes a report.

use std::path::Path;

use fhjrc_core::commrx::{demodulate, DemodMethod, DemodOptions, DemodReport, ErrorCounts};
use fhjrc_core::fhwave::{hop_layout, synthesize, FhcsCodebook, HopPlan, Waveform};
use fhjrc_core::impair::{apply, ImpairmentSpec};
use fhjrc_core::radarrx::Exclusion;
use fhjrc_core::radarrx::{
    process_cpi, synthesize_echo, AngleGrid, RangeDopplerMap, TargetEstimate, TargetScene,
};
use fhjrc_core::{rng_from_seed, RadarConfig, SimRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    hop_variant, noise_variance, ChannelMode, Modulation, RunConfig, SweepKind, WaveformKind,
};
use crate::io::write_csv;
use crate::Result;

/// Comment line documenting the SNR axis of every report.
pub const SNR_NOTE: &str =
    "snr_db: per-sample power of one antenna's unit tone over the complex noise variance";

/// Two-sided 95% normal quantile used for all intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Communication data rates in Mbit/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DataRate {
    /// `(H floor(log2 C(K, M)) + x M H) / T_p`, ignoring pilot pinning.
    pub nominal: f64,
    /// Bits actually carried per PRT under pilot pinning, over `T_p`.
    pub effective: f64,
}

pub fn data_rate(x: u32, cfg: &RadarConfig) -> Result<DataRate> {
    cfg.validate()?;
    let h = cfg.hops_per_pulse;
    let full = FhcsCodebook::new(cfg.subbands, cfg.tx_antennas)?.bits() as usize;
    let nominal_bits = h * full + x as usize * cfg.tx_antennas * h;
    let effective_bits =
        HopPlan::fhcs_bits_per_prt(cfg) + x as usize * HopPlan::payload_slots_per_prt(cfg);
    Ok(DataRate {
        nominal: nominal_bits as f64 / cfg.prt / 1e6,
        effective: effective_bits as f64 / cfg.prt / 1e6,
    })
}

/// Error proportion with its 95% Wilson score interval. Errors may be
/// fractional (erasures count half a bit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub errors: f64,
    pub total: usize,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn wilson(errors: f64, total: usize) -> Proportion {
    if total == 0 {
        return Proportion {
            errors,
            total,
            value: 0.0,
            lo: 0.0,
            hi: 1.0,
        };
    }
    let n = total as f64;
    let p = (errors / n).clamp(0.0, 1.0);
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Proportion {
        errors,
        total,
        value: p,
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    }
}

impl Proportion {
    pub fn overlaps(&self, o: &Proportion) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }
}

/// SplitMix64 finaliser over the run seed and grid coordinates.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    tags.iter()
        .fold(mix(base.wrapping_add(0x9e37_79b9_7f4a_7c15)), |acc, &t| {
            mix(acc ^ t.wrapping_add(0x9e37_79b9_7f4a_7c15))
        })
}

const TAG_BER: u64 = 1;
const TAG_METHODS: u64 = 2;
const TAG_RADAR: u64 = 3;
const TAG_NOISE: u64 = 4;

/// One synthetic frame through the impaired link.
pub struct CommFrame {
    pub waveform: Waveform,
    pub spec: ImpairmentSpec,
    pub rx: fhjrc_core::fhwave::IqFrame,
}

/// Random payload, front-end draw, impairment and noise for one frame.
pub fn comm_frame(
    run: &RunConfig,
    cfg: &RadarConfig,
    prts: usize,
    order: u32,
    snr_db: f64,
    rng: &mut SimRng,
) -> Result<CommFrame> {
    let waveform = Waveform::random_dfrc(cfg, prts, order, rng)?;
    let tx = synthesize(&waveform.plan, &waveform.psk, cfg)?;
    let spec = run.impairment.build(cfg, snr_db, rng)?;
    let rx = apply(&tx, &waveform.plan, &spec, cfg, rng)?;
    Ok(CommFrame { waveform, spec, rx })
}

impl CommFrame {
    pub fn demodulate(
        &self,
        cfg: &RadarConfig,
        options: &DemodOptions,
    ) -> Result<(DemodReport, ErrorCounts)> {
        let report = demodulate(&self.rx, cfg, options, Some(&self.spec))?;
        let counts = report.score(&self.waveform.plan, &self.waveform.psk, cfg)?;
        Ok((report, counts))
    }
}

/// PRTs per frame of a sweep (one CPI) and frames per grid point.
fn frames_for(cfg: &RadarConfig, symbols: usize) -> (usize, usize) {
    let prts = cfg.prts_per_cpi;
    let per_frame = (HopPlan::payload_slots_per_prt(cfg) * prts).max(1);
    (prts, symbols.div_ceil(per_frame))
}

/// Hops per PRT whose free slots carry at least one FHCS bit.
pub fn fhcs_hops_per_prt(cfg: &RadarConfig) -> usize {
    (0..cfg.hops_per_pulse)
        .filter(|&h| hop_layout(cfg, 0, h).is_ok_and(|l| l.codebook.bits() > 0))
        .count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub mode: ChannelMode,
    pub method: DemodMethod,
    pub hop_duration: f64,
    pub modulation: Modulation,
    pub snr_db: f64,
    pub frames: usize,
    pub counts: ErrorCounts,
    pub fhcs_ber: Proportion,
    /// FHCS BER interval with the hop (one codeword decision) as the trial
    /// unit. Bit errors within a hop are not independent, so this is the
    /// wider, honest interval.
    pub fhcs_ber_hops: Proportion,
    pub psk_ber: Proportion,
    pub psk_ser: Proportion,
    pub rate: DataRate,
}

/// BER/SER against SNR for every `(hop duration, modulation, SNR)` of the
/// sweep section. Known mode hands the true impairment to the receiver;
/// estimated mode runs the configured pilot-based method.
pub fn run_ber_sweep(run: &RunConfig) -> Result<Vec<BerPoint>> {
    let s = &run.sweep;
    let method = match s.mode {
        ChannelMode::Known => DemodMethod::KnownChannel,
        ChannelMode::Estimated => run.comm.method.into(),
    };
    let base = run.radar_config();
    let mut grid = Vec::new();
    for (a, &t) in s.hop_durations.iter().enumerate() {
        let cfg = hop_variant(&base, t)?;
        cfg.validate()?;
        for (b, &m) in s.modulations.iter().enumerate() {
            for (c, &snr) in s.snr_db.iter().enumerate() {
                grid.push(([a, b, c], cfg.clone(), m, snr));
            }
        }
    }
    let mut jobs = Vec::new();
    for (p, (_, cfg, _, _)) in grid.iter().enumerate() {
        let (_, frames) = frames_for(cfg, s.symbols_per_point);
        jobs.extend((0..frames).map(|f| (p, f)));
    }
    let counts = jobs
        .par_iter()
        .map(|&(p, f)| {
            let (idx, cfg, m, snr) = &grid[p];
            let (prts, _) = frames_for(cfg, s.symbols_per_point);
            let seed = derive_seed(
                run.seed,
                &[
                    TAG_BER,
                    idx[0] as u64,
                    idx[1] as u64,
                    idx[2] as u64,
                    f as u64,
                ],
            );
            let mut rng = rng_from_seed(seed);
            let frame = comm_frame(run, cfg, prts, m.order(), *snr, &mut rng)?;
            let options = DemodOptions {
                method,
                psk_order: m.order(),
                group_len: run.comm.group_len,
            };
            Ok((p, frame.demodulate(cfg, &options)?.1))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut totals = vec![(0usize, ErrorCounts::default()); grid.len()];
    for (p, c) in &counts {
        totals[*p].0 += 1;
        totals[*p].1.merge(c);
    }
    grid.iter()
        .zip(totals)
        .map(|((_, cfg, m, snr), (frames, c))| {
            Ok(BerPoint {
                mode: s.mode,
                method,
                hop_duration: cfg.hop_duration,
                modulation: *m,
                snr_db: *snr,
                frames,
                fhcs_ber: wilson(c.fhcs_bit_errors, c.fhcs_bits),
                fhcs_ber_hops: {
                    let hops = frames * cfg.prts_per_cpi * fhcs_hops_per_prt(cfg);
                    let ber = c.fhcs_ber();
                    wilson(ber * hops as f64, hops)
                },
                psk_ber: wilson(c.psk_bit_errors, c.psk_bits),
                psk_ser: wilson(c.psk_symbol_errors, c.psk_symbols),
                rate: data_rate(m.order(), cfg)?,
                counts: c,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodPoint {
    pub modulation: Modulation,
    pub method: DemodMethod,
    pub snr_db: f64,
    pub frames: usize,
    pub counts: ErrorCounts,
    pub ser: Proportion,
    /// Mean and RMS of the wrapped distance to the decided constellation
    /// point over non-erased symbols (rad).
    pub mean_abs_residual: f64,
    pub rms_residual: f64,
}

pub const COMPARED_METHODS: [DemodMethod; 3] = [
    DemodMethod::FlatGain,
    DemodMethod::Proposed,
    DemodMethod::Averaged,
];

#[derive(Debug, Clone, Copy, Default)]
struct Scatter {
    n: usize,
    abs: f64,
    sq: f64,
}

/// Flat-gain, proposed and averaged demodulation of the same received
/// frames, per modulation, at the method SNR with the configured ripple.
pub fn run_method_comparison(run: &RunConfig) -> Result<Vec<MethodPoint>> {
    let s = &run.sweep;
    let cfg = run.radar_config();
    let (prts, frames) = frames_for(&cfg, s.symbols_per_point);
    let jobs: Vec<(usize, usize)> = (0..s.modulations.len())
        .flat_map(|b| (0..frames).map(move |f| (b, f)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(b, f)| {
            let m = s.modulations[b];
            let mut rng = rng_from_seed(derive_seed(run.seed, &[TAG_METHODS, b as u64, f as u64]));
            let frame = comm_frame(run, &cfg, prts, m.order(), s.method_snr_db, &mut rng)?;
            COMPARED_METHODS
                .iter()
                .map(|&method| {
                    let options = DemodOptions {
                        method,
                        psk_order: m.order(),
                        group_len: run.comm.group_len,
                    };
                    let (report, counts) = frame.demodulate(&cfg, &options)?;
                    let mut sc = Scatter::default();
                    for sym in report.symbols.iter().filter(|x| !x.erased) {
                        sc.n += 1;
                        sc.abs += sym.residual.abs();
                        sc.sq += sym.residual * sym.residual;
                    }
                    Ok((counts, sc))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (b, &m) in s.modulations.iter().enumerate() {
        for (k, &method) in COMPARED_METHODS.iter().enumerate() {
            let mut c = ErrorCounts::default();
            let mut sc = Scatter::default();
            for r in &results[b * frames..(b + 1) * frames] {
                c.merge(&r[k].0);
                sc.n += r[k].1.n;
                sc.abs += r[k].1.abs;
                sc.sq += r[k].1.sq;
            }
            let n = sc.n.max(1) as f64;
            out.push(MethodPoint {
                modulation: m,
                method,
                snr_db: s.method_snr_db,
                frames,
                ser: wilson(c.psk_symbol_errors, c.psk_symbols),
                mean_abs_residual: sc.abs / n,
                rms_residual: (sc.sq / n).sqrt(),
                counts: c,
            });
        }
    }
    Ok(out)
}

/// Association gate: range bins, Doppler bins, degrees.
pub const GATE: (f64, f64, f64) = (3.0, 2.0, 2.0);

/// Estimation errors of one waveform in one trial.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialOutcome {
    /// Targets inside the unambiguous region.
    pub eligible: usize,
    pub detections: usize,
    /// `(range, velocity, azimuth)` error of every associated target.
    pub errors: Vec<[f64; 3]>,
}

impl TrialOutcome {
    fn rmse(&self, q: usize) -> Option<f64> {
        if self.errors.is_empty() {
            return None;
        }
        Some(
            (self.errors.iter().map(|e| e[q] * e[q]).sum::<f64>() / self.errors.len() as f64)
                .sqrt(),
        )
    }
}

/// Nearest-neighbour association of detections to the true targets inside
/// the gate. Pairs are taken greedily in order of normalised distance; each
/// detection serves at most one target. Excluded targets are skipped.
pub fn associate(
    scene: &TargetScene,
    excluded: &[(usize, Exclusion)],
    estimates: &[TargetEstimate],
    map: &RangeDopplerMap,
) -> TrialOutcome {
    let dr = map.range_bin_width;
    let dv = map.wavelength * map.doppler_bin_width / 2.0;
    let mut pairs = Vec::new();
    let mut eligible = 0;
    for (ti, t) in scene.targets.iter().enumerate() {
        if excluded.iter().any(|(i, _)| *i == ti) {
            continue;
        }
        eligible += 1;
        for (di, e) in estimates.iter().enumerate() {
            let err = [
                e.range - t.range,
                e.velocity - t.velocity,
                e.azimuth - t.azimuth,
            ];
            let norm = [
                err[0] / (GATE.0 * dr),
                err[1] / (GATE.1 * dv),
                err[2] / GATE.2,
            ];
            if norm.iter().all(|v| v.abs() <= 1.0) {
                let d: f64 = norm.iter().map(|v| v * v).sum();
                pairs.push((d, ti, di, err));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_t = vec![false; scene.targets.len()];
    let mut used_d = vec![false; estimates.len()];
    let mut errors = Vec::new();
    for (_, ti, di, err) in pairs {
        if !used_t[ti] && !used_d[di] {
            used_t[ti] = true;
            used_d[di] = true;
            errors.push((ti, err));
        }
    }
    errors.sort_by_key(|e| e.0);
    TrialOutcome {
        eligible,
        detections: estimates.len(),
        errors: errors.into_iter().map(|e| e.1).collect(),
    }
}

/// Pooled RMSE of one parameter with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rmse {
    pub value: f64,
    pub se: f64,
    pub samples: usize,
}

fn pooled_rmse(outcomes: &[&TrialOutcome], q: usize) -> Rmse {
    let sq: Vec<f64> = outcomes
        .iter()
        .flat_map(|o| o.errors.iter().map(|e| e[q] * e[q]))
        .collect();
    let n = sq.len();
    if n == 0 {
        return Rmse {
            value: f64::NAN,
            se: f64::NAN,
            samples: 0,
        };
    }
    let mse = sq.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        sq.iter().map(|v| (v - mse) * (v - mse)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let value = mse.sqrt();
    let se = if value > 0.0 {
        (var / n as f64).sqrt() / (2.0 * value)
    } else {
        0.0
    };
    Rmse {
        value,
        se,
        samples: n,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadarStats {
    pub eligible: usize,
    pub matched: usize,
    pub detections: usize,
    /// Range (m), velocity (m/s), azimuth (deg).
    pub rmse: [Rmse; 3],
}

impl RadarStats {
    pub fn detection_rate(&self) -> f64 {
        self.matched as f64 / self.eligible.max(1) as f64
    }
}

/// Mean and standard error of per-trial `RMSE(traditional) - RMSE(dfrc)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedDiff {
    pub mean: f64,
    pub se: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadarPoint {
    pub snr_db: f64,
    pub trials: usize,
    pub traditional: RadarStats,
    pub dfrc: RadarStats,
    pub paired: [PairedDiff; 3],
}

/// Uniform-error RMSE of the range bin, Doppler bin and angle grid
/// (`step / sqrt(12)`): range (m), velocity (m/s), azimuth (deg).
pub fn quantisation_floors(cfg: &RadarConfig, grid: &AngleGrid) -> [f64; 3] {
    let s12 = 12f64.sqrt();
    let dr = fhjrc_core::SPEED_OF_LIGHT / (2.0 * cfg.sample_rate);
    let dv = cfg.wavelength() / (2.0 * cfg.prts_per_cpi as f64 * cfg.prt);
    [dr / s12, dv / s12, grid.step() / s12]
}

fn radar_trial(run: &RunConfig, t: usize, snr_db: f64) -> Result<[TrialOutcome; 2]> {
    let cfg = run.radar_config();
    let sc = &run.scene;
    let mut rng = rng_from_seed(derive_seed(run.seed, &[TAG_RADAR, t as u64]));
    let scene = sc.scene(&mut rng);
    let order = run.comm.modulation.order();
    let waves = [
        sc.waveform(WaveformKind::Traditional, &cfg, order, &mut rng)?,
        sc.waveform(WaveformKind::Dfrc, &cfg, order, &mut rng)?,
    ];
    let array = sc.array(&cfg);
    let processing = run.processing.processing()?;
    let noise_seed = derive_seed(run.seed, &[TAG_NOISE, t as u64]);
    let mut out: [TrialOutcome; 2] = Default::default();
    for (w, o) in waves.iter().zip(out.iter_mut()) {
        // identical noise for both waveforms: the comparison is paired
        let mut noise = rng_from_seed(noise_seed);
        let echo = synthesize_echo(
            &w.plan,
            &w.psk,
            &scene,
            &array,
            &cfg,
            noise_variance(snr_db),
            &mut noise,
        )?;
        let (map, est) = process_cpi(&echo.frame, &w.plan, &w.psk, &array, &cfg, &processing)?;
        *o = associate(&scene, &echo.excluded, &est, &map);
    }
    Ok(out)
}

/// Parameter RMSEs of the traditional and pilot-pinned waveforms on the
/// same scenes and noise. Trial `t` uses the same scene at every SNR.
pub fn run_radar_sweep(run: &RunConfig) -> Result<Vec<RadarPoint>> {
    let s = &run.sweep;
    let jobs: Vec<(usize, usize)> = (0..s.radar_snr_db.len())
        .flat_map(|j| (0..s.trials).map(move |t| (j, t)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(j, t)| radar_trial(run, t, s.radar_snr_db[j]))
        .collect::<Result<Vec<_>>>()?;
    let stats = |os: &[&TrialOutcome]| RadarStats {
        eligible: os.iter().map(|o| o.eligible).sum(),
        matched: os.iter().map(|o| o.errors.len()).sum(),
        detections: os.iter().map(|o| o.detections).sum(),
        rmse: [0, 1, 2].map(|q| pooled_rmse(os, q)),
    };
    Ok(s.radar_snr_db
        .iter()
        .enumerate()
        .map(|(j, &snr)| {
            let block = &outcomes[j * s.trials..(j + 1) * s.trials];
            let trad: Vec<&TrialOutcome> = block.iter().map(|o| &o[0]).collect();
            let dfrc: Vec<&TrialOutcome> = block.iter().map(|o| &o[1]).collect();
            let paired = [0, 1, 2].map(|q| {
                let d: Vec<f64> = block
                    .iter()
                    .filter_map(|o| Some(o[0].rmse(q)? - o[1].rmse(q)?))
                    .collect();
                mean_se(&d)
            });
            RadarPoint {
                snr_db: snr,
                trials: s.trials,
                traditional: stats(&trad),
                dfrc: stats(&dfrc),
                paired,
            }
        })
        .collect())
}

fn mean_se(d: &[f64]) -> PairedDiff {
    let n = d.len();
    if n == 0 {
        return PairedDiff {
            mean: f64::NAN,
            se: f64::NAN,
            pairs: 0,
        };
    }
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    PairedDiff {
        mean,
        se: (var / n as f64).sqrt(),
        pairs: n,
    }
}

#[derive(Serialize)]
struct BerRow {
    mode: &'static str,
    method: &'static str,
    hop_duration: f64,
    modulation: &'static str,
    snr_db: f64,
    frames: usize,
    fhcs_bits: usize,
    fhcs_bit_errors: f64,
    fhcs_ber: f64,
    fhcs_ber_lo: f64,
    fhcs_ber_hi: f64,
    fhcs_ber_hop_lo: f64,
    fhcs_ber_hop_hi: f64,
    fhcs_erased_hops: usize,
    psk_symbols: usize,
    psk_symbol_errors: f64,
    psk_ser: f64,
    psk_ser_lo: f64,
    psk_ser_hi: f64,
    psk_bits: usize,
    psk_bit_errors: f64,
    psk_ber: f64,
    psk_ber_lo: f64,
    psk_ber_hi: f64,
    psk_erased_symbols: usize,
    nominal_mbps: f64,
    effective_mbps: f64,
}

#[derive(Serialize)]
struct PlotRow {
    curve: String,
    x: f64,
    y: f64,
    lo: f64,
    hi: f64,
}

fn mode_name(m: ChannelMode) -> &'static str {
    match m {
        ChannelMode::Known => "known",
        ChannelMode::Estimated => "estimated",
    }
}

pub fn write_ber_report(dir: &Path, run: &RunConfig, points: &[BerPoint]) -> Result<()> {
    let rows: Vec<BerRow> = points
        .iter()
        .map(|p| BerRow {
            mode: mode_name(p.mode),
            method: p.method.name(),
            hop_duration: p.hop_duration,
            modulation: p.modulation.name(),
            snr_db: p.snr_db,
            frames: p.frames,
            fhcs_bits: p.counts.fhcs_bits,
            fhcs_bit_errors: p.counts.fhcs_bit_errors,
            fhcs_ber: p.fhcs_ber.value,
            fhcs_ber_lo: p.fhcs_ber.lo,
            fhcs_ber_hi: p.fhcs_ber.hi,
            fhcs_ber_hop_lo: p.fhcs_ber_hops.lo,
            fhcs_ber_hop_hi: p.fhcs_ber_hops.hi,
            fhcs_erased_hops: p.counts.fhcs_erased_hops,
            psk_symbols: p.counts.psk_symbols,
            psk_symbol_errors: p.counts.psk_symbol_errors,
            psk_ser: p.psk_ser.value,
            psk_ser_lo: p.psk_ser.lo,
            psk_ser_hi: p.psk_ser.hi,
            psk_bits: p.counts.psk_bits,
            psk_bit_errors: p.counts.psk_bit_errors,
            psk_ber: p.psk_ber.value,
            psk_ber_lo: p.psk_ber.lo,
            psk_ber_hi: p.psk_ber.hi,
            psk_erased_symbols: p.counts.psk_erased_symbols,
            nominal_mbps: p.rate.nominal,
            effective_mbps: p.rate.effective,
        })
        .collect();
    write_csv(&dir.join("ber.csv"), run, &[SNR_NOTE], &rows)?;
    let mut plot = Vec::new();
    for p in points {
        let tag = format!(
            "{}-T{}us-{}",
            mode_name(p.mode),
            p.hop_duration * 1e6,
            p.modulation
        );
        let mut push = |name: &str, q: &Proportion| {
            plot.push(PlotRow {
                curve: format!("{tag}-{name}"),
                x: p.snr_db,
                y: q.value,
                lo: q.lo,
                hi: q.hi,
            })
        };
        push("fhcs-ber", &p.fhcs_ber);
        if p.modulation.order() > 0 {
            push("psk-ber", &p.psk_ber);
        }
    }
    plot.sort_by(|a, b| a.curve.cmp(&b.curve).then(a.x.total_cmp(&b.x)));
    write_csv(&dir.join("plot.csv"), run, &[SNR_NOTE], &plot)
}

#[derive(Serialize)]
struct MethodRow {
    modulation: &'static str,
    method: &'static str,
    snr_db: f64,
    frames: usize,
    symbols: usize,
    symbol_errors: f64,
    ser: f64,
    ser_lo: f64,
    ser_hi: f64,
    erased_symbols: usize,
    mean_abs_residual: f64,
    rms_residual: f64,
}

pub fn write_method_report(dir: &Path, run: &RunConfig, points: &[MethodPoint]) -> Result<()> {
    let rows: Vec<MethodRow> = points
        .iter()
        .map(|p| MethodRow {
            modulation: p.modulation.name(),
            method: p.method.name(),
            snr_db: p.snr_db,
            frames: p.frames,
            symbols: p.counts.psk_symbols,
            symbol_errors: p.counts.psk_symbol_errors,
            ser: p.ser.value,
            ser_lo: p.ser.lo,
            ser_hi: p.ser.hi,
            erased_symbols: p.counts.psk_erased_symbols,
            mean_abs_residual: p.mean_abs_residual,
            rms_residual: p.rms_residual,
        })
        .collect();
    write_csv(&dir.join("methods.csv"), run, &[SNR_NOTE], &rows)?;
    let plot: Vec<PlotRow> = points
        .iter()
        .map(|p| PlotRow {
            curve: format!("{}-{}-ser", p.modulation, p.method.name()),
            x: p.snr_db,
            y: p.ser.value,
            lo: p.ser.lo,
            hi: p.ser.hi,
        })
        .collect();
    write_csv(&dir.join("plot.csv"), run, &[SNR_NOTE], &plot)
}

#[derive(Serialize)]
struct RadarRow {
    waveform: &'static str,
    snr_db: f64,
    trials: usize,
    eligible: usize,
    matched: usize,
    detection_rate: f64,
    detections: usize,
    unmatched_detections: usize,
    range_rmse: f64,
    range_se: f64,
    range_floor: f64,
    velocity_rmse: f64,
    velocity_se: f64,
    velocity_floor: f64,
    azimuth_rmse: f64,
    azimuth_se: f64,
    azimuth_floor: f64,
}

#[derive(Serialize)]
struct PairedRow {
    snr_db: f64,
    parameter: &'static str,
    mean_diff: f64,
    se: f64,
    pairs: usize,
}

const PARAMS: [&str; 3] = ["range", "velocity", "azimuth"];

pub fn write_radar_report(dir: &Path, run: &RunConfig, points: &[RadarPoint]) -> Result<()> {
    let floors = quantisation_floors(&run.radar_config(), &run.processing.processing()?.grid);
    let mut rows = Vec::new();
    let mut plot = Vec::new();
    for p in points {
        for (name, st) in [("traditional", &p.traditional), ("dfrc", &p.dfrc)] {
            rows.push(RadarRow {
                waveform: name,
                snr_db: p.snr_db,
                trials: p.trials,
                eligible: st.eligible,
                matched: st.matched,
                detection_rate: st.detection_rate(),
                detections: st.detections,
                unmatched_detections: st.detections - st.matched,
                range_rmse: st.rmse[0].value,
                range_se: st.rmse[0].se,
                range_floor: floors[0],
                velocity_rmse: st.rmse[1].value,
                velocity_se: st.rmse[1].se,
                velocity_floor: floors[1],
                azimuth_rmse: st.rmse[2].value,
                azimuth_se: st.rmse[2].se,
                azimuth_floor: floors[2],
            });
            for (q, param) in PARAMS.iter().enumerate() {
                let r = st.rmse[q];
                plot.push(PlotRow {
                    curve: format!("{name}-{param}-rmse"),
                    x: p.snr_db,
                    y: r.value,
                    lo: r.value - Z95 * r.se,
                    hi: r.value + Z95 * r.se,
                });
            }
        }
    }
    plot.sort_by(|a, b| a.curve.cmp(&b.curve).then(a.x.total_cmp(&b.x)));
    write_csv(&dir.join("radar.csv"), run, &[SNR_NOTE], &rows)?;
    let paired: Vec<PairedRow> = points
        .iter()
        .flat_map(|p| {
            PARAMS
                .iter()
                .zip(p.paired)
                .map(move |(param, d)| PairedRow {
                    snr_db: p.snr_db,
                    parameter: param,
                    mean_diff: d.mean,
                    se: d.se,
                    pairs: d.pairs,
                })
        })
        .collect();
    write_csv(&dir.join("radar_paired.csv"), run, &[SNR_NOTE], &paired)?;
    write_csv(&dir.join("plot.csv"), run, &[SNR_NOTE], &plot)
}

/// Runs the sweep selected by `run.sweep.kind` and writes its reports.
pub fn run_sweep(dir: &Path, run: &RunConfig) -> Result<()> {
    match run.sweep.kind {
        SweepKind::Ber => write_ber_report(dir, run, &run_ber_sweep(run)?),
        SweepKind::Methods => write_method_report(dir, run, &run_method_comparison(run)?),
        SweepKind::Radar => write_radar_report(dir, run, &run_radar_sweep(run)?),
    }
}
