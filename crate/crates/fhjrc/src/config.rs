//! TOML run configuration.
//!
//! Every key is optional and defaults to the experiment parameters. Unknown
//! keys are rejected. Command-line flags are applied with
//! [`RunConfig::apply_overrides`] before [`RunConfig::validate`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fhjrc_core::commrx::{DemodMethod, DemodOptions};
use fhjrc_core::fhwave::Waveform;
use fhjrc_core::impair::{FrontEndProfile, ImpairmentSpec};
use fhjrc_core::radarrx::{
    AngleGrid, ArrayModel, CfarParams, RadarProcessing, SceneSpec, Target, TargetScene,
};
use fhjrc_core::{RadarConfig, SimRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Payload modulation of the communication link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modulation {
    /// Frequency-hopping code selection only (no phase coding).
    #[serde(rename = "fhcs")]
    Fhcs,
    #[serde(rename = "8psk")]
    Psk8,
    #[serde(rename = "16psk")]
    Psk16,
}

impl Modulation {
    /// PSK bits per symbol.
    pub fn order(self) -> u32 {
        match self {
            Modulation::Fhcs => 0,
            Modulation::Psk8 => 3,
            Modulation::Psk16 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Fhcs => "fhcs",
            Modulation::Psk8 => "8psk",
            Modulation::Psk16 => "16psk",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fhcs" => Ok(Modulation::Fhcs),
            "8psk" => Ok(Modulation::Psk8),
            "16psk" => Ok(Modulation::Psk16),
            _ => Err(format!("unknown modulation '{s}' (fhcs, 8psk, 16psk)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FlatGain,
    Proposed,
    Averaged,
    KnownChannel,
}

impl From<Method> for DemodMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::FlatGain => DemodMethod::FlatGain,
            Method::Proposed => DemodMethod::Proposed,
            Method::Averaged => DemodMethod::Averaged,
            Method::KnownChannel => DemodMethod::KnownChannel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveformKind {
    Dfrc,
    Traditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// BER/SER against SNR per modulation and hop duration.
    Ber,
    /// Flat-gain vs proposed vs averaged demodulation.
    Methods,
    /// Parameter RMSE against SNR for both waveforms.
    Radar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelMode {
    /// Receiver is given the true impairment.
    Known,
    /// Receiver estimates everything from the pilots.
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RdmExport {
    /// Complex map, all channels.
    Cube,
    /// Channel-summed magnitude only.
    Statistic,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadarSection {
    pub subbands: usize,
    pub tx_antennas: usize,
    pub hops_per_pulse: usize,
    pub hop_duration: f64,
    pub prt: f64,
    pub bandwidth: f64,
    pub sample_rate: f64,
    pub carrier: f64,
    pub prts_per_cpi: usize,
}

impl Default for RadarSection {
    fn default() -> Self {
        RadarSection::from(&RadarConfig::default())
    }
}

impl From<&RadarConfig> for RadarSection {
    fn from(c: &RadarConfig) -> Self {
        RadarSection {
            subbands: c.subbands,
            tx_antennas: c.tx_antennas,
            hops_per_pulse: c.hops_per_pulse,
            hop_duration: c.hop_duration,
            prt: c.prt,
            bandwidth: c.bandwidth,
            sample_rate: c.sample_rate,
            carrier: c.carrier,
            prts_per_cpi: c.prts_per_cpi,
        }
    }
}

impl RadarSection {
    pub fn to_config(&self) -> RadarConfig {
        RadarConfig {
            subbands: self.subbands,
            tx_antennas: self.tx_antennas,
            hops_per_pulse: self.hops_per_pulse,
            hop_duration: self.hop_duration,
            prt: self.prt,
            bandwidth: self.bandwidth,
            sample_rate: self.sample_rate,
            carrier: self.carrier,
            prts_per_cpi: self.prts_per_cpi,
        }
    }
}

/// Transmitter/receiver hardware errors of the communication link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpairmentSection {
    /// Relative clock error; sets the per-sample timing drift and, unless
    /// `cfo` is given, the carrier offset `2 pi f_c rho`.
    pub rho: f64,
    /// Initial timing offset (s).
    pub initial_sto: f64,
    /// Carrier offset override (rad/s).
    pub cfo: Option<f64>,
    /// Per-sample single-tone SNR (dB); `inf` disables noise.
    pub snr_db: f64,
    /// Peak front-end magnitude ripple (dB).
    pub ripple_db: f64,
    /// Peak front-end phase ripple (rad).
    pub ripple_phase: f64,
}

impl Default for ImpairmentSection {
    fn default() -> Self {
        ImpairmentSection {
            rho: 1e-6,
            initial_sto: 5e-9,
            cfo: None,
            snr_db: 20.0,
            ripple_db: 1.0,
            ripple_phase: 0.2,
        }
    }
}

impl ImpairmentSection {
    /// Fixed part of the impairment; the front-end ripple is drawn from
    /// `rng`.
    pub fn build(
        &self,
        cfg: &RadarConfig,
        snr_db: f64,
        rng: &mut SimRng,
    ) -> Result<ImpairmentSpec> {
        let mut spec = ImpairmentSpec::from_clock(cfg, self.rho, self.initial_sto);
        if let Some(cfo) = self.cfo {
            spec.cfo = cfo;
        }
        spec.noise_variance = noise_variance(snr_db);
        spec.front_end = if self.ripple_db == 0.0 && self.ripple_phase == 0.0 {
            FrontEndProfile::flat(cfg.tx_antennas, cfg.subbands)
        } else {
            FrontEndProfile::random_ripple(
                cfg.tx_antennas,
                cfg.subbands,
                self.ripple_db,
                self.ripple_phase,
                rng,
            )
        };
        spec.validate(cfg)?;
        Ok(spec)
    }
}

/// Noise variance for a per-sample unit-power SNR in dB.
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommSection {
    pub method: Method,
    pub modulation: Modulation,
    /// PRTs per frame; defaults to one CPI.
    pub prts: Option<usize>,
    /// PRTs per pilot group; 0 selects one pilot cycle.
    pub group_len: usize,
    /// `txgen` payload: a text file of `0`/`1` (FHCS bits, then PSK bits).
    pub payload: Option<PathBuf>,
    /// IQ file to demodulate instead of a synthetic frame.
    pub input: Option<PathBuf>,
    /// Plan file of `input` (ground truth; required for multi-antenna input).
    pub plan: Option<PathBuf>,
}

impl Default for CommSection {
    fn default() -> Self {
        CommSection {
            method: Method::Proposed,
            modulation: Modulation::Psk16,
            prts: None,
            group_len: 0,
            payload: None,
            input: None,
            plan: None,
        }
    }
}

impl CommSection {
    pub fn options(&self) -> DemodOptions {
        DemodOptions {
            method: self.method.into(),
            psk_order: self.modulation.order(),
            group_len: self.group_len,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetEntry {
    /// m
    pub range: f64,
    /// m/s
    pub velocity: f64,
    /// deg
    pub azimuth: f64,
}

/// Radar scene and array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSection {
    /// Number of random targets (ignored when `targets_list` is non-empty).
    pub targets: usize,
    pub velocity: [f64; 2],
    pub range: [f64; 2],
    pub azimuth: [f64; 2],
    /// Explicit targets with unit reflection coefficient.
    pub targets_list: Vec<TargetEntry>,
    /// Per-channel, per-sample SNR of a unit target (dB).
    pub snr_db: f64,
    pub waveform: WaveformKind,
    pub rx_antennas: usize,
    /// Transmit element spacing (wavelengths).
    pub tx_spacing: f64,
    /// Receive element spacing (wavelengths).
    pub rx_spacing: f64,
}

impl Default for SceneSection {
    fn default() -> Self {
        let s = SceneSpec::default();
        SceneSection {
            targets: s.targets,
            velocity: [s.velocity.0, s.velocity.1],
            range: [s.range.0, s.range.1],
            azimuth: [s.azimuth.0, s.azimuth.1],
            targets_list: Vec::new(),
            snr_db: 10.0,
            waveform: WaveformKind::Dfrc,
            rx_antennas: 12,
            tx_spacing: 6.0,
            rx_spacing: 0.5,
        }
    }
}

impl SceneSection {
    pub fn spec(&self) -> SceneSpec {
        SceneSpec {
            targets: self.targets,
            velocity: (self.velocity[0], self.velocity[1]),
            range: (self.range[0], self.range[1]),
            azimuth: (self.azimuth[0], self.azimuth[1]),
        }
    }

    pub fn array(&self, cfg: &RadarConfig) -> ArrayModel {
        ArrayModel::ideal(
            cfg.tx_antennas,
            self.rx_antennas,
            self.tx_spacing,
            self.rx_spacing,
        )
    }

    /// The explicit target list, or a random draw from the scene ranges.
    pub fn scene(&self, rng: &mut SimRng) -> TargetScene {
        if self.targets_list.is_empty() {
            self.spec().draw(rng)
        } else {
            TargetScene {
                targets: self
                    .targets_list
                    .iter()
                    .map(|t| Target::new(t.range, t.velocity, t.azimuth))
                    .collect(),
            }
        }
    }

    pub fn waveform(
        &self,
        kind: WaveformKind,
        cfg: &RadarConfig,
        order: u32,
        rng: &mut SimRng,
    ) -> Result<Waveform> {
        Ok(match kind {
            WaveformKind::Dfrc => Waveform::random_dfrc(cfg, cfg.prts_per_cpi, order, rng)?,
            WaveformKind::Traditional => Waveform::random_traditional(cfg, cfg.prts_per_cpi, rng)?,
        })
    }
}

/// Detector and estimator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProcessingSection {
    pub guard: usize,
    pub training: usize,
    pub pfa: f64,
    /// Angle grid (deg).
    pub angle_min: f64,
    pub angle_max: f64,
    pub angle_points: usize,
    pub rdm_export: RdmExport,
}

impl Default for ProcessingSection {
    fn default() -> Self {
        let c = CfarParams::default();
        ProcessingSection {
            guard: c.guard,
            training: c.training,
            pfa: c.pfa,
            angle_min: -30.0,
            angle_max: 30.0,
            angle_points: 61,
            rdm_export: RdmExport::Cube,
        }
    }
}

impl ProcessingSection {
    pub fn processing(&self) -> Result<RadarProcessing> {
        Ok(RadarProcessing {
            cfar: CfarParams {
                guard: self.guard,
                training: self.training,
                pfa: self.pfa,
            },
            grid: AngleGrid::new(self.angle_min, self.angle_max, self.angle_points)?,
            calibration: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub kind: SweepKind,
    /// BER sweep SNR grid (dB).
    pub snr_db: Vec<f64>,
    pub modulations: Vec<Modulation>,
    /// Hop durations of the BER sweep (s). The bandwidth is rescaled to keep
    /// `B T / K` fixed.
    pub hop_durations: Vec<f64>,
    pub mode: ChannelMode,
    /// Minimum PSK symbols per BER/SER grid point.
    pub symbols_per_point: usize,
    /// Per-sample SNR of the method comparison (dB). The default is 20 dB
    /// per hop: `20 - 10 log10(N_h)` with `N_h = 40`.
    pub method_snr_db: f64,
    /// Radar sweep SNR grid (dB, per channel).
    pub radar_snr_db: Vec<f64>,
    /// Radar trials per SNR point.
    pub trials: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            kind: SweepKind::Ber,
            snr_db: (0..16).map(|i| -10.0 + 2.0 * i as f64).collect(),
            modulations: vec![Modulation::Psk8, Modulation::Psk16],
            hop_durations: vec![0.5e-6, 1e-6],
            mode: ChannelMode::Known,
            symbols_per_point: 10_000,
            method_snr_db: 20.0 - 10.0 * 40f64.log10(),
            radar_snr_db: vec![-40.0, -37.5, -35.0, -32.5, -30.0],
            trials: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Output directory. Not serialised, so the echoed configuration and
    /// its hash do not depend on where a run is written.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub radar: RadarSection,
    pub impairment: ImpairmentSection,
    pub comm: CommSection,
    pub scene: SceneSection,
    pub processing: ProcessingSection,
    pub sweep: SweepSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            out: PathBuf::from("out"),
            radar: RadarSection::default(),
            impairment: ImpairmentSection::default(),
            comm: CommSection::default(),
            scene: SceneSection::default(),
            processing: ProcessingSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub snr_db: Option<f64>,
    pub modulation: Option<Modulation>,
    pub trials: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            e => e,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serialises")
    }

    /// SHA-256 of the canonical TOML form, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    /// `--snr` sets the SNR of the link, the scene and every sweep grid;
    /// `--modulation` the link modulation and the sweep modulation set.
    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(p) = &o.out {
            self.out = p.clone();
        }
        if let Some(snr) = o.snr_db {
            self.impairment.snr_db = snr;
            self.scene.snr_db = snr;
            self.sweep.snr_db = vec![snr];
            self.sweep.radar_snr_db = vec![snr];
            self.sweep.method_snr_db = snr;
        }
        if let Some(m) = o.modulation {
            self.comm.modulation = m;
            self.sweep.modulations = vec![m];
        }
        if let Some(t) = o.trials {
            self.sweep.trials = t;
        }
    }

    pub fn radar_config(&self) -> RadarConfig {
        self.radar.to_config()
    }

    /// Re-checks every module invariant the configuration touches.
    pub fn validate(&self) -> Result<()> {
        let cfg = self.radar_config();
        cfg.validate()?;
        let mut rng = fhjrc_core::rng_from_seed(0);
        let snr_ok = |s: f64| !s.is_nan() && s > f64::NEG_INFINITY;
        if !snr_ok(self.impairment.snr_db) || !snr_ok(self.scene.snr_db) {
            return Err(Error::Config("SNR must be a number above -inf".into()));
        }
        if !(self.impairment.ripple_db >= 0.0 && self.impairment.ripple_phase >= 0.0) {
            return Err(Error::Config("ripple peaks must be non-negative".into()));
        }
        self.impairment
            .build(&cfg, self.impairment.snr_db, &mut rng)?;
        if self.comm.prts == Some(0) {
            return Err(Error::Config("comm.prts must be at least 1".into()));
        }
        if self.scene.targets_list.is_empty() {
            self.scene.spec().validate(&cfg)?;
        }
        if self.scene.rx_antennas == 0 {
            return Err(Error::Config("scene.rx_antennas must be at least 1".into()));
        }
        self.scene.array(&cfg).validate()?;
        self.processing.processing()?;
        if !(self.processing.pfa > 0.0 && self.processing.pfa < 1.0) {
            return Err(Error::Config("processing.pfa must lie in (0, 1)".into()));
        }
        let s = &self.sweep;
        if s.trials == 0 || s.symbols_per_point == 0 {
            return Err(Error::Config(
                "sweep.trials and sweep.symbols_per_point must be >= 1".into(),
            ));
        }
        if s.snr_db.is_empty()
            || s.radar_snr_db.is_empty()
            || s.modulations.is_empty()
            || s.hop_durations.is_empty()
        {
            return Err(Error::Config("sweep grids must not be empty".into()));
        }
        if !s
            .snr_db
            .iter()
            .chain(&s.radar_snr_db)
            .chain([&s.method_snr_db])
            .all(|&v| snr_ok(v))
        {
            return Err(Error::Config(
                "sweep SNR values must be numbers above -inf".into(),
            ));
        }
        for &t in &s.hop_durations {
            hop_variant(&cfg, t)?.validate()?;
        }
        Ok(())
    }
}

/// `cfg` with hop duration `t`, keeping `B T / K` (so tone spacing in DFT
/// bins is unchanged). The bandwidth scales as `1/t`; the sample rate is
/// raised to the new bandwidth if it would fall below it.
pub fn hop_variant(cfg: &RadarConfig, t: f64) -> Result<RadarConfig> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Config(format!("hop duration {t} must be positive")));
    }
    let mut c = cfg.clone();
    c.bandwidth = cfg.bandwidth * cfg.hop_duration / t;
    c.hop_duration = t;
    if c.sample_rate < c.bandwidth {
        c.sample_rate = c.bandwidth;
    }
    Ok(c)
}
