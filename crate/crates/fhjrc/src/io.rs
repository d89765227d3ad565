//! File formats.
//!
//! - IQ frames: a text header (`FHJRC-IQ 1`, then `key value` lines up to
//!   `end`) followed by little-endian `f32` real/imag pairs, channel after
//!   channel.
//! - Range-Doppler maps: the same header scheme (`FHJRC-RDM 1`) followed by
//!   `f32` data in `(doppler, channel, range)` order.
//! - CSV: a `# config-sha256=<hex> seed=<n>` comment line, optional further
//!   `#` notes, a header row, then records.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use fhjrc_core::fhwave::{HopPlan, HopSlot, IqFrame, PlanKind, PskGrid, SlotRole};
use fhjrc_core::radarrx::RangeDopplerMap;
use fhjrc_core::{Complex64, RadarConfig};
use serde::{Deserialize, Serialize};

use crate::config::{RdmExport, RunConfig};
use crate::{Error, Result};

const IQ_MAGIC: &str = "FHJRC-IQ 1";
const RDM_MAGIC: &str = "FHJRC-RDM 1";

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_header(w: &mut impl Write, magic: &str, fields: &[(&str, String)]) -> std::io::Result<()> {
    writeln!(w, "{magic}")?;
    for (k, v) in fields {
        writeln!(w, "{k} {v}")?;
    }
    writeln!(w, "end")
}

/// Reads `magic` and the `key value` lines up to `end`.
fn read_header(r: &mut impl BufRead, magic: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut line = String::new();
    let mut next = |line: &mut String| -> Result<()> {
        line.clear();
        let n = r.read_line(line).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            return Err(Error::format(path, "header ends before 'end'"));
        }
        Ok(())
    };
    next(&mut line)?;
    if line.trim_end() != magic {
        return Err(Error::format(path, format!("expected '{magic}' header")));
    }
    let mut fields = Vec::new();
    loop {
        next(&mut line)?;
        let l = line.trim_end();
        if l == "end" {
            return Ok(fields);
        }
        if fields.len() > 64 {
            return Err(Error::format(path, "header too long"));
        }
        let Some((k, v)) = l.split_once(' ') else {
            return Err(Error::format(path, format!("malformed header line '{l}'")));
        };
        fields.push((k.to_string(), v.trim().to_string()));
    }
}

fn field<T: std::str::FromStr>(fields: &[(String, String)], key: &str, path: &Path) -> Result<T> {
    let v = fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::format(path, format!("header lacks '{key}'")))?;
    v.parse()
        .map_err(|_| Error::format(path, format!("header value '{v}' of '{key}' is invalid")))
}

pub fn write_iq(path: &Path, frame: &IqFrame) -> Result<()> {
    let mut w = create(path)?;
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        write_header(
            w,
            IQ_MAGIC,
            &[
                ("sample_rate", frame.sample_rate.to_string()),
                ("channels", frame.channel_count().to_string()),
                ("prt_len", frame.prt_len.to_string()),
                ("samples", frame.len().to_string()),
            ],
        )?;
        for ch in &frame.channels {
            for s in ch {
                w.write_all(&(s.re as f32).to_le_bytes())?;
                w.write_all(&(s.im as f32).to_le_bytes())?;
            }
        }
        w.flush()
    };
    run(&mut w).map_err(|e| Error::io(path, e))
}

pub fn read_iq(path: &Path) -> Result<IqFrame> {
    let mut r = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let fields = read_header(&mut r, IQ_MAGIC, path)?;
    let sample_rate: f64 = field(&fields, "sample_rate", path)?;
    let channels: usize = field(&fields, "channels", path)?;
    let prt_len: usize = field(&fields, "prt_len", path)?;
    let samples: usize = field(&fields, "samples", path)?;
    if !(sample_rate > 0.0) || channels == 0 || prt_len == 0 {
        return Err(Error::format(
            path,
            "sample rate, channels and PRT length must be positive",
        ));
    }
    let bytes = channels
        .checked_mul(samples)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::format(path, "header sizes overflow"))?;
    let mut data = Vec::new();
    r.read_to_end(&mut data).map_err(|e| Error::io(path, e))?;
    if data.len() != bytes {
        return Err(Error::format(
            path,
            format!("payload has {} bytes, header promises {bytes}", data.len()),
        ));
    }
    let mut values = data.chunks_exact(8).map(|b| {
        let re = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
        let im = f32::from_le_bytes([b[4], b[5], b[6], b[7]]);
        Complex64::new(re as f64, im as f64)
    });
    let channels = (0..channels)
        .map(|_| values.by_ref().take(samples).collect())
        .collect();
    Ok(IqFrame {
        sample_rate,
        prt_len,
        channels,
    })
}

/// Opens a CSV file and writes the config-hash comment line plus one
/// comment line per note.
pub fn csv_writer(
    path: &Path,
    run: &RunConfig,
    notes: &[&str],
) -> Result<csv::Writer<BufWriter<File>>> {
    let mut w = create(path)?;
    let mut head = format!("# config-sha256={} seed={}\n", run.hash(), run.seed);
    for n in notes {
        head += &format!("# {n}\n");
    }
    w.write_all(head.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(w))
}

/// Writes `rows` (with a header row) to `path`.
pub fn write_csv<T: Serialize>(
    path: &Path,
    run: &RunConfig,
    notes: &[&str],
    rows: &[T],
) -> Result<()> {
    let mut w = csv_writer(path, run, notes)?;
    let err = |e: csv::Error| Error::format(path, e.to_string());
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(BufReader::new(file));
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::format(path, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRow {
    pub prt: usize,
    pub hop: usize,
    pub antenna: usize,
    pub subband: usize,
    /// Sub-band offset from the zero-frequency sub-band.
    pub offset: usize,
    /// `zero-pilot`, `cycled-pilot` or `payload`.
    pub role: String,
    pub psk_index: u32,
    pub psk_points: u32,
    pub phase: f64,
}

fn role_name(r: SlotRole) -> &'static str {
    match r {
        SlotRole::ZeroPilot => "zero-pilot",
        SlotRole::CycledPilot => "cycled-pilot",
        SlotRole::Payload => "payload",
    }
}

pub fn plan_rows(plan: &HopPlan, psk: &PskGrid, cfg: &RadarConfig) -> Vec<PlanRow> {
    let mut rows = Vec::with_capacity(plan.slots().len());
    for i in 0..plan.prts() {
        for h in 0..plan.hops() {
            for m in 0..plan.antennas() {
                let s = plan.slot(i, h, m);
                rows.push(PlanRow {
                    prt: i,
                    hop: h,
                    antenna: m,
                    subband: s.subband,
                    offset: cfg.pilot_offset(s.subband),
                    role: role_name(s.role).to_string(),
                    psk_index: psk.index(i, h, m),
                    psk_points: psk.points(),
                    phase: psk.phase(i, h, m),
                });
            }
        }
    }
    rows
}

/// Rebuilds plan and phases from a plan file. Rows must be complete and in
/// `(prt, hop, antenna)` order.
pub fn read_plan(path: &Path, cfg: &RadarConfig) -> Result<(HopPlan, PskGrid)> {
    let rows: Vec<PlanRow> = read_csv(path)?;
    let (h_count, m_count) = (cfg.hops_per_pulse, cfg.tx_antennas);
    let per_prt = h_count * m_count;
    if rows.is_empty() || !rows.len().is_multiple_of(per_prt) {
        return Err(Error::format(
            path,
            format!("{} rows is not a whole number of PRTs", rows.len()),
        ));
    }
    let points = rows[0].psk_points;
    if !points.is_power_of_two() {
        return Err(Error::format(
            path,
            format!("psk_points {points} is not a power of two"),
        ));
    }
    let mut slots = Vec::with_capacity(rows.len());
    let mut indices = Vec::with_capacity(rows.len());
    let mut pilots = false;
    for (n, r) in rows.iter().enumerate() {
        let expect = (n / per_prt, n / m_count % h_count, n % m_count);
        if (r.prt, r.hop, r.antenna) != expect || r.psk_points != points {
            return Err(Error::format(
                path,
                format!("row {} out of order or inconsistent", n + 1),
            ));
        }
        let role = match r.role.as_str() {
            "zero-pilot" => SlotRole::ZeroPilot,
            "cycled-pilot" => SlotRole::CycledPilot,
            "payload" => SlotRole::Payload,
            other => return Err(Error::format(path, format!("unknown role '{other}'"))),
        };
        pilots |= role.is_pinned();
        slots.push(HopSlot {
            subband: r.subband,
            role,
        });
        indices.push(r.psk_index);
    }
    let kind = if pilots {
        PlanKind::Dfrc
    } else {
        PlanKind::Traditional
    };
    let plan = HopPlan::from_slots(cfg, kind, rows.len() / per_prt, slots)?;
    let psk = PskGrid::from_indices(&plan, points.trailing_zeros(), &indices)?;
    Ok((plan, psk))
}

/// Writes the map in the requested form. `RdmExport::None` writes nothing.
pub fn write_rdm(path: &Path, map: &RangeDopplerMap, export: RdmExport) -> Result<()> {
    let (kind, channels) = match export {
        RdmExport::None => return Ok(()),
        RdmExport::Cube => ("cube", map.channels),
        RdmExport::Statistic => ("statistic", 1),
    };
    let mut w = create(path)?;
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        write_header(
            w,
            RDM_MAGIC,
            &[
                ("kind", kind.to_string()),
                ("doppler_bins", map.doppler_bins.to_string()),
                ("channels", channels.to_string()),
                ("range_bins", map.range_bins.to_string()),
                ("first_range_bin", map.first_range_bin.to_string()),
                ("range_bin_width", map.range_bin_width.to_string()),
                ("doppler_bin_width", map.doppler_bin_width.to_string()),
            ],
        )?;
        match export {
            RdmExport::Cube => {
                for s in &map.data {
                    w.write_all(&(s.re as f32).to_le_bytes())?;
                    w.write_all(&(s.im as f32).to_le_bytes())?;
                }
            }
            _ => {
                for v in map.statistic() {
                    w.write_all(&(v as f32).to_le_bytes())?;
                }
            }
        }
        w.flush()
    };
    run(&mut w).map_err(|e| Error::io(path, e))
}

/// Header of an RDM file as `(key, value)` pairs plus the payload size in
/// bytes.
pub fn read_rdm_header(path: &Path) -> Result<(Vec<(String, String)>, usize)> {
    let mut r = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let fields = read_header(&mut r, RDM_MAGIC, path)?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest).map_err(|e| Error::io(path, e))?;
    Ok((fields, rest.len()))
}

/// Writes the effective configuration as `config.toml` in `dir`.
pub fn echo_config(dir: &Path, run: &RunConfig) -> Result<()> {
    let path = dir.join("config.toml");
    std::fs::write(&path, run.to_toml()).map_err(|e| Error::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}
