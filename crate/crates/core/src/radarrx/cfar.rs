use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use super::rdm::RangeDopplerMap;
use crate::error::{bail, Result};
use crate::fft::{Direction, Fft};

/// Cell-averaging CFAR window and false-alarm rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfarParams {
    /// Guard cells on each side, per dimension.
    pub guard: usize,
    /// Training cells beyond the guard, per side and dimension.
    pub training: usize,
    pub pfa: f64,
}

impl Default for CfarParams {
    fn default() -> Self {
        CfarParams {
            guard: 2,
            training: 8,
            pfa: 1e-4,
        }
    }
}

/// An above-threshold cell that is a local maximum of the statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// FFT Doppler bin.
    pub doppler_bin: usize,
    /// Range bin within the map.
    pub range_bin: usize,
    /// `sum_p |Y|` at the cell.
    pub statistic: f64,
    pub threshold: f64,
}

/// `x` such that `P(sum of n unit-mean Rayleigh variables > x) = pfa`.
pub fn rayleigh_sum_quantile(n: usize, pfa: f64) -> Result<f64> {
    if n == 0 || !(pfa > 0.0 && pfa < 1.0) {
        bail!(Domain, "need n >= 1 and 0 < pfa < 1");
    }
    // unit-mean Rayleigh: f(x) = (pi x / 2) exp(-pi x^2 / 4)
    let support = 8.0;
    let per = 4096usize;
    let dx = support / per as f64;
    let len = (n * per + 1).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (j, b) in buf.iter_mut().take(per).enumerate() {
        // cell-averaged density via the CDF 1 - exp(-pi x^2 / 4)
        let cdf = |x: f64| 1.0 - libm::exp(-PI * x * x / 4.0);
        *b = Complex64::new(cdf((j + 1) as f64 * dx) - cdf(j as f64 * dx), 0.0);
    }
    Fft::new(len, Direction::Forward).process(&mut buf);
    for b in &mut buf {
        *b = b.powu(n as u32);
    }
    Fft::new(len, Direction::Inverse).process(&mut buf);
    // buf[j] ~ P(sum in [j dx, (j+1) dx)) up to the n/2-cell offset of the
    // cell discretisation
    let mut tail = 0.0;
    for j in (0..len).rev() {
        let p = buf[j].re / len as f64;
        let next = tail + p.max(0.0);
        if next >= pfa {
            let frac = (pfa - tail) / (next - tail);
            return Ok((j as f64 + 1.0 - frac + n as f64 * 0.5) * dx);
        }
        tail = next;
    }
    bail!(Domain, "quantile not found");
}

/// Two-dimensional CA-CFAR on `sum_p |Y|`; detections are the
/// above-threshold cells that exceed all 8 neighbours.
///
/// The threshold of a cell is `alpha` times the mean statistic of its
/// training ring, with `alpha` such that a noise-only cell (sum of `P`
/// Rayleigh magnitudes) exceeds it with probability `pfa`. The Doppler axis
/// wraps around; the range window is truncated at the map edges.
pub fn cfar_detect(map: &RangeDopplerMap, params: &CfarParams) -> Result<Vec<Detection>> {
    if params.training == 0 {
        bail!(Config, "CFAR needs at least one training cell");
    }
    let alpha = rayleigh_sum_quantile(map.channels, params.pfa)? / map.channels as f64;
    let (nf, nt) = (map.doppler_bins, map.range_bins);
    let stat = map.statistic();
    let outer = params.guard + params.training;
    let g = params.guard as i64;
    let o = outer as i64;

    // summed-area table over a Doppler-tiled copy for O(1) window sums
    let rows = nf + 2 * outer;
    let mut sat = vec![0.0f64; (rows + 1) * (nt + 1)];
    for r in 0..rows {
        let f = (r as i64 - o).rem_euclid(nf as i64) as usize;
        let mut run = 0.0;
        for t in 0..nt {
            run += stat[f * nt + t];
            sat[(r + 1) * (nt + 1) + t + 1] = sat[r * (nt + 1) + t + 1] + run;
        }
    }
    let rect = |f: usize, t: usize, half: i64| -> (f64, usize) {
        let r0 = (f as i64 + o - half) as usize;
        let r1 = (f as i64 + o + half + 1) as usize;
        let t0 = (t as i64 - half).max(0) as usize;
        let t1 = ((t as i64 + half + 1) as usize).min(nt);
        let s = sat[r1 * (nt + 1) + t1] - sat[r0 * (nt + 1) + t1] - sat[r1 * (nt + 1) + t0]
            + sat[r0 * (nt + 1) + t0];
        (s, (r1 - r0) * (t1 - t0))
    };

    let mut hit = vec![false; nf * nt];
    let mut thr = vec![0.0; nf * nt];
    for f in 0..nf {
        for t in 0..nt {
            let (so, co) = rect(f, t, o);
            let (si, ci) = rect(f, t, g);
            let count = co - ci;
            if count == 0 {
                continue;
            }
            let th = alpha * (so - si) / count as f64;
            thr[f * nt + t] = th;
            hit[f * nt + t] = stat[f * nt + t] > th;
        }
    }

    let mut out = Vec::new();
    for f in 0..nf {
        for t in 0..nt {
            let c = f * nt + t;
            if !hit[c] {
                continue;
            }
            let is_max = (-1..=1i64).all(|df| {
                (-1..=1i64).all(|dt| {
                    let tt = t as i64 + dt;
                    if (df, dt) == (0, 0) || tt < 0 || tt >= nt as i64 {
                        return true;
                    }
                    let ff = (f as i64 + df).rem_euclid(nf as i64) as usize;
                    stat[c] > stat[ff * nt + tt as usize]
                })
            });
            if is_max {
                out.push(Detection {
                    doppler_bin: f,
                    range_bin: t,
                    statistic: stat[c],
                    threshold: thr[c],
                });
            }
        }
    }
    Ok(out)
}
