//! Small numeric helpers shared by the receive chains.

use core::f64::consts::{PI, TAU};
use num_complex::Complex64;

/// `e^{j phase}`.
#[inline]
pub fn cis(phase: f64) -> Complex64 {
    Complex64::new(libm::cos(phase), libm::sin(phase))
}

/// Wraps a phase into `(-pi, pi]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let mut p = libm::fmod(phase + PI, TAU);
    if p <= 0.0 {
        p += TAU;
    }
    p - PI
}

/// Angle of the resultant of unit phasors, i.e. the circular mean.
///
/// Returns `None` for an empty input or a zero resultant.
pub fn circular_mean<I: IntoIterator<Item = f64>>(phases: I) -> Option<f64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    for p in phases {
        acc += cis(p);
        n += 1;
    }
    if n == 0 || acc.norm() == 0.0 {
        return None;
    }
    Some(acc.arg())
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        libm::sin(x) / x
    }
}

/// Binomial coefficient, `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `floor(log2(x))` for `x >= 1`, zero otherwise.
pub fn floor_log2(x: u128) -> u32 {
    if x == 0 {
        0
    } else {
        127 - x.leading_zeros()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Rounds a float that is expected to be an integer, rejecting it otherwise.
pub(crate) fn as_integer(x: f64, rel_tol: f64) -> Option<u64> {
    if !x.is_finite() || x < 0.0 {
        return None;
    }
    let r = libm::round(x);
    if (x - r).abs() <= rel_tol * r.max(1.0) {
        Some(r as u64)
    } else {
        None
    }
}

/// Median of a slice of non-negative values (copies and sorts).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = alloc::vec::Vec::from(values);
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_phase_range() {
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_phase(TAU + 0.1) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(20, 2), Some(190));
        assert_eq!(binomial(4, 2), Some(6));
        assert_eq!(binomial(5, 5), Some(1));
        assert_eq!(binomial(3, 4), Some(0));
        assert_eq!(floor_log2(190), 7);
        assert_eq!(floor_log2(1), 0);
        assert_eq!(floor_log2(19), 4);
    }

    #[test]
    fn circular_mean_wraps() {
        let m = circular_mean([PI - 0.1, -PI + 0.1]).unwrap();
        assert!((m.abs() - PI).abs() < 1e-12);
        assert!(circular_mean(core::iter::empty()).is_none());
    }
}
