//! Discrete Fourier transforms.
//!
//! `rustfft` needs `std`, so the core carries its own planner: an iterative
//! radix-2 kernel for power-of-two sizes and Bluestein's chirp-z algorithm
//! (on top of the radix-2 kernel) for everything else. Transforms are
//! unnormalised in both directions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::math::cis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X[k] = sum x[n] e^{-j 2 pi k n / N}`
    Forward,
    /// `x[n] = sum X[k] e^{+j 2 pi k n / N}` (no `1/N`)
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
struct Radix2 {
    len: usize,
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(len: usize, direction: Direction) -> Self {
        debug_assert!(len.is_power_of_two());
        let twiddles = (0..len / 2)
            .map(|k| cis(direction.sign() * 2.0 * PI * k as f64 / len as f64))
            .collect();
        Radix2 { len, twiddles }
    }

    fn process(&self, buf: &mut [Complex64]) {
        let n = self.len;
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let step = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let w = self.twiddles[k * step];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    len: usize,
    chirp: Vec<Complex64>,
    kernel_fft: Vec<Complex64>,
    forward: Radix2,
    inverse: Radix2,
}

impl Bluestein {
    fn new(len: usize, direction: Direction) -> Self {
        let m = (2 * len - 1).next_power_of_two();
        let sign = direction.sign();
        // chirp[n] = e^{sign j pi n^2 / N}; n^2 reduced mod 2N keeps the phase exact
        let chirp: Vec<Complex64> = (0..len)
            .map(|n| {
                let q = ((n as u128 * n as u128) % (2 * len as u128)) as f64;
                cis(sign * PI * q / len as f64)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for n in 1..len {
            kernel[n] = chirp[n].conj();
            kernel[m - n] = chirp[n].conj();
        }
        let forward = Radix2::new(m, Direction::Forward);
        let inverse = Radix2::new(m, Direction::Inverse);
        forward.process(&mut kernel);
        Bluestein {
            len,
            chirp,
            kernel_fft: kernel,
            forward,
            inverse,
        }
    }

    fn process(&self, buf: &mut [Complex64]) {
        let m = self.kernel_fft.len();
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for n in 0..self.len {
            work[n] = buf[n] * self.chirp[n];
        }
        self.forward.process(&mut work);
        for (w, k) in work.iter_mut().zip(&self.kernel_fft) {
            *w *= k;
        }
        self.inverse.process(&mut work);
        let scale = 1.0 / m as f64;
        for n in 0..self.len {
            buf[n] = work[n] * self.chirp[n] * scale;
        }
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Radix2(Radix2),
    Bluestein(Bluestein),
}

/// A planned transform of fixed length and direction.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    kernel: Kernel,
}

impl Fft {
    pub fn new(len: usize, direction: Direction) -> Self {
        let kernel = if len.is_power_of_two() || len <= 1 {
            Kernel::Radix2(Radix2::new(len.max(1), direction))
        } else {
            Kernel::Bluestein(Bluestein::new(len, direction))
        };
        Fft { len, kernel }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Transforms `buf` in place. `buf.len()` must equal the planned length.
    pub fn process(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "fft length mismatch");
        match &self.kernel {
            Kernel::Radix2(k) => k.process(buf),
            Kernel::Bluestein(k) => k.process(buf),
        }
    }
}

/// Direct `O(N^2)` DFT with a cached twiddle table.
///
/// Used for the short per-hop transforms where exact bin values matter more
/// than speed.
#[derive(Debug, Clone)]
pub struct Dft {
    len: usize,
    twiddles: Vec<Complex64>,
}

impl Dft {
    pub fn new(len: usize) -> Self {
        let twiddles = (0..len)
            .map(|k| cis(-2.0 * PI * k as f64 / len as f64))
            .collect();
        Dft { len, twiddles }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Single forward bin `X[k]`.
    pub fn bin(&self, x: &[Complex64], k: usize) -> Complex64 {
        let n = self.len;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = 0usize;
        for &v in &x[..n] {
            acc += v * self.twiddles[idx];
            idx += k;
            if idx >= n {
                idx %= n;
            }
        }
        acc
    }

    /// All forward bins.
    pub fn transform(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.len).map(|k| self.bin(x, k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn naive(x: &[Complex64], dir: Direction) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(i, &v)| v * cis(dir.sign() * 2.0 * PI * (k * i) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_for_assorted_sizes() {
        let mut rng = crate::rng_from_seed(7);
        for &n in &[1usize, 2, 8, 40, 64, 100, 128, 127] {
            let x: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            for dir in [Direction::Forward, Direction::Inverse] {
                let mut y = x.clone();
                Fft::new(n, dir).process(&mut y);
                let z = naive(&x, dir);
                for (a, b) in y.iter().zip(&z) {
                    assert!((a - b).norm() < 1e-9 * n as f64, "n={n}");
                }
            }
            let d = Dft::new(n).transform(&x);
            for (a, b) in d.iter().zip(naive(&x, Direction::Forward)) {
                assert!((a - b).norm() < 1e-9 * n as f64);
            }
        }
    }

    #[test]
    fn round_trip_scales_by_len() {
        let x: Vec<Complex64> = (0..48)
            .map(|i| Complex64::new(i as f64, -(i as f64)))
            .collect();
        let mut y = x.clone();
        Fft::new(48, Direction::Forward).process(&mut y);
        Fft::new(48, Direction::Inverse).process(&mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a * 48.0 - b).norm() < 1e-8);
        }
    }
}
