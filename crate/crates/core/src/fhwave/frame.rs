use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{bail, Result};

/// Complex baseband samples of one or more parallel channels.
///
/// Transmit frames hold one channel per transmit antenna; a communication
/// receive frame holds one channel; radar echo frames hold one channel per
/// receive element.
#[derive(Debug, Clone, PartialEq)]
pub struct IqFrame {
    pub sample_rate: f64,
    /// Samples per PRT.
    pub prt_len: usize,
    pub channels: Vec<Vec<Complex64>>,
}

impl IqFrame {
    pub fn zeros(sample_rate: f64, prt_len: usize, channels: usize, len: usize) -> Self {
        IqFrame {
            sample_rate,
            prt_len,
            channels: (0..channels)
                .map(|_| alloc::vec![Complex64::new(0.0, 0.0); len])
                .collect(),
        }
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    /// Samples per channel (all channels have the same length).
    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whole PRTs contained in the frame.
    pub fn prts(&self) -> usize {
        self.len().checked_div(self.prt_len).unwrap_or(0)
    }

    /// Element-wise sum of all channels, i.e. what a single antenna with
    /// unit gains to every transmitter would see.
    pub fn sum_channels(&self) -> Vec<Complex64> {
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); self.len()];
        for ch in &self.channels {
            for (o, v) in out.iter_mut().zip(ch) {
                *o += v;
            }
        }
        out
    }

    pub fn scaled(&self, gain: Complex64) -> Self {
        IqFrame {
            sample_rate: self.sample_rate,
            prt_len: self.prt_len,
            channels: self
                .channels
                .iter()
                .map(|c| c.iter().map(|v| v * gain).collect())
                .collect(),
        }
    }

    pub fn check_shape(&self, channels: usize, min_len: usize) -> Result<()> {
        if self.channel_count() != channels {
            bail!(
                Dimension,
                "frame has {} channels, expected {channels}",
                self.channel_count()
            );
        }
        if self.channels.iter().any(|c| c.len() != self.len()) {
            bail!(Dimension, "frame channels have unequal lengths");
        }
        if self.len() < min_len {
            bail!(
                Dimension,
                "frame has {} samples per channel, need {min_len}",
                self.len()
            );
        }
        Ok(())
    }
}
