//! Canonical in-memory signal plus the file formats around it: PCM WAV in
//! and out, the 16 kHz to 8 kHz anti-aliased decimator, and CSV tables.

mod resample;
mod table;
mod wav;

pub use resample::{anti_alias_taps, downsample_to_8k, ANTI_ALIAS_CUTOFF_HZ, ANTI_ALIAS_TAPS};
pub use table::{read_csv, write_csv, Tabular};
pub use wav::{read_wav, write_wav, WavFormat};

use crate::{Error, Result};

/// Mono sample sequence at a fixed sample rate.
///
/// Samples are nominally in `[-1, 1]` and always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidInput("sample rate must be positive".into()));
        }
        if let Some(pos) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite sample at index {pos}"
            )));
        }
        Ok(Signal {
            samples,
            sample_rate,
        })
    }

    /// All-zero signal of `len` samples.
    pub fn silence(len: usize, sample_rate: u32) -> Result<Self> {
        Signal::new(vec![0.0; len], sample_rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        crate::energy(&self.samples)
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            (self.energy() / self.samples.len() as f64).sqrt()
        }
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, s| m.max(s.abs()))
    }

    /// Copy with every sample multiplied by `gain`.
    pub fn scaled(&self, gain: f64) -> Signal {
        Signal {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            sample_rate: self.sample_rate,
        }
    }

    /// Copy holding the first `len` samples (or all of them if shorter).
    pub fn truncated(&self, len: usize) -> Signal {
        Signal {
            samples: self.samples[..len.min(self.samples.len())].to_vec(),
            sample_rate: self.sample_rate,
        }
    }

    /// Concatenate two signals at the same rate.
    pub fn concat(&self, other: &Signal) -> Result<Signal> {
        if self.sample_rate != other.sample_rate {
            return Err(Error::SampleRateMismatch(
                self.sample_rate,
                other.sample_rate,
            ));
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples);
        Ok(Signal {
            samples,
            sample_rate: self.sample_rate,
        })
    }
}
