use std::f64::consts::PI;

use super::Signal;
use crate::{Error, Result};

/// Length of the linear-phase anti-alias filter applied before 2:1 decimation.
pub const ANTI_ALIAS_TAPS: usize = 255;
/// -6 dB point of the anti-alias filter at the 16 kHz input rate.
pub const ANTI_ALIAS_CUTOFF_HZ: f64 = 3600.0;
const KAISER_BETA: f64 = 8.0;

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        term *= (half / k as f64).powi(2);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Kaiser-windowed sinc low-pass for 16 kHz input, normalized to unit DC gain.
pub fn anti_alias_taps() -> Vec<f64> {
    let n = ANTI_ALIAS_TAPS;
    let centre = (n - 1) as f64 / 2.0;
    let fc = ANTI_ALIAS_CUTOFF_HZ / 16000.0;
    let norm = bessel_i0(KAISER_BETA);
    let mut taps: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 - centre;
            let sinc = if t == 0.0 {
                2.0 * fc
            } else {
                (2.0 * PI * fc * t).sin() / (PI * t)
            };
            let r = t / centre;
            sinc * bessel_i0(KAISER_BETA * (1.0 - r * r).max(0.0).sqrt()) / norm
        })
        .collect();
    let dc: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|h| *h /= dc);
    taps
}

/// Bring a 16 kHz signal down to 8 kHz; 8 kHz input is returned unchanged.
///
/// The signal is low-passed with [`anti_alias_taps`] (zero-phase alignment,
/// edge samples replicated past both ends) and every second sample is kept,
/// giving `ceil(n / 2)` output samples.
pub fn downsample_to_8k(signal: &Signal) -> Result<Signal> {
    match signal.sample_rate() {
        8000 => Ok(signal.clone()),
        16000 => {
            let x = signal.samples();
            if x.is_empty() {
                return Signal::new(Vec::new(), 8000);
            }
            let taps = anti_alias_taps();
            let half = (taps.len() / 2) as isize;
            let last = x.len() as isize - 1;
            let out = (0..x.len())
                .step_by(2)
                .map(|m| {
                    taps.iter()
                        .enumerate()
                        .map(|(k, h)| {
                            let idx = (m as isize + k as isize - half).clamp(0, last);
                            h * x[idx as usize]
                        })
                        .sum()
                })
                .collect();
            Signal::new(out, 8000)
        }
        other => Err(Error::UnsupportedSampleRate(other)),
    }
}
