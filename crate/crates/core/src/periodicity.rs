//! Periodicity cue: normalized autocorrelation, three-peak picking and the
//! lag-regularity test.
//!
//! A coefficient sequence is called periodic when the three dominant
//! autocorrelation maxima are (nearly) evenly spaced in lag:
//! `|(lag2 - lag1) - (lag3 - lag2)| < lag_threshold`. Lags are counted on
//! the grid of the sequence itself, so at Haar level j one lag step is
//! 2^j input samples.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcfPeak {
    pub lag: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicityVerdict {
    pub periodic: bool,
    /// Ascending-lag peak triple, present when at least three peaks were supplied.
    pub peaks: Option<[AcfPeak; 3]>,
    pub lag_spread: Option<usize>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four independent accumulators keep the loop vectorizable
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for i in 0..4 {
            acc[i] += x[i] * y[i];
        }
    }
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Biased autocorrelation `r[l] = sum_k c[k] c[k+l]` for `l = 0..n`, divided by `r[0]`.
pub fn autocorrelate(coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "autocorrelation needs at least 2 samples, got {}",
            coeffs.len()
        )));
    }
    let n = coeffs.len();
    let r0 = dot(coeffs, coeffs);
    if r0 == 0.0 || !r0.is_finite() {
        return Err(Error::ZeroEnergy("autocorrelation input"));
    }
    let mut r: Vec<f64> = (0..n)
        .map(|lag| dot(&coeffs[..n - lag], &coeffs[lag..]) / r0)
        .collect();
    r[0] = 1.0;
    Ok(r)
}

/// Local maxima of a normalized ACF at or above `amp_fraction`, keeping the
/// three largest by value and returning them in ascending lag order.
///
/// Index `l >= 1` is a local maximum when `r[l] > r[l-1]` and `r[l] >= r[l+1]`;
/// the last index only needs to exceed its left neighbour. On a plateau only
/// the first index qualifies.
pub fn pick_peaks(acf: &[f64], amp_fraction: f64) -> Vec<AcfPeak> {
    let n = acf.len();
    let mut peaks: Vec<AcfPeak> = (1..n)
        .filter(|&l| acf[l] > acf[l - 1] && (l + 1 == n || acf[l] >= acf[l + 1]))
        .filter(|&l| acf[l] >= amp_fraction)
        .map(|l| AcfPeak {
            lag: l,
            value: acf[l],
        })
        .collect();
    // stable: equal values keep ascending-lag order
    peaks.sort_by(|a, b| b.value.total_cmp(&a.value));
    peaks.truncate(3);
    peaks.sort_by_key(|p| p.lag);
    peaks
}

/// Periodic iff three peaks exist and their lag spread is strictly below `lag_threshold`.
///
/// When more than three peaks are supplied the three smallest lags are used.
pub fn lag_regularity(peaks: &[AcfPeak], lag_threshold: u32) -> PeriodicityVerdict {
    if peaks.len() < 3 {
        return PeriodicityVerdict {
            periodic: false,
            peaks: None,
            lag_spread: None,
        };
    }
    let mut sorted = peaks.to_vec();
    sorted.sort_by_key(|p| p.lag);
    let triple = [sorted[0], sorted[1], sorted[2]];
    let spread = (triple[1].lag - triple[0].lag).abs_diff(triple[2].lag - triple[1].lag);
    PeriodicityVerdict {
        periodic: spread < lag_threshold as usize,
        peaks: Some(triple),
        lag_spread: Some(spread),
    }
}
