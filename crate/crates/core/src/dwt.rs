//! Orthonormal Haar dyadic wavelet analysis.
//!
//! One analysis step splits a sequence into a low band (approximation) and a
//! high band (detail), each half as long. At 8 kHz, the level-j
//! approximation covers 0 to 4000 / 2^j Hz.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::{Error, Result};

/// Output of one Haar analysis step.
#[derive(Debug, Clone, PartialEq)]
pub struct DwtLevel {
    pub approx: Vec<f64>,
    pub detail: Vec<f64>,
    /// 1 for the first step applied to the input, 2 for the next, and so on.
    pub scale_index: u32,
}

impl DwtLevel {
    pub fn approx_energy(&self) -> f64 {
        crate::energy(&self.approx)
    }

    pub fn detail_energy(&self) -> f64 {
        crate::energy(&self.detail)
    }
}

fn split(x: &[f64], scale_index: u32) -> DwtLevel {
    let (approx, detail) = x
        .chunks_exact(2)
        .map(|p| ((p[0] + p[1]) * FRAC_1_SQRT_2, (p[0] - p[1]) * FRAC_1_SQRT_2))
        .unzip();
    DwtLevel {
        approx,
        detail,
        scale_index,
    }
}

/// Single Haar analysis step. An odd trailing sample is dropped.
pub fn haar_step(x: &[f64]) -> Result<DwtLevel> {
    if x.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "Haar step needs at least 2 samples, got {}",
            x.len()
        )));
    }
    Ok(split(x, 1))
}

/// Inverse of [`haar_step`]: interleaves the synthesized even/odd samples.
pub fn haar_inverse(level: &DwtLevel) -> Result<Vec<f64>> {
    if level.approx.len() != level.detail.len() {
        return Err(Error::InvalidInput(format!(
            "approx/detail length mismatch ({} vs {})",
            level.approx.len(),
            level.detail.len()
        )));
    }
    Ok(level
        .approx
        .iter()
        .zip(&level.detail)
        .flat_map(|(a, d)| [(a + d) * FRAC_1_SQRT_2, (a - d) * FRAC_1_SQRT_2])
        .collect())
}

/// Iterated decomposition: level j is the Haar step of the level j-1 approximation.
///
/// Returns levels `1..=max_scale` in order.
pub fn decompose(x: &[f64], max_scale: u32) -> Result<Vec<DwtLevel>> {
    if max_scale == 0 {
        return Err(Error::InvalidInput("max_scale must be at least 1".into()));
    }
    if max_scale >= usize::BITS || x.len() < (1usize << max_scale) {
        return Err(Error::InvalidInput(format!(
            "{} samples are too few for {max_scale} decomposition levels",
            x.len()
        )));
    }
    let mut levels: Vec<DwtLevel> = Vec::with_capacity(max_scale as usize);
    for j in 1..=max_scale {
        let input = levels.last().map_or(x, |l| l.approx.as_slice());
        levels.push(split(input, j));
    }
    Ok(levels)
}
