//! Voiced/unvoiced decision from the share of energy in the first Haar
//! approximation band (0 to fs/4).

use crate::dwt::{haar_step, DwtLevel};
use crate::SILENCE_FLOOR;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoicingVerdict {
    pub voiced: bool,
    /// E(approx) / (E(approx) + E(detail)) at level 1; 0 for silent frames.
    pub approx_energy_fraction: f64,
}

/// Voiced iff the level-1 approximation holds strictly more than
/// `energy_threshold` of the frame energy. Frames below the silence floor
/// (or shorter than two samples) are unvoiced.
pub fn classify_voicing(samples: &[f64], energy_threshold: f64) -> VoicingVerdict {
    match haar_step(samples) {
        Ok(level) => voicing_from_level(&level, energy_threshold),
        Err(_) => VoicingVerdict {
            voiced: false,
            approx_energy_fraction: 0.0,
        },
    }
}

pub(crate) fn voicing_from_level(level: &DwtLevel, energy_threshold: f64) -> VoicingVerdict {
    let approx = level.approx_energy();
    let total = approx + level.detail_energy();
    if total < SILENCE_FLOOR {
        return VoicingVerdict {
            voiced: false,
            approx_energy_fraction: 0.0,
        };
    }
    let fraction = approx / total;
    VoicingVerdict {
        voiced: fraction > energy_threshold,
        approx_energy_fraction: fraction,
    }
}
