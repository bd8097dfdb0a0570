//! Usable speech detection for co-channel (two-talker) audio.
//!
//! The detector splits a signal sampled at 8 kHz into 64 ms frames, keeps
//! the frames whose Haar approximation band holds most of the energy
//! (voiced frames), and then walks down the dyadic scales looking for a
//! regular pitch structure in the autocorrelation of the approximation
//! coefficients. A frame is flagged usable at the first scale where the
//! three dominant autocorrelation peaks are evenly spaced.
//!
//! Alongside the detector the crate ships the evaluation harness: mixing
//! two talkers at a prescribed target-to-interferer ratio, frame-level TIR
//! ground truth, hit/false-alarm scoring and the lag-threshold sweep.

pub mod classifier;
pub mod cochannel;
pub mod dwt;
mod error;
pub mod eval;
pub mod framing;
pub mod periodicity;
pub mod signal_io;
pub mod synth;
pub mod voicing;

pub use classifier::{
    analyze_frame, analyze_signal, classify_frame, classify_signal, DecisionRow, Detection,
    DetectorConfig, FrameAnalysis, FrameDecision, LagUnits, ScaleTrace,
};
pub use cochannel::{
    frame_tir, label_frames, mix_at_tir, Category, FrameLabel, LabelConfig, Mixture, TirMode,
};
pub use dwt::{decompose, haar_inverse, haar_step, DwtLevel};
pub use error::{Error, Result};
pub use eval::{
    aggregate, score, threshold_sweep, EvalCounts, EvalReport, FaDenominator, SweepRow,
};
pub use framing::{make_frames, Frame};
pub use periodicity::{autocorrelate, lag_regularity, pick_peaks, AcfPeak, PeriodicityVerdict};
pub use signal_io::{downsample_to_8k, read_wav, write_wav, Signal, WavFormat};
pub use voicing::{classify_voicing, VoicingVerdict};

/// Frames (and signals) whose sum of squares falls below this are treated as silent.
pub const SILENCE_FLOOR: f64 = 1e-10;

pub(crate) fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}
