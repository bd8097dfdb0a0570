//! The multi-resolution detector: voicing at level 1, then a first-hit
//! search for periodicity across approximation scales `1..=max_scale`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dwt::decompose;
use crate::framing::{frame_len, frames_of, Frame};
use crate::periodicity::{autocorrelate, lag_regularity, pick_peaks, AcfPeak};
use crate::signal_io::Tabular;
use crate::voicing::{voicing_from_level, VoicingVerdict};
use crate::{Error, Result, Signal};

/// Sample rate the detector operates at.
pub const DETECTOR_RATE: u32 = 8000;

/// Unit in which `lag_threshold` is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LagUnits {
    /// Samples of the 8 kHz input: at scale j a spread of s coefficient lags
    /// counts as `s * 2^j` samples.
    #[default]
    Input,
    /// Samples of whichever coefficient grid is being tested; the same number
    /// applies unchanged at every scale.
    Scale,
}

impl LagUnits {
    /// Threshold on the scale-`scale` coefficient grid equivalent to `lag_threshold`.
    ///
    /// For input units, `spread * 2^j < t` iff `spread < ceil(t / 2^j)`.
    pub fn grid_threshold(self, lag_threshold: u32, scale: u32) -> u32 {
        match self {
            LagUnits::Scale => lag_threshold,
            LagUnits::Input => {
                let step = 1u64 << scale.min(63);
                (lag_threshold as u64).div_ceil(step) as u32
            }
        }
    }
}

/// Detector tunables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub frame_ms: u32,
    /// Level-1 approximation energy share above which a frame is voiced.
    pub energy_threshold: f64,
    /// Minimum normalized ACF value for a local maximum to count as a peak.
    pub amp_fraction: f64,
    /// Maximum lag spread (exclusive), in `lag_units`.
    pub lag_threshold: u32,
    pub lag_units: LagUnits,
    pub max_scale: u32,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            frame_ms: 64,
            energy_threshold: 0.90,
            amp_fraction: 0.25,
            lag_threshold: 8,
            lag_units: LagUnits::Input,
            max_scale: 4,
        }
    }
}

impl DetectorConfig {
    /// Frame length in samples at 8 kHz.
    pub fn frame_len(&self) -> Result<usize> {
        frame_len(DETECTOR_RATE, self.frame_ms)
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.frame_len()?;
        for (name, v) in [
            ("energy_threshold", self.energy_threshold),
            ("amp_fraction", self.amp_fraction),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!(
                    "{name} must lie strictly between 0 and 1, got {v}"
                )));
            }
        }
        if self.max_scale == 0 || self.max_scale >= usize::BITS || (1usize << self.max_scale) > len
        {
            return Err(Error::Config(format!(
                "max_scale {} does not fit a {len}-sample frame",
                self.max_scale
            )));
        }
        Ok(())
    }
}

/// Threshold-independent analysis of one approximation scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleAnalysis {
    pub scale: u32,
    /// Share of the frame energy retained in this scale's approximation band.
    pub band_energy_fraction: f64,
    pub peaks: Vec<AcfPeak>,
}

/// Everything about a frame that does not depend on the lag threshold.
///
/// [`FrameAnalysis::decide`] turns it into a decision for any threshold, which
/// is how the threshold sweep avoids recomputing transforms and ACFs.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameAnalysis {
    pub index: usize,
    pub voicing: VoicingVerdict,
    /// One entry per scale for voiced frames; empty otherwise.
    pub scales: Vec<ScaleAnalysis>,
}

/// Per-scale record kept for diagnostic traces.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleTrace {
    pub scale: u32,
    pub band_energy_fraction: f64,
    pub peak_lags: Vec<usize>,
    pub lag_spread: Option<usize>,
    pub periodic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameDecision {
    pub index: usize,
    pub voiced: bool,
    pub approx_energy_fraction: f64,
    /// First scale at which periodicity was found.
    pub detected_scale: Option<u32>,
    pub usable: bool,
    /// Scales examined, in order, up to and including the detecting one.
    pub trace: Vec<ScaleTrace>,
}

impl FrameAnalysis {
    pub fn decide(&self, lag_threshold: u32, units: LagUnits) -> FrameDecision {
        let mut trace = Vec::with_capacity(self.scales.len());
        let mut detected_scale = None;
        for s in &self.scales {
            let verdict = lag_regularity(&s.peaks, units.grid_threshold(lag_threshold, s.scale));
            trace.push(ScaleTrace {
                scale: s.scale,
                band_energy_fraction: s.band_energy_fraction,
                peak_lags: s.peaks.iter().map(|p| p.lag).collect(),
                lag_spread: verdict.lag_spread,
                periodic: verdict.periodic,
            });
            if verdict.periodic {
                detected_scale = Some(s.scale);
                break;
            }
        }
        FrameDecision {
            index: self.index,
            voiced: self.voicing.voiced,
            approx_energy_fraction: self.voicing.approx_energy_fraction,
            detected_scale,
            usable: detected_scale.is_some(),
            trace,
        }
    }
}

fn analyze_samples(
    index: usize,
    samples: &[f64],
    config: &DetectorConfig,
) -> Result<FrameAnalysis> {
    let levels = decompose(samples, config.max_scale)?;
    let voicing = voicing_from_level(&levels[0], config.energy_threshold);
    if !voicing.voiced {
        return Ok(FrameAnalysis {
            index,
            voicing,
            scales: Vec::new(),
        });
    }
    let total = crate::energy(samples);
    let scales = levels
        .iter()
        .map(|level| ScaleAnalysis {
            scale: level.scale_index,
            band_energy_fraction: level.approx_energy() / total,
            // a band with no energy carries no periodicity
            peaks: autocorrelate(&level.approx)
                .map(|acf| pick_peaks(&acf, config.amp_fraction))
                .unwrap_or_default(),
        })
        .collect();
    Ok(FrameAnalysis {
        index,
        voicing,
        scales,
    })
}

/// Threshold-independent analysis of a single frame.
pub fn analyze_frame(frame: &Frame<'_>, config: &DetectorConfig) -> Result<FrameAnalysis> {
    config.validate()?;
    let expected = config.frame_len()?;
    if frame.samples.len() != expected {
        return Err(Error::Config(format!(
            "frame has {} samples but the configuration expects {expected}",
            frame.samples.len()
        )));
    }
    analyze_samples(frame.index, frame.samples, config)
}

/// Classify one 8 kHz frame.
pub fn classify_frame(frame: &Frame<'_>, config: &DetectorConfig) -> Result<FrameDecision> {
    Ok(analyze_frame(frame, config)?.decide(config.lag_threshold, config.lag_units))
}

/// Analyze every frame of an 8 kHz signal, in frame order.
pub fn analyze_signal(signal: &Signal, config: &DetectorConfig) -> Result<Vec<FrameAnalysis>> {
    config.validate()?;
    if signal.sample_rate() != DETECTOR_RATE {
        return Err(Error::UnsupportedSampleRate(signal.sample_rate()));
    }
    let frames = frames_of(signal.samples(), config.frame_len()?);
    frames
        .par_iter()
        .map(|f| analyze_samples(f.index, f.samples, config))
        .collect()
}

/// Classify every frame of an 8 kHz signal. Frames are independent; the
/// output is in frame order.
pub fn classify_signal(signal: &Signal, config: &DetectorConfig) -> Result<Vec<FrameDecision>> {
    Ok(analyze_signal(signal, config)?
        .iter()
        .map(|a| a.decide(config.lag_threshold, config.lag_units))
        .collect())
}

/// Detection outcome as consumed by scoring; implemented by full decisions
/// and by the rows read back from a decisions CSV.
pub trait Detection {
    fn index(&self) -> usize;
    fn voiced(&self) -> bool;
    fn usable(&self) -> bool;
}

impl Detection for FrameDecision {
    fn index(&self) -> usize {
        self.index
    }
    fn voiced(&self) -> bool {
        self.voiced
    }
    fn usable(&self) -> bool {
        self.usable
    }
}

/// Flat per-frame row of a decisions CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRow {
    pub index: usize,
    pub voiced: bool,
    pub detected_scale: Option<u32>,
    pub usable: bool,
}

impl Tabular for DecisionRow {
    const HEADER: &'static [&'static str] = &["index", "voiced", "detected_scale", "usable"];
}

impl From<&FrameDecision> for DecisionRow {
    fn from(d: &FrameDecision) -> Self {
        DecisionRow {
            index: d.index,
            voiced: d.voiced,
            detected_scale: d.detected_scale,
            usable: d.usable,
        }
    }
}

impl Detection for DecisionRow {
    fn index(&self) -> usize {
        self.index
    }
    fn voiced(&self) -> bool {
        self.voiced
    }
    fn usable(&self) -> bool {
        self.usable
    }
}

/// One text line per examined (frame, scale), or a single line for unvoiced frames.
pub fn format_trace(decisions: &[FrameDecision]) -> String {
    let mut out = String::new();
    for d in decisions {
        if !d.voiced {
            let _ = writeln!(
                out,
                "frame {} unvoiced approx_energy={:.4}",
                d.index, d.approx_energy_fraction
            );
            continue;
        }
        for t in &d.trace {
            let lags = t
                .peak_lags
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let spread = t
                .lag_spread
                .map_or_else(|| "-".to_string(), |s| s.to_string());
            let _ = writeln!(
                out,
                "frame {} scale {} band_energy={:.4} peaks=[{}] spread={} {}",
                d.index,
                t.scale,
                t.band_energy_fraction,
                lags,
                spread,
                if t.periodic { "periodic" } else { "aperiodic" }
            );
        }
        let verdict = match d.detected_scale {
            Some(s) => format!("usable (scale {s})"),
            None => "unusable".to_string(),
        };
        let _ = writeln!(
            out,
            "frame {} voiced approx_energy={:.4} -> {}",
            d.index, d.approx_energy_fraction, verdict
        );
    }
    out
}
