//! Two-talker mixtures at a prescribed target-to-interferer ratio, and
//! frame-level TIR ground truth computed from the gain-applied components.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::{DetectorConfig, DETECTOR_RATE};
use crate::framing::frames_of;
use crate::signal_io::Tabular;
use crate::{Error, Result, Signal, SILENCE_FLOOR};

/// Gender pairing of a mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    FemaleFemale,
    MaleMale,
    MaleFemale,
}

impl Category {
    pub const ALL: [Category; 3] = [
        Category::FemaleFemale,
        Category::MaleMale,
        Category::MaleFemale,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::FemaleFemale => "female-female",
            Category::MaleMale => "male-male",
            Category::MaleFemale => "male-female",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "female-female" => Ok(Category::FemaleFemale),
            "male-male" => Ok(Category::MaleMale),
            "male-female" | "female-male" => Ok(Category::MaleFemale),
            other => Err(Error::Config(format!("unknown mixture category {other:?}"))),
        }
    }
}

/// A co-channel mixture together with its gain-applied components.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub mixed: Signal,
    pub target: Signal,
    pub interferer: Signal,
    /// Requested overall TIR in dB (`+inf` for a silent interferer).
    pub overall_tir_db: f64,
    pub category: Option<Category>,
    /// Amplitude gain applied to the interferer before mixing.
    pub interferer_gain: f64,
    /// Common factor applied to all three signals to keep the mix within [-1, 1].
    pub peak_rescale: f64,
}

impl Mixture {
    /// Sum two components as-is (no interferer gain). Used for single-talker
    /// references where the interferer is digital silence.
    pub fn from_components(
        target: Signal,
        interferer: Signal,
        category: Option<Category>,
    ) -> Result<Mixture> {
        if target.sample_rate() != interferer.sample_rate() {
            return Err(Error::SampleRateMismatch(
                target.sample_rate(),
                interferer.sample_rate(),
            ));
        }
        let n = target.len().min(interferer.len());
        let target = target.truncated(n);
        let interferer = interferer.truncated(n);
        let overall_tir_db = tir_db(target.energy(), interferer.energy());
        let mut mixture = Mixture {
            mixed: sum(&target, &interferer, 1.0)?,
            target,
            interferer,
            overall_tir_db,
            category,
            interferer_gain: 1.0,
            peak_rescale: 1.0,
        };
        mixture.rescue_peak();
        Ok(mixture)
    }

    /// Global TIR measured from the stored components.
    pub fn measured_tir_db(&self) -> f64 {
        tir_db(self.target.energy(), self.interferer.energy())
    }

    pub fn sample_rate(&self) -> u32 {
        self.mixed.sample_rate()
    }

    fn rescue_peak(&mut self) {
        let peak = self.mixed.peak();
        if peak > 1.0 {
            let g = 1.0 / peak;
            self.mixed = self.mixed.scaled(g);
            self.target = self.target.scaled(g);
            self.interferer = self.interferer.scaled(g);
            self.peak_rescale = g;
        }
    }
}

fn sum(a: &Signal, b: &Signal, b_gain: f64) -> Result<Signal> {
    let s = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| x + b_gain * y)
        .collect();
    Signal::new(s, a.sample_rate())
}

fn tir_db(target_energy: f64, interferer_energy: f64) -> f64 {
    10.0 * (target_energy / interferer_energy).log10()
}

/// Mix `interferer` into `target` so that the global energy ratio is `overall_tir_db`.
///
/// Both inputs are truncated to the shorter length. If the sum clips, all
/// three signals are scaled by the same factor so the mix peaks at 1.
pub fn mix_at_tir(target: &Signal, interferer: &Signal, overall_tir_db: f64) -> Result<Mixture> {
    if target.sample_rate() != interferer.sample_rate() {
        return Err(Error::SampleRateMismatch(
            target.sample_rate(),
            interferer.sample_rate(),
        ));
    }
    if !overall_tir_db.is_finite() {
        return Err(Error::InvalidInput(format!(
            "requested TIR must be finite, got {overall_tir_db}"
        )));
    }
    let n = target.len().min(interferer.len());
    let target = target.truncated(n);
    let interferer = interferer.truncated(n);
    let (et, ei) = (target.energy(), interferer.energy());
    if et < SILENCE_FLOOR {
        return Err(Error::ZeroEnergy("target"));
    }
    if ei < SILENCE_FLOOR {
        return Err(Error::ZeroEnergy("interferer"));
    }
    let gain = (et / (ei * 10f64.powf(overall_tir_db / 10.0))).sqrt();
    let interferer = interferer.scaled(gain);
    let mut mixture = Mixture {
        mixed: sum(&target, &interferer, 1.0)?,
        target,
        interferer,
        overall_tir_db,
        category: None,
        interferer_gain: gain,
        peak_rescale: 1.0,
    };
    mixture.rescue_peak();
    Ok(mixture)
}

/// Which sign of frame TIR counts as usable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TirMode {
    /// Target must dominate: `tir >= threshold`.
    #[default]
    Signed,
    /// Either talker may dominate: `|tir| >= threshold`.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelConfig {
    pub tir_usable_db: f64,
    pub mode: TirMode,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig {
            tir_usable_db: 20.0,
            mode: TirMode::Signed,
        }
    }
}

impl LabelConfig {
    pub fn is_usable(&self, frame_tir_db: f64) -> bool {
        match self.mode {
            TirMode::Signed => frame_tir_db >= self.tir_usable_db,
            TirMode::Absolute => frame_tir_db.abs() >= self.tir_usable_db,
        }
    }
}

/// Ground truth for one frame. `frame_tir_db` is `None` when both talkers are
/// silent; such frames take no part in scoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameLabel {
    pub index: usize,
    pub frame_tir_db: Option<f64>,
    pub usable_truth: bool,
}

impl Tabular for FrameLabel {
    const HEADER: &'static [&'static str] = &["index", "frame_tir_db", "usable_truth"];
}

/// Frame TIR in dB: `+inf` when only the target is active, `-inf` when only
/// the interferer is, `None` when both are below the silence floor.
pub fn frame_tir(target: &[f64], interferer: &[f64]) -> Result<Option<f64>> {
    if target.len() != interferer.len() {
        return Err(Error::InvalidInput(format!(
            "frame length mismatch ({} vs {})",
            target.len(),
            interferer.len()
        )));
    }
    let et = crate::energy(target);
    let ei = crate::energy(interferer);
    Ok(match (et >= SILENCE_FLOOR, ei >= SILENCE_FLOOR) {
        (false, false) => None,
        (true, false) => Some(f64::INFINITY),
        (false, true) => Some(f64::NEG_INFINITY),
        (true, true) => Some(tir_db(et, ei)),
    })
}

/// Label each frame of an 8 kHz mixture from its components.
pub fn label_frames(
    mixture: &Mixture,
    config: &DetectorConfig,
    labels: &LabelConfig,
) -> Result<Vec<FrameLabel>> {
    if mixture.sample_rate() != DETECTOR_RATE {
        return Err(Error::UnsupportedSampleRate(mixture.sample_rate()));
    }
    let len = config.frame_len()?;
    frames_of(mixture.target.samples(), len)
        .iter()
        .zip(frames_of(mixture.interferer.samples(), len))
        .map(|(t, i)| {
            let tir = frame_tir(t.samples, i.samples)?;
            Ok(FrameLabel {
                index: t.index,
                frame_tir_db: tir,
                usable_truth: tir.is_some_and(|v| labels.is_usable(v)),
            })
        })
        .collect()
}
