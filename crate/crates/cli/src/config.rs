//! Run configuration: built-in defaults, then a `key = value` file, then flags.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use usable_speech::{DetectorConfig, FaDenominator, LabelConfig, LagUnits, TirMode};

use crate::exit::Usage;

/// Everything that shapes an output, as recorded in run manifests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub detector: DetectorConfig,
    pub labels: LabelConfig,
    pub fa_denominator: FaDenominator,
}

/// Flat config file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    frame_ms: Option<u32>,
    energy_threshold: Option<f64>,
    amp_fraction: Option<f64>,
    lag_threshold: Option<u32>,
    lag_units: Option<LagUnits>,
    max_scale: Option<u32>,
    tir_usable_db: Option<f64>,
    tir_mode: Option<TirMode>,
    fa_denominator: Option<FaDenominator>,
}

fn kebab<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Config file of `key = value` lines (TOML subset)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Frame length in milliseconds
    #[arg(long)]
    pub frame_ms: Option<u32>,
    /// Voicing threshold on the level-1 approximation energy fraction
    #[arg(long)]
    pub energy_threshold: Option<f64>,
    /// Minimum normalized autocorrelation of a candidate peak
    #[arg(long)]
    pub amp_fraction: Option<f64>,
    /// Maximum lag spread, exclusive
    #[arg(long)]
    pub lag_threshold: Option<u32>,
    /// Units of --lag-threshold: input or scale
    #[arg(long, value_parser = kebab::<LagUnits>)]
    pub lag_units: Option<LagUnits>,
    /// Deepest decomposition scale
    #[arg(long)]
    pub max_scale: Option<u32>,
    /// Frame TIR (dB) at which a frame counts as usable
    #[arg(long, allow_negative_numbers = true)]
    pub tir_usable_db: Option<f64>,
    /// Label frames usable when either talker dominates
    #[arg(long)]
    pub absolute_tir: bool,
    /// False-alarm denominator: unusable-voiced, voiced or detected
    #[arg(long, value_parser = kebab::<FaDenominator>)]
    pub fa_denominator: Option<FaDenominator>,
}

fn read_file(path: &Path) -> anyhow::Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| usable_speech::Error::io(path, e))?;
    toml::from_str(&text)
        .map_err(|e| Usage(format!("bad config file {}: {e}", path.display())).into())
}

impl ConfigArgs {
    pub fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let file = match &self.config {
            Some(p) => read_file(p).with_context(|| format!("loading {}", p.display()))?,
            None => ConfigFile::default(),
        };
        let d = &mut cfg.detector;
        macro_rules! layer {
            ($target:expr, $field:ident) => {
                if let Some(v) = file.$field {
                    $target = v;
                }
                if let Some(v) = self.$field {
                    $target = v;
                }
            };
        }
        layer!(d.frame_ms, frame_ms);
        layer!(d.energy_threshold, energy_threshold);
        layer!(d.amp_fraction, amp_fraction);
        layer!(d.lag_threshold, lag_threshold);
        layer!(d.lag_units, lag_units);
        layer!(d.max_scale, max_scale);
        layer!(cfg.labels.tir_usable_db, tir_usable_db);
        layer!(cfg.fa_denominator, fa_denominator);
        if let Some(m) = file.tir_mode {
            cfg.labels.mode = m;
        }
        if self.absolute_tir {
            cfg.labels.mode = TirMode::Absolute;
        }
        cfg.detector.validate()?;
        if !cfg.labels.tir_usable_db.is_finite() {
            return Err(Usage("tir_usable_db must be finite".into()).into());
        }
        Ok(cfg)
    }
}
