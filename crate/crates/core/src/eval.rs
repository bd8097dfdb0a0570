//! Hit / false-alarm scoring of detector decisions against TIR ground truth.
//!
//! Only frames that the detector calls voiced and that carry a TIR label take
//! part. A hit is a frame detected usable and labeled usable; a false alarm
//! is a frame detected usable but labeled unusable.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{analyze_signal, Detection, DetectorConfig};
use crate::cochannel::{label_frames, FrameLabel, LabelConfig, Mixture};
use crate::signal_io::Tabular;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EvalCounts {
    pub usable_truth: usize,
    pub detected_usable: usize,
    pub hits: usize,
    pub false_alarms: usize,
    /// Frames that took part: voiced by the detector and labeled.
    pub voiced: usize,
    pub total: usize,
}

impl std::ops::Add for EvalCounts {
    type Output = EvalCounts;

    fn add(self, o: EvalCounts) -> EvalCounts {
        EvalCounts {
            usable_truth: self.usable_truth + o.usable_truth,
            detected_usable: self.detected_usable + o.detected_usable,
            hits: self.hits + o.hits,
            false_alarms: self.false_alarms + o.false_alarms,
            voiced: self.voiced + o.voiced,
            total: self.total + o.total,
        }
    }
}

/// Denominator of the false-alarm percentage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaDenominator {
    /// Voiced frames labeled unusable (a false-positive rate).
    #[default]
    UnusableVoiced,
    /// All voiced frames.
    Voiced,
    /// Frames detected usable (a false-discovery rate).
    Detected,
}

fn pct(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

impl EvalCounts {
    pub fn hit_pct(&self) -> f64 {
        pct(self.hits, self.usable_truth)
    }

    pub fn false_alarm_pct(&self, denominator: FaDenominator) -> f64 {
        let den = match denominator {
            FaDenominator::UnusableVoiced => self.voiced - self.usable_truth,
            FaDenominator::Voiced => self.voiced,
            FaDenominator::Detected => self.detected_usable,
        };
        pct(self.false_alarms, den)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Mixture category, or `"average"` for an aggregate.
    pub category: String,
    pub hit_pct: f64,
    pub false_alarm_pct: f64,
    pub counts: EvalCounts,
    pub fa_denominator: FaDenominator,
    /// Unweighted mean of the aggregated reports' percentages (aggregates only).
    pub mean_hit_pct: Option<f64>,
    pub mean_false_alarm_pct: Option<f64>,
}

impl EvalReport {
    pub fn from_counts(
        category: impl Into<String>,
        counts: EvalCounts,
        fa_denominator: FaDenominator,
    ) -> Self {
        EvalReport {
            category: category.into(),
            hit_pct: counts.hit_pct(),
            false_alarm_pct: counts.false_alarm_pct(fa_denominator),
            counts,
            fa_denominator,
            mean_hit_pct: None,
            mean_false_alarm_pct: None,
        }
    }

    pub fn with_category(mut self, category: impl Into<String>) -> Self {
        self.category = category.into();
        self
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} {:>7.2} {:>9.2}",
            self.category, self.hit_pct, self.false_alarm_pct
        )
    }
}

/// Count hits and false alarms. `decisions` and `labels` must cover the same
/// frames in the same order.
pub fn score_counts<D: Detection>(decisions: &[D], labels: &[FrameLabel]) -> Result<EvalCounts> {
    if decisions.len() != labels.len() {
        return Err(Error::Misaligned(format!(
            "{} decisions vs {} labels",
            decisions.len(),
            labels.len()
        )));
    }
    let mut c = EvalCounts {
        total: decisions.len(),
        ..Default::default()
    };
    for (d, l) in decisions.iter().zip(labels) {
        if d.index() != l.index {
            return Err(Error::Misaligned(format!(
                "decision frame {} paired with label frame {}",
                d.index(),
                l.index
            )));
        }
        if !d.voiced() || l.frame_tir_db.is_none() {
            continue;
        }
        c.voiced += 1;
        c.usable_truth += l.usable_truth as usize;
        if d.usable() {
            c.detected_usable += 1;
            if l.usable_truth {
                c.hits += 1;
            } else {
                c.false_alarms += 1;
            }
        }
    }
    Ok(c)
}

/// Score with the default false-alarm denominator.
pub fn score<D: Detection>(decisions: &[D], labels: &[FrameLabel]) -> Result<EvalReport> {
    Ok(EvalReport::from_counts(
        "overall",
        score_counts(decisions, labels)?,
        FaDenominator::default(),
    ))
}

/// Pool counts across reports; also record the unweighted mean of their percentages.
pub fn aggregate(reports: &[EvalReport]) -> Result<EvalReport> {
    let first = reports
        .first()
        .ok_or(Error::EmptyInput("no reports to aggregate"))?;
    if reports
        .iter()
        .any(|r| r.fa_denominator != first.fa_denominator)
    {
        return Err(Error::InvalidInput(
            "reports use different false-alarm denominators".into(),
        ));
    }
    if reports.len() == 1 {
        return Ok(first.clone());
    }
    let counts = reports
        .iter()
        .fold(EvalCounts::default(), |acc, r| acc + r.counts);
    let n = reports.len() as f64;
    let mut out = EvalReport::from_counts("average", counts, first.fa_denominator);
    out.mean_hit_pct = Some(reports.iter().map(|r| r.hit_pct).sum::<f64>() / n);
    out.mean_false_alarm_pct = Some(reports.iter().map(|r| r.false_alarm_pct).sum::<f64>() / n);
    Ok(out)
}

/// CSV row: `category,hit_pct,false_alarm_pct,hits,false_alarms,usable_truth,voiced,total`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub category: String,
    pub hit_pct: f64,
    pub false_alarm_pct: f64,
    pub hits: usize,
    pub false_alarms: usize,
    pub usable_truth: usize,
    pub voiced: usize,
    pub total: usize,
}

impl Tabular for ReportRow {
    const HEADER: &'static [&'static str] = &[
        "category",
        "hit_pct",
        "false_alarm_pct",
        "hits",
        "false_alarms",
        "usable_truth",
        "voiced",
        "total",
    ];
}

impl From<&EvalReport> for ReportRow {
    fn from(r: &EvalReport) -> Self {
        ReportRow {
            category: r.category.clone(),
            hit_pct: r.hit_pct,
            false_alarm_pct: r.false_alarm_pct,
            hits: r.counts.hits,
            false_alarms: r.counts.false_alarms,
            usable_truth: r.counts.usable_truth,
            voiced: r.counts.voiced,
            total: r.counts.total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: u32,
    pub hit_pct: f64,
    pub false_alarm_pct: f64,
}

impl Tabular for SweepRow {
    const HEADER: &'static [&'static str] = &["threshold", "hit_pct", "false_alarm_pct"];
}

/// Counts per lag threshold for one mixture, sharing the transform and ACF work.
pub fn sweep_counts(
    mixture: &Mixture,
    config: &DetectorConfig,
    labels: &LabelConfig,
    thresholds: &[u32],
) -> Result<Vec<(u32, EvalCounts)>> {
    if thresholds.is_empty() {
        return Err(Error::EmptyInput("no thresholds to sweep"));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!(
            "thresholds must be strictly ascending: {thresholds:?}"
        )));
    }
    let truth = label_frames(mixture, config, labels)?;
    let analyses = analyze_signal(&mixture.mixed, config)?;
    thresholds
        .par_iter()
        .map(|&t| {
            let decisions: Vec<_> = analyses
                .iter()
                .map(|a| a.decide(t, config.lag_units))
                .collect();
            Ok((t, score_counts(&decisions, &truth)?))
        })
        .collect()
}

/// Hit and false-alarm percentages for each lag threshold, ascending.
pub fn threshold_sweep(
    mixture: &Mixture,
    config: &DetectorConfig,
    labels: &LabelConfig,
    thresholds: &[u32],
) -> Result<Vec<SweepRow>> {
    let fa = FaDenominator::default();
    Ok(sweep_counts(mixture, config, labels, thresholds)?
        .into_iter()
        .map(|(threshold, c)| SweepRow {
            threshold,
            hit_pct: c.hit_pct(),
            false_alarm_pct: c.false_alarm_pct(fa),
        })
        .collect())
}
