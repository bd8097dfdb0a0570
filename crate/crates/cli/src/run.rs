//! Command execution. Each command is described by an [`Invocation`], which
//! is also what a manifest stores so that a run can be replayed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use usable_speech::classifier::format_trace;
use usable_speech::eval::{score_counts, ReportRow};
use usable_speech::signal_io::{read_csv, write_csv, Tabular};
use usable_speech::synth::SyntheticCorpus;
use usable_speech::{
    aggregate, classify_signal, downsample_to_8k, label_frames, mix_at_tir, read_wav,
    threshold_sweep, write_wav, Category, DecisionRow, Error, EvalCounts, EvalReport, FrameLabel,
    WavFormat,
};

use crate::config::RunConfig;
use crate::exit::Usage;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPair {
    pub decisions: PathBuf,
    pub labels: PathBuf,
    pub category: Option<Category>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Invocation {
    Detect {
        input: PathBuf,
        out: PathBuf,
        trace: Option<PathBuf>,
    },
    Mix {
        target: PathBuf,
        interferer: PathBuf,
        tir_db: f64,
        out_prefix: PathBuf,
        category: Option<Category>,
    },
    Evaluate {
        pairs: Vec<EvalPair>,
        out: PathBuf,
    },
    Sweep {
        target: PathBuf,
        interferer: PathBuf,
        thresholds: Vec<u32>,
        tir_db: f64,
        out: PathBuf,
    },
    Synth {
        out_dir: PathBuf,
        duration_secs: f64,
    },
    Corpus {
        out: PathBuf,
        tir_db: f64,
    },
}

/// What a run touched and anything worth recording about it.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub results: Map<String, Value>,
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn moved(path: &Path, dir: &Path) -> PathBuf {
    dir.join(path.file_name().unwrap_or(path.as_os_str()))
}

fn write_text(path: &Path, text: &str) -> usable_speech::Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn load_8k(path: &Path) -> usable_speech::Result<usable_speech::Signal> {
    downsample_to_8k(&read_wav(path)?)
}

impl Invocation {
    pub fn name(&self) -> &'static str {
        match self {
            Invocation::Detect { .. } => "detect",
            Invocation::Mix { .. } => "mix",
            Invocation::Evaluate { .. } => "evaluate",
            Invocation::Sweep { .. } => "sweep",
            Invocation::Synth { .. } => "synth",
            Invocation::Corpus { .. } => "corpus",
        }
    }

    pub fn manifest_path(&self) -> PathBuf {
        match self {
            Invocation::Detect { out, .. }
            | Invocation::Evaluate { out, .. }
            | Invocation::Sweep { out, .. }
            | Invocation::Corpus { out, .. } => with_suffix(out, ".manifest.json"),
            Invocation::Mix { out_prefix, .. } => with_suffix(out_prefix, "_manifest.json"),
            Invocation::Synth { out_dir, .. } => out_dir.join("manifest.json"),
        }
    }

    /// The same run with every output placed in `dir`.
    pub fn redirected(&self, dir: &Path) -> Invocation {
        let mut inv = self.clone();
        match &mut inv {
            Invocation::Detect { out, trace, .. } => {
                *out = moved(out, dir);
                if let Some(t) = trace {
                    *t = moved(t, dir);
                }
            }
            Invocation::Mix { out_prefix, .. } => *out_prefix = moved(out_prefix, dir),
            Invocation::Evaluate { out, .. }
            | Invocation::Sweep { out, .. }
            | Invocation::Corpus { out, .. } => *out = moved(out, dir),
            Invocation::Synth { out_dir, .. } => *out_dir = dir.to_path_buf(),
        }
        inv
    }

    pub fn execute(&self, cfg: &RunConfig) -> anyhow::Result<Outcome> {
        match self {
            Invocation::Detect { input, out, trace } => detect(cfg, input, out, trace.as_deref()),
            Invocation::Mix {
                target,
                interferer,
                tir_db,
                out_prefix,
                category,
            } => mix(cfg, target, interferer, *tir_db, out_prefix, *category),
            Invocation::Evaluate { pairs, out } => evaluate(cfg, pairs, out),
            Invocation::Sweep {
                target,
                interferer,
                thresholds,
                tir_db,
                out,
            } => sweep(cfg, target, interferer, thresholds, *tir_db, out),
            Invocation::Synth {
                out_dir,
                duration_secs,
            } => synth(out_dir, *duration_secs),
            Invocation::Corpus { out, tir_db } => corpus(cfg, out, *tir_db),
        }
    }
}

fn detect(
    cfg: &RunConfig,
    input: &Path,
    out: &Path,
    trace: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let signal = load_8k(input)?;
    let decisions = classify_signal(&signal, &cfg.detector)?;
    let rows: Vec<DecisionRow> = decisions.iter().map(DecisionRow::from).collect();
    write_csv(&rows, out)?;
    let mut outputs = vec![out.to_path_buf()];
    if let Some(t) = trace {
        write_text(t, &format_trace(&decisions))?;
        outputs.push(t.to_path_buf());
    }
    let voiced = rows.iter().filter(|r| r.voiced).count();
    let usable = rows.iter().filter(|r| r.usable).count();
    println!("{} frames, {voiced} voiced, {usable} usable", rows.len());
    let mut results = Map::new();
    results.insert("frames".into(), json!(rows.len()));
    results.insert("voiced".into(), json!(voiced));
    results.insert("usable".into(), json!(usable));
    Ok(Outcome {
        inputs: vec![input.to_path_buf()],
        outputs,
        results,
    })
}

fn mix(
    cfg: &RunConfig,
    target: &Path,
    interferer: &Path,
    tir_db: f64,
    prefix: &Path,
    category: Option<Category>,
) -> anyhow::Result<Outcome> {
    let mut m = mix_at_tir(&load_8k(target)?, &load_8k(interferer)?, tir_db)?;
    m.category = category;
    let labels = label_frames(&m, &cfg.detector, &cfg.labels)?;
    let outputs: Vec<PathBuf> = [
        "_mixed.wav",
        "_target.wav",
        "_interferer.wav",
        "_labels.csv",
    ]
    .iter()
    .map(|s| with_suffix(prefix, s))
    .collect();
    write_wav(&m.mixed, &outputs[0], WavFormat::Float32)?;
    write_wav(&m.target, &outputs[1], WavFormat::Float32)?;
    write_wav(&m.interferer, &outputs[2], WavFormat::Float32)?;
    write_csv(&labels, &outputs[3])?;
    let usable = labels.iter().filter(|l| l.usable_truth).count();
    println!(
        "mixed at {:.3} dB (interferer gain {:.6}), {} frames, {usable} labeled usable",
        m.measured_tir_db(),
        m.interferer_gain,
        labels.len()
    );
    let mut results = Map::new();
    results.insert("requested_tir_db".into(), json!(tir_db));
    results.insert("measured_tir_db".into(), json!(m.measured_tir_db()));
    results.insert("interferer_gain".into(), json!(m.interferer_gain));
    results.insert("peak_rescale".into(), json!(m.peak_rescale));
    results.insert("category".into(), json!(category));
    results.insert("frames".into(), json!(labels.len()));
    results.insert("usable_truth".into(), json!(usable));
    Ok(Outcome {
        inputs: vec![target.to_path_buf(), interferer.to_path_buf()],
        outputs,
        results,
    })
}

/// Per-group reports followed, when there is more than one group, by a
/// pooled row and an `average` row holding the unweighted mean.
fn report_rows(groups: &[(String, EvalCounts)], cfg: &RunConfig) -> anyhow::Result<Vec<ReportRow>> {
    let reports: Vec<EvalReport> = groups
        .iter()
        .map(|(name, c)| EvalReport::from_counts(name.clone(), *c, cfg.fa_denominator))
        .collect();
    let mut rows: Vec<ReportRow> = reports.iter().map(ReportRow::from).collect();
    if reports.len() > 1 {
        let all = aggregate(&reports)?;
        let mut mean = ReportRow::from(&all);
        mean.category = "average".into();
        mean.hit_pct = all.mean_hit_pct.unwrap_or(all.hit_pct);
        mean.false_alarm_pct = all.mean_false_alarm_pct.unwrap_or(all.false_alarm_pct);
        rows.push(ReportRow::from(&all.with_category("pooled")));
        rows.push(mean);
    }
    Ok(rows)
}

fn print_table(rows: &[ReportRow]) {
    println!(
        "{:<16} {:>7} {:>9} {:>8}",
        "category", "hit %", "FA %", "frames"
    );
    for r in rows {
        println!(
            "{:<16} {:>7.2} {:>9.2} {:>8}",
            r.category, r.hit_pct, r.false_alarm_pct, r.voiced
        );
    }
}

fn report_results(rows: &[ReportRow]) -> Map<String, Value> {
    let mut results = Map::new();
    for r in rows {
        results.insert(
            r.category.clone(),
            json!({ "hit_pct": r.hit_pct, "false_alarm_pct": r.false_alarm_pct }),
        );
    }
    results
}

fn group(groups: &mut Vec<(String, EvalCounts)>, name: &str, counts: EvalCounts) {
    match groups.iter_mut().find(|(n, _)| n == name) {
        Some((_, c)) => *c = *c + counts,
        None => groups.push((name.to_string(), counts)),
    }
}

fn evaluate(cfg: &RunConfig, pairs: &[EvalPair], out: &Path) -> anyhow::Result<Outcome> {
    if pairs.is_empty() {
        return Err(Usage("no decisions/labels pairs given".into()).into());
    }
    let mut groups = Vec::new();
    let mut inputs = Vec::new();
    for p in pairs {
        let decisions: Vec<DecisionRow> = read_csv(&p.decisions)?;
        let labels: Vec<FrameLabel> = read_csv(&p.labels)?;
        if labels.is_empty() {
            return Err(
                anyhow::Error::new(Error::EmptyInput("label file has no rows"))
                    .context(format!("reading {}", p.labels.display())),
            );
        }
        if decisions.is_empty() {
            return Err(
                anyhow::Error::new(Error::EmptyInput("decision file has no rows"))
                    .context(format!("reading {}", p.decisions.display())),
            );
        }
        let counts = score_counts(&decisions, &labels)?;
        group(
            &mut groups,
            p.category.map_or("overall", |c| c.as_str()),
            counts,
        );
        inputs.extend([p.decisions.clone(), p.labels.clone()]);
    }
    let rows = report_rows(&groups, cfg)?;
    write_csv(&rows, out)?;
    print_table(&rows);
    Ok(Outcome {
        inputs,
        outputs: vec![out.to_path_buf()],
        results: report_results(&rows),
    })
}

pub fn check_thresholds(thresholds: &[u32]) -> Result<(), Usage> {
    if thresholds.is_empty() {
        return Err(Usage("--thresholds needs at least one value".into()));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Usage(format!(
            "--thresholds must be strictly ascending, got {thresholds:?}"
        )));
    }
    Ok(())
}

fn sweep(
    cfg: &RunConfig,
    target: &Path,
    interferer: &Path,
    thresholds: &[u32],
    tir_db: f64,
    out: &Path,
) -> anyhow::Result<Outcome> {
    check_thresholds(thresholds)?;
    let m = mix_at_tir(&load_8k(target)?, &load_8k(interferer)?, tir_db)?;
    let rows = threshold_sweep(&m, &cfg.detector, &cfg.labels, thresholds)?;
    write_csv(&rows, out)?;
    println!("{:>9} {:>7} {:>9}", "threshold", "hit %", "FA %");
    for r in &rows {
        println!(
            "{:>9} {:>7.2} {:>9.2}",
            r.threshold, r.hit_pct, r.false_alarm_pct
        );
    }
    Ok(Outcome {
        inputs: vec![target.to_path_buf(), interferer.to_path_buf()],
        outputs: vec![out.to_path_buf()],
        results: Map::new(),
    })
}

#[derive(Serialize)]
struct PairRow {
    target: String,
    interferer: String,
    category: Category,
}

impl Tabular for PairRow {
    const HEADER: &'static [&'static str] = &["target", "interferer", "category"];
}

fn synth(out_dir: &Path, duration_secs: f64) -> anyhow::Result<Outcome> {
    if !(duration_secs > 0.0 && duration_secs.is_finite()) {
        return Err(Usage(format!("duration must be positive, got {duration_secs}")).into());
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let corpus = SyntheticCorpus {
        duration_secs,
        ..SyntheticCorpus::standard()
    };
    let mut outputs = Vec::new();
    for (i, t) in corpus.talkers.iter().enumerate() {
        let path = out_dir.join(format!("{}.wav", t.id));
        write_wav(&corpus.utterance(i)?, &path, WavFormat::Pcm16)?;
        outputs.push(path);
    }
    let pairs: Vec<PairRow> = corpus
        .pairings()
        .into_iter()
        .map(|p| PairRow {
            target: format!("{}.wav", corpus.talkers[p.target].id),
            interferer: format!("{}.wav", corpus.talkers[p.interferer].id),
            category: p.category,
        })
        .collect();
    let list = out_dir.join("pairs.csv");
    write_csv(&pairs, &list)?;
    outputs.push(list);
    println!(
        "wrote {} talkers and {} pairings to {}",
        corpus.talkers.len(),
        pairs.len(),
        out_dir.display()
    );
    Ok(Outcome {
        inputs: Vec::new(),
        outputs,
        results: Map::new(),
    })
}

fn corpus(cfg: &RunConfig, out: &Path, tir_db: f64) -> anyhow::Result<Outcome> {
    let mut groups: Vec<(String, EvalCounts)> = Category::ALL
        .iter()
        .map(|c| (c.to_string(), EvalCounts::default()))
        .collect();
    for (p, m) in SyntheticCorpus::standard().mixtures(tir_db)? {
        let labels = label_frames(&m, &cfg.detector, &cfg.labels)?;
        let decisions = classify_signal(&m.mixed, &cfg.detector)?;
        group(
            &mut groups,
            p.category.as_str(),
            score_counts(&decisions, &labels)?,
        );
    }
    let rows = report_rows(&groups, cfg)?;
    write_csv(&rows, out)?;
    print_table(&rows);
    Ok(Outcome {
        inputs: Vec::new(),
        outputs: vec![out.to_path_buf()],
        results: report_results(&rows),
    })
}
