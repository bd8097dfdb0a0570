use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use usable_speech::Category;

mod config;
mod exit;
mod manifest;
mod run;

use config::{ConfigArgs, RunConfig};
use manifest::RunManifest;
use run::{EvalPair, Invocation};

/// Usable speech detection for two-talker recordings.
#[derive(Debug, Parser)]
#[command(name = "usable-speech", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify each frame of a WAV file (8 or 16 kHz)
    Detect {
        input: PathBuf,
        /// Decisions CSV
        #[arg(short, long)]
        out: PathBuf,
        /// Per-frame, per-scale diagnostics
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Mix two talkers at a target-to-interferer ratio and label each frame
    Mix {
        target: PathBuf,
        interferer: PathBuf,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        tir_db: f64,
        /// Writes PREFIX_mixed.wav, _target.wav, _interferer.wav, _labels.csv
        #[arg(long)]
        out_prefix: PathBuf,
        #[arg(long)]
        category: Option<Category>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Score decisions against labels; repeat the flags for several mixtures
    Evaluate {
        #[arg(long, required = true)]
        decisions: Vec<PathBuf>,
        #[arg(long, required = true)]
        labels: Vec<PathBuf>,
        /// One per pair, if given at all
        #[arg(long)]
        category: Vec<Category>,
        /// Report CSV
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Hit and false-alarm rates over a range of lag thresholds
    Sweep {
        target: PathBuf,
        interferer: PathBuf,
        /// Strictly ascending, comma separated
        #[arg(long, value_delimiter = ',', default_value = "0,2,4,8,12,16")]
        thresholds: Vec<u32>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        tir_db: f64,
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Write the synthetic talkers and their pairing list
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 6.0)]
        duration_secs: f64,
    },
    /// Evaluate the detector on the synthetic corpus
    Corpus {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        tir_db: f64,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Re-run the command recorded in a manifest
    Replay {
        manifest: PathBuf,
        /// Write outputs here instead of their recorded locations
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn plan(command: Command) -> anyhow::Result<(Invocation, RunConfig)> {
    Ok(match command {
        Command::Detect {
            input,
            out,
            trace,
            config,
        } => (Invocation::Detect { input, out, trace }, config.resolve()?),
        Command::Mix {
            target,
            interferer,
            tir_db,
            out_prefix,
            category,
            config,
        } => (
            Invocation::Mix {
                target,
                interferer,
                tir_db,
                out_prefix,
                category,
            },
            config.resolve()?,
        ),
        Command::Evaluate {
            decisions,
            labels,
            category,
            out,
            config,
        } => {
            if decisions.len() != labels.len() {
                return Err(exit::Usage(format!(
                    "{} --decisions but {} --labels",
                    decisions.len(),
                    labels.len()
                ))
                .into());
            }
            if !category.is_empty() && category.len() != decisions.len() {
                return Err(
                    exit::Usage("give --category once per pair or not at all".into()).into(),
                );
            }
            let pairs = decisions
                .into_iter()
                .zip(labels)
                .enumerate()
                .map(|(i, (decisions, labels))| EvalPair {
                    decisions,
                    labels,
                    category: category.get(i).copied(),
                })
                .collect();
            (Invocation::Evaluate { pairs, out }, config.resolve()?)
        }
        Command::Sweep {
            target,
            interferer,
            thresholds,
            tir_db,
            out,
            config,
        } => {
            run::check_thresholds(&thresholds)?;
            (
                Invocation::Sweep {
                    target,
                    interferer,
                    thresholds,
                    tir_db,
                    out,
                },
                config.resolve()?,
            )
        }
        Command::Synth {
            out_dir,
            duration_secs,
        } => (
            Invocation::Synth {
                out_dir,
                duration_secs,
            },
            RunConfig::default(),
        ),
        Command::Corpus {
            out,
            tir_db,
            config,
        } => (Invocation::Corpus { out, tir_db }, config.resolve()?),
        Command::Replay { manifest, out_dir } => {
            let m = RunManifest::load(&manifest)?;
            let inv = match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(|e| usable_speech::Error::io(&dir, e))?;
                    m.invocation.redirected(&dir)
                }
                None => m.invocation,
            };
            (inv, m.config)
        }
    })
}

fn run(command: Command) -> anyhow::Result<()> {
    let start = Instant::now();
    let (invocation, config) = plan(command)?;
    let outcome = invocation.execute(&config)?;
    let path = invocation.manifest_path();
    RunManifest::new(invocation, config, outcome, start.elapsed().as_secs_f64()).save(&path)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code(&e) as u8)
        }
    }
}
