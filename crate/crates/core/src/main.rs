use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tracing_subscriber::EnvFilter;

use graphgen::rules::{estimate_random_valid_prob, RuleKind, SizePreset};
use graphgen::runner::{execute, ReportTable, RuleSetting, RunConfig};

#[derive(Parser)]
#[command(name = "graphgen", version, about = "Graph generation benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment against a live endpoint.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Output directory; overrides the configured one.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Endpoint profile for settings that name none.
        #[arg(long)]
        profile: Option<String>,
    },
    /// Re-run an experiment from a transcript file without network access.
    Replay {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        transcripts: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate how often a random graph satisfies a rule.
    Calibrate {
        /// Rule kind; every kind when omitted.
        #[arg(long)]
        rule: Option<RuleKind>,
        #[arg(long, value_enum, default_value = "medium")]
        preset: Preset,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a saved report.json as text or CSV.
    Report {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Small,
    Medium,
    Large,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type BoxError = Box<dyn std::error::Error>;

fn dispatch(command: Command) -> Result<(), BoxError> {
    match command {
        Command::Run { config, seed, trials, out, profile } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            let out = out
                .or_else(|| cfg.output_dir.as_ref().map(|d| cfg.resolve_path(d)))
                .unwrap_or_else(|| PathBuf::from("out"));
            let output = execute(&cfg, profile.as_deref(), &out)?;
            print!("{}", output.table.to_text());
            eprintln!("wrote {}", out.display());
        }
        Command::Replay { config, transcripts, out } => {
            let mut cfg = RunConfig::load(&config)?;
            cfg.replay = Some(std::path::absolute(&transcripts)?);
            let output = execute(&cfg, None, &out)?;
            print!("{}", output.table.to_text());
        }
        Command::Calibrate { rule, preset, n, m, k, samples, seed } => {
            let preset = match preset {
                Preset::Small => SizePreset::Small,
                Preset::Medium => SizePreset::Medium,
                Preset::Large => SizePreset::Large,
            };
            let kinds = rule.map_or_else(|| RuleKind::ALL.to_vec(), |r| vec![r]);
            for kind in kinds {
                let setting = RuleSetting { kind, preset: Some(preset), n, m, k, part_sizes: None };
                let spec = setting.resolve()?;
                let est = estimate_random_valid_prob(&spec, samples, seed)?;
                println!(
                    "{:<36} {:>8.4} ± {:.4}  ({} of {})",
                    spec.label(),
                    est.p,
                    est.se,
                    est.valid,
                    est.samples
                );
            }
        }
        Command::Report { input, format } => {
            let table: ReportTable = serde_json::from_str(&std::fs::read_to_string(&input)?)?;
            match format {
                Format::Text => print!("{}", table.to_text()),
                Format::Csv => print!("{}", table.to_csv()),
            }
        }
    }
    Ok(())
}
