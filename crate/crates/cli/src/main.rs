use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schatten_cli::config::{Scalar, Selection, Settings};
use schatten_cli::replay::{read_records, replay};
use schatten_cli::{matfile, run, sample_instance, CliError, CliResult, RunConfig};
use schatten_core::{schatten_norm, CheckerId, Exponent};

#[derive(Parser)]
#[command(name = "schatten", version, about = "Seeded numerical checks of weighted Schatten-norm inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of trials and stream one JSON record per trial.
    Verify(VerifyArgs),
    /// Re-run recorded trials and compare lhs/rhs bit for bit.
    Replay {
        /// Record stream written by `verify`.
        records: PathBuf,
        /// Replay only the record on this (0-based) line.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Print one sampled instance as JSON without checking it.
    Sample {
        #[arg(long)]
        checker: String,
        #[command(flatten)]
        common: SamplingArgs,
    },
    /// Schatten norm of a matrix file.
    Norm {
        file: PathBuf,
        /// Exponent, `inf` for the operator norm.
        #[arg(long, default_value = "2")]
        s: String,
    },
}

#[derive(Args, Default)]
struct SamplingArgs {
    /// Dimension or inclusive range, e.g. `4` or `2-6`.
    #[arg(long)]
    dim: Option<String>,
    /// Family length or inclusive range.
    #[arg(long)]
    len: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    r: Option<String>,
    /// Hypercontraction orders `N` or `N,M`.
    #[arg(long)]
    orders: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// TOML file of settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `all`, checker ids, or id prefixes, comma separated.
    #[arg(long)]
    checker: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[command(flatten)]
    common: SamplingArgs,
    #[arg(long = "tol-rel")]
    tol_rel: Option<f64>,
    #[arg(long = "tol-abs")]
    tol_abs: Option<f64>,
    /// Comma-separated positive shifts for the sup forms.
    #[arg(long)]
    grid: Option<String>,
    /// Record file; records go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Write zero wall times so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

fn text(v: Option<String>) -> Option<Scalar> {
    v.map(Scalar::Text)
}

impl SamplingArgs {
    fn settings(self) -> Settings {
        Settings {
            dim: text(self.dim),
            len: text(self.len),
            seed: self.seed,
            q: text(self.q),
            r: text(self.r),
            s: text(self.s),
            orders: text(self.orders),
            ..Settings::default()
        }
    }
}

fn verify(args: VerifyArgs) -> CliResult<bool> {
    let file = match &args.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let flags = Settings {
        checker: args.checker.map(Selection::One),
        trials: args.trials,
        tol_rel: args.tol_rel,
        tol_abs: args.tol_abs,
        grid: text(args.grid),
        out: args.out,
        jobs: args.jobs,
        timing: args.no_timing.then_some(false),
        ..args.common.settings()
    };
    let config = RunConfig::from_settings(&file.overlay(flags))?;
    let summary = match &config.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::io(path, e))?;
            run(&config, &mut BufWriter::new(f))?
        }
        None => run(&config, &mut BufWriter::new(io::stdout().lock()))?,
    };
    eprintln!("{summary}");
    Ok(summary.all_passed())
}

fn replay_cmd(path: PathBuf, index: Option<usize>) -> CliResult<bool> {
    let records = read_records(&path)?;
    let chosen: Vec<_> = match index {
        Some(i) => vec![records.get(i).ok_or_else(|| CliError::Record(format!("no record at line {i}")))?.clone()],
        None => records,
    };
    let mut all_identical = true;
    let mut out = io::stdout().lock();
    for rec in &chosen {
        let outcome = replay(rec)?;
        all_identical &= outcome.identical;
        let _ = writeln!(out, "{}", serde_json::to_string(&outcome).expect("outcomes serialize"));
    }
    eprintln!("replayed {} record(s); {}", chosen.len(), if all_identical { "all identical" } else { "MISMATCH" });
    Ok(all_identical)
}

fn sample_cmd(checker: String, common: SamplingArgs) -> CliResult<bool> {
    let id: CheckerId = checker.parse().map_err(|_| CliError::ConfigInvalid(format!("unknown checker `{checker}`")))?;
    let config = RunConfig::from_settings(&common.settings())?;
    let seed = config.seed;
    let sampled = sample_instance(id, &config.sample, seed)?;
    let value = serde_json::json!({
        "checker_id": id.to_string(),
        "seed": seed,
        "digest": sampled.digest,
        "sampler_attempts": sampled.attempts,
        "instance": sampled.instance,
    });
    let _ = writeln!(io::stdout().lock(), "{value}");
    Ok(true)
}

fn norm_cmd(file: PathBuf, s: String) -> CliResult<bool> {
    let m = matfile::read(&file)?;
    let s: Exponent = s.parse()?;
    let norm = schatten_norm(&m, s)?;
    let _ = writeln!(io::stdout().lock(), "{norm:e}");
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => verify(args),
        Command::Replay { records, index } => replay_cmd(records, index),
        Command::Sample { checker, common } => sample_cmd(checker, common),
        Command::Norm { file, s } => norm_cmd(file, s),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
