//! Batch execution: sample, check, record, summarize.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use schatten_core::verify::SideCheck;
use schatten_core::{check, CheckerId, Context, Instance, ShiftGrid, Tolerance};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::rng::trial_seed;
use crate::sample::{sample_instance, SampleSpec};

/// Trials handed to the worker pool at a time; records are written after each batch.
const BATCH: usize = 2048;

/// One line of the report stream. Every field is always present; numbers
/// are `null` when the trial errored, and `instance` is filled only when
/// the trial did not pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub checker_id: String,
    pub trial: u64,
    pub seed: u64,
    pub params: BTreeMap<String, Value>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub gap: Option<f64>,
    pub relative_margin: Option<f64>,
    /// The inequality alone.
    pub pass: bool,
    /// `pass` and every side check.
    pub verdict: bool,
    pub checks: Vec<SideCheck>,
    pub notes: String,
    pub error: Option<String>,
    pub wall_ms: f64,
    pub digest: Option<String>,
    pub sampler_attempts: usize,
    pub sample: SampleSpec,
    pub tolerance: Tolerance,
    pub grid: ShiftGrid,
    pub instance: Option<Instance>,
}

impl TrialRecord {
    pub fn checker(&self) -> CliResult<CheckerId> {
        self.checker_id.parse().map_err(|_| CliError::Record(format!("unknown checker `{}`", self.checker_id)))
    }

    pub fn context(&self) -> Context {
        Context { tolerance: self.tolerance, grid: self.grid.clone(), seed: self.seed }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_line(line: &str) -> CliResult<Self> {
        serde_json::from_str(line).map_err(|e| CliError::Record(e.to_string()))
    }
}

/// Everything needed to run one trial.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub checker: CheckerId,
    pub trial: u64,
    pub seed: u64,
    pub sample: SampleSpec,
    pub tolerance: Tolerance,
    pub grid: ShiftGrid,
    pub timing: bool,
}

/// Check `instance` (or sample it from the seed) and build the record.
pub fn run_trial(setup: &TrialSetup, instance: Option<Instance>) -> TrialRecord {
    let start = Instant::now();
    let ctx = Context { tolerance: setup.tolerance, grid: setup.grid.clone(), seed: setup.seed };
    let (sampled, attempts) = match instance {
        Some(inst) => (Ok(inst), 0),
        None => match sample_instance(setup.checker, &setup.sample, setup.seed) {
            Ok(s) => (Ok(s.instance), s.attempts),
            Err(e) => (Err(e), 0),
        },
    };
    let digest = sampled.as_ref().ok().map(crate::sample::digest);
    let outcome = sampled.and_then(|inst| Ok((check(setup.checker, &inst, &ctx)?, inst)));
    let wall_ms = if setup.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
    let mut rec = TrialRecord {
        checker_id: setup.checker.to_string(),
        trial: setup.trial,
        seed: setup.seed,
        params: BTreeMap::new(),
        lhs: None,
        rhs: None,
        gap: None,
        relative_margin: None,
        pass: false,
        verdict: false,
        checks: Vec::new(),
        notes: String::new(),
        error: None,
        wall_ms,
        digest,
        sampler_attempts: attempts,
        sample: setup.sample.clone(),
        tolerance: setup.tolerance,
        grid: setup.grid.clone(),
        instance: None,
    };
    match outcome {
        Ok((report, inst)) => {
            rec.verdict = report.verdict();
            rec.params = report.params;
            rec.lhs = Some(report.lhs);
            rec.rhs = Some(report.rhs);
            rec.gap = Some(report.gap);
            rec.relative_margin = Some(report.relative_margin);
            rec.pass = report.pass;
            rec.checks = report.checks;
            rec.notes = report.notes;
            if !rec.verdict {
                rec.instance = Some(inst);
            }
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn setups(config: &RunConfig) -> Vec<TrialSetup> {
    let mut out = Vec::with_capacity(config.checkers.len() * config.trials);
    for &checker in &config.checkers {
        let name = checker.to_string();
        for trial in 0..config.trials as u64 {
            out.push(TrialSetup {
                checker,
                trial,
                seed: trial_seed(config.seed, &name, trial),
                sample: config.sample.clone(),
                tolerance: config.tolerance,
                grid: config.grid.clone(),
                timing: config.timing,
            });
        }
    }
    out
}

fn pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::ConfigInvalid(format!("worker pool: {e}")))
}

/// Run every trial, streaming records to `sink` in (checker, trial) order.
pub fn run(config: &RunConfig, sink: &mut dyn Write) -> CliResult<Summary> {
    let all = setups(config);
    let workers = pool(config.jobs)?;
    let mut summary = Summary::new(&config.checkers);
    for batch in all.chunks(BATCH) {
        let records: Vec<TrialRecord> = workers.install(|| batch.par_iter().map(|s| run_trial(s, None)).collect());
        for rec in &records {
            writeln!(sink, "{}", rec.to_line()).map_err(|e| CliError::IoFailure { path: "report stream".into(), source: e })?;
            summary.add(rec);
        }
    }
    sink.flush().map_err(|e| CliError::IoFailure { path: "report stream".into(), source: e })?;
    Ok(summary)
}

/// Collect the records in memory instead of streaming them.
pub fn run_collect(config: &RunConfig) -> CliResult<(Vec<TrialRecord>, Summary)> {
    let mut buf = Vec::new();
    let summary = run(config, &mut buf)?;
    let text = String::from_utf8(buf).expect("records are utf-8");
    let records = text.lines().map(TrialRecord::from_line).collect::<CliResult<Vec<_>>>()?;
    Ok((records, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckerSummary {
    pub checker_id: String,
    pub trials: usize,
    pub passed: usize,
    pub errors: usize,
    pub min_relative_margin: f64,
    pub max_wall_ms: f64,
    pub sampler_attempts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub rows: Vec<CheckerSummary>,
}

impl Summary {
    fn new(checkers: &[CheckerId]) -> Self {
        Summary {
            rows: checkers
                .iter()
                .map(|id| CheckerSummary {
                    checker_id: id.to_string(),
                    trials: 0,
                    passed: 0,
                    errors: 0,
                    min_relative_margin: f64::INFINITY,
                    max_wall_ms: 0.0,
                    sampler_attempts: 0,
                })
                .collect(),
        }
    }

    fn add(&mut self, rec: &TrialRecord) {
        let Some(row) = self.rows.iter_mut().find(|r| r.checker_id == rec.checker_id) else { return };
        row.trials += 1;
        row.passed += usize::from(rec.verdict);
        row.errors += usize::from(rec.error.is_some());
        if let Some(m) = rec.relative_margin {
            row.min_relative_margin = row.min_relative_margin.min(m);
        }
        row.max_wall_ms = row.max_wall_ms.max(rec.wall_ms);
        row.sampler_attempts += rec.sampler_attempts;
    }

    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.errors == 0 && r.passed == r.trials)
    }

    pub fn total(&self) -> (usize, usize) {
        self.rows.iter().fold((0, 0), |(t, p), r| (t + r.trials, p + r.passed))
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<34} {:>7} {:>7} {:>6} {:>12} {:>10}", "checker", "trials", "pass", "errors", "min margin", "max ms")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<34} {:>7} {:>7} {:>6} {:>12.3e} {:>10.2}",
                r.checker_id, r.trials, r.passed, r.errors, r.min_relative_margin, r.max_wall_ms
            )?;
        }
        let (t, p) = self.total();
        write!(f, "total: {p}/{t} passed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use schatten_core::verify::Form;

    fn config(checkers: Vec<CheckerId>, trials: usize, seed: u64) -> RunConfig {
        RunConfig { checkers, trials, seed, timing: false, ..RunConfig::default() }
    }

    #[test]
    fn single_trial_run() {
        let (records, summary) = run_collect(&config(vec![CheckerId::Weighted(Form::Plain)], 1, 7)).unwrap();
        assert_eq!(records.len(), 1);
        assert!(records[0].pass && records[0].verdict && summary.all_passed());
        assert!(records[0].instance.is_none());
    }

    #[test]
    fn order_is_independent_of_workers() {
        let mut cfg = config(vec![CheckerId::Monotonicity, CheckerId::RankOne(Form::Sup)], 20, 3);
        cfg.jobs = Some(1);
        let (a, _) = run_collect(&cfg).unwrap();
        cfg.jobs = Some(4);
        let (b, _) = run_collect(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_are_recorded_with_null_numbers() {
        let mut cfg = config(vec![CheckerId::ReweightedPower(Form::Plain)], 1, 0);
        cfg.sample.q = Some(schatten_core::Exponent::ONE);
        cfg.sample.r = Some(schatten_core::Exponent::Finite(2.0));
        let (records, summary) = run_collect(&cfg).unwrap();
        assert!(records[0].error.is_some() && records[0].lhs.is_none() && !records[0].pass);
        assert!(!summary.all_passed());
        let line = records[0].to_line();
        for key in ["\"lhs\":null", "\"instance\":null", "\"relative_margin\":null"] {
            assert!(line.contains(key), "{line}");
        }
    }

    #[test]
    fn summary_lists_every_checker() {
        let (_, summary) = run_collect(&config(CheckerId::all(), 2, 1)).unwrap();
        assert_eq!(summary.rows.len(), CheckerId::all().len());
        assert!(summary.all_passed(), "{summary}");
        assert!(summary.to_string().contains("hyper-dominance.mixed-left"));
    }
}
