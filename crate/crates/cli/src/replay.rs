//! Re-run recorded trials and compare results bit for bit.

use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::run::{run_trial, TrialRecord, TrialSetup};

#[derive(Debug, Clone, Serialize)]
pub struct ReplayOutcome {
    pub checker_id: String,
    pub trial: u64,
    pub seed: u64,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub identical: bool,
    /// Whether the instance came from the record rather than the seed.
    pub from_dump: bool,
}

fn same_bits(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x.to_bits() == y.to_bits(),
        (None, None) => true,
        _ => false,
    }
}

/// Uses the dumped instance when present, else resamples from the seed.
pub fn replay(record: &TrialRecord) -> CliResult<ReplayOutcome> {
    let setup = TrialSetup {
        checker: record.checker()?,
        trial: record.trial,
        seed: record.seed,
        sample: record.sample.clone(),
        tolerance: record.tolerance,
        grid: record.grid.clone(),
        timing: false,
    };
    let again = run_trial(&setup, record.instance.clone());
    let identical = same_bits(again.lhs, record.lhs)
        && same_bits(again.rhs, record.rhs)
        && again.pass == record.pass
        && again.verdict == record.verdict
        && again.digest == record.digest;
    Ok(ReplayOutcome {
        checker_id: record.checker_id.clone(),
        trial: record.trial,
        seed: record.seed,
        lhs: again.lhs,
        rhs: again.rhs,
        identical,
        from_dump: record.instance.is_some(),
    })
}

pub fn read_records(path: &Path) -> CliResult<Vec<TrialRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines().filter(|l| !l.trim().is_empty()).map(TrialRecord::from_line).collect()
}
