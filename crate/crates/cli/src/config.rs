//! Run configuration: a flat TOML key/value file, overridden by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use schatten_core::{CheckerId, Exponent, ShiftGrid, Tolerance};

use crate::error::{CliError, CliResult};
use crate::sample::{SampleSpec, Span};

/// A number or a string in the config file (`q = 2` and `q = "inf"` both work).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Int(v) => v.to_string(),
            Scalar::Num(v) => v.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }
}

/// Checker selection: `"all"`, a comma list, or a TOML array.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Selection {
    One(String),
    Many(Vec<String>),
}

/// Every setting, all optional. Used both for the file and for flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub checker: Option<Selection>,
    pub trials: Option<usize>,
    pub dim: Option<Scalar>,
    pub len: Option<Scalar>,
    pub seed: Option<u64>,
    pub q: Option<Scalar>,
    pub r: Option<Scalar>,
    pub s: Option<Scalar>,
    pub orders: Option<Scalar>,
    pub tol_rel: Option<f64>,
    pub tol_abs: Option<f64>,
    pub grid: Option<Scalar>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub timing: Option<bool>,
}

impl Settings {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::ConfigInvalid(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            checker: over.checker.or(self.checker),
            trials: over.trials.or(self.trials),
            dim: over.dim.or(self.dim),
            len: over.len.or(self.len),
            seed: over.seed.or(self.seed),
            q: over.q.or(self.q),
            r: over.r.or(self.r),
            s: over.s.or(self.s),
            orders: over.orders.or(self.orders),
            tol_rel: over.tol_rel.or(self.tol_rel),
            tol_abs: over.tol_abs.or(self.tol_abs),
            grid: over.grid.or(self.grid),
            out: over.out.or(self.out),
            jobs: over.jobs.or(self.jobs),
            timing: over.timing.or(self.timing),
        }
    }
}

/// A validated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub checkers: Vec<CheckerId>,
    pub trials: usize,
    pub sample: SampleSpec,
    pub tolerance: Tolerance,
    pub grid: ShiftGrid,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    /// Record wall times; off makes reruns byte-identical.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            checkers: CheckerId::all(),
            trials: 100,
            sample: SampleSpec::default(),
            tolerance: Tolerance::default(),
            grid: ShiftGrid::default(),
            seed: 0,
            out: None,
            jobs: None,
            timing: true,
        }
    }
}

fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::ConfigInvalid(msg.into()))
}

/// `all`, exact ids, or a family prefix such as `quadruple` or `rank-one`.
pub fn parse_selection(items: &[String]) -> CliResult<Vec<CheckerId>> {
    let all = CheckerId::all();
    let mut chosen = Vec::new();
    for item in items.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
        let matches: Vec<CheckerId> = if item == "all" {
            all.clone()
        } else {
            all.iter()
                .copied()
                .filter(|id| {
                    let name = id.to_string();
                    name == item || name.starts_with(&format!("{item}."))
                })
                .collect()
        };
        if matches.is_empty() {
            return invalid(format!("unknown checker `{item}`; known: {}", names(&all)));
        }
        for id in matches {
            if !chosen.contains(&id) {
                chosen.push(id);
            }
        }
    }
    if chosen.is_empty() {
        return invalid("no checker selected");
    }
    Ok(chosen)
}

fn names(ids: &[CheckerId]) -> String {
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

fn exponent(value: &Option<Scalar>, key: &str) -> CliResult<Option<Exponent>> {
    value
        .as_ref()
        .map(|v| v.text().parse::<Exponent>().map_err(|e| CliError::ConfigInvalid(format!("{key}: {e}"))))
        .transpose()
}

fn span(value: &Option<Scalar>, key: &str, default: Span) -> CliResult<Span> {
    match value {
        None => Ok(default),
        Some(v) => v.text().parse().map_err(|e| CliError::ConfigInvalid(format!("{key}: {e}"))),
    }
}

fn orders(value: &Option<Scalar>) -> CliResult<(usize, usize)> {
    let Some(v) = value else { return Ok((1, 1)) };
    let text = v.text();
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let parse = |t: &str| t.parse::<usize>().map_err(|_| CliError::ConfigInvalid(format!("orders: bad value `{text}`")));
    match parts.as_slice() {
        [n] => Ok((parse(n)?, parse(n)?)),
        [n, m] => Ok((parse(n)?, parse(m)?)),
        _ => invalid(format!("orders: expected `N` or `N,M`, got `{text}`")),
    }
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> CliResult<Self> {
        let d = RunConfig::default();
        let checkers = match &s.checker {
            None => d.checkers,
            Some(Selection::One(one)) => parse_selection(std::slice::from_ref(one))?,
            Some(Selection::Many(many)) => parse_selection(many)?,
        };
        let trials = s.trials.unwrap_or(d.trials);
        if trials < 1 {
            return invalid("trials must be at least 1");
        }
        let sample = SampleSpec {
            dims: span(&s.dim, "dim", d.sample.dims)?,
            lengths: span(&s.len, "len", d.sample.lengths)?,
            q: exponent(&s.q, "q")?,
            r: exponent(&s.r, "r")?,
            s: exponent(&s.s, "s")?,
            orders: orders(&s.orders)?,
        };
        sample.validate()?;
        let tolerance = Tolerance::new(s.tol_rel.unwrap_or(d.tolerance.rel), s.tol_abs.unwrap_or(d.tolerance.abs));
        if !(tolerance.rel >= 0.0 && tolerance.abs >= 0.0) {
            return invalid("tolerances must be nonnegative");
        }
        let grid = match &s.grid {
            None => d.grid,
            Some(g) => g.text().parse().map_err(|e: schatten_core::Error| CliError::ConfigInvalid(format!("grid: {e}")))?,
        };
        if s.jobs == Some(0) {
            return invalid("jobs must be at least 1");
        }
        Ok(RunConfig {
            checkers,
            trials,
            sample,
            tolerance,
            grid,
            seed: s.seed.unwrap_or(d.seed),
            out: s.out.clone(),
            jobs: s.jobs,
            timing: s.timing.unwrap_or(true),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use schatten_core::verify::Form;

    #[test]
    fn file_then_flags() {
        let file = Settings::from_toml(
            r#"
            checker = "weighted"
            trials = 50
            dim = "2-4"
            q = "inf"
            r = 3
            seed = 9
            grid = "1, 1e-3"
            "#,
        )
        .unwrap();
        let flags = Settings { trials: Some(7), r: Some(Scalar::Num(2.5)), ..Settings::default() };
        let cfg = RunConfig::from_settings(&file.overlay(flags)).unwrap();
        assert_eq!(cfg.checkers, vec![CheckerId::Weighted(Form::Plain), CheckerId::Weighted(Form::Sup)]);
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.sample.dims, Span::new(2, 4));
        assert_eq!(cfg.sample.q, Some(Exponent::Infinity));
        assert_eq!(cfg.sample.r, Some(Exponent::Finite(2.5)));
        assert_eq!(cfg.grid.descending(), &[1.0, 1e-3]);
    }

    #[test]
    fn selection_forms() {
        assert_eq!(parse_selection(&["all".into()]).unwrap().len(), CheckerId::all().len());
        assert_eq!(parse_selection(&["quadruple".into()]).unwrap().len(), 12);
        assert_eq!(parse_selection(&["monotonicity,monotonicity".into()]).unwrap().len(), 1);
        assert!(matches!(parse_selection(&["nope".into()]), Err(CliError::ConfigInvalid(_))));
    }

    #[test]
    fn rejects_invalid_settings() {
        let bad = [
            Settings { trials: Some(0), ..Settings::default() },
            Settings { dim: Some(Scalar::Text("1-3".into())), ..Settings::default() },
            Settings { q: Some(Scalar::Text("inf".into())), r: Some(Scalar::Text("inf".into())), ..Settings::default() },
            Settings { q: Some(Scalar::Num(0.5)), ..Settings::default() },
            Settings { jobs: Some(0), ..Settings::default() },
            Settings { orders: Some(Scalar::Text("0,1".into())), ..Settings::default() },
        ];
        for s in bad {
            assert!(matches!(RunConfig::from_settings(&s), Err(CliError::ConfigInvalid(_))), "{s:?}");
        }
        assert!(Settings::from_toml("unknown = 1").is_err());
    }
}
