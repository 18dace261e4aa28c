//! Checkers that evaluate both sides of a norm inequality on a concrete
//! instance and report the verdict.

mod hyper;
mod monotonicity;
mod quadruple;
mod rank_one;
mod weighted;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::norm::Exponent;
use crate::spectral::{default_tol, frac_power};
use crate::tolerance::Tolerance;

pub use hyper::{check_hyper_dominance, check_hyper_transformer, DominanceInstance, DominanceKind, HyperInstance};
pub use monotonicity::{check_double_monotonicity, MonotonicityInstance};
pub use quadruple::{check_quadruple, Endpoint, QuadrupleForm, QuadrupleInstance, QuadrupleVariant, Shifts};
pub use rank_one::{check_rank_one, check_rank_one_power, RankOneInstance};
pub use weighted::{
    check_exponent_case, check_reweighted, check_reweighted_power, check_weighted, ExponentCase, Form, PairInstance,
};

/// Tolerance on the exponent coupling `1/(2q) + 1/(2r) = 1/s`.
pub const TRIPLE_TOL: f64 = 1e-12;
/// Agreement required between two routes to the same quantity.
pub const CROSS_TOL: f64 = 1e-12;

/// Exponents `q, r ∈ [1, ∞]` and finite `s` with `1/(2q) + 1/(2r) = 1/s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripleRepr", into = "TripleRepr")]
pub struct SchattenTriple {
    q: Exponent,
    r: Exponent,
    s: f64,
}

#[derive(Serialize, Deserialize)]
struct TripleRepr {
    q: Exponent,
    r: Exponent,
    s: f64,
}

impl From<SchattenTriple> for TripleRepr {
    fn from(t: SchattenTriple) -> Self {
        TripleRepr { q: t.q, r: t.r, s: t.s }
    }
}

impl TryFrom<TripleRepr> for SchattenTriple {
    type Error = Error;
    fn try_from(t: TripleRepr) -> Result<Self> {
        SchattenTriple::new(t.q, t.r, t.s)
    }
}

impl SchattenTriple {
    pub fn new(q: Exponent, r: Exponent, s: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 1.0) {
            return Err(Error::BadTriple(format!("s = {s} must be finite and at least 1")));
        }
        let defect = 0.5 * q.recip() + 0.5 * r.recip() - 1.0 / s;
        if defect.abs() > TRIPLE_TOL {
            return Err(Error::BadTriple(format!("1/(2q) + 1/(2r) - 1/s = {defect:e} for q = {q}, r = {r}, s = {s}")));
        }
        Ok(SchattenTriple { q, r, s })
    }

    /// Solve for `s`; `q = r = ∞` is rejected.
    pub fn from_q_r(q: Exponent, r: Exponent) -> Result<Self> {
        let inv = 0.5 * q.recip() + 0.5 * r.recip();
        if inv == 0.0 {
            return Err(Error::BadTriple("q and r cannot both be infinite".into()));
        }
        Self::new(q, r, 1.0 / inv)
    }

    pub fn from_q_s(q: Exponent, s: f64) -> Result<Self> {
        let inv_2r = 1.0 / s - 0.5 * q.recip();
        Self::new(q, Self::solve(inv_2r, "r")?, s)
    }

    pub fn from_r_s(r: Exponent, s: f64) -> Result<Self> {
        let inv_2q = 1.0 / s - 0.5 * r.recip();
        Self::new(Self::solve(inv_2q, "q")?, r, s)
    }

    fn solve(inv_half: f64, name: &str) -> Result<Exponent> {
        if inv_half.abs() <= TRIPLE_TOL {
            return Ok(Exponent::Infinity);
        }
        if !(inv_half > 0.0 && inv_half <= 0.5 + TRIPLE_TOL) {
            return Err(Error::BadTriple(format!("no {name} in [1, ∞] solves the constraint")));
        }
        Ok(Exponent::Finite((0.5 / inv_half).max(1.0)))
    }

    pub fn q(&self) -> Exponent {
        self.q
    }

    pub fn r(&self) -> Exponent {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn s_exponent(&self) -> Exponent {
        Exponent::Finite(self.s)
    }

    /// `1/(2q)`.
    pub fn half_inv_q(&self) -> f64 {
        0.5 * self.q.recip()
    }

    /// `1/(2r)`.
    pub fn half_inv_r(&self) -> f64 {
        0.5 * self.r.recip()
    }

    fn insert_params(&self, params: &mut BTreeMap<String, Value>) {
        params.insert("q".into(), json(self.q));
        params.insert("r".into(), json(self.r));
        params.insert("s".into(), json(self.s));
    }
}

impl fmt::Display for SchattenTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q={}, r={}, s={})", self.q, self.r, self.s)
    }
}

/// Shifts used to approximate a supremum over `η, ζ > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftGrid(Vec<f64>);

impl Default for ShiftGrid {
    fn default() -> Self {
        ShiftGrid(vec![1e2, 1.0, 1e-2, 1e-4, 1e-6])
    }
}

impl ShiftGrid {
    pub fn new(mut shifts: Vec<f64>) -> Result<Self> {
        if shifts.is_empty() || shifts.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidData(format!("shift grid must be nonempty and positive: {shifts:?}")));
        }
        shifts.sort_by(|a, b| b.total_cmp(a));
        shifts.dedup();
        Ok(ShiftGrid(shifts))
    }

    /// Shifts in decreasing order.
    pub fn descending(&self) -> &[f64] {
        &self.0
    }
}

impl FromStr for ShiftGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidData(format!("bad shift `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

/// Settings shared by every checker call.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Context {
    pub tolerance: Tolerance,
    pub grid: ShiftGrid,
    pub seed: u64,
}

/// A secondary assertion attached to a report, such as agreement of two
/// computation routes or the monotone trend along the shift grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideCheck {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub ok: bool,
}

/// One trial's verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub checker_id: String,
    pub params: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub relative_margin: f64,
    pub pass: bool,
    pub seed: u64,
    pub notes: String,
    #[serde(default)]
    pub checks: Vec<SideCheck>,
}

impl InequalityReport {
    pub fn new(checker_id: impl Into<String>, lhs: f64, rhs: f64, ctx: &Context) -> Self {
        let gap = rhs - lhs;
        InequalityReport {
            checker_id: checker_id.into(),
            params: BTreeMap::new(),
            lhs,
            rhs,
            gap,
            relative_margin: gap / rhs.max(ctx.tolerance.abs),
            pass: ctx.tolerance.passes(lhs, rhs),
            seed: ctx.seed,
            notes: String::new(),
            checks: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.into(), json(value));
        self
    }

    pub fn note(mut self, text: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text.as_ref());
        self
    }

    /// Record that `a` and `b` agree to `rel` relative precision.
    pub fn agreement(mut self, name: &str, a: f64, b: f64, rel: f64) -> Self {
        let value = (a - b).abs() / a.abs().max(b.abs()).max(1.0);
        self.checks.push(SideCheck { name: name.into(), value, limit: rel, ok: value <= rel });
        self
    }

    pub fn side_check(mut self, check: SideCheck) -> Self {
        self.checks.push(check);
        self
    }

    /// The inequality holds and every side check is satisfied.
    pub fn verdict(&self) -> bool {
        self.pass && self.checks.iter().all(|c| c.ok)
    }
}

fn json(value: impl Serialize) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

/// `P^t` for a PSD Gram-type matrix with the scale-aware default tolerance.
pub(crate) fn psd_pow(p: &CMatrix, t: f64) -> Result<CMatrix> {
    frac_power(p, t, default_tol(p))
}

/// Every checker, by identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckerId {
    Monotonicity,
    Quadruple(QuadrupleVariant),
    Weighted(Form),
    ExponentCase(ExponentCase),
    Reweighted(Form),
    ReweightedPower(Form),
    RankOne(Form),
    RankOnePower(Form),
    HyperTransformer(Form),
    HyperDominance(DominanceKind),
}

impl CheckerId {
    pub fn all() -> Vec<CheckerId> {
        let mut out = vec![CheckerId::Monotonicity];
        out.extend(QuadrupleVariant::all().into_iter().map(CheckerId::Quadruple));
        let forms = [Form::Plain, Form::Sup];
        out.extend(forms.map(CheckerId::Weighted));
        out.extend(ExponentCase::ALL.map(CheckerId::ExponentCase));
        out.extend(forms.map(CheckerId::Reweighted));
        out.extend(forms.map(CheckerId::ReweightedPower));
        out.extend(forms.map(CheckerId::RankOne));
        out.extend(forms.map(CheckerId::RankOnePower));
        out.extend(forms.map(CheckerId::HyperTransformer));
        out.extend(DominanceKind::ALL.map(CheckerId::HyperDominance));
        out
    }

    /// The instance shape this checker consumes.
    pub fn instance_kind(self) -> InstanceKind {
        match self {
            CheckerId::Monotonicity => InstanceKind::Monotonicity,
            CheckerId::Quadruple(_) => InstanceKind::Quadruple,
            CheckerId::Weighted(_) | CheckerId::Reweighted(_) | CheckerId::ReweightedPower(_) => InstanceKind::Pairs,
            CheckerId::ExponentCase(_) => InstanceKind::Pairs,
            CheckerId::RankOne(_) | CheckerId::RankOnePower(_) => InstanceKind::RankOne,
            CheckerId::HyperTransformer(_) => InstanceKind::Hyper,
            CheckerId::HyperDominance(_) => InstanceKind::Dominance,
        }
    }
}

impl fmt::Display for CheckerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckerId::Monotonicity => write!(f, "monotonicity"),
            CheckerId::Quadruple(v) => write!(f, "quadruple.{v}"),
            CheckerId::Weighted(form) => write!(f, "weighted.{form}"),
            CheckerId::ExponentCase(c) => write!(f, "exponent-case.{c}"),
            CheckerId::Reweighted(form) => write!(f, "reweighted.{form}"),
            CheckerId::ReweightedPower(form) => write!(f, "reweighted-power.{form}"),
            CheckerId::RankOne(form) => write!(f, "rank-one.{form}"),
            CheckerId::RankOnePower(form) => write!(f, "rank-one-power.{form}"),
            CheckerId::HyperTransformer(form) => write!(f, "hyper-transformer.{form}"),
            CheckerId::HyperDominance(k) => write!(f, "hyper-dominance.{k}"),
        }
    }
}

impl FromStr for CheckerId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckerId::all()
            .into_iter()
            .find(|id| id.to_string() == s)
            .ok_or_else(|| Error::VariantUnknown(s.to_string()))
    }
}

impl Serialize for CheckerId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CheckerId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Monotonicity,
    Quadruple,
    Pairs,
    RankOne,
    Hyper,
    Dominance,
}

/// Any checker input, tagged by shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Instance {
    Monotonicity(MonotonicityInstance),
    Quadruple(QuadrupleInstance),
    Pairs(PairInstance),
    RankOne(RankOneInstance),
    Hyper(HyperInstance),
    Dominance(DominanceInstance),
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Monotonicity(_) => InstanceKind::Monotonicity,
            Instance::Quadruple(_) => InstanceKind::Quadruple,
            Instance::Pairs(_) => InstanceKind::Pairs,
            Instance::RankOne(_) => InstanceKind::RankOne,
            Instance::Hyper(_) => InstanceKind::Hyper,
            Instance::Dominance(_) => InstanceKind::Dominance,
        }
    }
}

/// Run `checker` on `instance`.
pub fn check(checker: CheckerId, instance: &Instance, ctx: &Context) -> Result<InequalityReport> {
    let report = match (checker, instance) {
        (CheckerId::Monotonicity, Instance::Monotonicity(i)) => check_double_monotonicity(i, ctx),
        (CheckerId::Quadruple(v), Instance::Quadruple(i)) => check_quadruple(v, i, ctx),
        (CheckerId::Weighted(form), Instance::Pairs(i)) => check_weighted(form, i, ctx),
        (CheckerId::ExponentCase(case), Instance::Pairs(i)) => check_exponent_case(case, i, ctx),
        (CheckerId::Reweighted(form), Instance::Pairs(i)) => check_reweighted(form, i, ctx),
        (CheckerId::ReweightedPower(form), Instance::Pairs(i)) => check_reweighted_power(form, i, ctx),
        (CheckerId::RankOne(form), Instance::RankOne(i)) => check_rank_one(form, i, ctx),
        (CheckerId::RankOnePower(form), Instance::RankOne(i)) => check_rank_one_power(form, i, ctx),
        (CheckerId::HyperTransformer(form), Instance::Hyper(i)) => check_hyper_transformer(form, i, ctx),
        (CheckerId::HyperDominance(kind), Instance::Dominance(i)) => check_hyper_dominance(kind, i, ctx),
        (id, inst) => {
            return Err(Error::InvalidData(format!(
                "checker {id} expects a {:?} instance, got {:?}",
                id.instance_kind(),
                inst.kind()
            )))
        }
    }?;
    Ok(report)
}
