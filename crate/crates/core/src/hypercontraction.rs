//! Defect operators of contractions, (co)hypercontractivity and the
//! operator families built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{weighted_gram, Side, WeightedFamily};
use crate::matrix::CMatrix;
use crate::spectral::{frac_power, min_eigenvalue, op_norm};

/// Largest defect order; `binom(60, k)` still fits in 64 bits.
pub const MAX_ORDER: usize = 60;

/// `Hyper` uses `C*ᵏCᵏ`, `Cohyper` uses `CᵏC*ᵏ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectSide {
    Hyper,
    Cohyper,
}

impl DefectSide {
    pub fn name(self) -> &'static str {
        match self {
            DefectSide::Hyper => "hyper",
            DefectSide::Cohyper => "cohyper",
        }
    }
}

/// `Γ⁽ⁿ⁾ = Σₖ (−1)ᵏ binom(n,k) C*ᵏCᵏ` (or `CᵏC*ᵏ`).
#[derive(Debug, Clone)]
pub struct DefectOperator {
    pub order: usize,
    pub side: DefectSide,
    pub value: CMatrix,
    /// Largest entry magnitude among the summands `binom(n,k)·C*ᵏCᵏ`;
    /// a large ratio to `value` signals cancellation.
    pub max_summand: f64,
}

/// Exact binomial coefficient, `None` on 64-bit overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc·(n−i) is divisible by (i+1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// `binom(n+N−1, N−1)` for `n = 0..length`.
pub fn binomial_weights(order: usize, length: usize) -> Result<Vec<u64>> {
    if order == 0 {
        return Err(Error::InvalidData("binomial weight order must be at least 1".into()));
    }
    (0..length)
        .map(|n| binomial((n + order - 1) as u64, (order - 1) as u64).ok_or(Error::Overflow))
        .collect()
}

/// Binomial weights as floats, for use as family weights.
pub fn binomial_weights_f64(order: usize, length: usize) -> Result<Vec<f64>> {
    Ok(binomial_weights(order, length)?.into_iter().map(|w| w as f64).collect())
}

fn check_square(c: &CMatrix) -> Result<()> {
    if c.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { context: format!("expected a square matrix, got {:?}", c.shape()) })
    }
}

fn power_products(c: &CMatrix, n: usize, side: DefectSide) -> Vec<CMatrix> {
    let c_star = c.adjoint();
    let mut out = Vec::with_capacity(n + 1);
    let mut pow = CMatrix::identity(c.rows());
    let mut pow_star = CMatrix::identity(c.rows());
    for k in 0..=n {
        if k > 0 {
            pow = &pow * c;
            pow_star = &pow_star * &c_star;
        }
        out.push(match side {
            DefectSide::Hyper => &pow_star * &pow,
            DefectSide::Cohyper => &pow * &pow_star,
        });
    }
    out
}

pub fn defect(c: &CMatrix, n: usize, side: DefectSide) -> Result<DefectOperator> {
    check_square(c)?;
    if n == 0 || n > MAX_ORDER {
        return Err(Error::OrderTooLarge(n));
    }
    Ok(defects_up_to(c, n, side)?.pop().expect("n ≥ 1"))
}

/// `Γ⁽¹⁾, …, Γ⁽ⁿ⁾` sharing one table of powers.
pub fn defects_up_to(c: &CMatrix, n: usize, side: DefectSide) -> Result<Vec<DefectOperator>> {
    check_square(c)?;
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge(n));
    }
    let products = power_products(c, n, side);
    let mut out = Vec::with_capacity(n);
    for order in 1..=n {
        let mut value = CMatrix::zeros(c.rows(), c.rows());
        let mut max_summand: f64 = 0.0;
        for (k, p) in products.iter().enumerate().take(order + 1) {
            let b = binomial(order as u64, k as u64).ok_or(Error::Overflow)? as f64;
            let term = p.scale(if k % 2 == 0 { b } else { -b });
            max_summand = max_summand.max(term.max_abs());
            value = &value + &term;
        }
        out.push(DefectOperator { order, side, value: value.hermitian_part(), max_summand });
    }
    Ok(out)
}

/// Smallest eigenvalue of each defect `Γ⁽¹⁾..Γ⁽ᴺ⁾`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperReport {
    pub side: DefectSide,
    pub margins: Vec<f64>,
    pub holds: bool,
}

impl HyperReport {
    /// First order whose defect fails, with its margin.
    pub fn first_failure(&self, tol: f64) -> Option<(usize, f64)> {
        self.margins.iter().enumerate().find(|(_, m)| **m < -tol).map(|(i, m)| (i + 1, *m))
    }
}

/// `Γ⁽ⁿ⁾ ≥ −tol` for every `n = 1..=order`.
pub fn is_hypercontractive(c: &CMatrix, order: usize, side: DefectSide, tol: f64) -> Result<HyperReport> {
    if order == 0 {
        return Err(Error::InvalidData("hypercontractivity order must be at least 1".into()));
    }
    let margins = defects_up_to(c, order, side)?
        .iter()
        .map(|d| min_eigenvalue(&d.value, tol.max(1e-12) * d.max_summand.max(1.0)))
        .collect::<Result<Vec<_>>>()?;
    let holds = margins.iter().all(|m| *m >= -tol);
    Ok(HyperReport { side, margins, holds })
}

/// Error out unless the defects up to `order` are PSD within `tol`.
pub fn require_hypercontractive(c: &CMatrix, order: usize, side: DefectSide, tol: f64) -> Result<HyperReport> {
    let report = is_hypercontractive(c, order, side, tol)?;
    match report.first_failure(tol) {
        Some((order, margin)) => Err(Error::NotHypercontractive { kind: side.name(), order, margin }),
        None => Ok(report),
    }
}

/// `lim C*ⁿCⁿ`, by iterating `P ← C*PC` from `P = I`.
pub fn asymptotic_limit(c: &CMatrix, tol: f64, max_iter: usize) -> Result<CMatrix> {
    check_square(c)?;
    let norm = op_norm(c)?;
    if norm > 1.0 + tol {
        return Err(Error::NotContraction { norm, tol });
    }
    let c_star = c.adjoint();
    let mut p = CMatrix::identity(c.rows());
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let next = (&(&c_star * &p) * c).hermitian_part();
        residual = op_norm(&(&next - &p))?;
        p = next;
        if residual < tol {
            return Ok(p);
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

/// The family `(√Γ⁽ʰ⁾_hyper · Cⁿ · √Γ⁽ᶜ⁾_cohyper)` for `n = 0..length`.
///
/// Primary weights are `binom(n+c−1, c−1)` (they weight `Σ AₙAₙ*`),
/// secondary weights `binom(n+h−1, h−1)` (they weight `Σ Aₙ*Aₙ`).
#[derive(Debug, Clone)]
pub struct HyperFamily {
    pub family: WeightedFamily,
    pub hyper_order: usize,
    pub cohyper_order: usize,
    /// `Γ⁽ʰ⁾_hyper`, which dominates the weighted left Gram sum.
    pub hyper_defect: CMatrix,
    /// `Γ⁽ᶜ⁾_cohyper`, which dominates the weighted right Gram sum.
    pub cohyper_defect: CMatrix,
    pub hyper_margins: Vec<f64>,
    pub cohyper_margins: Vec<f64>,
}

pub fn hyper_family(c: &CMatrix, hyper_order: usize, cohyper_order: usize, length: usize, tol: f64) -> Result<HyperFamily> {
    if length == 0 {
        return Err(Error::EmptyFamily);
    }
    let hyper = require_hypercontractive(c, hyper_order, DefectSide::Hyper, tol)?;
    let cohyper = require_hypercontractive(c, cohyper_order, DefectSide::Cohyper, tol)?;
    let hyper_defect = defect(c, hyper_order, DefectSide::Hyper)?.value;
    let cohyper_defect = defect(c, cohyper_order, DefectSide::Cohyper)?.value;
    let left = frac_power(&hyper_defect, 0.5, tol)?;
    let right = frac_power(&cohyper_defect, 0.5, tol)?;
    let mut members = Vec::with_capacity(length);
    let mut pow = CMatrix::identity(c.rows());
    for n in 0..length {
        if n > 0 {
            pow = &pow * c;
        }
        members.push(&(&left * &pow) * &right);
    }
    let family = WeightedFamily::with_secondary(
        members,
        binomial_weights_f64(cohyper_order, length)?,
        binomial_weights_f64(hyper_order, length)?,
    )?;
    Ok(HyperFamily {
        family,
        hyper_order,
        cohyper_order,
        hyper_defect,
        cohyper_defect,
        hyper_margins: hyper.margins,
        cohyper_margins: cohyper.margins,
    })
}

impl HyperFamily {
    /// The truncated series and the defect that should dominate it:
    /// right is `Σ binom(n+h−1,h−1) Aₙ*Aₙ ≤ Γ⁽ᶜ⁾_cohyper`,
    /// left is `Σ binom(n+c−1,c−1) AₙAₙ* ≤ Γ⁽ʰ⁾_hyper`.
    pub fn dominance_pair(&self, side: Side) -> (CMatrix, CMatrix) {
        let members = self.family.members();
        match side {
            Side::Right => (weighted_gram(members, Side::Right, self.family.secondary(), 0), self.cohyper_defect.clone()),
            Side::Left => (weighted_gram(members, Side::Left, self.family.primary(), 0), self.hyper_defect.clone()),
        }
    }
}
