//! The four endpoint inequalities for decorated products `AₙCₙ X DₙBₙ`,
//! their un-regularized limits, and the plain forms without `C, D`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{psd_pow, Context, InequalityReport};
use crate::error::{Error, Result};
use crate::family::WeightedFamily;
use crate::matrix::CMatrix;
use crate::norm::{schatten_norm, Exponent};
use crate::spectral::{op_norm, psd_norm};
use crate::transformer::{regularized_gram, GramKind};

/// Operator norm, Hilbert–Schmidt with a column-side regularization,
/// Hilbert–Schmidt with a row-side regularization, or trace norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Endpoint {
    Operator,
    HsColumn,
    HsRow,
    Trace,
}

impl Endpoint {
    pub const ALL: [Endpoint; 4] = [Endpoint::Operator, Endpoint::HsColumn, Endpoint::HsRow, Endpoint::Trace];

    pub fn norm(self) -> Exponent {
        match self {
            Endpoint::Operator => Exponent::Infinity,
            Endpoint::HsColumn | Endpoint::HsRow => Exponent::TWO,
            Endpoint::Trace => Exponent::ONE,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Endpoint::Operator => "operator",
            Endpoint::HsColumn => "hs-column",
            Endpoint::HsRow => "hs-row",
            Endpoint::Trace => "trace",
        }
    }
}

/// Regularized with decorations, the shift-free limit, or regularized without decorations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadrupleForm {
    Decorated,
    Limit,
    Plain,
}

impl QuadrupleForm {
    pub const ALL: [QuadrupleForm; 3] = [QuadrupleForm::Decorated, QuadrupleForm::Limit, QuadrupleForm::Plain];

    fn name(self) -> &'static str {
        match self {
            QuadrupleForm::Decorated => "decorated",
            QuadrupleForm::Limit => "limit",
            QuadrupleForm::Plain => "plain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadrupleVariant {
    pub endpoint: Endpoint,
    pub form: QuadrupleForm,
}

impl QuadrupleVariant {
    pub fn all() -> Vec<QuadrupleVariant> {
        QuadrupleForm::ALL
            .iter()
            .flat_map(|&form| Endpoint::ALL.iter().map(move |&endpoint| QuadrupleVariant { endpoint, form }))
            .collect()
    }
}

impl fmt::Display for QuadrupleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.endpoint.name(), self.form.name())
    }
}

/// Regularization shifts `ε, ζ, η, θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shifts {
    pub epsilon: f64,
    pub zeta: f64,
    pub eta: f64,
    pub theta: f64,
}

impl Shifts {
    pub fn uniform(value: f64) -> Self {
        Shifts { epsilon: value, zeta: value, eta: value, theta: value }
    }
}

/// Families `A, C` (acting on the left, `d_A×d_A`) and `B, D` (on the right,
/// `d_B×d_B`), weights `λ, w`, shifts and `X` (`d_A×d_B`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrupleInstance {
    pub a: Vec<CMatrix>,
    pub b: Vec<CMatrix>,
    pub c: Vec<CMatrix>,
    pub d: Vec<CMatrix>,
    pub lambda: Vec<f64>,
    pub w: Vec<f64>,
    pub shifts: Shifts,
    pub x: CMatrix,
}

struct Prepared {
    a: WeightedFamily,
    b: WeightedFamily,
    c: WeightedFamily,
    d: WeightedFamily,
}

impl QuadrupleInstance {
    fn prepare(&self) -> Result<Prepared> {
        let n = self.a.len();
        if [self.b.len(), self.c.len(), self.d.len()].iter().any(|&m| m != n) {
            return Err(Error::DimensionMismatch { context: "families A, B, C, D must have equal length".into() });
        }
        let a = WeightedFamily::new(self.a.clone(), self.lambda.clone())?;
        let b = WeightedFamily::new(self.b.clone(), self.w.clone())?;
        let c = WeightedFamily::unweighted(self.c.clone())?;
        let d = WeightedFamily::new(self.d.clone(), self.w.clone())?;
        if c.dim() != a.dim() || d.dim() != b.dim() || self.x.shape() != (a.dim(), b.dim()) {
            return Err(Error::DimensionMismatch {
                context: format!("A is {0}x{0}, C is {1}x{1}, B is {2}x{2}, D is {3}x{3}, X is {4:?}", a.dim(), c.dim(), b.dim(), d.dim(), self.x.shape()),
            });
        }
        Ok(Prepared { a, b, c, d })
    }
}

fn max_norm(ms: &[CMatrix]) -> Result<f64> {
    ms.iter().try_fold(0.0_f64, |acc, m| Ok(acc.max(op_norm(m)?)))
}

fn max_product_norm(xs: &[CMatrix], ys: &[CMatrix]) -> Result<f64> {
    xs.iter().zip(ys).try_fold(0.0_f64, |acc, (x, y)| Ok(acc.max(op_norm(x)? * op_norm(y)?)))
}

/// `Σ cₙ·Lₙ·X·Rₙ`.
fn sum_terms(x: &CMatrix, left: &[CMatrix], right: &[CMatrix], coeff: &[f64]) -> CMatrix {
    let mut acc = CMatrix::zeros(left[0].rows(), right[0].cols());
    for ((l, r), c) in left.iter().zip(right).zip(coeff) {
        acc = &acc + &(&(l * x) * r).scale(*c);
    }
    acc
}

fn products(xs: &[CMatrix], ys: &[CMatrix]) -> Vec<CMatrix> {
    xs.iter().zip(ys).map(|(x, y)| x * y).collect()
}

pub fn check_quadruple(variant: QuadrupleVariant, inst: &QuadrupleInstance, ctx: &Context) -> Result<InequalityReport> {
    let p = inst.prepare()?;
    let x = &inst.x;
    let sh = inst.shifts;
    let s = variant.endpoint.norm();
    let lam = p.a.primary();
    let w = p.b.primary();
    let sqrt_lam: Vec<f64> = lam.iter().map(|v| v.sqrt()).collect();
    let sqrt_w: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let sqrt_lw: Vec<f64> = sqrt_lam.iter().zip(&sqrt_w).map(|(a, b)| a * b).collect();
    let ones = vec![1.0; p.a.len()];
    let ac = products(p.a.members(), p.c.members());
    let db = products(p.d.members(), p.b.members());
    let (am, bm, cm, dm) = (p.a.members(), p.b.members(), p.c.members(), p.d.members());

    use Endpoint::*;
    use QuadrupleForm::*;
    let (lhs, rhs) = match (variant.form, variant.endpoint) {
        (Decorated, Operator) => {
            let a_inv = regularized_gram(&p.a, GramKind::AStarEta, sh.eta)?.inverse();
            let b_inv = regularized_gram(&p.b, GramKind::BPlusZeta, sh.zeta)?.inverse();
            let t = sum_terms(x, &ac, &db, &sqrt_lam);
            (schatten_norm(&(&(&a_inv * &t) * &b_inv), s)?, max_product_norm(cm, dm)? * schatten_norm(x, s)?)
        }
        (Decorated, HsColumn) => {
            let c_inv = regularized_gram(&p.c, GramKind::APlusEps, sh.eta)?.inverse();
            let b_inv = regularized_gram(&p.b, GramKind::BPlusZeta, sh.zeta)?.inverse();
            let t = sum_terms(&(&c_inv * x), &ac, &db, &ones);
            (schatten_norm(&(&t * &b_inv), s)?, max_norm(am)? * max_norm(dm)? * schatten_norm(x, s)?)
        }
        (Decorated, HsRow) => {
            let a_inv = regularized_gram(&p.a, GramKind::AStarEta, sh.eta)?.inverse();
            let d_inv = regularized_gram(&p.d, GramKind::BStarTheta, sh.theta)?.inverse();
            let t = sum_terms(&(x * &d_inv), &ac, &db, &sqrt_lw);
            (schatten_norm(&(&a_inv * &t), s)?, max_norm(bm)? * max_norm(cm)? * schatten_norm(x, s)?)
        }
        (Decorated, Trace) => {
            let c_inv = regularized_gram(&p.c, GramKind::APlusEps, sh.eta)?.inverse();
            let d_inv = regularized_gram(&p.d, GramKind::BStarTheta, sh.theta)?.inverse();
            let t = sum_terms(&(&(&c_inv * x) * &d_inv), &ac, &db, &sqrt_w);
            (schatten_norm(&t, s)?, max_product_norm(am, bm)? * schatten_norm(x, s)?)
        }
        (Limit, Operator) => {
            let t = sum_terms(x, &ac, &db, &sqrt_lam);
            let rhs = max_product_norm(cm, dm)?
                * psd_norm(&p.a.gram_left(1.0))?.sqrt()
                * psd_norm(&p.b.gram_right(0.0))?.sqrt()
                * schatten_norm(x, s)?;
            (schatten_norm(&t, s)?, rhs)
        }
        (Limit, HsColumn) => {
            let t = sum_terms(x, &ac, &db, &ones);
            let c_root = psd_pow(&p.c.gram_right(0.0), 0.5)?;
            let rhs = max_norm(am)? * max_norm(dm)? * psd_norm(&p.b.gram_right(0.0))?.sqrt() * schatten_norm(&(&c_root * x), s)?;
            (schatten_norm(&t, s)?, rhs)
        }
        (Limit, HsRow) => {
            let t = sum_terms(x, &ac, &db, &sqrt_lw);
            let d_root = psd_pow(&p.d.gram_left(1.0), 0.5)?;
            let rhs = max_norm(bm)? * max_norm(cm)? * psd_norm(&p.a.gram_left(1.0))?.sqrt() * schatten_norm(&(x * &d_root), s)?;
            (schatten_norm(&t, s)?, rhs)
        }
        (Limit, Trace) => {
            let t = sum_terms(x, &ac, &db, &sqrt_w);
            let c_root = psd_pow(&p.c.gram_right(0.0), 0.5)?;
            let d_root = psd_pow(&p.d.gram_left(1.0), 0.5)?;
            let rhs = max_product_norm(am, bm)? * schatten_norm(&(&(&c_root * x) * &d_root), s)?;
            (schatten_norm(&t, s)?, rhs)
        }
        (Plain, Operator) => {
            let a_inv = regularized_gram(&p.a, GramKind::AStarEta, sh.eta)?.inverse();
            let b_inv = regularized_gram(&p.b, GramKind::BPlusZeta, sh.zeta)?.inverse();
            let t = sum_terms(x, am, bm, &sqrt_lam);
            (schatten_norm(&(&(&a_inv * &t) * &b_inv), s)?, schatten_norm(x, s)?)
        }
        (Plain, HsColumn) => {
            let a_inv = regularized_gram(&p.a, GramKind::APlusEps, sh.epsilon)?.inverse();
            let b_inv = regularized_gram(&p.b, GramKind::BPlusZeta, sh.zeta)?.inverse();
            let t = sum_terms(&(&a_inv * x), am, bm, &ones);
            (schatten_norm(&(&t * &b_inv), s)?, schatten_norm(x, s)?)
        }
        (Plain, HsRow) => {
            let a_inv = regularized_gram(&p.a, GramKind::AStarEta, sh.eta)?.inverse();
            let b_inv = regularized_gram(&p.b, GramKind::BStarTheta, sh.theta)?.inverse();
            let t = sum_terms(&(x * &b_inv), am, bm, &sqrt_lw);
            (schatten_norm(&(&a_inv * &t), s)?, schatten_norm(x, s)?)
        }
        (Plain, Trace) => {
            let a_inv = regularized_gram(&p.a, GramKind::APlusEps, sh.epsilon)?.inverse();
            let b_inv = regularized_gram(&p.b, GramKind::BStarTheta, sh.theta)?.inverse();
            let t = sum_terms(&(&(&a_inv * x) * &b_inv), am, bm, &sqrt_w);
            (schatten_norm(&t, s)?, schatten_norm(x, s)?)
        }
    };
    let mut report = InequalityReport::new(format!("quadruple.{variant}"), lhs, rhs, ctx)
        .param("norm", s)
        .param("length", p.a.len())
        .param("dims", x.shape());
    if variant.form != Limit {
        report = report.param("shifts", sh);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;

    fn member(seed: f64, d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |i, j| C64::new((seed + (5 * i + 3 * j) as f64 * 0.7).sin(), (seed * 1.3 + (i * j) as f64).cos() * 0.5))
    }

    fn instance(n: usize, da: usize, db: usize, salt: f64) -> QuadrupleInstance {
        let fam = |d: usize, off: f64| (0..n).map(|k| member(off + salt + k as f64 * 1.9, d)).collect::<Vec<_>>();
        QuadrupleInstance {
            a: fam(da, 0.0),
            b: fam(db, 10.0),
            c: fam(da, 20.0),
            d: fam(db, 30.0),
            lambda: (0..n).map(|k| 0.05 + 3.0 * k as f64).collect(),
            w: (0..n).map(|k| 7.0 / (1.0 + k as f64)).collect(),
            shifts: Shifts { epsilon: 1e-3, zeta: 1e-2, eta: 1e-4, theta: 0.5 },
            x: CMatrix::from_fn(da, db, |i, j| C64::new((i as f64 + salt).cos(), (j as f64 - salt).sin())),
        }
    }

    #[test]
    fn every_variant_passes_on_fixed_instances() {
        let ctx = Context::default();
        for (salt, da, db) in [(0.1, 3, 3), (1.7, 2, 4), (4.2, 4, 2)] {
            let inst = instance(3, da, db, salt);
            for v in QuadrupleVariant::all() {
                let r = check_quadruple(v, &inst, &ctx).unwrap();
                assert!(r.pass, "{v}: lhs {} rhs {}", r.lhs, r.rhs);
            }
        }
    }

    #[test]
    fn identity_probe_is_tight() {
        let inst = QuadrupleInstance {
            a: vec![CMatrix::identity(3)],
            b: vec![CMatrix::identity(3)],
            c: vec![CMatrix::identity(3)],
            d: vec![CMatrix::identity(3)],
            lambda: vec![1.0],
            w: vec![1.0],
            shifts: Shifts::uniform(1e-13),
            x: member(0.4, 3),
        };
        for v in QuadrupleVariant::all() {
            let r = check_quadruple(v, &inst, &Context::default()).unwrap();
            assert!(r.pass && r.gap.abs() <= 1e-10 * r.rhs.max(1.0), "{v}: gap {}", r.gap);
        }
    }

    #[test]
    fn twelve_distinct_names() {
        let names: std::collections::BTreeSet<String> = QuadrupleVariant::all().iter().map(|v| v.to_string()).collect();
        assert_eq!(names.len(), 12);
        assert!(names.contains("hs-row.limit"));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let mut inst = instance(2, 2, 2, 0.0);
        inst.c.pop();
        assert!(matches!(
            check_quadruple(QuadrupleVariant::all()[0], &inst, &Context::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
