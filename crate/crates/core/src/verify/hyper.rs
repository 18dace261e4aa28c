//! The weighted inequality for families built from (co)hypercontractions,
//! bounded through defect operators, and the Loewner dominance of the
//! underlying Gram series.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::weighted::{weighted_sides, Form, Sandwich};
use super::{psd_pow, Context, InequalityReport, SchattenTriple, SideCheck};
use crate::error::{Error, Result};
use crate::family::Side;
use crate::hypercontraction::{defect, hyper_family, DefectSide};
use crate::matrix::CMatrix;
use crate::norm::{loewner_margin, schatten_norm};
use crate::spectral::psd_norm;
use crate::transformer::TransformerSpec;

/// Tolerance on defect eigenvalues when testing (co)hypercontractivity.
pub const HYPER_TOL: f64 = 1e-9;

/// `C` is `n`-cohypercontractive, `D` is `m`-cohypercontractive; the
/// families are truncated to `length` terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperInstance {
    pub c: CMatrix,
    pub d: CMatrix,
    pub n: usize,
    pub m: usize,
    pub length: usize,
    pub x: CMatrix,
    pub triple: SchattenTriple,
}

pub fn check_hyper_transformer(form: Form, inst: &HyperInstance, ctx: &Context) -> Result<InequalityReport> {
    let t = &inst.triple;
    let (hq, hr) = (t.half_inv_q(), t.half_inv_r());
    let s = t.s_exponent();
    if inst.x.shape() != (inst.c.rows(), inst.d.rows()) {
        return Err(Error::DimensionMismatch { context: format!("X is {:?}", inst.x.shape()) });
    }
    let fc = hyper_family(&inst.c, 1, inst.n, inst.length, HYPER_TOL)?;
    let fd = hyper_family(&inst.d, 1, inst.m, inst.length, HYPER_TOL)?;
    let image = TransformerSpec::new(fc.family.clone(), fd.family.clone(), 0.5 - hq, hr)?.apply(&inst.x)?;

    let c_hyper = &fc.hyper_defect;
    let c_cohyper = &fc.cohyper_defect;
    let d_hyper = &fd.hyper_defect;
    let d_cohyper = defect(&inst.d, inst.m, DefectSide::Cohyper)?.value;
    let core = schatten_norm(&(&(&psd_pow(c_cohyper, hq)? * &inst.x) * &psd_pow(d_hyper, hr)?), s)?;

    let mut checks = Vec::new();
    let (lhs, rhs) = match form {
        Form::Plain => {
            let outer = psd_norm(c_hyper)?.powf(0.5 - hq) * psd_norm(&d_cohyper)?.powf(0.5 - hr);
            (schatten_norm(&image, s)?, outer * core)
        }
        Form::Sup => {
            let sw = Sandwich::evaluate(&image, c_hyper, hq - 0.5, Some((&d_cohyper, hr - 0.5)), s, &ctx.grid)?;
            checks.push(sw.trend(&ctx.tolerance));
            (sw.max(), core)
        }
    };
    // the truncated families' own bound sits between the two sides
    let via = weighted_sides(form, &fc.family, &fd.family, &inst.x, t, ctx)?;
    checks.push(SideCheck {
        name: "family-bound-below-defect-bound".into(),
        value: via.rhs - rhs,
        limit: ctx.tolerance.slack(rhs),
        ok: ctx.tolerance.passes(via.rhs, rhs),
    });

    let mut report = InequalityReport::new(format!("hyper-transformer.{form}"), lhs, rhs, ctx)
        .param("q", t.q())
        .param("r", t.r())
        .param("s", t.s())
        .param("n", inst.n)
        .param("m", inst.m)
        .param("length", inst.length)
        .param("dims", inst.x.shape());
    report.checks = checks;
    Ok(report)
}

/// Which truncated Gram series is compared with which defect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DominanceKind {
    /// `Σ √Γ⁽ᴺ⁾ C*ⁿ (I−C*C) Cⁿ √Γ⁽ᴺ⁾ ≤ Γ⁽ᴺ⁾_cohyper(C)`
    CRight,
    /// `Σ binom(n+N−1,N−1) √(I−C*C) Cⁿ Γ⁽ᴺ⁾ C*ⁿ √(I−C*C) ≤ I − C*C`
    CLeft,
    /// As `CRight` for `D` with order `M`.
    DRight,
    /// As `CLeft` for `D` with order `M`.
    DLeft,
    /// `C` both `N`-hyper- and `M`-cohypercontractive, right Gram series.
    MixedRight,
    /// `C` both `N`-hyper- and `M`-cohypercontractive, left Gram series.
    MixedLeft,
}

impl DominanceKind {
    pub const ALL: [DominanceKind; 6] = [
        DominanceKind::CRight,
        DominanceKind::CLeft,
        DominanceKind::DRight,
        DominanceKind::DLeft,
        DominanceKind::MixedRight,
        DominanceKind::MixedLeft,
    ];

    /// `(uses D, hyper order, cohyper order, side)` given orders `n, m`.
    fn layout(self, n: usize, m: usize) -> (bool, usize, usize, Side) {
        match self {
            DominanceKind::CRight => (false, 1, n, Side::Right),
            DominanceKind::CLeft => (false, 1, n, Side::Left),
            DominanceKind::DRight => (true, 1, m, Side::Right),
            DominanceKind::DLeft => (true, 1, m, Side::Left),
            DominanceKind::MixedRight => (false, n, m, Side::Right),
            DominanceKind::MixedLeft => (false, n, m, Side::Left),
        }
    }
}

impl fmt::Display for DominanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DominanceKind::CRight => "c-right",
            DominanceKind::CLeft => "c-left",
            DominanceKind::DRight => "d-right",
            DominanceKind::DLeft => "d-left",
            DominanceKind::MixedRight => "mixed-right",
            DominanceKind::MixedLeft => "mixed-left",
        })
    }
}

/// Contractions `C, D`, orders `n, m` and a truncation length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceInstance {
    pub c: CMatrix,
    pub d: CMatrix,
    pub n: usize,
    pub m: usize,
    pub length: usize,
}

/// Reports `lhs = 0` and `rhs` = smallest eigenvalue of (defect − partial sum),
/// so the verdict is the Loewner inequality within the absolute tolerance.
pub fn check_hyper_dominance(kind: DominanceKind, inst: &DominanceInstance, ctx: &Context) -> Result<InequalityReport> {
    let (uses_d, h, c, side) = kind.layout(inst.n, inst.m);
    let base = if uses_d { &inst.d } else { &inst.c };
    let fam = hyper_family(base, h, c, inst.length, HYPER_TOL)?;
    let (series, bound) = fam.dominance_pair(side);
    let tol = ctx.tolerance.slack(bound.max_abs().max(series.max_abs()));
    let margin = loewner_margin(&series.hermitian_part(), &bound, tol)?;
    let min_defect_margin = fam.hyper_margins.iter().chain(&fam.cohyper_margins).copied().fold(f64::INFINITY, f64::min);
    Ok(InequalityReport::new(format!("hyper-dominance.{kind}"), 0.0, margin, ctx)
        .param("hyper_order", h)
        .param("cohyper_order", c)
        .param("length", inst.length)
        .param("dim", base.rows())
        .param("min_defect_eigenvalue", min_defect_margin))
}
