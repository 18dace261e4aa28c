//! The weighted inequality on the rank-one families `(eₙ⊗e₁)`, `(fₙ⊗f₁)`,
//! where both sides have closed forms in terms of `Xf₁`.

use serde::{Deserialize, Serialize};

use super::weighted::{gamma_exponent, rho_exponent, weighted_sides, Form, Sandwich};
use super::{Context, InequalityReport, SchattenTriple, SideCheck};
use crate::error::{Error, Result};
use crate::family::{orthonormality_defect, rank_one_family, WeightedFamily};
use crate::matrix::{CMatrix, C64};
use crate::norm::{lp_norm, schatten_norm, Exponent};
use crate::transformer::TransformerSpec;

/// Orthonormal bases as matrix columns, weights on each basis, `X` and a triple.
///
/// For the power form `lambda` and `rho` carry `γ` and `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneInstance {
    pub e: CMatrix,
    pub f: CMatrix,
    pub lambda: Vec<f64>,
    pub rho: Vec<f64>,
    pub x: CMatrix,
    pub triple: SchattenTriple,
}

const BASIS_TOL: f64 = 1e-10;
/// Agreement between the transformer output and its closed form, and
/// between routes. Looser than `CROSS_TOL`: the rank-one Grams are singular,
/// so the smallest grid shifts amplify round-off off the range of `e₁`.
const CLOSED_FORM_TOL: f64 = 1e-10;

struct Setup {
    a: WeightedFamily,
    b: WeightedFamily,
    /// `⟨Xf₁, eₙ⟩`
    inner: Vec<C64>,
    /// `‖Xf₁‖`
    xf_norm: f64,
}

impl RankOneInstance {
    fn setup(&self) -> Result<Setup> {
        for basis in [&self.e, &self.f] {
            if !basis.is_square() {
                return Err(Error::DimensionMismatch { context: "bases must be square matrices".into() });
            }
            let defect = orthonormality_defect(basis);
            if !(defect <= BASIS_TOL) {
                return Err(Error::NotOrthonormal(defect));
            }
        }
        let (d, k) = (self.e.rows(), self.f.rows());
        if self.x.shape() != (d, k) || self.lambda.len() != d || self.rho.len() != d || k < d {
            return Err(Error::DimensionMismatch {
                context: format!("X {:?}, bases {d} and {k}, weights {} and {}", self.x.shape(), self.lambda.len(), self.rho.len()),
            });
        }
        let (a, b) = rank_one_family(&self.e, &self.f, d)?;
        let a = a.with_primary(self.lambda.clone())?;
        let b = b.with_primary(self.rho.clone())?;
        let xf = &self.x * &self.f.col(0);
        let inner = (0..d).map(|n| (&self.e.col(n).adjoint() * &xf).get(0, 0)).collect();
        let xf_norm = xf.frobenius_sq().sqrt();
        Ok(Setup { a, b, inner, xf_norm })
    }
}

/// `Σ cₙ·(fₙ ⊗ e₁) = Σ cₙ e₁fₙ*`.
fn closed_form(e: &CMatrix, f: &CMatrix, c: &[C64]) -> CMatrix {
    let e1 = e.col(0);
    let mut acc = CMatrix::zeros(e.rows(), f.rows());
    for (n, cn) in c.iter().enumerate() {
        acc = &acc + &(&e1 * &f.col(n).adjoint()).scale_complex(*cn);
    }
    acc
}

/// Checks that `image` matches its closed form and that all its Schatten
/// norms equal `‖c‖₂`.
fn closed_form_checks(image: &CMatrix, inst: &RankOneInstance, c: &[C64]) -> Result<(f64, Vec<SideCheck>)> {
    let expected = closed_form(&inst.e, &inst.f, c);
    let c_norm = lp_norm(&c.iter().map(|z| z.norm()).collect::<Vec<_>>(), Exponent::TWO);
    let scale = c_norm.max(1.0);
    let diff = image.max_abs_diff(&expected) / scale;
    let mut worst: f64 = 0.0;
    for s in [Exponent::ONE, Exponent::TWO, Exponent::Finite(3.0), Exponent::Infinity] {
        worst = worst.max((schatten_norm(image, s)? - c_norm).abs() / scale);
    }
    let checks = vec![
        SideCheck { name: "closed-form".into(), value: diff, limit: CLOSED_FORM_TOL, ok: diff <= CLOSED_FORM_TOL },
        SideCheck { name: "norm-independence".into(), value: worst, limit: CLOSED_FORM_TOL, ok: worst <= CLOSED_FORM_TOL },
    ];
    Ok((c_norm, checks))
}

struct Evaluated {
    lhs: f64,
    rhs: f64,
    checks: Vec<SideCheck>,
}

/// Shared evaluation with `λ` and `ρ` already in weighted-inequality form.
fn evaluate(form: Form, inst: &RankOneInstance, setup: &Setup, ctx: &Context) -> Result<Evaluated> {
    let t = &inst.triple;
    let (hq, hr) = (t.half_inv_q(), t.half_inv_r());
    let spec = TransformerSpec::new(setup.a.clone(), setup.b.clone(), 0.5 - hq, hr)?;
    let coeffs = spec.coefficients();
    let c: Vec<C64> = coeffs.iter().zip(&setup.inner).map(|(k, z)| z * *k).collect();
    let image = spec.apply(&inst.x)?;
    let (c_norm, mut checks) = closed_form_checks(&image, inst, &c)?;
    let lam_sum: f64 = setup.a.primary().iter().sum();
    let rho_sum: f64 = setup.b.primary().iter().sum();
    let rho_factor = rho_sum.powf(hr) * setup.xf_norm;
    let (lhs, rhs) = match form {
        Form::Plain => (schatten_norm(&image, t.s_exponent())?, lam_sum.powf(0.5 - hq) * rho_factor),
        Form::Sup => {
            let sw = Sandwich::evaluate(&image, &setup.a.gram_left(1.0), hq - 0.5, None, t.s_exponent(), &ctx.grid)?;
            let closed = ctx.grid.descending().iter().map(|eta| (eta + lam_sum).powf(hq - 0.5) * c_norm).fold(0.0, f64::max);
            let dev = (sw.max() - closed).abs() / closed.max(1.0);
            checks.push(SideCheck { name: "sup-closed-form".into(), value: dev, limit: CLOSED_FORM_TOL, ok: dev <= CLOSED_FORM_TOL });
            checks.push(sw.trend(&ctx.tolerance));
            (sw.max(), rho_factor)
        }
    };
    // A projector to the power zero is the identity rather than itself, so
    // the general bound only reduces to the closed form for finite r.
    if !t.r().is_infinite() {
        let via = weighted_sides(form, &setup.a, &setup.b, &inst.x, t, ctx)?;
        let dev = (rhs - via.rhs).abs() / rhs.abs().max(via.rhs.abs()).max(1.0);
        checks.push(SideCheck { name: "rhs-vs-weighted".into(), value: dev, limit: CLOSED_FORM_TOL, ok: dev <= CLOSED_FORM_TOL });
    }
    Ok(Evaluated { lhs, rhs, checks })
}

fn report(id: String, ev: Evaluated, inst: &RankOneInstance, ctx: &Context) -> InequalityReport {
    let t = &inst.triple;
    let mut r = InequalityReport::new(id, ev.lhs, ev.rhs, ctx)
        .param("q", t.q())
        .param("r", t.r())
        .param("s", t.s())
        .param("dims", inst.x.shape());
    r.checks = ev.checks;
    r
}

pub fn check_rank_one(form: Form, inst: &RankOneInstance, ctx: &Context) -> Result<InequalityReport> {
    let setup = inst.setup()?;
    let ev = evaluate(form, inst, &setup, ctx)?;
    Ok(report(format!("rank-one.{form}"), ev, inst, ctx))
}

/// Coefficients `γₙwₙ`; the bound is written with `‖γ‖_{2q/(q−1)}` and `‖w‖_{2r}`.
pub fn check_rank_one_power(form: Form, inst: &RankOneInstance, ctx: &Context) -> Result<InequalityReport> {
    let t = &inst.triple;
    let (ge, re) = (gamma_exponent(t.q())?, rho_exponent(t.r())?);
    let setup = inst.setup()?;
    let (gamma, w) = (&inst.lambda, &inst.rho);
    let c: Vec<C64> = gamma.iter().zip(w).zip(&setup.inner).map(|((g, wn), z)| z * (g * wn)).collect();
    let mut image = CMatrix::zeros(inst.x.rows(), inst.x.cols());
    for ((am, bm), (g, wn)) in setup.a.members().iter().zip(setup.b.members()).zip(gamma.iter().zip(w)) {
        image = &image + &(&(am * &inst.x) * bm).scale(g * wn);
    }
    let (c_norm, mut checks) = closed_form_checks(&image, inst, &c)?;
    let gamma_sum: f64 = gamma.iter().map(|g| g.powf(ge)).sum();
    let w_factor = w.iter().map(|v| v.powf(re)).sum::<f64>().powf(1.0 / re) * setup.xf_norm;
    let hq = t.half_inv_q();
    let (lhs, rhs) = match form {
        Form::Plain => (schatten_norm(&image, t.s_exponent())?, gamma_sum.powf(0.5 - hq) * w_factor),
        Form::Sup => {
            let left = setup.a.gram_left(ge);
            let sw = Sandwich::evaluate(&image, &left, hq - 0.5, None, t.s_exponent(), &ctx.grid)?;
            let closed = ctx.grid.descending().iter().map(|eta| (eta + gamma_sum).powf(hq - 0.5) * c_norm).fold(0.0, f64::max);
            let dev = (sw.max() - closed).abs() / closed.max(1.0);
            checks.push(SideCheck { name: "sup-closed-form".into(), value: dev, limit: CLOSED_FORM_TOL, ok: dev <= CLOSED_FORM_TOL });
            checks.push(sw.trend(&ctx.tolerance));
            (sw.max(), w_factor)
        }
    };
    let substituted = RankOneInstance {
        lambda: gamma.iter().map(|g| g.powf(ge)).collect(),
        rho: w.iter().map(|v| v.powf(re)).collect(),
        ..inst.clone()
    };
    let via = evaluate(form, &substituted, &substituted.setup()?, ctx)?;
    let mut r = report(format!("rank-one-power.{form}"), Evaluated { lhs, rhs, checks }, inst, ctx)
        .agreement("lhs-vs-substitution", lhs, via.lhs, CLOSED_FORM_TOL)
        .agreement("rhs-vs-substitution", rhs, via.rhs, CLOSED_FORM_TOL);
    r.checks.extend(via.checks.into_iter().filter(|c| c.name.ends_with("weighted")));
    Ok(r)
}
