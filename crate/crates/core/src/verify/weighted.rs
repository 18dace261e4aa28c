//! The weighted Schatten inequality for `Σ λₙ^{1/2−1/(2q)} wₙ^{1/(2r)} AₙXBₙ`,
//! its exponent-range special cases and its reweighted forms.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{psd_pow, Context, InequalityReport, SchattenTriple, ShiftGrid, SideCheck, CROSS_TOL};
use crate::error::{Error, Result};
use crate::family::WeightedFamily;
use crate::matrix::CMatrix;
use crate::norm::{schatten_norm, Exponent};
use crate::spectral::{default_tol, hermitian_eigen, psd_norm, HermitianSpectrum};
use crate::tolerance::Tolerance;
use crate::transformer::TransformerSpec;

/// Norm bound with the Gram factors pulled out, or the supremum over
/// regularization shifts of the sandwiched transformer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Plain,
    Sup,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Plain => "plain",
            Form::Sup => "sup",
        })
    }
}

/// Paired families with weights, an operand and an exponent triple.
///
/// For the power-weighted forms `lambda` and `w` carry `γ` and `ρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairInstance {
    pub a: Vec<CMatrix>,
    pub b: Vec<CMatrix>,
    pub lambda: Vec<f64>,
    pub w: Vec<f64>,
    pub x: CMatrix,
    pub triple: SchattenTriple,
}

impl PairInstance {
    fn families(&self) -> Result<(WeightedFamily, WeightedFamily)> {
        let a = WeightedFamily::new(self.a.clone(), self.lambda.clone())?;
        let b = WeightedFamily::new(self.b.clone(), self.w.clone())?;
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { context: format!("families of length {} and {}", a.len(), b.len()) });
        }
        if self.x.shape() != (a.dim(), b.dim()) {
            return Err(Error::DimensionMismatch {
                context: format!("X is {:?}, families act on {} and {}", self.x.shape(), a.dim(), b.dim()),
            });
        }
        Ok((a, b))
    }
}

fn pow0(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

/// The four Gram sums entering the bound, with weights already applied.
struct Grams {
    /// `Σ λₙ AₙAₙ*`
    left_a: CMatrix,
    /// `Σ Bₙ*Bₙ`
    right_b: CMatrix,
    /// `Σ Aₙ*Aₙ`
    right_a: CMatrix,
    /// `Σ wₙ BₙBₙ*`
    left_b: CMatrix,
}

impl Grams {
    fn of(a: &WeightedFamily, b: &WeightedFamily) -> Self {
        Grams { left_a: a.gram_left(1.0), right_b: b.gram_right(0.0), right_a: a.gram_right(0.0), left_b: b.gram_left(1.0) }
    }
}

/// `‖(Σ Aₙ*Aₙ)^{1/(2q)} X (Σ wₙ BₙBₙ*)^{1/(2r)}‖_s`.
fn core_norm(g: &Grams, x: &CMatrix, t: &SchattenTriple) -> Result<f64> {
    let left = psd_pow(&g.right_a, t.half_inv_q())?;
    let right = psd_pow(&g.left_b, t.half_inv_r())?;
    schatten_norm(&(&(&left * x) * &right), t.s_exponent())
}

/// `‖Σ λₙ AₙAₙ*‖^{1/2−1/(2q)} · ‖Σ Bₙ*Bₙ‖^{1/2−1/(2r)}`.
fn outer_factor(g: &Grams, t: &SchattenTriple) -> Result<f64> {
    Ok(pow0(psd_norm(&g.left_a)?, 0.5 - t.half_inv_q()) * pow0(psd_norm(&g.right_b)?, 0.5 - t.half_inv_r()))
}

fn transformer(a: &WeightedFamily, b: &WeightedFamily, t: &SchattenTriple) -> Result<TransformerSpec> {
    TransformerSpec::new(a.clone(), b.clone(), 0.5 - t.half_inv_q(), t.half_inv_r())
}

/// Left- and right-regularized sandwich norms on a shift grid.
pub(crate) struct Sandwich {
    /// `norms[i][j]` at `η = grid[i]`, `ζ = grid[j]` (grid descending).
    pub norms: Vec<Vec<f64>>,
}

impl Sandwich {
    /// `‖(η + L)^{pl} · T · (ζ + R)^{pr}‖_s`; a missing `R` drops the right factor.
    pub fn evaluate(
        t: &CMatrix,
        left: &CMatrix,
        pl: f64,
        right: Option<(&CMatrix, f64)>,
        s: Exponent,
        grid: &ShiftGrid,
    ) -> Result<Self> {
        let shifted = |spec: &HermitianSpectrum, shift: f64, p: f64| spec.apply(|mu| (mu.max(0.0) + shift).powf(p));
        let ls = hermitian_eigen(left, default_tol(left))?;
        let rs = match right {
            Some((r, p)) => Some((hermitian_eigen(r, default_tol(r))?, p)),
            None => None,
        };
        let mut norms = Vec::new();
        for &eta in grid.descending() {
            let lt = &shifted(&ls, eta, pl) * t;
            let row = match &rs {
                Some((spec, pr)) => grid
                    .descending()
                    .iter()
                    .map(|&zeta| schatten_norm(&(&lt * &shifted(spec, zeta, *pr)), s))
                    .collect::<Result<Vec<_>>>()?,
                None => vec![schatten_norm(&lt, s)?],
            };
            norms.push(row);
        }
        Ok(Sandwich { norms })
    }

    pub fn max(&self) -> f64 {
        self.norms.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Worst violation of "non-decreasing as either shift decreases";
    /// nonpositive when the trend holds under `tol`.
    pub fn trend(&self, tol: &Tolerance) -> SideCheck {
        let mut worst = f64::NEG_INFINITY;
        let mut ok = true;
        let rows = self.norms.len();
        let cols = self.norms[0].len();
        for i in 0..rows {
            for j in 0..cols {
                let here = self.norms[i][j];
                let mut step = |next: f64| {
                    worst = worst.max(here - next);
                    ok &= tol.passes(here, next);
                };
                if i + 1 < rows {
                    step(self.norms[i + 1][j]);
                }
                if j + 1 < cols {
                    step(self.norms[i][j + 1]);
                }
            }
        }
        SideCheck { name: "shift-trend".into(), value: worst.max(0.0), limit: tol.abs, ok }
    }
}

/// Both sides of the weighted inequality for a family pair.
pub(crate) struct Sides {
    pub lhs: f64,
    pub rhs: f64,
    pub trend: Option<SideCheck>,
}

pub(crate) fn weighted_sides(
    form: Form,
    a: &WeightedFamily,
    b: &WeightedFamily,
    x: &CMatrix,
    t: &SchattenTriple,
    ctx: &Context,
) -> Result<Sides> {
    let grams = Grams::of(a, b);
    let image = transformer(a, b, t)?.apply(x)?;
    let core = core_norm(&grams, x, t)?;
    match form {
        Form::Plain => Ok(Sides { lhs: schatten_norm(&image, t.s_exponent())?, rhs: outer_factor(&grams, t)? * core, trend: None }),
        Form::Sup => {
            let sw = Sandwich::evaluate(
                &image,
                &grams.left_a,
                t.half_inv_q() - 0.5,
                Some((&grams.right_b, t.half_inv_r() - 0.5)),
                t.s_exponent(),
                &ctx.grid,
            )?;
            Ok(Sides { lhs: sw.max(), rhs: core, trend: Some(sw.trend(&ctx.tolerance)) })
        }
    }
}

fn finish(id: String, sides: Sides, inst_len: usize, x: &CMatrix, t: &SchattenTriple, ctx: &Context) -> InequalityReport {
    let mut params = std::collections::BTreeMap::new();
    t.insert_params(&mut params);
    let mut report = InequalityReport::new(id, sides.lhs, sides.rhs, ctx).param("length", inst_len).param("dims", x.shape());
    report.params.extend(params);
    if let Some(trend) = sides.trend {
        report = report.param("grid", ctx.grid.descending()).side_check(trend);
    }
    report
}

pub fn check_weighted(form: Form, inst: &PairInstance, ctx: &Context) -> Result<InequalityReport> {
    let (a, b) = inst.families()?;
    let sides = weighted_sides(form, &a, &b, &inst.x, &inst.triple, ctx)?;
    Ok(finish(format!("weighted.{form}"), sides, a.len(), &inst.x, &inst.triple, ctx))
}

/// The four exponent-range specializations of the weighted inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentCase {
    /// `1 ≤ s ≤ 2`, `q = s/(2−s)`, `r = 1`.
    LowLeft,
    /// `1 ≤ s ≤ 2`, `q = 1`, `r = s/(2−s)`.
    LowRight,
    /// `s ≥ 2`, `q = s/2`, `r = ∞`.
    HighLeft,
    /// `s ≥ 2`, `q = ∞`, `r = s/2`.
    HighRight,
}

impl fmt::Display for ExponentCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExponentCase::LowLeft => "low-left",
            ExponentCase::LowRight => "low-right",
            ExponentCase::HighLeft => "high-left",
            ExponentCase::HighRight => "high-right",
        })
    }
}

impl ExponentCase {
    pub const ALL: [ExponentCase; 4] = [ExponentCase::LowLeft, ExponentCase::LowRight, ExponentCase::HighLeft, ExponentCase::HighRight];

    pub fn admits(self, s: f64) -> bool {
        match self {
            ExponentCase::LowLeft | ExponentCase::LowRight => (1.0..=2.0).contains(&s),
            ExponentCase::HighLeft | ExponentCase::HighRight => s >= 2.0 && s.is_finite(),
        }
    }

    /// The `(q, r)` at which the case is an instance of the weighted inequality.
    pub fn triple(self, s: f64) -> Result<SchattenTriple> {
        if !self.admits(s) {
            return Err(Error::CaseExponentMismatch { case: self.to_string(), s });
        }
        let ratio = if s == 2.0 { Exponent::Infinity } else { Exponent::Finite(s / (2.0 - s)) };
        let (q, r) = match self {
            ExponentCase::LowLeft => (ratio, Exponent::ONE),
            ExponentCase::LowRight => (Exponent::ONE, ratio),
            ExponentCase::HighLeft => (Exponent::Finite(s / 2.0), Exponent::Infinity),
            ExponentCase::HighRight => (Exponent::Infinity, Exponent::Finite(s / 2.0)),
        };
        SchattenTriple::new(q, r, s)
    }
}

/// Evaluates the case's own display with exponents written in `s`.
fn exponent_case_sides(case: ExponentCase, a: &WeightedFamily, b: &WeightedFamily, x: &CMatrix, s: f64) -> Result<(f64, f64)> {
    let g = Grams::of(a, b);
    let se = Exponent::Finite(s);
    let inv = 1.0 / s;
    // (λ power, w power, ‖ΣλAA*‖ power, ‖ΣB*B‖ power, (ΣA*A) power, (ΣwBB*) power)
    let (pl, pw, nl, nb, ca, cb) = match case {
        ExponentCase::LowLeft => (1.0 - inv, 0.5, 1.0 - inv, 0.0, inv - 0.5, 0.5),
        ExponentCase::LowRight => (0.0, inv - 0.5, 0.0, 1.0 - inv, 0.5, inv - 0.5),
        ExponentCase::HighLeft => (0.5 - inv, 0.0, 0.5 - inv, 0.5, inv, 0.0),
        ExponentCase::HighRight => (0.5, inv, 0.5, 0.5 - inv, 0.0, inv),
    };
    let image = TransformerSpec::new(a.clone(), b.clone(), pl, pw)?.apply(x)?;
    let lhs = schatten_norm(&image, se)?;
    let core = schatten_norm(&(&(&psd_pow(&g.right_a, ca)? * x) * &psd_pow(&g.left_b, cb)?), se)?;
    let rhs = pow0(psd_norm(&g.left_a)?, nl) * pow0(psd_norm(&g.right_b)?, nb) * core;
    Ok((lhs, rhs))
}

/// Uses `inst.triple.s()`; the instance's `q, r` are ignored in favor of the case map.
pub fn check_exponent_case(case: ExponentCase, inst: &PairInstance, ctx: &Context) -> Result<InequalityReport> {
    let s = inst.triple.s();
    let mapped = case.triple(s)?;
    let (a, b) = inst.families()?;
    let (lhs, rhs) = exponent_case_sides(case, &a, &b, &inst.x, s)?;
    let via = weighted_sides(Form::Plain, &a, &b, &inst.x, &mapped, ctx)?;
    let sides = Sides { lhs, rhs, trend: None };
    Ok(finish(format!("exponent-case.{case}"), sides, a.len(), &inst.x, &mapped, ctx)
        .agreement("lhs-vs-weighted", lhs, via.lhs, CROSS_TOL)
        .agreement("rhs-vs-weighted", rhs, via.rhs, CROSS_TOL))
}

/// Reweighted bound for the unweighted sum `Σ AₙXBₙ`, evaluated from its own
/// display and, independently, as the weighted inequality applied to
/// `(λₙ^{1/(2q)−1/2}Aₙ, wₙ^{−1/(2r)}Bₙ)`.
pub fn check_reweighted(form: Form, inst: &PairInstance, ctx: &Context) -> Result<InequalityReport> {
    let (a, b) = inst.families()?;
    let t = &inst.triple;
    let (hq, hr) = (t.half_inv_q(), t.half_inv_r());
    let s = t.s_exponent();
    let lam = a.primary();
    let w = b.primary();
    let pw = |ws: &[f64], e: f64| ws.iter().map(|v| pow0(*v, e)).collect::<Vec<_>>();

    // own display
    let plain_sum = TransformerSpec::new(a.clone(), b.clone(), 0.0, 0.0)?.apply(&inst.x)?;
    let left_a = WeightedFamily::new(a.members().to_vec(), pw(lam, 2.0 * hq))?.gram_left(1.0);
    let right_b = WeightedFamily::new(b.members().to_vec(), pw(w, -2.0 * hr))?.gram_right(1.0);
    let right_a = WeightedFamily::new(a.members().to_vec(), pw(lam, 2.0 * hq - 1.0))?.gram_right(1.0);
    let left_b = WeightedFamily::new(b.members().to_vec(), pw(w, 1.0 - 2.0 * hr))?.gram_left(1.0);
    let core = schatten_norm(&(&(&psd_pow(&right_a, hq)? * &inst.x) * &psd_pow(&left_b, hr)?), s)?;
    let sides = match form {
        Form::Plain => {
            let outer = pow0(psd_norm(&left_a)?, 0.5 - hq) * pow0(psd_norm(&right_b)?, 0.5 - hr);
            Sides { lhs: schatten_norm(&plain_sum, s)?, rhs: outer * core, trend: None }
        }
        Form::Sup => {
            let sw = Sandwich::evaluate(&plain_sum, &left_a, hq - 0.5, Some((&right_b, hr - 0.5)), s, &ctx.grid)?;
            Sides { lhs: sw.max(), rhs: core, trend: Some(sw.trend(&ctx.tolerance)) }
        }
    };

    // substitution route
    let sa = a.map_members(|n, m| m.scale(pow0(lam[n], hq - 0.5)))?;
    let sb = b.map_members(|n, m| m.scale(pow0(w[n], -hr)))?;
    let via = weighted_sides(form, &sa, &sb, &inst.x, t, ctx)?;
    let (lhs, rhs) = (sides.lhs, sides.rhs);
    Ok(finish(format!("reweighted.{form}"), sides, a.len(), &inst.x, t, ctx)
        .agreement("lhs-vs-substitution", lhs, via.lhs, CROSS_TOL)
        .agreement("rhs-vs-substitution", rhs, via.rhs, CROSS_TOL))
}

/// `λ` exponent `2q/(q−1)` of the power form; 2 at `q = ∞`.
pub(crate) fn gamma_exponent(q: Exponent) -> Result<f64> {
    match q {
        Exponent::Infinity => Ok(2.0),
        Exponent::Finite(q) if q > 1.0 => Ok(2.0 * q / (q - 1.0)),
        Exponent::Finite(_) => Err(Error::BadSubstitution("q = 1 leaves 2q/(q-1) undefined".into())),
    }
}

/// `w` exponent `2r`; an infinite `r` is rejected.
pub(crate) fn rho_exponent(r: Exponent) -> Result<f64> {
    match r {
        Exponent::Finite(r) => Ok(2.0 * r),
        Exponent::Infinity => Err(Error::BadSubstitution("r = ∞ leaves ρ^(2r) undefined".into())),
    }
}

/// Power-weighted bound for `Σ γₙρₙ AₙXBₙ` (`lambda` holds `γ`, `w` holds `ρ`),
/// cross-checked against the weighted inequality at `λ = γ^{2q/(q−1)}`, `w = ρ^{2r}`.
pub fn check_reweighted_power(form: Form, inst: &PairInstance, ctx: &Context) -> Result<InequalityReport> {
    let t = &inst.triple;
    let (ge, re) = (gamma_exponent(t.q())?, rho_exponent(t.r())?);
    let (a, b) = inst.families()?;
    let (hq, hr) = (t.half_inv_q(), t.half_inv_r());
    let s = t.s_exponent();
    let gamma = a.primary();
    let rho = b.primary();

    let coeff: Vec<f64> = gamma.iter().zip(rho).map(|(g, r)| g * r).collect();
    let mut image = CMatrix::zeros(a.dim(), b.dim());
    for ((am, bm), c) in a.members().iter().zip(b.members()).zip(&coeff) {
        image = &image + &(&(am * &inst.x) * bm).scale(*c);
    }
    let left_a = a.gram_left(ge);
    let right_b = b.gram_right(0.0);
    let right_a = a.gram_right(0.0);
    let left_b = b.gram_left(re);
    let core = schatten_norm(&(&(&psd_pow(&right_a, hq)? * &inst.x) * &psd_pow(&left_b, hr)?), s)?;
    let sides = match form {
        Form::Plain => {
            let outer = pow0(psd_norm(&left_a)?, 0.5 - hq) * pow0(psd_norm(&right_b)?, 0.5 - hr);
            Sides { lhs: schatten_norm(&image, s)?, rhs: outer * core, trend: None }
        }
        Form::Sup => {
            let sw = Sandwich::evaluate(&image, &left_a, hq - 0.5, Some((&right_b, hr - 0.5)), s, &ctx.grid)?;
            Sides { lhs: sw.max(), rhs: core, trend: Some(sw.trend(&ctx.tolerance)) }
        }
    };

    let sa = a.with_primary(gamma.iter().map(|g| g.powf(ge)).collect())?;
    let sb = b.with_primary(rho.iter().map(|r| r.powf(re)).collect())?;
    let via = weighted_sides(form, &sa, &sb, &inst.x, t, ctx)?;
    let (lhs, rhs) = (sides.lhs, sides.rhs);
    Ok(finish(format!("reweighted-power.{form}"), sides, a.len(), &inst.x, t, ctx)
        .agreement("lhs-vs-substitution", lhs, via.lhs, CROSS_TOL)
        .agreement("rhs-vs-substitution", rhs, via.rhs, CROSS_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;

    fn member(seed: f64, d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |i, j| C64::new((seed + (3 * i + 7 * j) as f64 * 0.37).sin(), (seed * 0.7 - (i + j) as f64).cos() * 0.8))
    }

    fn instance(n: usize, da: usize, db: usize, triple: SchattenTriple, salt: f64) -> PairInstance {
        PairInstance {
            a: (0..n).map(|k| member(salt + k as f64, da)).collect(),
            b: (0..n).map(|k| member(salt + 50.0 + k as f64, db)).collect(),
            lambda: (0..n).map(|k| 0.02 * 7f64.powi(k as i32 % 4)).collect(),
            w: (0..n).map(|k| 50.0 / (1.0 + 3.0 * k as f64)).collect(),
            x: CMatrix::from_fn(da, db, |i, j| C64::new((i as f64 * salt).cos(), j as f64 - 0.5)),
            triple,
        }
    }

    fn triples() -> Vec<SchattenTriple> {
        let f = Exponent::Finite;
        vec![
            SchattenTriple::from_q_r(f(2.0), f(2.0)).unwrap(),
            SchattenTriple::from_q_r(Exponent::ONE, Exponent::Infinity).unwrap(),
            SchattenTriple::from_q_r(Exponent::Infinity, Exponent::ONE).unwrap(),
            SchattenTriple::from_q_r(f(1.3), f(7.0)).unwrap(),
            SchattenTriple::from_q_r(f(4.0), Exponent::Infinity).unwrap(),
        ]
    }

    #[test]
    fn weighted_passes_on_fixed_instances() {
        let ctx = Context::default();
        for (k, t) in triples().into_iter().enumerate() {
            let inst = instance(3, 3, 2, t, k as f64 + 0.3);
            for form in [Form::Plain, Form::Sup] {
                let r = check_weighted(form, &inst, &ctx).unwrap();
                assert!(r.verdict(), "{t} {form}: {r:?}");
            }
        }
    }

    #[test]
    fn single_identity_pair_gives_equality() {
        for t in triples() {
            let inst = PairInstance {
                a: vec![CMatrix::identity(3)],
                b: vec![CMatrix::identity(3)],
                lambda: vec![1.0],
                w: vec![1.0],
                x: member(0.9, 3),
                triple: t,
            };
            let r = check_weighted(Form::Plain, &inst, &Context::default()).unwrap();
            assert!(r.gap.abs() <= 1e-10 * r.rhs.max(1.0), "{t}: {}", r.gap);
            let norm = schatten_norm(&inst.x, t.s_exponent()).unwrap();
            assert!((r.lhs - norm).abs() < 1e-12 * norm);
        }
    }

    #[test]
    fn case_triples() {
        assert_eq!(ExponentCase::LowLeft.triple(2.0).unwrap().q(), Exponent::Infinity);
        assert_eq!(ExponentCase::LowRight.triple(1.5).unwrap().r(), Exponent::Finite(3.0));
        assert_eq!(ExponentCase::HighLeft.triple(5.0).unwrap().q(), Exponent::Finite(2.5));
        assert!(matches!(ExponentCase::HighRight.triple(1.5), Err(Error::CaseExponentMismatch { .. })));
        assert!(matches!(ExponentCase::LowLeft.triple(2.5), Err(Error::CaseExponentMismatch { .. })));
    }

    #[test]
    fn exponent_cases_agree_with_weighted() {
        let ctx = Context::default();
        for (case, s) in [
            (ExponentCase::LowLeft, 1.0),
            (ExponentCase::LowLeft, 1.5),
            (ExponentCase::LowRight, 1.2),
            (ExponentCase::HighLeft, 3.0),
            (ExponentCase::HighRight, 4.5),
            (ExponentCase::HighRight, 2.0),
        ] {
            let inst = instance(4, 2, 3, case.triple(s).unwrap(), s);
            let r = check_exponent_case(case, &inst, &ctx).unwrap();
            assert!(r.verdict(), "{case} s={s}: {r:?}");
        }
    }

    #[test]
    fn cases_coincide_at_two() {
        let ctx = Context::default();
        let t = ExponentCase::LowLeft.triple(2.0).unwrap();
        let inst = instance(3, 3, 3, t, 0.2);
        let pairs = [(ExponentCase::LowLeft, ExponentCase::HighRight), (ExponentCase::LowRight, ExponentCase::HighLeft)];
        for (x, y) in pairs {
            let rx = check_exponent_case(x, &inst, &ctx).unwrap();
            let ry = check_exponent_case(y, &inst, &ctx).unwrap();
            assert!((rx.rhs - ry.rhs).abs() <= 1e-12 * rx.rhs.max(1.0));
            assert!((rx.lhs - ry.lhs).abs() <= 1e-12 * rx.lhs.max(1.0));
        }
    }

    #[test]
    fn reweighted_forms_agree_with_substitution() {
        let ctx = Context::default();
        for (k, t) in triples().into_iter().enumerate() {
            let inst = instance(3, 2, 2, t, 1.0 + k as f64);
            for form in [Form::Plain, Form::Sup] {
                let r = check_reweighted(form, &inst, &ctx).unwrap();
                assert!(r.verdict(), "{t} {form}: {r:?}");
                if t.q() != Exponent::ONE && !t.r().is_infinite() {
                    let r = check_reweighted_power(form, &inst, &ctx).unwrap();
                    assert!(r.verdict(), "{t} {form}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn unit_weights_reduce_to_weighted() {
        let t = SchattenTriple::from_q_r(Exponent::Finite(3.0), Exponent::Finite(3.0)).unwrap();
        let mut inst = instance(3, 2, 2, t, 0.6);
        inst.lambda = vec![1.0; 3];
        inst.w = vec![1.0; 3];
        let ctx = Context::default();
        let a = check_reweighted(Form::Plain, &inst, &ctx).unwrap();
        let b = check_weighted(Form::Plain, &inst, &ctx).unwrap();
        let c = check_reweighted_power(Form::Plain, &inst, &ctx).unwrap();
        assert!((a.rhs - b.rhs).abs() < 1e-12 * b.rhs && (a.lhs - b.lhs).abs() < 1e-12 * b.lhs);
        assert!((c.rhs - b.rhs).abs() < 1e-12 * b.rhs);
    }

    #[test]
    fn power_form_rejects_degenerate_exponents() {
        let ctx = Context::default();
        let t = SchattenTriple::from_q_r(Exponent::ONE, Exponent::Finite(2.0)).unwrap();
        assert!(matches!(check_reweighted_power(Form::Plain, &instance(2, 2, 2, t, 0.0), &ctx), Err(Error::BadSubstitution(_))));
        let t = SchattenTriple::from_q_r(Exponent::Finite(2.0), Exponent::Infinity).unwrap();
        assert!(matches!(check_reweighted_power(Form::Sup, &instance(2, 2, 2, t, 0.0), &ctx), Err(Error::BadSubstitution(_))));
    }
}
