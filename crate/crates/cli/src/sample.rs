//! Seeded instance generation for every checker.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use schatten_core::hypercontraction::{is_hypercontractive, DefectSide};
use schatten_core::spectral::psd_sqrt;
use schatten_core::verify::{
    DominanceInstance, DominanceKind, ExponentCase, HyperInstance, MonotonicityInstance, PairInstance,
    QuadrupleInstance, RankOneInstance, Shifts,
};
use schatten_core::{CMatrix, CheckerId, Exponent, Instance, SchattenTriple, C64};

use crate::error::{CliError, CliResult};
use crate::rng::trial_rng;

/// Rejection cap for the (co)hypercontraction sampler.
pub const MAX_ATTEMPTS: usize = 10_000;
/// Acceptance threshold on defect eigenvalues; stricter than the checkers'.
const ACCEPT_TOL: f64 = 1e-12;
/// Probability that an exponent draw is `∞`.
const P_INFINITE: f64 = 0.2;

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn new(lo: usize, hi: usize) -> Self {
        Span { lo, hi }
    }

    fn draw(self, rng: &mut impl Rng) -> usize {
        rng.random_range(self.lo..=self.hi)
    }
}

impl std::str::FromStr for Span {
    type Err = String;
    /// `"4"` or `"2-6"`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad range `{s}`"));
        let span = match s.split_once('-') {
            Some((lo, hi)) => Span::new(parse(lo)?, parse(hi)?),
            None => {
                let v = parse(s)?;
                Span::new(v, v)
            }
        };
        if span.lo > span.hi {
            return Err(format!("empty range `{s}`"));
        }
        Ok(span)
    }
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}-{}", self.lo, self.hi)
        }
    }
}

/// Everything besides the seed that shapes a sampled instance.
///
/// Unset exponents are drawn per trial; two of `q, r, s` pin the triple.
/// `s` alone also fixes the monotonicity exponent and the exponent-case `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub dims: Span,
    pub lengths: Span,
    pub q: Option<Exponent>,
    pub r: Option<Exponent>,
    pub s: Option<Exponent>,
    /// Orders `(N, M)` for the hypercontraction checkers.
    pub orders: (usize, usize),
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { dims: Span::new(2, 6), lengths: Span::new(1, 8), q: None, r: None, s: None, orders: (1, 1) }
    }
}

impl SampleSpec {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::ConfigInvalid(m));
        if self.dims.lo < 2 {
            return bad(format!("dimensions must be at least 2, got {}", self.dims));
        }
        if self.lengths.lo < 1 {
            return bad(format!("family lengths must be at least 1, got {}", self.lengths));
        }
        let (n, m) = self.orders;
        if n == 0 || m == 0 || n > 12 || m > 12 {
            return bad(format!("hypercontraction orders must lie in 1..=12, got ({n}, {m})"));
        }
        if [self.q, self.r, self.s].iter().filter(|e| e.is_some()).count() >= 2 {
            self.fixed_triple()?;
        }
        Ok(())
    }

    fn fixed_triple(&self) -> CliResult<SchattenTriple> {
        let finite_s = |s: Exponent| match s {
            Exponent::Finite(v) => Ok(v),
            Exponent::Infinity => Err(CliError::ConfigInvalid("s must be finite when fixing a triple".into())),
        };
        let t = match (self.q, self.r, self.s) {
            (Some(q), Some(r), None) => SchattenTriple::from_q_r(q, r),
            (Some(q), None, Some(s)) => SchattenTriple::from_q_s(q, finite_s(s)?),
            (None, Some(r), Some(s)) => SchattenTriple::from_r_s(r, finite_s(s)?),
            (Some(q), Some(r), Some(s)) => SchattenTriple::new(q, r, finite_s(s)?),
            _ => unreachable!("fixed_triple needs two exponents"),
        };
        t.map_err(|e| CliError::ConfigInvalid(e.to_string()))
    }

    fn triple(&self, rng: &mut impl Rng, finite_r: bool) -> CliResult<SchattenTriple> {
        if [self.q, self.r, self.s].iter().filter(|e| e.is_some()).count() >= 2 {
            return self.fixed_triple();
        }
        if let Some(Exponent::Finite(s)) = self.s {
            // 1/(2q) uniform over the values that leave a valid r
            let lo = (1.0 / s - 0.5).max(0.0);
            let hi = (1.0 / s).min(0.5);
            let inv = rng.random_range(lo..=hi);
            let q = if inv <= 0.0 { Exponent::Infinity } else { Exponent::Finite((0.5 / inv).max(1.0)) };
            return Ok(SchattenTriple::from_q_s(q, s)?);
        }
        loop {
            let q = self.q.unwrap_or_else(|| draw_exponent(rng));
            let r = match self.r {
                Some(r) => r,
                None if finite_r => Exponent::Finite(log_uniform(rng, 1.0, 10.0)),
                None => draw_exponent(rng),
            };
            if let Ok(t) = SchattenTriple::from_q_r(q, r) {
                return Ok(t);
            }
            if self.q.is_some() && self.r.is_some() {
                return Err(CliError::ConfigInvalid("q = r = ∞ has no finite s".into()));
            }
        }
    }
}

/// A sampled instance with its digest and rejection statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampled {
    pub instance: Instance,
    pub digest: String,
    /// Total candidates drawn by the rejection sampler (zero if unused).
    pub attempts: usize,
}

/// SHA-256 of the instance's JSON encoding, truncated to 128 bits.
pub fn digest(instance: &Instance) -> String {
    let bytes = serde_json::to_vec(instance).expect("instances serialize");
    hex::encode(&Sha256::digest(&bytes)[..16])
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// `q` or `r`: log-uniform in `[1, 10]`, or `∞`.
pub fn draw_exponent(rng: &mut impl Rng) -> Exponent {
    if rng.random_bool(P_INFINITE) {
        Exponent::Infinity
    } else {
        Exponent::Finite(log_uniform(rng, 1.0, 10.0))
    }
}

pub fn draw_triple(rng: &mut impl Rng) -> SchattenTriple {
    SampleSpec::default().triple(rng, false).expect("unconstrained draws always succeed")
}

fn weights(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| log_uniform(rng, 1e-2, 1e2)).collect()
}

/// Base weights `γ, ρ` for the power forms, drawn so that `γ^{2q/(q−1)}`
/// and `ρ^{2r}` are log-uniform in `[1e-2, 1e2]`. Raw draws would over- or
/// underflow once `q` nears 1.
fn power_weights(rng: &mut impl Rng, len: usize, t: &SchattenTriple) -> (Vec<f64>, Vec<f64>) {
    let ge = match t.q() {
        Exponent::Infinity => 2.0,
        Exponent::Finite(q) if q > 1.0 => 2.0 * q / (q - 1.0),
        Exponent::Finite(_) => 1.0,
    };
    let re = match t.r() {
        Exponent::Finite(r) => 2.0 * r,
        Exponent::Infinity => 1.0,
    };
    let gamma = weights(rng, len).into_iter().map(|v| v.powf(1.0 / ge)).collect();
    let rho = weights(rng, len).into_iter().map(|v| v.powf(1.0 / re)).collect();
    (gamma, rho)
}

/// Entries `(g₁ + i·g₂)/√2` with standard normal `g`.
pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

fn family(rng: &mut impl Rng, len: usize, d: usize) -> Vec<CMatrix> {
    (0..len).map(|_| gaussian(rng, d, d)).collect()
}

/// Gaussian `X`, projected to rank 1 or 2 a quarter of the time each.
fn operand(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    let rank = match rng.random_range(0..4) {
        0 => 1,
        1 => 2,
        _ => rows.min(cols),
    };
    if rank >= rows.min(cols) {
        gaussian(rng, rows, cols)
    } else {
        &gaussian(rng, rows, rank) * &gaussian(rng, rank, cols)
    }
}

/// Haar unitary from the QR factorization of a Ginibre matrix, with the
/// phases of `diag(R)` moved back into `Q`.
pub fn haar_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    let qr = gaussian(rng, d, d).into_nalgebra().qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    CMatrix::from_nalgebra(q)
}

/// PSD `GG*` of random rank `0..=d`, scaled by a log-uniform factor.
fn psd_bump(rng: &mut impl Rng, d: usize) -> CMatrix {
    let k = rng.random_range(0..=d);
    if k == 0 {
        return CMatrix::zeros(d, d);
    }
    let g = gaussian(rng, d, k);
    (&g * &g.adjoint()).scale(log_uniform(rng, 1e-2, 1.0))
}

/// `ρ·U·diag(u)` with `ρ ∈ (0, 1]`, `uᵢ ∈ [0, 1]`, accepted when every
/// `(order, side)` requirement holds.
pub fn sample_hypercontraction(
    rng: &mut impl Rng,
    d: usize,
    requirements: &[(usize, DefectSide)],
) -> CliResult<(CMatrix, usize)> {
    for attempt in 1..=MAX_ATTEMPTS {
        let scale = 1.0 - rng.random::<f64>();
        let u = haar_unitary(rng, d);
        let diag: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let c = (&u * &CMatrix::diag(&diag)).scale(scale);
        let mut ok = true;
        for &(order, side) in requirements {
            if !is_hypercontractive(&c, order, side, ACCEPT_TOL)?.holds {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok((c, attempt));
        }
    }
    let what = requirements.iter().map(|(n, s)| format!("{n}-{}", s.name())).collect::<Vec<_>>().join(" & ");
    Err(CliError::SamplerExhausted { what, attempts: MAX_ATTEMPTS, rate: 0.0 })
}

fn exponent_case_s(case: ExponentCase, spec: &SampleSpec, rng: &mut impl Rng) -> f64 {
    if let Some(Exponent::Finite(s)) = spec.s {
        if case.admits(s) {
            return s;
        }
    }
    match case {
        ExponentCase::LowLeft | ExponentCase::LowRight => rng.random_range(1.0..=2.0),
        ExponentCase::HighLeft | ExponentCase::HighRight => log_uniform(rng, 2.0, 20.0),
    }
}

pub fn sample_instance(checker: CheckerId, spec: &SampleSpec, seed: u64) -> CliResult<Sampled> {
    let rng = &mut trial_rng(seed);
    let mut attempts = 0;
    let instance = match checker {
        CheckerId::Monotonicity => {
            let (da, db) = (spec.dims.draw(rng), spec.dims.draw(rng));
            let s = spec.s.unwrap_or_else(|| draw_exponent(rng));
            let a = gaussian(rng, da, da);
            let b = gaussian(rng, db, db);
            // C*C = A*A + Q₁ and DD* = BB* + Q₂
            let c = &haar_unitary(rng, da) * &psd_sqrt(&(&(&a.adjoint() * &a) + &psd_bump(rng, da)))?;
            let d = &psd_sqrt(&(&(&b * &b.adjoint()) + &psd_bump(rng, db)))? * &haar_unitary(rng, db);
            let x = operand(rng, da, db);
            Instance::Monotonicity(MonotonicityInstance { a, b, c, d, x, s })
        }
        CheckerId::Quadruple(_) => {
            let (da, db, len) = (spec.dims.draw(rng), spec.dims.draw(rng), spec.lengths.draw(rng));
            let mut shift = || log_uniform(rng, 1e-4, 10.0);
            let shifts = Shifts { epsilon: shift(), zeta: shift(), eta: shift(), theta: shift() };
            Instance::Quadruple(QuadrupleInstance {
                a: family(rng, len, da),
                b: family(rng, len, db),
                c: family(rng, len, da),
                d: family(rng, len, db),
                lambda: weights(rng, len),
                w: weights(rng, len),
                shifts,
                x: operand(rng, da, db),
            })
        }
        CheckerId::Weighted(_) | CheckerId::Reweighted(_) | CheckerId::ReweightedPower(_) | CheckerId::ExponentCase(_) => {
            let (da, db, len) = (spec.dims.draw(rng), spec.dims.draw(rng), spec.lengths.draw(rng));
            let triple = match checker {
                CheckerId::ExponentCase(case) => case.triple(exponent_case_s(case, spec, rng))?,
                CheckerId::ReweightedPower(_) => spec.triple(rng, true)?,
                _ => spec.triple(rng, false)?,
            };
            let (a, b) = (family(rng, len, da), family(rng, len, db));
            let (lambda, w) = match checker {
                CheckerId::ReweightedPower(_) => power_weights(rng, len, &triple),
                _ => (weights(rng, len), weights(rng, len)),
            };
            Instance::Pairs(PairInstance { a, b, lambda, w, x: operand(rng, da, db), triple })
        }
        CheckerId::RankOne(_) | CheckerId::RankOnePower(_) => {
            let d = spec.dims.draw(rng);
            let triple = spec.triple(rng, matches!(checker, CheckerId::RankOnePower(_)))?;
            let (e, f) = (haar_unitary(rng, d), haar_unitary(rng, d));
            let (lambda, rho) = match checker {
                CheckerId::RankOnePower(_) => power_weights(rng, d, &triple),
                _ => (weights(rng, d), weights(rng, d)),
            };
            Instance::RankOne(RankOneInstance { e, f, lambda, rho, x: operand(rng, d, d), triple })
        }
        CheckerId::HyperTransformer(_) => {
            let (da, db, length) = (spec.dims.draw(rng), spec.dims.draw(rng), spec.lengths.draw(rng));
            let (n, m) = spec.orders;
            let triple = spec.triple(rng, false)?;
            let (c, tc) = sample_hypercontraction(rng, da, &[(n, DefectSide::Cohyper)])?;
            let (d, td) = sample_hypercontraction(rng, db, &[(m, DefectSide::Cohyper)])?;
            attempts = tc + td;
            Instance::Hyper(HyperInstance { c, d, n, m, length, x: operand(rng, da, db), triple })
        }
        CheckerId::HyperDominance(kind) => {
            let (dc, dd, length) = (spec.dims.draw(rng), spec.dims.draw(rng), spec.lengths.draw(rng));
            let (n, m) = spec.orders;
            let c_needs: Vec<(usize, DefectSide)> = match kind {
                DominanceKind::MixedRight | DominanceKind::MixedLeft => vec![(n, DefectSide::Hyper), (m, DefectSide::Cohyper)],
                _ => vec![(n, DefectSide::Cohyper)],
            };
            let (c, tc) = sample_hypercontraction(rng, dc, &c_needs)?;
            let (d, td) = sample_hypercontraction(rng, dd, &[(m, DefectSide::Cohyper)])?;
            attempts = tc + td;
            Instance::Dominance(DominanceInstance { c, d, n, m, length })
        }
    };
    Ok(Sampled { digest: digest(&instance), instance, attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    #[test]
    fn same_seed_same_digest() {
        let spec = SampleSpec::default();
        for id in CheckerId::all() {
            let a = sample_instance(id, &spec, 0).unwrap();
            let b = sample_instance(id, &spec, 0).unwrap();
            assert_eq!(a.digest, b.digest, "{id}");
            assert_eq!(a.instance, b.instance);
            assert_ne!(a.digest, sample_instance(id, &spec, 1).unwrap().digest);
        }
    }

    #[test]
    fn infinite_q_gives_twice_r() {
        let spec = SampleSpec { q: Some(Exponent::Infinity), ..SampleSpec::default() };
        let rng = &mut trial_rng(3);
        for _ in 0..50 {
            let t = spec.triple(rng, false).unwrap();
            assert!(matches!(t.r(), Exponent::Finite(r) if (t.s() - 2.0 * r).abs() <= 1e-12 * t.s()));
        }
    }

    #[test]
    fn thousand_triples_satisfy_coupling() {
        let rng = &mut trial_rng(0);
        let mut infinite = 0;
        for _ in 0..1000 {
            let t = draw_triple(rng);
            assert!((t.half_inv_q() + t.half_inv_r() - 1.0 / t.s()).abs() <= 1e-12);
            infinite += usize::from(t.q().is_infinite() || t.r().is_infinite());
        }
        assert!(infinite > 100, "{infinite}");
    }

    #[test]
    fn s_alone_is_respected() {
        let spec = SampleSpec { s: Some(Exponent::Finite(1.6)), ..SampleSpec::default() };
        let rng = &mut trial_rng(5);
        for _ in 0..100 {
            assert_eq!(spec.triple(rng, false).unwrap().s(), 1.6);
        }
    }

    #[test]
    fn haar_is_unitary() {
        let rng = &mut trial_rng(1);
        for d in 1..7 {
            let u = haar_unitary(rng, d);
            assert!((&u.adjoint() * &u).max_abs_diff(&CMatrix::identity(d)) < 1e-12);
        }
    }

    #[test]
    fn power_forms_get_finite_r() {
        let spec = SampleSpec::default();
        for seed in 0..100 {
            let s = sample_instance(CheckerId::RankOnePower(schatten_core::verify::Form::Plain), &spec, seed).unwrap();
            let Instance::RankOne(inst) = s.instance else { panic!() };
            assert!(!inst.triple.r().is_infinite());
        }
    }

    #[test]
    fn constructed_monotonicity_meets_preconditions() {
        let spec = SampleSpec::default();
        let ctx = schatten_core::Context::default();
        for seed in 0..50 {
            let s = sample_instance(CheckerId::Monotonicity, &spec, seed).unwrap();
            assert!(schatten_core::check(CheckerId::Monotonicity, &s.instance, &ctx).unwrap().pass);
        }
    }

    #[test]
    fn rejection_sampler_meets_orders() {
        let rng = &mut trial_rng(9);
        for n in 1..=3 {
            let (c, attempts) = sample_hypercontraction(rng, 4, &[(n, DefectSide::Hyper)]).unwrap();
            assert!(attempts >= 1);
            assert!(is_hypercontractive(&c, n, DefectSide::Hyper, 1e-12).unwrap().holds);
        }
    }

    #[test]
    fn span_parsing() {
        assert_eq!("2-6".parse::<Span>().unwrap(), Span::new(2, 6));
        assert_eq!("4".parse::<Span>().unwrap(), Span::new(4, 4));
        assert!("6-2".parse::<Span>().is_err());
        assert!("x".parse::<Span>().is_err());
    }
}
