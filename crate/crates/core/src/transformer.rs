//! σ-elementary transformers `X ↦ Σ λₙ^a wₙ^b Aₙ X Bₙ` and regularized Gram operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{Side, WeightedFamily};
use crate::matrix::CMatrix;
use crate::spectral::{hermitian_eigen, default_tol, psd_norm, HermitianSpectrum};

/// A transformer instance. The weights are the primary weights of each
/// family: `λ` from `family_a`, `w` from `family_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformerSpec {
    pub family_a: WeightedFamily,
    pub family_b: WeightedFamily,
    pub exponent_a: f64,
    pub exponent_b: f64,
}

impl TransformerSpec {
    pub fn new(family_a: WeightedFamily, family_b: WeightedFamily, exponent_a: f64, exponent_b: f64) -> Result<Self> {
        if family_a.len() != family_b.len() {
            return Err(Error::DimensionMismatch {
                context: format!("families of length {} and {}", family_a.len(), family_b.len()),
            });
        }
        Ok(TransformerSpec { family_a, family_b, exponent_a, exponent_b })
    }

    /// Coefficients `λₙ^a wₙ^b`.
    pub fn coefficients(&self) -> Vec<f64> {
        let pw = |x: f64, e: f64| if e == 0.0 { 1.0 } else { x.powf(e) };
        self.family_a
            .primary()
            .iter()
            .zip(self.family_b.primary())
            .map(|(&l, &w)| pw(l, self.exponent_a) * pw(w, self.exponent_b))
            .collect()
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let (da, db) = (self.family_a.dim(), self.family_b.dim());
        if x.shape() != (da, db) {
            return Err(Error::DimensionMismatch {
                context: format!("X is {:?}, transformer expects {da}x{db}", x.shape()),
            });
        }
        let mut acc = CMatrix::zeros(da, db);
        for ((a, b), c) in self.family_a.members().iter().zip(self.family_b.members()).zip(self.coefficients()) {
            acc = &acc + &(&(a * x) * b).scale(c);
        }
        Ok(acc)
    }

    /// The transformer of the adjoint pairs `(Bₙ*, Aₙ*)` with the same weights,
    /// so that `adjoint().apply(X*) = apply(X)*`.
    pub fn adjoint(&self) -> Result<Self> {
        let a_star = WeightedFamily::with_secondary(
            self.family_b.members().iter().map(CMatrix::adjoint).collect(),
            self.family_a.primary().to_vec(),
            self.family_a.secondary().to_vec(),
        )?;
        let b_star = WeightedFamily::with_secondary(
            self.family_a.members().iter().map(CMatrix::adjoint).collect(),
            self.family_b.primary().to_vec(),
            self.family_b.secondary().to_vec(),
        )?;
        Self::new(a_star, b_star, self.exponent_a, self.exponent_b)
    }
}

/// Which regularized Gram operator to build from a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GramKind {
    /// `(η + Σ λₙ AₙAₙ*)^{1/2}`
    AStarEta,
    /// `(ε + Σ Aₙ*Aₙ)^{1/2}`
    APlusEps,
    /// `(ζ + Σ Bₙ*Bₙ)^{1/2}`
    BPlusZeta,
    /// `(θ + Σ wₙ BₙBₙ*)^{1/2}`
    BStarTheta,
}

impl GramKind {
    pub fn side(self) -> Side {
        match self {
            GramKind::AStarEta | GramKind::BStarTheta => Side::Left,
            GramKind::APlusEps | GramKind::BPlusZeta => Side::Right,
        }
    }

    /// Exponent applied to the primary weights inside the sum.
    pub fn weight_exponent(self) -> f64 {
        match self {
            GramKind::AStarEta | GramKind::BStarTheta => 1.0,
            GramKind::APlusEps | GramKind::BPlusZeta => 0.0,
        }
    }

    /// The un-regularized Gram sum for this kind.
    pub fn gram(self, family: &WeightedFamily) -> CMatrix {
        family.gram(self.side(), self.weight_exponent())
    }
}

/// `(shift·I + S)^{1/2}` for the Gram sum `S` selected by `kind`.
#[derive(Debug, Clone)]
pub struct RegularizedGram {
    pub kind: GramKind,
    pub shift: f64,
    pub value: CMatrix,
    /// Spectrum of `shift·I + S` (the square of `value`).
    pub spectrum: HermitianSpectrum,
}

impl RegularizedGram {
    /// `value^{-1}`, from the stored spectrum.
    pub fn inverse(&self) -> CMatrix {
        self.value_power(-1.0)
    }

    /// `value^t = (shift·I + S)^{t/2}`.
    pub fn value_power(&self, t: f64) -> CMatrix {
        self.spectrum.apply(|mu| mu.max(f64::MIN_POSITIVE).powf(t / 2.0))
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }
}

pub fn regularized_gram(family: &WeightedFamily, kind: GramKind, shift: f64) -> Result<RegularizedGram> {
    regularize(&kind.gram(family), kind, shift)
}

/// Regularize an already assembled Gram sum.
pub fn regularize(gram: &CMatrix, kind: GramKind, shift: f64) -> Result<RegularizedGram> {
    if !(shift > 0.0 && shift.is_finite()) {
        return Err(Error::InvalidData(format!("regularization shift must be positive, got {shift}")));
    }
    let shifted = gram + &CMatrix::identity(gram.rows()).scale(shift);
    let spectrum = hermitian_eigen(&shifted, default_tol(&shifted))?;
    if spectrum.min() <= 0.0 {
        return Err(Error::SingularGram);
    }
    let value = spectrum.apply(f64::sqrt);
    Ok(RegularizedGram { kind, shift, value, spectrum })
}

/// `‖G⁻¹·S·G⁻¹‖`, where `S` is the Gram sum of `family` matching `g.kind`.
/// Analytically `S/(shift + S)`, hence below one.
pub fn normalized_contraction_check(family: &WeightedFamily, g: &RegularizedGram) -> Result<f64> {
    let gram = g.kind.gram(family);
    if gram.shape() != (g.dim(), g.dim()) {
        return Err(Error::DimensionMismatch { context: "regularized Gram does not match the family".into() });
    }
    let inv = g.inverse();
    psd_norm(&(&(&inv * &gram) * &inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::rank_one_family;
    use crate::matrix::C64;
    use crate::norm::loewner_leq;
    use approx::assert_relative_eq;

    fn member(seed: f64, d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |i, j| C64::new((seed + (2 * i + 3 * j) as f64).cos(), (seed * 0.3 + (i * j) as f64).sin()))
    }

    fn random_family(d: usize, n: usize, salt: f64) -> WeightedFamily {
        let members = (0..n).map(|k| member(salt + k as f64, d)).collect();
        let weights = (0..n).map(|k| 0.25 + k as f64 * 0.6).collect();
        WeightedFamily::new(members, weights).unwrap()
    }

    #[test]
    fn identity_pair_is_identity_map() {
        let fam = WeightedFamily::unweighted(vec![CMatrix::identity(3)]).unwrap();
        let spec = TransformerSpec::new(fam.clone(), fam, 0.0, 0.0).unwrap();
        let x = member(0.7, 3);
        assert!(spec.apply(&x).unwrap().max_abs_diff(&x) < 1e-15);
    }

    #[test]
    fn rank_one_output_coefficients() {
        let d = 4;
        let (fa, fb) = rank_one_family(&CMatrix::identity(d), &CMatrix::identity(d), d).unwrap();
        let lambda = vec![0.5, 1.0, 2.0, 4.0];
        let rho = vec![3.0, 0.2, 1.0, 0.7];
        let (q, r) = (3.0, 1.5);
        let spec = TransformerSpec::new(fa.with_primary(lambda.clone()).unwrap(), fb.with_primary(rho.clone()).unwrap(), 0.5 - 0.5 / q, 0.5 / r)
            .unwrap();
        let x = member(1.3, d);
        let t = spec.apply(&x).unwrap();
        // (e_n ⊗ e_1) X (f_n ⊗ f_1) = ⟨X f_1, e_n⟩ · e_1 f_n*, with the standard bases
        let mut expected = CMatrix::zeros(d, d);
        for n in 0..d {
            let c = lambda[n].powf(0.5 - 0.5 / q) * rho[n].powf(0.5 / r);
            expected.set(0, n, x.get(n, 0) * c);
        }
        assert!(t.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn apply_matches_triple_loop() {
        let (fa, fb) = (random_family(3, 4, 0.1), random_family(2, 4, 2.2));
        let spec = TransformerSpec::new(fa.clone(), fb.clone(), 0.3, -0.4).unwrap();
        let x = CMatrix::from_fn(3, 2, |i, j| C64::new(i as f64 - 0.5, j as f64 + 0.25));
        let mut naive = CMatrix::zeros(3, 2);
        for n in 0..4 {
            let c = fa.primary()[n].powf(0.3) * fb.primary()[n].powf(-0.4);
            let (a, b) = (&fa.members()[n], &fb.members()[n]);
            for i in 0..3 {
                for j in 0..2 {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..3 {
                        for l in 0..2 {
                            acc += a.get(i, k) * x.get(k, l) * b.get(l, j);
                        }
                    }
                    naive.set(i, j, naive.get(i, j) + acc * c);
                }
            }
        }
        assert!(spec.apply(&x).unwrap().max_abs_diff(&naive) < 1e-12);
    }

    #[test]
    fn apply_rejects_bad_shape() {
        let fam = random_family(3, 2, 0.0);
        let spec = TransformerSpec::new(fam.clone(), fam, 0.0, 0.0).unwrap();
        assert!(matches!(spec.apply(&CMatrix::identity(2)), Err(Error::DimensionMismatch { .. })));
        assert!(TransformerSpec::new(random_family(2, 2, 0.0), random_family(2, 3, 0.0), 0.0, 0.0).is_err());
    }

    #[test]
    fn regularized_examples() {
        let zero = WeightedFamily::unweighted(vec![CMatrix::zeros(2, 2)]).unwrap();
        let g = regularized_gram(&zero, GramKind::APlusEps, 4.0).unwrap();
        assert!(g.value.max_abs_diff(&CMatrix::identity(2).scale(2.0)) < 1e-14);
        let one = WeightedFamily::new(vec![CMatrix::identity(2)], vec![3.0]).unwrap();
        let g = regularized_gram(&one, GramKind::AStarEta, 1.0).unwrap();
        assert!(g.value.max_abs_diff(&CMatrix::identity(2).scale(2.0)) < 1e-14);
        assert!(g.inverse().max_abs_diff(&CMatrix::identity(2).scale(0.5)) < 1e-14);
        assert!(regularized_gram(&one, GramKind::AStarEta, 0.0).is_err());
    }

    #[test]
    fn regularized_value_squares_back() {
        let fam = random_family(4, 3, 0.9);
        for kind in [GramKind::AStarEta, GramKind::APlusEps, GramKind::BPlusZeta, GramKind::BStarTheta] {
            let g = regularized_gram(&fam, kind, 1e-3).unwrap();
            let target = &kind.gram(&fam) + &CMatrix::identity(4).scale(1e-3);
            assert!((&g.value * &g.value).max_abs_diff(&target) <= 1e-10 * target.max_abs());
            assert!((&g.value * &g.inverse()).max_abs_diff(&CMatrix::identity(4)) < 1e-8);
        }
    }

    #[test]
    fn contraction_check_closed_forms() {
        let one = WeightedFamily::new(vec![CMatrix::identity(2)], vec![1.0]).unwrap();
        let mut previous = 0.0;
        for eta in [1.0, 1e-2, 1e-4, 1e-6] {
            let g = regularized_gram(&one, GramKind::AStarEta, eta).unwrap();
            let v = normalized_contraction_check(&one, &g).unwrap();
            assert_relative_eq!(v, 1.0 / (eta + 1.0), max_relative = 1e-12);
            assert!(v < 1.0 && v > previous);
            previous = v;
        }
        let fam = random_family(3, 4, 0.4);
        let g = regularized_gram(&fam, GramKind::BStarTheta, 1e6).unwrap();
        let v = normalized_contraction_check(&fam, &g).unwrap();
        assert_relative_eq!(v, psd_norm(&fam.gram_left(1.0)).unwrap() / (1e6 + psd_norm(&fam.gram_left(1.0)).unwrap()), max_relative = 1e-9);
        let g = regularized_gram(&fam, GramKind::APlusEps, 1e-3).unwrap();
        assert!(normalized_contraction_check(&fam, &g).unwrap() <= 1.0 + 1e-8);
    }

    #[test]
    fn regularization_is_monotone_in_shift() {
        let fam = random_family(3, 3, 1.7);
        let lo = regularized_gram(&fam, GramKind::AStarEta, 1e-2).unwrap();
        let hi = regularized_gram(&fam, GramKind::AStarEta, 1.0).unwrap();
        let (lo2, hi2) = (&lo.value * &lo.value, &hi.value * &hi.value);
        assert!(loewner_leq(&lo2.hermitian_part(), &hi2.hermitian_part(), 1e-9).unwrap());
    }

    #[test]
    fn adjoint_covariance() {
        let (fa, fb) = (random_family(3, 3, 0.2), random_family(2, 3, 0.8));
        let spec = TransformerSpec::new(fa, fb, 0.5, 0.25).unwrap();
        let x = CMatrix::from_fn(3, 2, |i, j| C64::new((i + j) as f64, i as f64 - j as f64));
        let lhs = spec.apply(&x).unwrap().adjoint();
        let rhs = spec.adjoint().unwrap().apply(&x.adjoint()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}
