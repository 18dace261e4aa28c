//! Finite weighted operator families and their Gram operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::spectral::{op_norm, psd_norm};

/// Which Gram operator of a family: `Σ w Aₙ Aₙ*` (left) or `Σ w Aₙ* Aₙ` (right).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A finite family `(Aₙ)` of square `d×d` matrices with strictly positive
/// primary weights `λ` and secondary weights `w` (all ones when not given).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedFamily {
    members: Vec<CMatrix>,
    primary: Vec<f64>,
    secondary: Vec<f64>,
}

fn check_weights(weights: &[f64], len: usize, what: &str) -> Result<()> {
    if weights.len() != len {
        return Err(Error::DimensionMismatch {
            context: format!("{what} has {} entries for {len} members", weights.len()),
        });
    }
    if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::InvalidWeights(format!("{what} contains {bad}")));
    }
    Ok(())
}

impl WeightedFamily {
    pub fn new(members: Vec<CMatrix>, primary: Vec<f64>) -> Result<Self> {
        let secondary = vec![1.0; members.len()];
        Self::with_secondary(members, primary, secondary)
    }

    pub fn with_secondary(members: Vec<CMatrix>, primary: Vec<f64>, secondary: Vec<f64>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyFamily)?;
        let d = first.rows();
        if members.iter().any(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::DimensionMismatch { context: format!("family members must all be {d}x{d}") });
        }
        check_weights(&primary, members.len(), "primary weights")?;
        check_weights(&secondary, members.len(), "secondary weights")?;
        Ok(WeightedFamily { members, primary, secondary })
    }

    /// Unit weights on both sides.
    pub fn unweighted(members: Vec<CMatrix>) -> Result<Self> {
        let ones = vec![1.0; members.len()];
        Self::new(members, ones)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].rows()
    }

    pub fn members(&self) -> &[CMatrix] {
        &self.members
    }

    pub fn primary(&self) -> &[f64] {
        &self.primary
    }

    pub fn secondary(&self) -> &[f64] {
        &self.secondary
    }

    /// Same weights, members replaced by `f(n, Aₙ)`.
    pub fn map_members(&self, mut f: impl FnMut(usize, &CMatrix) -> CMatrix) -> Result<Self> {
        let members = self.members.iter().enumerate().map(|(n, m)| f(n, m)).collect();
        Self::with_secondary(members, self.primary.clone(), self.secondary.clone())
    }

    pub fn with_primary(&self, primary: Vec<f64>) -> Result<Self> {
        Self::with_secondary(self.members.clone(), primary, self.secondary.clone())
    }

    /// `Σ λₙ^e Aₙ* Aₙ`.
    pub fn gram_right(&self, weight_exponent: f64) -> CMatrix {
        weighted_gram(&self.members, Side::Right, &powers(&self.primary, weight_exponent), 0)
    }

    /// `Σ λₙ^e Aₙ Aₙ*`.
    pub fn gram_left(&self, weight_exponent: f64) -> CMatrix {
        weighted_gram(&self.members, Side::Left, &powers(&self.primary, weight_exponent), 0)
    }

    pub fn gram(&self, side: Side, weight_exponent: f64) -> CMatrix {
        match side {
            Side::Left => self.gram_left(weight_exponent),
            Side::Right => self.gram_right(weight_exponent),
        }
    }

    /// Operator norm of the `1×N` row `[A₁, …, A_N]`, via `‖Σ Aₙ Aₙ*‖^{1/2}`.
    pub fn row_norm(&self) -> Result<f64> {
        Ok(psd_norm(&self.gram_left(0.0))?.sqrt())
    }

    /// Operator norm of the `N×1` column `[A₁, …, A_N]ᵀ`, via `‖Σ Aₙ* Aₙ‖^{1/2}`.
    pub fn column_norm(&self) -> Result<f64> {
        Ok(psd_norm(&self.gram_right(0.0))?.sqrt())
    }

    pub fn block_row(&self) -> Result<CMatrix> {
        CMatrix::hstack(&self.members)
    }

    pub fn block_column(&self) -> Result<CMatrix> {
        CMatrix::vstack(&self.members)
    }

    /// `max_n ‖Aₙ‖`.
    pub fn max_member_norm(&self) -> Result<f64> {
        self.members.iter().try_fold(0.0_f64, |acc, m| Ok(acc.max(op_norm(m)?)))
    }

    /// Norm of the Gram sum restricted to indices `from..=len` (1-based);
    /// `from = len + 1` gives the empty sum.
    pub fn tail_norm(&self, from: usize, side: Side, weight_exponent: f64) -> Result<f64> {
        if from == 0 || from > self.len() + 1 {
            return Err(Error::IndexOutOfRange { index: from, max: self.len() + 1 });
        }
        if from == self.len() + 1 {
            return Ok(0.0);
        }
        let gram = weighted_gram(&self.members, side, &powers(&self.primary, weight_exponent), from - 1);
        psd_norm(&gram)
    }
}

fn powers(weights: &[f64], e: f64) -> Vec<f64> {
    weights.iter().map(|w| if e == 0.0 { 1.0 } else { w.powf(e) }).collect()
}

/// `Σ_{n ≥ skip} cₙ Mₙ Mₙ*` (left) or `Σ_{n ≥ skip} cₙ Mₙ* Mₙ` (right).
pub fn weighted_gram(members: &[CMatrix], side: Side, coefficients: &[f64], skip: usize) -> CMatrix {
    let d = match side {
        Side::Left => members[0].rows(),
        Side::Right => members[0].cols(),
    };
    let mut acc = CMatrix::zeros(d, d);
    for (m, &c) in members.iter().zip(coefficients).skip(skip) {
        let term = match side {
            Side::Left => m * &m.adjoint(),
            Side::Right => &m.adjoint() * m,
        };
        acc = &acc + &term.scale(c);
    }
    acc
}

/// How weights enter the Gram sums of the two-sided module norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MaxNormWeighting {
    /// `Σ λₙ Aₙ*Aₙ` and `Σ ρₙ AₙAₙ*`.
    #[default]
    FirstPower,
    /// `Σ λₙ^{1/2} Aₙ*Aₙ` and `Σ ρₙ^{1/2} AₙAₙ*`.
    HalfPower,
}

/// `max(‖Σ λₙ Aₙ*Aₙ‖^{1/2}, ‖Σ ρₙ AₙAₙ*‖^{1/2})`, the norm of the
/// two-sided weighted module.
pub fn module_max_norm(family: &WeightedFamily, lambda: &[f64], rho: &[f64], weighting: MaxNormWeighting) -> Result<f64> {
    check_weights(lambda, family.len(), "lambda")?;
    check_weights(rho, family.len(), "rho")?;
    let e = match weighting {
        MaxNormWeighting::FirstPower => 1.0,
        MaxNormWeighting::HalfPower => 0.5,
    };
    let right = weighted_gram(family.members(), Side::Right, &powers(lambda, e), 0);
    let left = weighted_gram(family.members(), Side::Left, &powers(rho, e), 0);
    Ok(psd_norm(&right)?.sqrt().max(psd_norm(&left)?.sqrt()))
}

/// The families `(eₙ ⊗ e₁)` and `(fₙ ⊗ f₁)` for `n = 1..=count`, where
/// the bases are the columns of `e` and `f`. Weights are all ones.
pub fn rank_one_family(e: &CMatrix, f: &CMatrix, count: usize) -> Result<(WeightedFamily, WeightedFamily)> {
    let build = |basis: &CMatrix| -> Result<WeightedFamily> {
        if !basis.is_square() {
            return Err(Error::DimensionMismatch { context: "basis matrix must be square".into() });
        }
        let d = basis.rows();
        if count == 0 || count > d {
            return Err(Error::CountTooLarge { count, dim: d });
        }
        let first = basis.col(0);
        let members = (0..count).map(|n| CMatrix::rank_one(&basis.col(n), &first)).collect::<Result<Vec<_>>>()?;
        WeightedFamily::unweighted(members)
    };
    Ok((build(e)?, build(f)?))
}

/// `max_k |(U*U − I)_k|`, the orthonormality defect of the columns.
pub fn orthonormality_defect(basis: &CMatrix) -> f64 {
    (&basis.adjoint() * basis).max_abs_diff(&CMatrix::identity(basis.cols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;
    use crate::spectral::op_norm;
    use approx::assert_relative_eq;

    fn member(seed: f64, d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |i, j| C64::new((seed + (3 * i + j) as f64).sin(), (seed * 1.7 + (i + 5 * j) as f64).cos()))
    }

    #[test]
    fn standard_rank_one_family_right_gram_is_identity() {
        let (fam, _) = rank_one_family(&CMatrix::identity(4), &CMatrix::identity(4), 4).unwrap();
        assert!(fam.gram_right(0.0).max_abs_diff(&CMatrix::identity(4)) < 1e-15);
        assert_relative_eq!(fam.column_norm().unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn weighted_rank_one_left_gram() {
        let (fam, _) = rank_one_family(&CMatrix::identity(3), &CMatrix::identity(3), 3).unwrap();
        let fam = fam.with_primary(vec![0.5, 2.0, 1.25]).unwrap();
        let mut expected = CMatrix::zeros(3, 3);
        expected.set(0, 0, C64::new(3.75, 0.0));
        assert!(fam.gram_left(1.0).max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn single_member_cases() {
        let fam = WeightedFamily::new(vec![CMatrix::identity(2)], vec![2.0]).unwrap();
        assert!(fam.gram_right(1.0).max_abs_diff(&CMatrix::identity(2).scale(2.0)) < 1e-15);
        let pair = WeightedFamily::unweighted(vec![CMatrix::identity(2), CMatrix::identity(2)]).unwrap();
        assert_relative_eq!(pair.row_norm().unwrap(), 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn unitary_left_gram_is_identity() {
        let u = CMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        let fam = WeightedFamily::unweighted(vec![u]).unwrap();
        assert!(fam.gram_left(1.0).max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn block_oracles() {
        let fam = WeightedFamily::unweighted((0..3).map(|k| member(k as f64, 3)).collect()).unwrap();
        let row = op_norm(&fam.block_row().unwrap()).unwrap();
        let col = op_norm(&fam.block_column().unwrap()).unwrap();
        assert_relative_eq!(fam.row_norm().unwrap(), row, max_relative = 1e-9);
        assert_relative_eq!(fam.column_norm().unwrap(), col, max_relative = 1e-9);
    }

    #[test]
    fn gram_matches_naive_loop() {
        let members: Vec<CMatrix> = (0..4).map(|k| member(0.3 * k as f64, 3)).collect();
        let weights = vec![0.5, 1.5, 3.0, 0.1];
        let fam = WeightedFamily::new(members.clone(), weights.clone()).unwrap();
        let mut naive = CMatrix::zeros(3, 3);
        for (m, w) in members.iter().zip(&weights) {
            for i in 0..3 {
                for j in 0..3 {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..3 {
                        acc += m.get(k, i).conj() * m.get(k, j);
                    }
                    naive.set(i, j, naive.get(i, j) + acc * w);
                }
            }
        }
        assert!(fam.gram_right(1.0).max_abs_diff(&naive) < 1e-12);
    }

    #[test]
    fn max_norm_examples() {
        let fam = WeightedFamily::unweighted(vec![CMatrix::identity(2)]).unwrap();
        assert_relative_eq!(module_max_norm(&fam, &[4.0], &[1.0], MaxNormWeighting::FirstPower).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(module_max_norm(&fam, &[4.0], &[1.0], MaxNormWeighting::HalfPower).unwrap(), 2f64.sqrt(), epsilon = 1e-14);
        // rank-one family with λ = ρ = 2⁻ⁿ: column side is max λ = 1/2, row side Σ 2⁻ⁿ
        let (fam, _) = rank_one_family(&CMatrix::identity(4), &CMatrix::identity(4), 4).unwrap();
        let w: Vec<f64> = (1..=4).map(|n| 0.5f64.powi(n)).collect();
        let expected = 0.5f64.sqrt().max(w.iter().sum::<f64>().sqrt());
        assert_relative_eq!(module_max_norm(&fam, &w, &w, MaxNormWeighting::FirstPower).unwrap(), expected, max_relative = 1e-13);
    }

    #[test]
    fn tail_norm_geometric() {
        let len = 6;
        let members: Vec<CMatrix> = (1..=len).map(|n| CMatrix::identity(2).scale(2f64.powf(-(n as f64) / 2.0))).collect();
        let fam = WeightedFamily::unweighted(members).unwrap();
        for from in 1..=len {
            let expected = 2f64.powi(1 - from as i32) - 2f64.powi(-(len as i32));
            assert_relative_eq!(fam.tail_norm(from, Side::Right, 0.0).unwrap(), expected, max_relative = 1e-13);
        }
        assert_eq!(fam.tail_norm(len + 1, Side::Left, 0.0).unwrap(), 0.0);
        assert_relative_eq!(fam.tail_norm(1, Side::Left, 0.0).unwrap(), psd_norm(&fam.gram_left(0.0)).unwrap());
        assert!(matches!(fam.tail_norm(0, Side::Left, 0.0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(fam.tail_norm(len + 2, Side::Left, 0.0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(WeightedFamily::unweighted(vec![]), Err(Error::EmptyFamily)));
        assert!(matches!(WeightedFamily::new(vec![CMatrix::identity(2)], vec![0.0]), Err(Error::InvalidWeights(_))));
        assert!(matches!(
            WeightedFamily::unweighted(vec![CMatrix::identity(2), CMatrix::identity(3)]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            rank_one_family(&CMatrix::identity(2), &CMatrix::identity(2), 3),
            Err(Error::CountTooLarge { .. })
        ));
    }

    #[test]
    fn single_projector_family() {
        let (fam, _) = rank_one_family(&CMatrix::identity(3), &CMatrix::identity(3), 1).unwrap();
        assert_eq!(fam.len(), 1);
        let p = &fam.members()[0];
        assert!((p * p).max_abs_diff(p) < 1e-15);
    }
}
