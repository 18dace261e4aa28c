//! Hermitian spectral calculus and singular values.

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64};

const MAX_SWEEPS: usize = 10_000;
/// Eigenvalues below this fraction of the spectral radius are round-off.
pub const KERNEL_RTOL: f64 = 1e-13;

/// Eigen-decomposition `U·diag(μ)·U*` of a Hermitian matrix, eigenvalues
/// sorted in descending order.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianSpectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `U·diag(f(μ))·U*`.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> CMatrix {
        let u = self.eigenvectors.as_nalgebra();
        let mut scaled = u.clone();
        for (j, &mu) in self.eigenvalues.iter().enumerate() {
            let w = C64::new(f(mu), 0.0);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= w;
            }
        }
        CMatrix::from_nalgebra(scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|mu| mu)
    }
}

/// Default Hermiticity / positivity tolerance, relative to the entry scale.
pub fn default_tol(m: &CMatrix) -> f64 {
    1e-9 * m.max_abs()
}

pub fn hermitian_eigen(m: &CMatrix, tol: f64) -> Result<HermitianSpectrum> {
    let deviation = m.hermitian_deviation();
    if !(deviation <= tol) {
        return Err(Error::NotHermitian { deviation, tol });
    }
    let sym = m.hermitian_part().into_nalgebra();
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::ConvergenceFailure { routine: "hermitian eigensolver" })?;
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianSpectrum { eigenvalues, eigenvectors: CMatrix::from_nalgebra(vectors) })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix, tol: f64) -> Result<f64> {
    Ok(hermitian_eigen(m, tol)?.min())
}

/// Real power of a positive semidefinite matrix.
///
/// Eigenvalues below `-tol` are an error. Eigenvalues under
/// `KERNEL_RTOL` times the largest one are treated as zero, so positive
/// powers vanish on the numerical kernel and negative powers fail there.
/// `t = 0` returns the identity, including on the kernel.
pub fn frac_power(p: &CMatrix, t: f64, tol: f64) -> Result<CMatrix> {
    let spectrum = hermitian_eigen(p, tol)?;
    psd_power(&spectrum, t, tol)
}

/// Power of an already decomposed PSD matrix; see [`frac_power`].
pub fn psd_power(spectrum: &HermitianSpectrum, t: f64, tol: f64) -> Result<CMatrix> {
    let lowest = spectrum.min();
    if lowest < -tol {
        return Err(Error::NotPsd { eigenvalue: lowest, tol });
    }
    if t == 0.0 {
        return Ok(CMatrix::identity(spectrum.dim()));
    }
    let zero = KERNEL_RTOL * spectrum.max().max(0.0);
    if t < 0.0 && lowest <= zero {
        return Err(Error::SingularPower { exponent: t, eigenvalue: lowest, tol: zero });
    }
    Ok(spectrum.apply(|mu| if mu <= zero { 0.0 } else { mu.powf(t) }))
}

/// Square root of a PSD matrix.
pub fn psd_sqrt(p: &CMatrix) -> Result<CMatrix> {
    frac_power(p, 0.5, default_tol(p))
}

fn svd(m: &CMatrix, vectors: bool) -> Result<SVD<C64, nalgebra::Dyn, nalgebra::Dyn>> {
    SVD::try_new(m.as_nalgebra().clone(), vectors, vectors, f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::ConvergenceFailure { routine: "singular value decomposition" })
}

/// Singular values in descending order; `min(rows, cols)` of them.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let mut sv: Vec<f64> = svd(m, false)?.singular_values.iter().map(|s| s.max(0.0)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Thin singular value decomposition `M = U·diag(σ)·V*`, σ descending.
#[derive(Debug, Clone)]
pub struct SingularDecomposition {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

pub fn singular_decomposition(m: &CMatrix) -> Result<SingularDecomposition> {
    let d = svd(m, true)?;
    let (u, v_t) = match (d.u, d.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::ConvergenceFailure { routine: "singular value decomposition" }),
    };
    let k = d.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| d.singular_values[b].total_cmp(&d.singular_values[a]));
    let sigma = order.iter().map(|&i| d.singular_values[i].max(0.0)).collect();
    let u = DMatrix::from_fn(u.nrows(), k, |i, j| u[(i, order[j])]);
    let v = DMatrix::from_fn(v_t.ncols(), k, |i, j| v_t[(order[j], i)].conj());
    Ok(SingularDecomposition { u: CMatrix::from_nalgebra(u), sigma, v: CMatrix::from_nalgebra(v) })
}

/// Operator (spectral) norm.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Operator norm of a PSD matrix via its largest eigenvalue.
pub fn psd_norm(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m, default_tol(m))?.max().max(0.0))
}
