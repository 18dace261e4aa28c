//! Schatten norms, Hölder duality and the Loewner order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::spectral::{self, min_eigenvalue, singular_decomposition, singular_values};

/// An exponent in `[1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExponentRepr", into = "ExponentRepr")]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Number(f64),
    Text(String),
}

impl From<Exponent> for ExponentRepr {
    fn from(e: Exponent) -> Self {
        match e {
            Exponent::Finite(x) => ExponentRepr::Number(x),
            Exponent::Infinity => ExponentRepr::Text("inf".into()),
        }
    }
}

impl TryFrom<ExponentRepr> for Exponent {
    type Error = Error;
    fn try_from(r: ExponentRepr) -> Result<Self> {
        match r {
            ExponentRepr::Number(x) => Exponent::new(x),
            ExponentRepr::Text(t) => t.parse(),
        }
    }
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);

    /// Accepts any `x ≥ 1`; `f64::INFINITY` maps to [`Exponent::Infinity`].
    pub fn new(x: f64) -> Result<Self> {
        if x == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if x >= 1.0 && x.is_finite() {
            Ok(Exponent::Finite(x))
        } else {
            Err(Error::BadExponent(x))
        }
    }

    /// `1/x` with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(x) => 1.0 / x,
            Exponent::Infinity => 0.0,
        }
    }

    /// Hölder conjugate `s'` with `1/s + 1/s' = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::ONE,
            Exponent::Finite(x) if x == 1.0 => Exponent::Infinity,
            Exponent::Finite(x) => Exponent::Finite(x / (x - 1.0)),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(x) => x,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(x) => write!(f, "{x}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => {
                let x: f64 = other.parse().map_err(|_| Error::InvalidData(format!("bad exponent `{s}`")))?;
                Exponent::new(x)
            }
        }
    }
}

/// ℓ^s norm of a nonnegative vector.
pub fn lp_norm(values: &[f64], s: Exponent) -> f64 {
    match s {
        Exponent::Infinity => values.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(p) if p == 1.0 => values.iter().sum(),
        Exponent::Finite(p) if p == 2.0 => values.iter().map(|v| v * v).sum::<f64>().sqrt(),
        Exponent::Finite(p) => {
            // scale by the maximum to avoid overflow in σ^p
            let top = values.iter().copied().fold(0.0, f64::max);
            if top == 0.0 {
                return 0.0;
            }
            top * values.iter().map(|v| (v / top).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// Schatten-`s` norm: the ℓ^s norm of the singular values.
pub fn schatten_norm(m: &CMatrix, s: Exponent) -> Result<f64> {
    if let Exponent::Finite(x) = s {
        if !(x >= 1.0) {
            return Err(Error::BadExponent(x));
        }
    }
    Ok(lp_norm(&singular_values(m)?, s))
}

/// Schatten norm taking a raw float (`f64::INFINITY` for the operator norm).
pub fn schatten_norm_f64(m: &CMatrix, s: f64) -> Result<f64> {
    schatten_norm(m, Exponent::new(s)?)
}

/// A norming partner of `X` in the dual ideal: `Y` with
/// `tr(XY) = ‖X‖_s·‖Y‖_{s'}`, built from the singular decomposition.
pub fn dual_partner(x: &CMatrix, s: Exponent) -> Result<CMatrix> {
    let d = singular_decomposition(x)?;
    let weights: Vec<f64> = match s {
        Exponent::Infinity => d.sigma.iter().enumerate().map(|(i, _)| if i == 0 { 1.0 } else { 0.0 }).collect(),
        Exponent::Finite(p) => d.sigma.iter().map(|&sv| if sv > 0.0 { sv.powf(p - 1.0) } else { 0.0 }).collect(),
    };
    Ok(&(&d.v * &CMatrix::diag(&weights)) * &d.u.adjoint())
}

/// `A ≤ B` in the Loewner order, up to `tol` on the smallest eigenvalue of `B − A`.
pub fn loewner_leq(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<bool> {
    Ok(loewner_margin(a, b, tol)? >= -tol)
}

/// Smallest eigenvalue of `B − A`.
pub fn loewner_margin(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<f64> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: format!("Loewner comparison of {:?} and {:?}", a.shape(), b.shape()),
        });
    }
    for m in [a, b] {
        let deviation = m.hermitian_deviation();
        if !(deviation <= tol) {
            return Err(Error::NotHermitian { deviation, tol });
        }
    }
    min_eigenvalue(&(b - a), 2.0 * tol)
}

pub use spectral::op_norm;
