use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M*| entry {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("{routine} did not converge")]
    ConvergenceFailure { routine: &'static str },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below -{tol:e}")]
    NotPsd { eigenvalue: f64, tol: f64 },

    #[error("negative power {exponent} of a matrix with eigenvalue {eigenvalue:e} below {tol:e}")]
    SingularPower { exponent: f64, eigenvalue: f64, tol: f64 },

    #[error("Schatten exponent must be >= 1, got {0}")]
    BadExponent(f64),

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("invalid matrix data: {0}")]
    InvalidData(String),

    #[error("weights must be finite and strictly positive ({0})")]
    InvalidWeights(String),

    #[error("family must contain at least one member")]
    EmptyFamily,

    #[error("requested {count} basis vectors but dimension is {dim}")]
    CountTooLarge { count: usize, dim: usize },

    #[error("index {index} outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("defect order {0} outside 1..=60")]
    OrderTooLarge(usize),

    #[error("operator norm {norm} exceeds 1 + {tol:e}")]
    NotContraction { norm: f64, tol: f64 },

    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("binomial weight overflows 64 bits")]
    Overflow,

    #[error("not {order}-{kind}: minimal defect eigenvalue {margin:e}")]
    NotHypercontractive { kind: &'static str, order: usize, margin: f64 },

    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),

    #[error("unknown variant `{0}`")]
    VariantUnknown(String),

    #[error("invalid exponent triple: {0}")]
    BadTriple(String),

    #[error("s = {s} outside the range of case {case}")]
    CaseExponentMismatch { case: String, s: f64 },

    #[error("substitution undefined: {0}")]
    BadSubstitution(String),

    #[error("basis is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("regularized Gram operator is singular")]
    SingularGram,
}
