//! Numerical toolkit for Schatten–von Neumann norms and σ-elementary
//! transformers `X ↦ Σ Aₙ X Bₙ`, with checkers that evaluate weighted
//! Cauchy–Schwarz norm inequalities on concrete matrix instances.

pub mod error;
pub mod family;
pub mod hypercontraction;
pub mod matrix;
pub mod norm;
pub mod spectral;
pub mod tolerance;
pub mod transformer;
pub mod verify;

pub use error::{Error, Result};
pub use family::{Side, WeightedFamily};
pub use matrix::{CMatrix, C64};
pub use norm::{schatten_norm, Exponent};
pub use tolerance::Tolerance;
pub use transformer::{GramKind, RegularizedGram, TransformerSpec};
pub use verify::{check, CheckerId, Context, InequalityReport, Instance, SchattenTriple, ShiftGrid};
