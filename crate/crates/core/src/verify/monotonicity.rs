use serde::{Deserialize, Serialize};

use super::{Context, InequalityReport};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::norm::{loewner_margin, schatten_norm, Exponent};

/// `‖AXB‖_s ≤ ‖CXD‖_s` whenever `A*A ≤ C*C` and `BB* ≤ DD*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityInstance {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
    pub x: CMatrix,
    pub s: Exponent,
}

pub fn check_double_monotonicity(inst: &MonotonicityInstance, ctx: &Context) -> Result<InequalityReport> {
    let MonotonicityInstance { a, b, c, d, x, s } = inst;
    let left = (&a.adjoint() * a, &c.adjoint() * c);
    let right = (b * &b.adjoint(), d * &d.adjoint());
    let mut margins = [0.0; 2];
    for (k, (small, big)) in [left, right].iter().enumerate() {
        let tol = ctx.tolerance.slack(big.max_abs().max(small.max_abs()));
        let margin = loewner_margin(&small.hermitian_part(), &big.hermitian_part(), tol)?;
        if margin < -tol {
            let which = if k == 0 { "A*A <= C*C" } else { "BB* <= DD*" };
            return Err(Error::PreconditionUnmet(format!("{which} fails with margin {margin:e}")));
        }
        margins[k] = margin;
    }
    let lhs = schatten_norm(&(&(a * x) * b), *s)?;
    let rhs = schatten_norm(&(&(c * x) * d), *s)?;
    Ok(InequalityReport::new("monotonicity", lhs, rhs, ctx)
        .param("s", s)
        .param("dims", x.shape())
        .param("left_margin", margins[0])
        .param("right_margin", margins[1]))
}
