//! Exact rational scalars, sparse polynomials and an exact linear solver.

mod linsolve;
mod multipoly;
mod poly;
mod rational;

pub use linsolve::{solve_linear_exact, Solution, SparseSystem};
pub use multipoly::{Monomial, MultiPoly};
pub use poly::{PolyU, PolyXY, Var};
pub use rational::{q, Rational};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("variable mismatch: {left:?} vs {right:?}")]
    VariableMismatch { left: Var, right: Var },
    #[error("only polynomials in H can be composed with H(x, y), got {0:?}")]
    NotComposable(Var),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}
