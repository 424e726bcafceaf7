//! Exact coefficient ring: polynomials in chart coordinates with rational
//! coefficients times trigonometric polynomials in the group angles.

pub mod audit;
mod chart;
mod expr;
mod scalar;

pub use chart::{Angle, Chart, Symbol, Var};
pub use expr::{normalize, parse_expr, parse_scalar, Expr};
pub use scalar::{int, rat, Harmonic, IteratedMean, Monomial, Rational, Scalar, Trig};
