use thiserror::Error;

/// Errors raised by the symbolic kernel, the tensor calculus and the
/// scenario loader.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unsupported expression: {0}")]
    UnsupportedExpression(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("integrand is not polynomial in `{0}`")]
    NonPolynomialIntegrand(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("degree overflow: {0} + {1} exceeds the chart dimension {2}")]
    DegreeOverflow(usize, usize, usize),
    #[error("interior product of a 0-form")]
    DegreeUnderflow,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("Frolicher-Nijenhuis bracket not implemented for degrees ({0}, {1})")]
    UnsupportedDegree(usize, usize),
    #[error("coordinate map has no inverse; required to push vectors forward")]
    MissingInverse,
    #[error("frame is not complementary to the vertical distribution: {0}")]
    NotComplementary(String),
    #[error("difference form is not vertical: {0}")]
    NotVertical(String),
    #[error("form is not horizontal: {0}")]
    NotHorizontal(String),
    #[error("bivector is not vertical: {0}")]
    NotVerticalBivector(String),
    #[error("orbit integral leaves the coefficient ring: {0}")]
    NonClosedOrbitCoefficients(String),
    #[error("Bianchi residue is not Casimir-valued: {0}")]
    NotCasimirResidue(String),
    #[error("form is not Casimir-valued: {0}")]
    NotCasimir(String),
    #[error("averaged horizontal part is not a cocycle: {0}")]
    NotACocycle(String),
    #[error("supplied primitive does not match: {0}")]
    PrimitiveMismatch(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant violation ({law}): {detail}")]
    InvariantViolation { law: String, detail: String },
    #[error("unknown report format `{0}`")]
    UnknownFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
