//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while parsing a generator expression string.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    /// The input could not be parsed; `offset` is the byte position at which
    /// the parser got stuck and `expected` lists what would have been legal.
    #[error("syntax error at byte {offset}: expected {}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
    },
    /// An identifier that is neither `x`, a named constant, nor a known function.
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    /// Empty (or all-whitespace) source string.
    #[error("empty expression")]
    Empty,
}

/// Errors raised while evaluating a generator function or its Taylor jet.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// Evaluation left the natural domain of some node, e.g. `log` of a
    /// nonpositive value or a division by zero in a sub-jet.
    #[error("domain error in `{node}` at x = {point}: {detail}")]
    Domain {
        node: String,
        point: f64,
        detail: String,
    },
    /// A derivative of order higher than the jet order was requested.
    #[error("derivative order {order} not supported (maximum {max})")]
    DerivativeOrder { order: usize, max: usize },
    /// The generator can produce values but not derivatives (e.g. tabulated
    /// functions); callers that need jets must handle this.
    #[error("derivatives unavailable for `{name}`")]
    DerivativesUnavailable { name: String },
    /// Evaluation produced a non-finite value.
    #[error("non-finite value from `{node}` at x = {point}")]
    NonFinite { node: String, point: f64 },
}

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    /// Inversion target lies outside the image of the bracket.
    #[error("target {target} outside bracket image [{image_lo}, {image_hi}]")]
    Bracket {
        target: f64,
        image_lo: f64,
        image_hi: f64,
    },

    /// A stated precondition does not hold for the supplied inputs.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid interval: lo = {lo}, hi = {hi}, margin = {margin}")]
    InvalidInterval { lo: f64, hi: f64, margin: f64 },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// The two basis functions of a pair are numerically dependent, so no
    /// well-posed fit exists.
    #[error("degenerate pair: {0}")]
    DegeneratePair(String),

    /// `W^{1,0}` vanished (within guard tolerance) at a grid point.
    #[error("singular Wronskian: W10 vanishes at x = {x}")]
    SingularWronskian { x: f64 },

    /// Polynomial positivity check failed; `witness` is a minimizer.
    #[error("polynomial not positive on the interval: P({witness}) = {value}")]
    NotPositive { witness: f64, value: f64 },

    /// A generator required to be nonvanishing has a zero inside the domain.
    #[error("generator vanishes inside the domain near x = {zero}")]
    DomainSplit { zero: f64 },

    /// `f` has a zero or sign change on the evaluation grid.
    #[error("f vanishes on the grid near x = {x}")]
    FVanishes { x: f64 },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature failure on [{a}, {b}]: {detail}")]
    Quadrature { a: f64, b: f64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
