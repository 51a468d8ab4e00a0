//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, evaluation, space/map construction and the
/// numerical checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Expression text failed to parse.
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },

    /// An identifier other than `t`, `ln` or `abs` appeared in an expression.
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    /// `ln` applied to a non-positive argument during evaluation.
    #[error("ln of non-positive value {arg} while evaluating at t = {t}")]
    LnDomain { arg: f64, t: f64 },

    /// Division by zero during evaluation.
    #[error("division by zero while evaluating at t = {t}")]
    DivisionByZero { t: f64 },

    /// Evaluation requested outside the declared domain.
    #[error("t = {0} is negative; piecewise functions are defined on [0, +inf)")]
    NegativeInput(f64),

    /// The interval list does not form a valid partition.
    #[error("invalid piecewise definition: {0}")]
    Partition(String),

    /// Bad bounds for an interval space.
    #[error("invalid bounds: lo = {lo} must be strictly below hi = {hi}")]
    InvalidBounds { lo: f64, hi: f64 },

    /// A point failed the space's membership test.
    #[error("{x} is not a member of {space}")]
    NotAMember { x: f64, space: String },

    /// The map sent a member outside the space.
    #[error("closure violation: map sends {x} to {image}, which is not a member of {space}")]
    ClosureViolation { x: f64, image: f64, space: String },

    /// The piecewise rule of a self-map does not cover the given point.
    #[error("map has no piece covering x = {0}")]
    MapNotTotal(f64),

    /// A numeric parameter was outside its allowed range.
    #[error("parameter out of range: {0}")]
    Param(String),

    /// A function handed to a reduction constructor is not an altering
    /// distance function.
    #[error("{role} is not an altering distance function: {detail}")]
    NotAltering { role: &'static str, detail: String },

    /// A condition-(ii) grid missed a required point.
    #[error("invalid grid: {0}")]
    Grid(String),

    /// Cauchy window larger than the trace.
    #[error("window {window} too large for a trace of {len} iterates")]
    Window { window: usize, len: usize },

    /// Unknown corpus instance name.
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),

    /// Configuration loading / validation failure.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
