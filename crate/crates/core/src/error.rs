use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. Diagnostic values are reported as `f64`
/// whatever scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atom at {position} has non-positive weight {weight}")]
    NonPositiveWeight { position: f64, weight: f64 },
    #[error("atom weights sum to {total}, expected 1")]
    MassNotOne { total: f64 },
    #[error("measure has no atoms")]
    EmptyMeasure,
    #[error("non-finite atom position or weight")]
    NonFiniteAtom,
    #[error("dilation scale {0} must be positive")]
    NonPositiveScale(f64),
    #[error("parameter r = {0} must be positive")]
    NonPositiveR(f64),
    #[error("point {re}{im:+}i is not in the admissible half-plane")]
    RealAxisInput { re: f64, im: f64 },
    #[error("no bracket for target {target} on branch {branch} (searched ({lo}, {hi}))")]
    BracketFailure {
        branch: usize,
        target: f64,
        lo: f64,
        hi: f64,
    },
    #[error("atom budget exceeded: {required} atoms needed, budget is {budget}")]
    AtomBudgetExceeded { required: f64, budget: usize },
    #[error("smoothing height y = {0} must be positive")]
    NonPositiveY(f64),
    #[error("grid is not strictly increasing at index {index}")]
    UnsortedGrid { index: usize },
    #[error("curves are sampled on different grids")]
    GridMismatch,
    #[error("y = {y} outside the admissible range (0, {upper})")]
    YOutOfRange { y: f64, upper: f64 },
    #[error("|eps| = {magnitude} at x = {x} violates |eps| < {limit}")]
    EpsilonTooLarge { x: f64, magnitude: f64, limit: f64 },
    #[error("measure is not standardized: mean {mean}, variance {variance}")]
    NotStandardized { mean: f64, variance: f64 },
    #[error("operation requires a finitely atomic measure")]
    NotAtomic,
    #[error("bound part {part} does not apply when c = {c}")]
    PartNotApplicable { part: u8, c: f64 },
    #[error("need at least 3 rate points, got {0}")]
    TooFewPoints(usize),
    #[error("distance {distance} at n = {n} is not positive")]
    NonPositiveDistance { n: u64, distance: f64 },
    #[error("orbit hit a pole of the boundary map at step {index} (x = {x})")]
    PoleHit { index: usize, x: f64 },
    #[error("interval [{a}, {b}] is invalid")]
    InvalidInterval { a: f64, b: f64 },
    #[error("t = {0} must be non-negative")]
    NegativeT(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
