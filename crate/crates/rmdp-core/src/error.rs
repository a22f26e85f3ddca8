use thiserror::Error;

/// Errors raised by model construction, solvers, and experiment plumbing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state {state}: empty action set")]
    EmptyActionSet { state: usize },

    #[error("discount outside (0,1): got {value}")]
    DiscountOutOfRange { value: f64 },

    #[error("negative cost {value} at (x={state}, a={action}, w={disturbance})")]
    NegativeCost {
        state: usize,
        action: usize,
        disturbance: usize,
        value: f64,
    },

    #[error("non-finite cost at (x={state}, a={action}, w={disturbance})")]
    NonFiniteCost {
        state: usize,
        action: usize,
        disturbance: usize,
    },

    #[error("metric is not symmetric at ({i},{j})")]
    MetricAsymmetric { i: usize, j: usize },

    #[error("metric has nonzero diagonal at {i}")]
    MetricNonzeroDiagonal { i: usize },

    #[error("metric has negative entry at ({i},{j})")]
    MetricNegative { i: usize, j: usize },

    #[error("metric violates the triangle inequality on ({i},{j},{k})")]
    MetricTriangle { i: usize, j: usize, k: usize },

    #[error("metric must be square with side {expected}, got {got} rows")]
    MetricShape { expected: usize, got: usize },

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("missing table entry at (x={state}, a={action}, w={disturbance})")]
    MissingTableEntry {
        state: usize,
        action: usize,
        disturbance: usize,
    },

    #[error("table entry at (x={state}, a={action}, w={disturbance}) defined for inadmissible action")]
    InadmissibleTableEntry {
        state: usize,
        action: usize,
        disturbance: usize,
    },

    #[error("duplicate table entry at (x={state}, a={action}, w={disturbance})")]
    DuplicateTableEntry {
        state: usize,
        action: usize,
        disturbance: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid distribution: {reason}")]
    InvalidDistribution { reason: String },

    #[error("empty sample list")]
    EmptySamples,

    #[error("distance kind {kind} requires a disturbance metric")]
    MissingMetric { kind: &'static str },

    #[error("support size {size} too large for {kind} (max {max})")]
    SupportTooLarge {
        kind: &'static str,
        size: usize,
        max: usize,
    },

    #[error("policy action {action} inadmissible in state {state}")]
    PolicyActionInadmissible { state: usize, action: usize },

    #[error("tolerance must be positive, got {value}")]
    InvalidTolerance { value: f64 },

    #[error("radius must be nonnegative, got {value}")]
    InvalidRadius { value: f64 },

    #[error("confidence parameter gamma must lie in (0,1), got {value}")]
    InvalidGamma { value: f64 },

    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },

    #[error("regime violation: alpha * L_F = {alpha_lf} must be < 1")]
    RegimeViolation { alpha_lf: f64 },

    #[error("payoff vector has a non-finite entry at {index}")]
    NonFinitePayoff { index: usize },

    #[error("solver failure: {reason}")]
    SolverFailure { reason: String },

    #[error("model file field `{field}`: {reason}")]
    ModelFile { field: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
