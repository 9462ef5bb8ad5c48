//! Error types shared across the solver modules.

pub type Result<T> = std::result::Result<T, SolverError>;

/// Failure modes of the numerical machinery.
///
/// Most variants are diagnostic: they indicate that the supplied data left
/// the regime in which the reconstruction is well conditioned, not a bug in
/// the caller.
#[derive(Debug, Clone, thiserror::Error)]
pub enum SolverError {
    #[error("grid needs at least {required} samples, got {got}")]
    GridTooCoarse { required: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("trajectory became non-finite at x = {x} (lambda = {lambda})")]
    NonFiniteState { x: f64, lambda: f64 },

    #[error(
        "characteristic value routes disagree at lambda = {lambda}: {route_a} vs {route_b}"
    )]
    WronskianMismatch {
        lambda: f64,
        route_a: f64,
        route_b: f64,
    },

    #[error("no sign change found for eigenvalue index {index} after bracket expansion")]
    BracketFailure { index: usize },

    #[error("eigenvalue {lambda} at index {index} is negative; apply a spectral shift first")]
    NegativeEigenvalue { index: usize, lambda: f64 },

    #[error("spectrum too short: need at least {required} eigenvalues, got {got}")]
    TooShort { required: usize, got: usize },

    #[error("evaluation point lambda = {lambda} collides with reference zero {reference}")]
    NearZeroDenominator { lambda: f64, reference: f64 },

    #[error(
        "Gram matrix ill conditioned: smallest singular value {smallest} below floor {floor}"
    )]
    IllConditioned { smallest: f64, floor: f64 },

    #[error("Weyl function pole: |phi(pi)| = {magnitude} at lambda = {lambda}")]
    PoleProximity { lambda: f64, magnitude: f64 },

    #[error("norming constant {value} at index {index} is not positive; data is not realizable")]
    NonPositiveNorming { index: usize, value: f64 },

    #[error("Gelfand-Levitan system singular at x = {x}")]
    SingularGlSystem { x: f64 },

    #[error("denominator underflow at index {index}: |{which}| = {magnitude} below floor")]
    DenominatorUnderflow {
        index: usize,
        which: &'static str,
        magnitude: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Error from the end-to-end solve, tagged with the stage of the
/// reconstruction procedure at which it occurred (1 = spectrum
/// decomposition, 2 = auxiliary data, 3 = right-hand sides, 4 = moment
/// solves, 5 = reconstruction from Cauchy data).
#[derive(Debug, Clone, thiserror::Error)]
#[error("pipeline step {step} failed: {source}")]
pub struct PipelineError {
    pub step: u8,
    #[source]
    pub source: SolverError,
}

impl PipelineError {
    pub fn at(step: u8) -> impl Fn(SolverError) -> PipelineError {
        move |source| PipelineError { step, source }
    }
}
