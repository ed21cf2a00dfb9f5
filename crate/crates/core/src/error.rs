use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid isoparametric degree d = {0}; must be one of 1, 2, 3, 4, 6")]
    InvalidDegree(i64),

    #[error("c = {0} is positive; swap (alpha, beta) and use c <= 0")]
    PositiveC(i64),

    #[error("weight (1-t)^alpha (1+t)^beta is not integrable: {0}")]
    NonIntegrableWeight(String),

    #[error("dimension n = {0} must be at least 3")]
    InvalidDimension(i64),

    #[error("negative polynomial degree {0}")]
    NegativeDegree(i64),

    #[error("exact path requires rational (alpha, beta)")]
    IrrationalParams,

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("hypotheses alpha >= beta and alpha + beta + 1 > 0 violated (alpha = {alpha}, beta = {beta})")]
    HypothesisViolation { alpha: f64, beta: f64 },

    #[error("Gasper quartic needs k >= 2, got k = {0}")]
    KTooSmall(usize),

    #[error("a = {0} must be positive")]
    NonPositiveA(f64),

    #[error("quartic sign structure violated: {0}")]
    StructureViolation(String),

    #[error("state is not positive at every quadrature node (min u = {min})")]
    NonpositiveState { min: f64 },

    #[error("Newton corrector diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("no sign change of dlambda/ds in the traced window")]
    NoFoldBracket,

    #[error("near-tangent root at t = {t} (|derivative| = {derivative:e})")]
    TangencyDetected { t: f64, derivative: f64 },

    #[error("function is constant; crossings and critical points are undefined")]
    ConstantState,

    #[error("alpha = beta with odd k = {0}: dlambda/ds(0) = 0, branch direction is not determined")]
    ParityViolation(usize),

    #[error("q = {q} is not below the supercritical threshold q_f = {q_f}")]
    SupercriticalExponent { q: f64, q_f: f64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for failures of an iterative or numerical procedure, as opposed to
    /// rejected inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalBreakdown(_)
                | Error::NonpositiveState { .. }
                | Error::NewtonDivergence { .. }
                | Error::NoFoldBracket
                | Error::TangencyDetected { .. }
                | Error::StructureViolation(_)
        )
    }
}
