use thiserror::Error;

use crate::coefficients::Side;

/// Failures raised across the toolkit.
///
/// Configuration problems and numerical failures are kept apart so the CLI
/// can map them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient {what} is not positive on the validation grid (min {min:e})")]
    NonPositiveCoefficient { what: String, min: f64 },
    #[error("potential {what} is negative on the validation grid (min {min:e})")]
    NegativePotential { what: String, min: f64 },
    #[error("sample abscissae do not cover the {side:?} interval: {detail}")]
    DomainMismatch { side: Side, detail: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("adaptive quadrature did not converge within {budget} nodes")]
    QuadratureFailure { budget: usize },

    #[error("step budget exceeded")]
    StepBudgetExceeded,
    #[error("non-finite state encountered: {0}")]
    NonFiniteState(String),

    #[error("characteristic function evaluated too close to a pole at lambda={lambda}")]
    PoleProximity { lambda: f64 },
    #[error("found only {found} of {wanted} Dirichlet eigenvalues on the {side:?} side")]
    RootCountShortfall { side: Side, found: usize, wanted: usize },
    #[error("no sign change on bracket [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("interlacing violated at index {index}: {detail}")]
    InterlacingViolation { index: usize, detail: String },

    #[error("separation threshold {delta_prime} exceeds the admissible bound {bound}")]
    ThresholdTooLarge { delta_prime: f64, bound: f64 },

    #[error("jump condition violated for mode {n}: relative residual {residual:e}")]
    JumpConditionViolation { n: usize, residual: f64 },
    #[error("branch of mode {n} disagrees with the spectrum tag: {detail}")]
    BranchAmbiguity { n: usize, detail: String },
    #[error("junction value z0 incompatible with traces: mismatch {mismatch:e}")]
    CompatibilityViolation { mismatch: f64 },

    #[error("trace sampling too coarse: {samples} samples, need at least {needed}")]
    UnderResolvedTrace { samples: usize, needed: usize },
    #[error("time horizon {t} does not exceed the critical time {critical}")]
    TimeHorizonTooShort { t: f64, critical: f64 },

    #[error("Gram matrix condition estimate {condition:e} exceeds 1e12")]
    IllConditioned { condition: f64 },

    #[error("CFL condition violated: dt={dt} > {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("index {0} is outside the computed range")]
    IndexOutOfRange(usize),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors that stem from the user's configuration rather than
    /// from a numerical routine.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveCoefficient { .. }
                | Error::NegativePotential { .. }
                | Error::DomainMismatch { .. }
                | Error::InvalidConfig(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
