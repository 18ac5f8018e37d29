use thiserror::Error;

/// Failures raised anywhere in the coefficient pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("out of domain: {0}")]
    Domain(String),

    #[error("degenerate closed form: {0}")]
    DegenerateCase(String),

    #[error("recurrence left (0, 1) at n = {index} (value {value:e})")]
    DivergedTrial { index: usize, value: f64 },

    #[error("quadrature did not reach relative error {target:e} within {levels} levels (last change {last_change:e})")]
    QuadratureFailure {
        target: f64,
        levels: usize,
        last_change: f64,
    },

    #[error("ill-conditioned problem: {0}")]
    IllConditioned(String),

    #[error("no starting value reproduces lambda = {target}: {reason}")]
    BracketFailure { target: f64, reason: String },

    #[error("gamma function pole at {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("discrete measure lost orthogonality at degree {degree} (a^2 = {value:e})")]
    LossOfOrthogonality { degree: usize, value: f64 },

    #[error("malformed input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
