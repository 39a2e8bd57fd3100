use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate mode label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown mode `{0}`")]
    UnknownEndpoint(String),

    #[error("more than one coupling between `{0}` and `{1}`")]
    DuplicatePair(String, String),

    #[error("mode `{label}` has negative or non-finite intrinsic damping {value}")]
    NegativeDamping { label: String, value: f64 },

    #[error("invalid coupling {endpoint_a}-{endpoint_b}: {reason}")]
    InvalidCoupling {
        endpoint_a: String,
        endpoint_b: String,
        reason: String,
    },

    #[error("invalid port on `{mode}`: {reason}")]
    InvalidPort { mode: String, reason: String },

    #[error("unknown port `{0}`")]
    UnknownPort(String),

    #[error("dynamical matrix is singular at omega = {omega} (condition estimate {condition:e})")]
    SingularAtFrequency {
        omega: f64,
        condition: f64,
        /// Mode-ordered near-null vector of the dynamical matrix; empty when
        /// the singularity comes from a closed-form denominator.
        null_vector: Vec<Complex64>,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("infeasible condition: {0}")]
    InfeasibleCondition(String),

    #[error("reverse transmission amplitude vanishes: infinite isolation")]
    InfiniteIsolation,

    #[error("frequency grid is not symmetric about zero")]
    AsymmetricGrid,

    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
}
