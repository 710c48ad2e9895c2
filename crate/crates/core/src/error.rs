//! Error types shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the laboratory.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A parameter violates its range constraint at construction.
    #[error("parameter `{key}` violates constraint {constraint} (got {value})")]
    InvalidParam {
        key: &'static str,
        constraint: &'static str,
        value: f64,
    },

    /// An operation received an input outside its domain.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// Business creation is undefined when net creative destruction is
    /// non-positive; callers must handle this outcome explicitly.
    #[error("no net business creation: creative destruction is non-positive")]
    NoNetCreation,

    /// The location map overshot past extinction.
    #[error("degenerate location step at t={t}: next index {value} is negative")]
    DegenerateStep { t: u32, value: f64 },

    /// Capital accumulation drove the stock negative.
    #[error("infeasible path at t={t}: capital would become {value}")]
    InfeasiblePath { t: u32, value: f64 },

    /// The government cannot accommodate the demanded creative destruction.
    #[error(
        "accommodation infeasible: demanded creative destruction {required} \
         exceeds the attainable maximum {max}"
    )]
    AccommodationInfeasible { required: f64, max: f64 },

    /// A regime has no solution for the given inputs.
    #[error("regime infeasible: {0}")]
    RegimeInfeasible(String),

    /// An iterative solver ran out of iterations or stalled.
    #[error(
        "solver did not converge after {iterations} iterations \
         (residual inf-norm {residual:e})"
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Residual vector at the last iterate, for diagnostics.
        last_residuals: Vec<f64>,
    },

    /// Synthetic cross-section generation hit too many solver failures.
    #[error(
        "cross-section generation aborted: {failures} solver failures against \
         {accepted} accepted records ({rate:.1}% failure rate, limit 20%)"
    )]
    GenerationAborted {
        failures: usize,
        accepted: usize,
        rate: f64,
    },

    /// A configuration document could not be parsed.
    #[error("config error: {0}")]
    Config(String),

    /// Catch-all for malformed inputs that are not parameter violations.
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }
}
