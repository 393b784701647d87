use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A `SystemSpec`, `LevelSpec` or `TopologySpec` invariant does not hold.
    #[error("invalid system: {0}")]
    InvalidSpec(String),

    /// A `Policy` invariant does not hold for the given system.
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    /// Failures of `level` (1-based) have no checkpoint type they can recover from.
    #[error("level {level} failures are unrecoverable: no checkpoint probability at level {level} or above")]
    Unrecoverable { level: usize },

    /// Expected rework per period exceeds progress; the effective period is unbounded.
    #[error("policy diverges: effective-period denominator {denominator:e} is not positive")]
    Diverges { denominator: f64 },

    /// Argument outside a function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} did not converge after {1} iterations")]
    NonConvergence(&'static str, usize),

    #[error("non-finite value {value} encountered at {at}")]
    NonFinite { value: f64, at: f64 },

    /// Every optimizer start landed where the model diverges.
    #[error("every start diverged; no finite utilization in {0}")]
    NoFeasibleStart(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// `true` for errors caused by numerics (divergence, non-convergence) rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Diverges { .. } | Error::NonConvergence(..) | Error::NonFinite { .. } | Error::NoFeasibleStart(_)
        )
    }
}
