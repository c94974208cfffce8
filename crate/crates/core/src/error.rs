use thiserror::Error;

/// Errors raised by the divergence toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability masses sum to {sum}, expected 1")]
    NonStochastic { sum: f64 },

    #[error("negative probability mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("atom {atom} appears more than once in the support")]
    DuplicateAtom { atom: f64 },

    #[error("support and mass have different lengths ({support} vs {mass})")]
    LengthMismatch { support: usize, mass: usize },

    #[error("distribution must have at least one atom")]
    EmptySupport,

    #[error("non-finite value {value} in {what}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("distributions are not defined on a common support")]
    UnalignedSupports,

    #[error("parameter {name} = {value} outside its domain {domain}")]
    DomainError {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("quadrature did not converge within max depth {max_depth} (error estimate {error_estimate:e})")]
    MaxDepthExceeded {
        max_depth: usize,
        error_estimate: f64,
    },

    #[error("mixture variance vanishes; the HCR bound is undefined")]
    DegenerateVariance,

    #[error("epsilon {0} too large for the three-point construction")]
    EpsilonTooLarge(f64),

    #[error("spectral computation failed: {0}")]
    SpectralFailure(String),

    #[error("search budget exhausted without an admissible input distribution")]
    BudgetExceeded,

    #[error("transition matrix is not reversible with respect to its stationary law (max violation {0:e})")]
    NotReversible(f64),

    #[error("transition matrix is not irreducible")]
    NotIrreducible,

    #[error("conditioning set is empty")]
    EmptySet,

    #[error("conditioning set has zero probability")]
    ZeroProbabilitySet,

    #[error("eta = {0} lies outside [-1/e, 0)")]
    EtaOutOfBranch(f64),
}

impl Error {
    /// Failures of a numerical method on valid input, as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Self::MaxDepthExceeded { .. } | Self::SpectralFailure(_) | Self::BudgetExceeded
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
