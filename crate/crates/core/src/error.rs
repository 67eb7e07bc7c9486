use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// print a one-line diagnosis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input failed one of its stated invariants.
    #[error("{invariant} violated (residual {residual:.3e})")]
    Invariant { invariant: &'static str, residual: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Dense construction would exceed the supported size.
    #[error("problem too large for dense construction: {0}")]
    Size(String),

    #[error("non-entangling Hamiltonian: gamma = 0, so g = 2f/gamma is undefined")]
    NonEntangling,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no edge mode for g = {0} (requires g < 1 and N(1-g) > g)")]
    NoEdgeMode(f64),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("root finding failed: {0}")]
    Root(String),

    /// An internal consistency check failed; indicates a bug or a
    /// numerically hopeless input.
    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
