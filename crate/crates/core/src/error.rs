use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments fall outside the convergence domain required by the series.
    #[error("outside domain: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A configured enumeration or memory cap would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A decomposition produced a divergent (non-admissible) MZV symbol.
    #[error("non-admissible composition {composition} from weak order {partition}")]
    NonAdmissible {
        composition: String,
        partition: String,
    },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("relations of mixed weight: {0} and {1}")]
    MixedWeights(u32, u32),

    /// A broken internal invariant. Reaching this is a bug.
    #[error("internal error: {0}")]
    Internal(String),
}
