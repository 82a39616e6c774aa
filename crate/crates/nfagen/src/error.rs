use thiserror::Error;

/// Errors reported by this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be between 2 and 26, got {0}")]
    InvalidAlphabet(usize),

    #[error("state {state} out of range 1..={n}")]
    StateOutOfRange { state: usize, n: usize },

    #[error("letter {0:?} is not part of the alphabet")]
    UnknownLetter(String),

    #[error("permutation does not match automaton size ({perm} vs {n})")]
    SizeMismatch { perm: usize, n: usize },

    #[error("not a bijection: {0}")]
    NotBijective(String),

    #[error("invalid class specification: {0}")]
    InvalidClassSpec(String),

    #[error("invalid chain parameters: {0}")]
    InvalidParams(String),

    #[error("malformed automaton document: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("automaton is not trim: {0}")]
    NotTrim(String),

    #[error("invalid gadget specification: {0}")]
    InvalidGadget(String),

    #[error("distributions are defined over different supports")]
    MismatchedSupport,

    #[error("sample does not belong to any census class (canonical form {0})")]
    UnknownClass(String),

    #[error("kernel matrix is not irreducible")]
    ReducibleKernel,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
