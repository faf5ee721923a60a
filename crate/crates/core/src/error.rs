use thiserror::Error;

/// Errors raised by poset construction, the algebra, and the structure solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("order relation has a cycle through `{0}` and `{1}`")]
    CycleInOrder(String, String),
    #[error("poset is not connected")]
    NotConnected,
    #[error("`{0} < {1}` is not a cover pair")]
    RedundantCover(String, String),
    #[error("poset must have at least 2 elements, got {0}")]
    TooSmall(usize),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("more than {0} cycles")]
    CapExceeded(usize),
    #[error("({0},{1}) is not an extreme pair")]
    NotExtreme(String, String),
    #[error("operands belong to different posets")]
    OwnerMismatch,
    #[error("`{0}` is not a valid walk")]
    InvalidWalk(String),
    #[error("element is not in the center of the commutator subalgebra")]
    NotCentralInCommutator,
    #[error("system with {unknowns} unknowns exceeds the cap of {cap}")]
    TooLarge { unknowns: usize, cap: usize },
    #[error("not a 1/2-derivation: identity fails on ({0}, {1})")]
    NotHalfDerivation(String, String),
    #[error("image of {0} is not a multiple of it")]
    MalformedImage(String),
    #[error("sigma is not constant on pair class containing ({0},{1})")]
    InadmissibleSigma(String, String),
    #[error("mu is not symmetric at ({0},{1})")]
    MuNotSymmetric(String, String),
    #[error("mu fails the associativity condition at ({0},{1},{2})")]
    MuNotAssociative(String, String, String),
    #[error("not a transposed Poisson structure: {0}")]
    NotTransposedPoisson(String),
    #[error("decomposition does not reconstruct the input")]
    ReconstructionMismatch,
    #[error("invalid rational `{0}`")]
    InvalidRational(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
