use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension {dim} cannot hold a state with {needed} levels")]
    InsufficientDimension { needed: usize, dim: usize },

    #[error("photon numbers differ: {0} vs {1}")]
    PhotonNumberMismatch(usize, usize),

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("state has weight {0:e} on the top two truncation levels")]
    TruncationContaminated(f64),

    #[error("the disentangled form is singular at theta = pi; use the direct exponential")]
    SingularAtPole,

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("too many atoms for the tensor-product space: {0} (max 12)")]
    TooManyAtoms(usize),
}
