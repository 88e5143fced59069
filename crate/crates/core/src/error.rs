use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("antisymmetry violated at c^{k}_({i},{j})")]
    AntisymmetryViolation { i: usize, j: usize, k: usize },

    #[error("Jacobi identity violated at (i,j,k,l)=({i},{j},{k},{l}), residual {residual}")]
    JacobiViolation { i: usize, j: usize, k: usize, l: usize, residual: String },

    #[error("matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("form is degenerate; kernel basis {kernel:?}")]
    Degenerate { kernel: Vec<Vec<String>> },

    #[error("u is not k-symmetric: (K U - U^T K) has entry {residual} at ({i},{j})")]
    NotKSymmetric { i: usize, j: usize, residual: String },

    #[error("matrix is singular")]
    Singular,

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("invalid time span [{start}, {end}]")]
    InvalidSpan { start: f64, end: f64 },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("oscillator frequencies must be positive; entry {index} is {value}")]
    InvalidLambda { index: usize, value: String },

    #[error("theta is not antisymmetric with respect to k0")]
    NotAntisymmetric,

    #[error("theta has rank {rank} < dim V = {dim}")]
    RankDeficientTheta { rank: usize, dim: usize },

    #[error("expected nilpotency class {expected}, found {found}")]
    WrongClass { expected: usize, found: String },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("algebra is not nilpotent")]
    NotNilpotent,

    #[error("u does not preserve C^{0} of the lower central series")]
    SeriesNotPreserved(usize),

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("x_(-1) must be nonzero")]
    ZeroXMinusOne,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation failed: {0}")]
    Validation(String),
}
