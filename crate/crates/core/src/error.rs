use thiserror::Error;

/// Errors shared across the crate. Variant names follow the operation
/// contracts; most carry enough context to be printed directly by the CLI.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown label: {0}")]
    UnknownLabel(String),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("closure still growing at bound {0}")]
    BoundExceeded(usize),
    #[error("not a sublattice: generator {0:?} lies outside the ambient lattice")]
    NotASublattice(Vec<i64>),
    #[error("not a real root: {0:?}")]
    NotARealRoot(Vec<i64>),
    #[error("simple-root condition violated by pair {0:?}, {1:?}")]
    ConditionViolated(Vec<i64>, Vec<i64>),
    #[error("search cap exceeded: rank {rank} > cap {cap}")]
    SearchCapExceeded { rank: usize, cap: usize },
    #[error("out of table range: {0}")]
    OutOfTableRange(String),
    #[error("component is not embedded in the ambient system: {0}")]
    NotEmbedded(String),
    #[error("subsystem has a non-affine component: {0}")]
    NotAffine(String),
    #[error("component {0} is not an untwisted affine component")]
    NotUntwistedComponent(usize),
    #[error("no affine extension found for component {0} within the search bound")]
    NoAffineExtension(usize),
    #[error("invalid generalized Cartan matrix: {0}")]
    InvalidGcm(String),
    #[error("matrix is not of hyperbolic type")]
    NotHyperbolic,
    #[error("indefinite type block in Cartan data")]
    IndefiniteType,
    #[error("invalid grading tuple: {0}")]
    InvalidTuple(String),
    #[error("unknown fixture: {0}")]
    UnknownFixture(String),
    #[error("internal arithmetic overflow")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
