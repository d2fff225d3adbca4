use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty tuple space: no {k}-tuples of distinct vertices exist on {n} vertices")]
    EmptyTupleSpace { n: usize, k: usize },
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("vertex set must contain at least one vertex")]
    EmptyVertexSet,
    #[error("arity {0} exceeds the supported maximum of {max}", max = crate::tuple::MAX_ARITY)]
    ArityTooLarge(usize),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("vertex count mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("invalid tuple {coords:?} on {n} vertices: {reason}")]
    InvalidTuple {
        coords: Vec<usize>,
        n: usize,
        reason: &'static str,
    },
    #[error("no label supplied for tuple {0:?}")]
    MissingLabel(Vec<usize>),
    #[error("invalid subspace {positions:?} for arity {arity}")]
    InvalidSubspace { positions: Vec<usize>, arity: usize },
    #[error("operation needs arity at least {min}, found {found}")]
    ArityTooSmall { min: usize, found: usize },
    #[error("no {0}-tuples exist: arity exceeds the vertex count {1}")]
    NoExtension(usize, usize),
    #[error("relation is empty")]
    EmptyRelation,
    #[error("fullness level {l} out of range for arity {k}")]
    LevelOutOfRange { l: usize, k: usize },
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("{format} parse error at byte {offset}: {message}")]
    Parse {
        format: &'static str,
        offset: usize,
        message: String,
    },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("n = {n} exceeds the oracle limit of {limit} vertices")]
    OracleLimit { n: usize, limit: usize },
    #[error("level transform undefined: interpolation points are not pairwise distinct")]
    LevelTransformUndefined,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("coloring is not constant on class {class}")]
    NotClassConstant { class: usize },
    #[error("graph is not regular")]
    NonRegular,
    #[error("graph is directed; operation needs an undirected graph")]
    Directed,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
