use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a simplicial complex: {0}")]
    NotAComplex(String),
    #[error("boundary maps do not compose to zero at degree {0}")]
    BoundarySquareNonzero(usize),
    #[error("ill-formed homomorphism: {0}")]
    IllFormedHomomorphism(String),
    #[error("invalid group data: {0}")]
    InvalidGroup(String),
    #[error("invalid linking form: {0}")]
    InvalidLinkingForm(String),
    #[error("missing linking form for {0}")]
    MissingLinkingForm(String),
    #[error("sector does not conform to model: {0}")]
    ModelMismatch(String),
    #[error("value not on the resolution lattice: {0}")]
    DenominatorError(String),
    #[error("resolution {resolution} is not a multiple of k = {k}")]
    ResolutionError { resolution: u64, k: u64 },
    #[error("degenerate pairing: {0}")]
    DegeneratePairing(String),
    #[error("enumeration of {states} states exceeds the guard of {guard}")]
    TooLarge { states: String, guard: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("dimension mismatch between manifolds: {0} vs {1}")]
    ManifoldDimensionMismatch(usize, usize),
    #[error("unknown catalog entry `{0}`")]
    UnknownManifold(String),
    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
    #[error("declared data disagrees with derived data: {0}")]
    Consistency(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("value does not fit a machine integer: {0}")]
    Overflow(String),
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl std::fmt::Display) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
