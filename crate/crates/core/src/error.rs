use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} exceeds the supported maximum of 64")]
    TooLarge(usize),
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("invalid matrix entry {0:?}")]
    BadEntry(char),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not idempotent")]
    NotIdempotent,
    #[error("direct sum of an empty list")]
    EmptyDirectSum,
    #[error("companion matrix needs a monic polynomial of degree at least 1")]
    BadCompanion,
    #[error("alpha = {alpha} is outside 0..={n}")]
    AlphaOutOfRange { alpha: usize, n: usize },
    #[error("matrix parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("invalid polynomial string {0:?}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("brute-force enumeration is limited to n <= 4 (got n = {0})")]
    BruteTooLarge(usize),
    #[error("stratified enumeration is limited to n <= 10 (got n = {0})")]
    StratifiedTooLarge(usize),
    #[error("the SAT strategy does not enumerate idempotents")]
    NotEnumerable,
    #[error("nilpotency index must be at least 1")]
    BadIndex,
    #[error("the theorem applies to an odd number of copies of C (got {0})")]
    EvenCopies(usize),
    #[error("invalid pair: {0}")]
    InvalidPair(&'static str),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("assignment has {found} values, instance has {expected} variables")]
    AssignmentLength { expected: usize, found: usize },
    #[error("assignment violates clause {0}")]
    Unsatisfied(usize),
    #[error("instance carries no target metadata to decode against")]
    MissingMetadata,
    #[error("decoded triple fails verification: the encoder is broken ({0})")]
    EncoderBug(String),
    #[error("DIMACS parse error on line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
    #[error("solver output parse error: {0}")]
    SolverOutput(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Error)]
pub enum CertError {
    #[error("certificate JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("certificate field {field}: {source}")]
    Matrix {
        field: &'static str,
        #[source]
        source: MatrixError,
    },
    #[error("certificate is inconsistent: {0}")]
    Inconsistent(String),
}
