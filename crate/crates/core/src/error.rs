use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("qubit {0} appears more than once in a gate")]
    OverlappingQubits(usize),
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix has dimension {found}, expected {expected}")]
    MatrixDimension { expected: usize, found: usize },
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("signal point {0} outside [-1, 1]")]
    SignalDomain(f64),
    #[error("phase sequence must not be empty")]
    EmptyPhases,
    #[error("invalid level vector: {0}")]
    InvalidLevel(String),
    #[error("invalid grid index: {0}")]
    InvalidIndex(String),
    #[error("non-finite function value {value} at node {node:?}")]
    NonFinite { node: Vec<f64>, value: f64 },
    #[error("coefficient {index} is {value}; LCU coefficients must be positive")]
    NonPositiveCoefficient { index: usize, value: f64 },
    #[error("LCU needs at least one term")]
    EmptyLcu,
    #[error("term circuit {term} is not a product of uncontrolled single-qubit gates")]
    UnsupportedTerm { term: usize },
    #[error("Chebyshev argument {0} outside [-1, 1]")]
    ArgumentOutOfRange(f64),
    #[error("invalid norm exponent {0}; need p >= 2 or p = inf")]
    InvalidNorm(f64),
    #[error("epsilon {0} outside (0, 1)")]
    EpsilonDomain(f64),
    #[error("Lambert W is evaluated on x >= 0 only, got {0}")]
    LambertDomain(f64),
    #[error("empty level range")]
    EmptyRange,
    #[error("malformed surplus map: {0}")]
    MalformedSurplus(String),
    #[error("malformed circuit trace: {0}")]
    MalformedTrace(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("cannot parse function expression `{0}`")]
    BadExpression(String),
}
