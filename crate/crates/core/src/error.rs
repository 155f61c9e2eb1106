use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("NaN is not an extended real value")]
    NotANumber,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("box has zero width along axis {axis}")]
    ZeroWidthAxis { axis: usize },
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("empty partition")]
    EmptyPartition,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("outer radius {outer} must exceed inner radius {inner}")]
    RadiusOrder { inner: usize, outer: usize },
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("point {0:?} lies outside the domain")]
    OutOfDomain(Vec<f64>),
    #[error("point {0:?} lies on the cell skeleton")]
    OnSkeleton(Vec<f64>),
    #[error("functions have different domains")]
    DomainMismatch,
    #[error("pieces do not share one cell complex")]
    ComplexMismatch,
    #[error("invalid cell complex: {0}")]
    InvalidComplex(String),
    #[error("empty family")]
    EmptyFamily,
    #[error("result is not nearly finite")]
    NotNearlyFinite,
    #[error("chain {chain} is not nested at interval {index}")]
    NotNested { chain: usize, index: usize },
    #[error("polynomial degree {got} below required order {needed}")]
    DegreeTooLow { needed: usize, got: usize },
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("parameter `{0}` has no binding")]
    UnboundParameter(String),
    #[error("evaluation domain error at `{0}`")]
    EvalDomain(String),
    #[error("viscosity must be positive")]
    NonpositiveViscosity,
    #[error("no jet found at {point:?}: residual {residual}")]
    NoJetFound { point: Vec<f64>, residual: f64 },
    #[error("patch center is not on the initial face t = 0")]
    CenterNotOnInitialFace,
    #[error("bisection depth exhausted on cell {lo:?}..{hi:?} (worst margin {margin})")]
    DepthExhausted { lo: Vec<f64>, hi: Vec<f64>, margin: f64 },
    #[error("sequence too short: need at least {needed} terms, got {got}")]
    SequenceTooShort { needed: usize, got: usize },
}
