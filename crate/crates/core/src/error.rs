use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("chart mismatch: {0} vs {1}")]
    ChartMismatch(String, String),
    #[error("division by the zero field")]
    DivisionByZeroField,
    #[error("coordinate index {0} out of range for dimension {1}")]
    IndexOutOfRange(usize, usize),
    #[error("pole at point {0:?}")]
    PoleAtPoint(Vec<f64>),
    #[error("bracket of two functions is undefined")]
    DegreeUnderflow,
    #[error("degree {0} exceeds dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error("{0} differentials supplied for a degree-{1} multivector")]
    TooManyArguments(usize, usize),
    #[error("map is not invertible near {0:?}")]
    MapNotInvertibleNear(Vec<f64>),
    #[error("jacobian is singular")]
    JacobianSingular,
    #[error("expected degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("tensor is not Poisson (defect {0:e})")]
    NotPoisson(f64),
    #[error("series too short: need {need} terms, have {have}")]
    InsufficientSeriesOrder { need: usize, have: usize },
    #[error("multivector is not vertical")]
    NotVertical,
    #[error("leaf block of the Poisson tensor is singular")]
    LeafMatrixSingular,
    #[error("form is not closed")]
    NotClosed,
    #[error("vector field is not Hamiltonian")]
    NotHamiltonian,
    #[error("right-hand side is not a cocycle")]
    NotCocycle,
    #[error("contraction with dk_{0} is not Hamiltonian")]
    NotHamiltonianObstruction(usize),
    #[error("vertical 2-form is not closed")]
    NotClosedVertical,
    #[error("step size underflow at eps = {0}")]
    StepSizeUnderflow(f64),
    #[error("trajectory left the domain at eps = {0}")]
    DomainExit(f64),
    #[error("radicand is not positive: {0}")]
    RadicandNonpositive(f64),
    #[error("denominator vanishes")]
    DenominatorZero,
    #[error("constraint matrix is singular")]
    SingularDelta,
    #[error("no theta family supplied")]
    MissingThetaFamily,
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
