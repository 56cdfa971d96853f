use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical core.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A domain descriptor or segment layout is geometrically invalid.
    InvalidDomain(String),
    /// Mesh input violates a structural invariant.
    InvalidMesh(String),
    /// A triangle with (near) zero or negative area was found.
    DegenerateTriangle { element: usize, area: f64 },
    /// A segment tag is not present on the mesh or descriptor.
    UnknownSegment(String),
    /// The segment cannot carry a tubular frame (corners, unsupported kind).
    NonSmoothSegment(String),
    /// A point is outside the region an operation is defined on.
    OutOfRegion(String),
    /// Expression syntax error at a byte offset.
    Syntax { pos: usize, msg: String },
    /// Unknown identifier in an expression.
    UnknownIdentifier { pos: usize, name: String },
    /// Field evaluation failed (division by zero, sqrt of a negative number).
    Evaluation { pos: usize, msg: String },
    /// Field evaluation failed inside an element during assembly.
    ElementEvaluation { element: usize, source: alloc::boxed::Box<Error> },
    /// The obstacle is negative at a sample point, so no nonnegative extension exists.
    NegativeObstacle { point: crate::Point, value: f64 },
    /// Invalid argument to an operation.
    InvalidArgument(String),
    /// Required input is missing.
    MissingInput(&'static str),
    /// The reduced stiffness matrix is singular (non-coercive layout).
    Singular(String),
    /// Iterative solver did not converge.
    NotConverged { method: &'static str, iterations: usize, residuals: alloc::vec::Vec<f64> },
    /// Compatibility condition `∫f + <g,1> <= 0` violated in a pure Signorini layout.
    Incompatible { value: f64 },
    /// Barrier constants cannot satisfy a selection inequality.
    Infeasible { inequality: &'static str, lhs: f64, rhs: f64 },
    /// The instance is too large for exhaustive enumeration.
    TooLarge { constrained: usize, limit: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDomain(m) => write!(f, "invalid domain: {m}"),
            Error::InvalidMesh(m) => write!(f, "invalid mesh: {m}"),
            Error::DegenerateTriangle { element, area } => {
                write!(f, "degenerate triangle {element} (area {area:e})")
            }
            Error::UnknownSegment(t) => write!(f, "unknown segment tag `{t}`"),
            Error::NonSmoothSegment(m) => write!(f, "segment is not smooth: {m}"),
            Error::OutOfRegion(m) => write!(f, "outside region: {m}"),
            Error::Syntax { pos, msg } => write!(f, "syntax error at {pos}: {msg}"),
            Error::UnknownIdentifier { pos, name } => {
                write!(f, "unknown identifier `{name}` at {pos}")
            }
            Error::Evaluation { pos, msg } => write!(f, "evaluation error at {pos}: {msg}"),
            Error::ElementEvaluation { element, source } => {
                write!(f, "in element {element}: {source}")
            }
            Error::NegativeObstacle { point, value } => write!(
                f,
                "obstacle is negative ({value}) at ({}, {}); a nonnegative extension does not exist",
                point[0], point[1]
            ),
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::MissingInput(m) => write!(f, "missing input: {m}"),
            Error::Singular(m) => write!(f, "singular system: {m}"),
            Error::NotConverged { method, iterations, residuals } => write!(
                f,
                "{method} did not converge in {iterations} iterations (last residual {:e})",
                residuals.last().copied().unwrap_or(f64::NAN)
            ),
            Error::Incompatible { value } => write!(
                f,
                "compatibility condition ∫f dx + <g,1> <= 0 violated (value {value})"
            ),
            Error::Infeasible { inequality, lhs, rhs } => {
                write!(f, "infeasible constants: {inequality} ({lhs} vs {rhs})")
            }
            Error::TooLarge { constrained, limit } => write!(
                f,
                "{constrained} constrained nodes exceed the enumeration limit of {limit}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
