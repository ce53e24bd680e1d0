use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero divisor: {0}")]
    ZeroDivisor(String),
    #[error("point at infinity: denominator is not invertible")]
    PointAtInfinity,
    #[error("point ({u}, {v}) is not in the upper half-plane")]
    NotInUpperHalfPlane { u: f64, v: f64 },
    #[error("matrix determinant {0} is not one")]
    InvalidDeterminant(f64),
    #[error("imaginary length: segment {segment} has the wrong causal character")]
    ImaginaryLength { segment: usize },
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("integrand has a pole on [{t0}, {t1}]")]
    PoleOnSegment { t0: f64, t1: f64 },
    #[error("degenerate cycle: {0}")]
    DegenerateCycle(String),
    #[error("no real solution: discriminant {0} is negative")]
    NoRealSolution(f64),
    #[error("coincident points")]
    CoincidentPoints,
    #[error("argument {value} exceeds the domain of {function}")]
    DomainExceeded { function: &'static str, value: f64 },
    #[error("point ({u}, {v}) lies outside the disk")]
    OutsideDisk { u: f64, v: f64 },
    #[error("samples are not monotone: {0}")]
    NonMonotoneSamples(String),
    #[error("invalid relabel function: {0}")]
    InvalidLabel(String),
    #[error("points share a real part")]
    VerticalPair,
    #[error("local error estimate {estimate:e} exceeds the tolerance")]
    StepTooLarge { estimate: f64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("point ({u}, {v}) does not lie on the cycle (residual {residual:e})")]
    PointsNotOnCycle { u: f64, v: f64, residual: f64 },
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
