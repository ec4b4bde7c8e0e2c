use alloc::string::String;
use alloc::vec::Vec;

use crate::sphere::SpherePoint;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("map has degree {0}; rational maps of degree >= 2 are required")]
    Degree(usize),
    #[error("numerator and denominator share a root near {0}")]
    NotCoprime(Complex),
    #[error("invalid map: {0}")]
    InvalidMap(&'static str),
    #[error("zero polynomial has no well-defined roots")]
    ZeroPolynomial,
    #[error("root solver did not converge (worst residual {worst:e})")]
    RootSolve { residuals: Vec<f64>, worst: f64 },
    #[error("level {0} is degenerate: prime circle collapses to {1}")]
    DegenerateLevel(f64, &'static str),
    #[error("circle of radius {r1} is mapped into the circle of radius {r2}; crossing set is infinite")]
    DegenerateCircle { r1: f64, r2: f64 },
    #[error("circle test for radius {radius} is ambiguous (relative residual {residual:e})")]
    ClassificationUnstable { radius: f64, residual: f64 },
    #[error("found invariant circles of radii {0} and {1} for a map that is not a power map")]
    InconsistentClassification(f64, f64),
    #[error("degenerate circle recursion exceeded {0} levels")]
    DepthExceeded(usize),
    #[error("fiber of {witness:?} has {size} points, above the bound {bound}")]
    BoundViolation { witness: SpherePoint, size: usize, bound: usize },
    #[error("no sign change of the branch modulus difference at scale {epsilon:e}")]
    NoSignChange { epsilon: f64 },
    #[error("{0:?} is not a critical point of the map")]
    NotCritical(SpherePoint),
    #[error("backward-orbit start point stayed degenerate after {0} restarts")]
    StartPointDegenerate(usize),
    #[error("no sampled orbit shadows the witness at n = {0}")]
    ZeroCount(usize),
    #[error("points span fewer than three distinct locations")]
    DegenerateFit,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Complex number wrapper so the error enum can print it compactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex(pub num_complex::Complex64);

impl core::fmt::Display for Complex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}{:+}i", self.0.re, self.0.im)
    }
}
