//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ill-posed potential: {0}")]
    IllPosedPotential(String),

    #[error("quadrature did not converge: achieved error estimate {achieved:.3e} > tolerance {tolerance:.3e}")]
    Quadrature { achieved: f64, tolerance: f64 },

    #[error("ODE integration failed at zeta = {zeta}: {reason}")]
    StepFailure { zeta: f64, reason: String },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("profile problem is not solvable: orthogonality defect {defect:.3e} exceeds {tolerance:.1e}")]
    NotSolvable { defect: f64, tolerance: f64 },

    #[error("profile check failed: {0}")]
    ProfileCheck(String),

    #[error("inconsistent interface data: {0}")]
    Inconsistent(String),

    #[error("matching zone of half-width {zone:.4e} does not fit inside distance {delta:.4e} to the boundary")]
    RegionGeometry { zone: f64, delta: f64 },

    #[error("residual grid under-resolved: {quantity} differs by {relative:.1}% between resolutions")]
    UnderResolved { quantity: String, relative: f64 },

    #[error("interface topology: {0}")]
    Topology(String),

    #[error("time step collapsed below {dt:.3e} at t = {t:.6e}")]
    StepCollapse { t: f64, dt: f64 },

    #[error("fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("i/o: {0}")]
    Io(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
