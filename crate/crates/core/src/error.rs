use thiserror::Error;

/// Errors raised by the geometry, dynamics, region, embedding and
/// certificate layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid manifold parameters: {0}")]
    InvalidManifold(String),
    #[error("chart {chart} degenerates at this point (|z_chart| = {modulus:.3e})")]
    ChartDegenerate { chart: usize, modulus: f64 },
    #[error("symplectic form matrix is numerically singular")]
    SingularForm,
    #[error("operation unsupported for {0}")]
    Unsupported(String),
    #[error("integrator step size underflow at t = {t:.6e}")]
    StepFailure { t: f64 },
    #[error("per-time minimum could not be located: {0}")]
    NormalizationFailure(String),
    #[error("time-one maps differ by {distance:.3e} (tolerance {tolerance:.1e})")]
    EndpointMismatch { distance: f64, tolerance: f64 },
    #[error("point outside map domain: {0}")]
    DomainViolation(String),
    #[error("image leaves the target region (worst margin {margin:.3e})")]
    ContainmentViolation { margin: f64 },
    #[error("curve family violates containment (worst margin {margin:.3e} at r = {radius:.4})")]
    InfeasibleContainment { margin: f64, radius: f64 },
    #[error("map has not passed verification: {0}")]
    UnverifiedMap(String),
    #[error("no certificate supplied for the {0} side")]
    MissingSide(String),
    #[error("insufficient premises: missing {0}")]
    InsufficientPremises(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
