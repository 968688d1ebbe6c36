use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 8")]
    GridSize(usize),
    #[error("degenerate interval: x_max ({x_max}) must exceed x_min ({x_min})")]
    DegenerateInterval { x_min: f64, x_max: f64 },
    #[error("invalid physical parameter {name} = {value}: must be finite and strictly positive")]
    Parameter { name: &'static str, value: f64 },
    #[error("invalid scenario field `{field}`: {reason}")]
    Scenario { field: &'static str, reason: String },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("fields carry different time stamps ({0} vs {1})")]
    TimeMismatch(f64, f64),
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("field length {got} does not match grid size {expected}")]
    Length { expected: usize, got: usize },
    #[error("gaussian width {sigma} is under-resolved: only {points} grid points fall within 3 sigma")]
    UnderResolved { sigma: f64, points: usize },
    #[error("density has zero total weight")]
    ZeroWeight,
    #[error("need at least {needed} snapshots, got {got}")]
    TooFewSnapshots { needed: usize, got: usize },
    #[error("snapshot times are not uniformly spaced")]
    NonUniformSpacing,
    #[error("grid is not symmetric about the origin")]
    AsymmetricGrid,
    #[error("wavenumber {0} is not a grid mode")]
    OffGridMode(f64),
    #[error("complex-valued series requires the absolute-value trajectory")]
    ComplexNeedsAbs,
    #[error("time series come from different scenarios")]
    FingerprintMismatch,
    #[error("energy projection of the {0} state vanishes")]
    EmptyProjection(&'static str),
    #[error("linear solve did not converge after {0} iterations")]
    SolveFailed(usize),
    #[error("invalid oracle configuration: {0}")]
    OracleConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
