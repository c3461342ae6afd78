use thiserror::Error;

/// Errors raised by the geometric and analytic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid ambient space: {0}")]
    InvalidSpace(String),

    #[error("invalid tolerance profile: {0}")]
    InvalidTolerance(String),

    #[error("point is not on the sphere: |x|^2 * kappa = {value}")]
    OffSphere { value: f64 },

    #[error("vector is not normal to the geodesic (residual {residual:.3e})")]
    NotNormal { residual: f64 },

    #[error("parameter {t} outside geodesic interval [{a}, {b}]")]
    OutsideInterval { t: f64, a: f64, b: f64 },

    #[error("generator {index} is not skew-symmetric: |A + A^T| / |A| = {ratio:.3e}")]
    NotSkew { index: usize, ratio: f64 },

    #[error("direction is zero")]
    ZeroDirection,

    #[error("direction is not horizontal (vertical residual {residual:.3e})")]
    NotHorizontal { residual: f64 },

    #[error("geodesics differ")]
    GeodesicMismatch,

    #[error("point is not regular: leaf dimension {leaf_dim} < maximal {max_leaf_dim}")]
    NotRegular { leaf_dim: usize, max_leaf_dim: usize },

    #[error("quotient cohomogeneity {0} < 2, no tangent planes")]
    LowCohomogeneity(usize),

    #[error("horizontal projector is rank unstable near the point (sigma ratio {ratio:.3e}); shrink fd_step")]
    RankInstability { ratio: f64 },

    #[error("grid too coarse to separate events near t = {t}; re-run with a finer grid")]
    GridTooCoarse { t: f64 },

    #[error("family is not contained in the Lagrangian (residual {residual:.3e})")]
    NotContained { residual: f64 },

    #[error("vertical extension changes dimension at t = {t}: {found} != {expected}")]
    ExtensionDimension { t: f64, expected: usize, found: usize },

    #[error("family is not isotropic (max |omega| = {max:.3e})")]
    NotIsotropic { max: f64 },

    #[error("no regular point found among {0} samples")]
    NoRegularSample(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error("coherence violation: {0}")]
    Coherence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
