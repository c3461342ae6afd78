//! Diagnostics of the local quotient: curvature, polarity, crossings and
//! conjugate points.

mod conjugate;
mod continuity;
mod crossing;
mod equivariance;
mod explosion;
mod oneill;
mod polarity;

pub use conjugate::{horizontal_conjugate_test, ConjugateReport};
pub use continuity::{
    crossing_continuity_probe, random_line_family, singular_sweep_family, uniform_s_grid, ContinuityReport,
    CrossingJump, CrossingSample, GeodesicFamily,
};
pub use crossing::{crossing_number, CrossingEvent, CrossingRecord};
pub use equivariance::equivariance_coherence_check;
pub use explosion::{
    default_radii, explosion_probe, ExplosionOptions, ExplosionProbe, ExplosionRow, ExplosionVerdict, GROWTH_THRESHOLD,
    LIMIT_THRESHOLD,
};
pub use oneill::{max_quotient_curvature, oneill_curvature, CurvatureMax, OneillTensor, DEFAULT_PLANE_SAMPLES};
pub use polarity::{
    infinitesimal_polarity, polarity_test, Polarity, PolarityOptions, PolarityVerdict, PolarityWitness,
    BRACKET_THRESHOLD, DEFAULT_POLARITY_POINTS,
};
