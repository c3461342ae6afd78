//! Numerical laboratory for singular Riemannian foliations given by linear
//! isometric actions on Euclidean spaces and round spheres.

pub mod action;
pub mod error;
pub mod geodesic;
pub mod geometry;
pub mod jacobi;
pub mod presets;
pub mod quotient;
pub mod random;
pub mod report;
pub mod runner;
mod scan;
pub mod scenario;
pub mod suite;

pub use action::{ActionSpec, StratumInfo};
pub use error::{Error, Result};
pub use geodesic::HorizontalGeodesic;
pub use geometry::{AmbientSpace, Subspace, ToleranceProfile};
pub use presets::{ExpectedClass, Preset};
