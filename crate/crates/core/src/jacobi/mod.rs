//! Jacobi fields along horizontal geodesics of a linear isometric action.

mod family;
mod field;
mod focal;
mod ode;
mod wilking;

pub use family::{
    killing_jacobi_field, leaf_lagrangian, symplectic_complement, vertical_family, vertical_family_with_generators,
    FamilyKind, JacobiFamily, ISOTROPY_TOL,
};
pub use field::{wronskian, wronskian_at, JacobiField};
pub use focal::{focal_scan, index, FocalEvent, FocalReport};
pub use ode::integrate_field;
pub use wilking::{wilking_quotient_index, CONTAINMENT_TOL};
