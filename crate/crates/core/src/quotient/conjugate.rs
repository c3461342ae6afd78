//! Horizontal conjugate points: an `ℱ`-Jacobi field tangent to a leaf at an
//! interior time without being vertical. They exist on `(a, b)` exactly when
//! `ind_Λ ≠ ind_W` there.

use std::sync::Arc;

use serde::Serialize;

use crate::action::ActionSpec;
use crate::error::Result;
use crate::geodesic::{GeodesicSummary, HorizontalGeodesic};
use crate::geometry::ToleranceProfile;
use crate::jacobi::{focal_scan, leaf_lagrangian, vertical_family, FocalEvent};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateReport {
    pub geodesic: GeodesicSummary,
    pub has_conjugate: bool,
    pub ind_lambda: usize,
    pub ind_w: usize,
    pub lambda_events: Vec<FocalEvent>,
    pub w_events: Vec<FocalEvent>,
    /// `ind_Λ[a,b] = ind_W[a,b] + codim − 1`, when `γ(a)` is regular.
    pub closed_identity: Option<bool>,
}

pub fn horizontal_conjugate_test(
    action: &ActionSpec,
    g: &HorizontalGeodesic,
    profile: &ToleranceProfile,
) -> Result<ConjugateReport> {
    profile.validate()?;
    let shared = Arc::new(g.clone());
    let lambda = leaf_lagrangian(action, &shared, profile)?;
    let w = vertical_family(action, &shared, profile)?;
    let open = (false, false);
    let lam_scan = focal_scan(&lambda, g.interval(), open, profile)?;
    let w_scan = focal_scan(&w, g.interval(), open, profile)?;

    let closed_identity = if action.is_regular(&g.point(g.left()), profile)? {
        let closed = (true, true);
        let lam_closed = focal_scan(&lambda, g.interval(), closed, profile)?.total_index;
        let w_closed = focal_scan(&w, g.interval(), closed, profile)?.total_index;
        Some(lam_closed + 1 == w_closed + action.codimension())
    } else {
        None
    };
    Ok(ConjugateReport {
        geodesic: g.summary(),
        has_conjugate: lam_scan.total_index != w_scan.total_index,
        ind_lambda: lam_scan.total_index,
        ind_w: w_scan.total_index,
        lambda_events: lam_scan.events,
        w_events: w_scan.events,
        closed_identity,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use nalgebra::DVector;

    use super::*;
    use crate::geometry::AmbientSpace;
    use crate::presets::Preset;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn flat_plane_has_no_conjugate_points() {
        let p = ToleranceProfile::default();
        let a = Preset::Trivial(2).action().unwrap();
        let g = a.make_horizontal_geodesic(&v(&[0.3, 1.0]), &v(&[1.0, 1.0]), (0.0, 4.0)).unwrap();
        let r = horizontal_conjugate_test(&a, &g, &p).unwrap();
        assert_eq!((r.has_conjugate, r.ind_lambda, r.ind_w), (false, 0, 0));
        assert_eq!(r.closed_identity, Some(true));
    }

    #[test]
    fn antipodal_point_on_round_sphere() {
        let p = ToleranceProfile::default();
        let a = ActionSpec::new(AmbientSpace::sphere(3, 1.0).unwrap(), Vec::new(), None).unwrap();
        let g = a.make_horizontal_geodesic(&v(&[1.0, 0.0, 0.0]), &v(&[0.0, 0.0, 1.0]), (0.0, 1.5 * PI)).unwrap();
        let r = horizontal_conjugate_test(&a, &g, &p).unwrap();
        assert_eq!((r.has_conjugate, r.ind_lambda, r.ind_w), (true, 1, 0));
        assert_eq!(r.closed_identity, Some(false));
    }

    #[test]
    fn hopf_line_with_focal_point() {
        // Λ-focal at t = −|p|²/⟨v, p⟩ = 1/0.8 for this line.
        let p = ToleranceProfile::default();
        let a = Preset::Hopf.action().unwrap();
        let g = a.make_horizontal_geodesic(&v(&[1.0, 0.0, 0.0, 0.0]), &v(&[-0.8, 0.0, 0.6, 0.0]), (0.0, 2.0)).unwrap();
        let r = horizontal_conjugate_test(&a, &g, &p).unwrap();
        assert!(r.has_conjugate);
        assert_eq!((r.ind_lambda, r.ind_w), (1, 0));
        assert!((r.lambda_events[0].t - 1.25).abs() < 1e-8);
    }
}
