use serde::Serialize;

use super::family::JacobiFamily;
use crate::error::{Error, Result};
use crate::geometry::ToleranceProfile;
use crate::scan::RankScan;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FocalEvent {
    pub t: f64,
    pub index: usize,
}

/// Focal points of a family on a parameter interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FocalReport {
    pub events: Vec<FocalEvent>,
    pub total_index: usize,
    pub interval: (f64, f64),
    pub include_endpoints: (bool, bool),
}

impl FocalReport {
    fn empty(interval: (f64, f64), include_endpoints: (bool, bool)) -> Self {
        Self { events: Vec::new(), total_index: 0, interval, include_endpoints }
    }
}

/// Checks `interval ⊆ domain` up to rounding.
pub(crate) fn check_subinterval(family: &JacobiFamily, interval: (f64, f64)) -> Result<()> {
    let (a, b) = family.geodesic().interval();
    let slack = 1e-12 * (b - a).abs().max(1.0);
    if !(interval.0 < interval.1) || interval.0 < a - slack || interval.1 > b + slack {
        return Err(Error::OutsideInterval { t: if interval.0 < a { interval.0 } else { interval.1 }, a, b });
    }
    Ok(())
}

/// Scans `f(t) = dim W − dim W(t)` over `interval`.
pub fn focal_scan(
    family: &JacobiFamily,
    interval: (f64, f64),
    include_endpoints: (bool, bool),
    profile: &ToleranceProfile,
) -> Result<FocalReport> {
    profile.validate()?;
    check_subinterval(family, interval)?;
    if family.is_empty() {
        return Ok(FocalReport::empty(interval, include_endpoints));
    }
    let scan = RankScan {
        eval: |t: f64| Ok(family.evaluation(t)),
        expected_rank: family.len(),
        interval,
        include_endpoints,
        profile,
    };
    let events: Vec<FocalEvent> = scan.run()?.into_iter().map(|d| FocalEvent { t: d.t, index: d.deficiency }).collect();
    let total_index = events.iter().map(|e| e.index).sum();
    Ok(FocalReport { events, total_index, interval, include_endpoints })
}

/// `ind_W` on `interval`.
pub fn index(
    family: &JacobiFamily,
    interval: (f64, f64),
    include_endpoints: (bool, bool),
    profile: &ToleranceProfile,
) -> Result<usize> {
    Ok(focal_scan(family, interval, include_endpoints, profile)?.total_index)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use nalgebra::DVector;

    use super::*;
    use crate::action::ActionSpec;
    use crate::geodesic::HorizontalGeodesic;
    use crate::geometry::AmbientSpace;
    use crate::jacobi::{leaf_lagrangian, vertical_family};
    use crate::presets::Preset;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn rotation_of_the_plane_through_origin() {
        let p = ToleranceProfile::default();
        let action = Preset::So(2).action().unwrap();
        let g = Arc::new(action.make_horizontal_geodesic(&v(&[0.0, 0.0]), &v(&[1.0, 0.0]), (-1.0, 1.0)).unwrap());
        let w = vertical_family(&action, &g, &p).unwrap();
        assert_eq!(w.len(), 1);
        let r = focal_scan(&w, (-1.0, 1.0), (false, false), &p).unwrap();
        assert_eq!(r.events.len(), 1);
        assert!(r.events[0].t.abs() < 1e-9);
        assert_eq!(r.total_index, 1);
    }

    #[test]
    fn trivial_action_on_round_sphere() {
        let p = ToleranceProfile::default();
        let space = AmbientSpace::sphere(3, 1.0).unwrap();
        let action = ActionSpec::new(space, Vec::new(), None).unwrap();
        let g = Arc::new(
            action.make_horizontal_geodesic(&v(&[1.0, 0.0, 0.0]), &v(&[0.0, 1.0, 0.0]), (0.0, 1.5 * PI)).unwrap(),
        );
        let lam = leaf_lagrangian(&action, &g, &p).unwrap();
        assert_eq!(lam.len(), 1);
        let r = focal_scan(&lam, (0.0, 1.5 * PI), (false, false), &p).unwrap();
        assert_eq!(r.events.len(), 1);
        assert!((r.events[0].t - PI).abs() < 1e-8);
        assert_eq!(index(&lam, (0.0, 1.5 * PI), (false, false), &p).unwrap(), 1);
        // The left endpoint is focal as well.
        assert_eq!(index(&lam, (0.0, 1.5 * PI), (true, false), &p).unwrap(), 2);
    }

    #[test]
    fn radial_segment_away_from_origin() {
        let p = ToleranceProfile::default();
        let action = Preset::So(3).action().unwrap();
        let x = v(&[0.6, 0.0, 0.8]);
        let g = Arc::new(HorizontalGeodesic::new(*action.space(), x.clone(), x, (1.0, 2.0)).unwrap());
        let lam = leaf_lagrangian(&action, &g, &p).unwrap();
        assert_eq!(lam.len(), 2);
        let r = focal_scan(&lam, (1.0, 2.0), (true, true), &p).unwrap();
        assert_eq!(r.total_index, 0);
        assert!(r.events.is_empty());
    }

    #[test]
    fn rejects_interval_outside_domain() {
        let p = ToleranceProfile::default();
        let action = Preset::So(2).action().unwrap();
        let g = Arc::new(action.make_horizontal_geodesic(&v(&[1.0, 0.0]), &v(&[1.0, 0.0]), (0.0, 1.0)).unwrap());
        let w = vertical_family(&action, &g, &p).unwrap();
        assert!(matches!(focal_scan(&w, (0.0, 2.0), (false, false), &p), Err(Error::OutsideInterval { .. })));
    }
}
