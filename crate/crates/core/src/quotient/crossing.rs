//! Crossing numbers of regular horizontal geodesics.

use std::sync::Arc;

use serde::Serialize;

use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geodesic::{GeodesicSummary, HorizontalGeodesic};
use crate::geometry::ToleranceProfile;
use crate::jacobi::{index, vertical_family};
use crate::scan::RankScan;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingEvent {
    pub t: f64,
    pub c: usize,
    pub leaf_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingRecord {
    pub geodesic: GeodesicSummary,
    pub events: Vec<CrossingEvent>,
    pub total: usize,
    pub vertical_index: usize,
}

pub(crate) fn check_regular_endpoints(
    action: &ActionSpec,
    g: &HorizontalGeodesic,
    profile: &ToleranceProfile,
) -> Result<()> {
    for t in [g.left(), g.right()] {
        let leaf_dim = action.leaf_dimension(&g.point(t), profile)?;
        if leaf_dim != action.max_leaf_dim() {
            return Err(Error::NotRegular { leaf_dim, max_leaf_dim: action.max_leaf_dim() });
        }
    }
    Ok(())
}

/// Singular crossings of `γ` without the vertical-index cross-check.
pub(crate) fn crossing_events(
    action: &ActionSpec,
    g: &HorizontalGeodesic,
    profile: &ToleranceProfile,
) -> Result<Vec<CrossingEvent>> {
    let d = action.max_leaf_dim();
    let scan = RankScan {
        eval: |t: f64| Ok(action.killing_matrix(&g.point(t))),
        expected_rank: d,
        interval: g.interval(),
        include_endpoints: (false, false),
        profile,
    };
    Ok(scan.run()?.into_iter().map(|e| CrossingEvent { t: e.t, c: e.deficiency, leaf_dim: d - e.deficiency }).collect())
}

/// `c(γ) = Σ c_i` with `c_i = d(γ) − dim L(γ(t_i))`, cross-checked against
/// the vertical Jacobi index on the open interval.
pub fn crossing_number(
    action: &ActionSpec,
    g: &HorizontalGeodesic,
    profile: &ToleranceProfile,
) -> Result<CrossingRecord> {
    profile.validate()?;
    action.check_horizontal(g)?;
    check_regular_endpoints(action, g, profile)?;
    let events = crossing_events(action, g, profile)?;
    let total = events.iter().map(|e| e.c).sum();
    let shared = Arc::new(g.clone());
    let w = vertical_family(action, &shared, profile)?;
    let vertical_index = index(&w, g.interval(), (false, false), profile)?;
    if vertical_index != total {
        return Err(Error::Coherence(format!("crossing number {total} differs from vertical index {vertical_index}")));
    }
    Ok(CrossingRecord { geodesic: g.summary(), events, total, vertical_index })
}
