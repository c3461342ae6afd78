//! Seeded collections of regular horizontal geodesics.
//!
//! Half of the geodesics of a Euclidean suite pass through a sampled
//! singular point at `t = 0`; the rest start at a random regular point.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geodesic::HorizontalGeodesic;
use crate::geometry::ToleranceProfile;
use crate::presets::Preset;
use crate::random::random_point;

const ATTEMPTS_PER_GEODESIC: usize = 64;

#[derive(Debug, Clone)]
pub struct SuiteGeodesic {
    pub geodesic: HorizontalGeodesic,
    pub through_singular: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub count: usize,
    pub seed: u64,
    /// Lengths are drawn uniformly from this range (times the radius on
    /// spheres).
    pub length: (f64, f64),
    pub through_singular: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { count: 16, seed: 0, length: (0.5, 3.0), through_singular: true }
    }
}

fn regular_endpoints(action: &ActionSpec, g: &HorizontalGeodesic, profile: &ToleranceProfile) -> Result<bool> {
    Ok(action.is_regular(&g.point(g.left()), profile)? && action.is_regular(&g.point(g.right()), profile)?)
}

fn uniform<R: Rng>(rng: &mut R, range: (f64, f64)) -> f64 {
    range.0 + (range.1 - range.0) * rng.random::<f64>()
}

/// A singular point of the preset's strata, placed on the sphere for sphere
/// actions (when that is possible).
fn singular_point<R: Rng>(action: &ActionSpec, preset: &Preset, rng: &mut R) -> Option<DVector<f64>> {
    let x = preset.singular_sample(rng)?;
    if action.space().is_sphere() {
        if x.norm() < 1e-9 {
            return None;
        }
        action.space().normalize_point(&x).ok()
    } else {
        Some(x)
    }
}

/// Seeded regular horizontal geodesics for `action`. `preset`, when given,
/// supplies singular points to cross.
pub fn geodesic_suite(
    action: &ActionSpec,
    preset: Option<&Preset>,
    profile: &ToleranceProfile,
    options: &SuiteOptions,
) -> Result<Vec<SuiteGeodesic>> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let scale = if action.space().is_sphere() { action.space().radius() } else { 1.0 };
    let mut out = Vec::with_capacity(options.count);
    for i in 0..options.count {
        let want_singular = options.through_singular && i % 2 == 1;
        let mut made = None;
        for _ in 0..ATTEMPTS_PER_GEODESIC {
            let singular = if want_singular { preset.and_then(|p| singular_point(action, p, &mut rng)) } else { None };
            let through = singular.is_some();
            let x = match singular {
                Some(x) => x,
                None => random_point(action.space(), &mut rng),
            };
            let Some(v) = action.random_horizontal_direction(&x, profile, &mut rng)? else {
                continue;
            };
            let interval = if through {
                (-uniform(&mut rng, options.length) * scale / 2.0, uniform(&mut rng, options.length) * scale / 2.0)
            } else {
                (0.0, uniform(&mut rng, options.length) * scale)
            };
            let g = match HorizontalGeodesic::new(*action.space(), x, v, interval) {
                Ok(g) => g,
                Err(_) => continue,
            };
            if action.check_horizontal(&g).is_err() || !regular_endpoints(action, &g, profile)? {
                continue;
            }
            made = Some(SuiteGeodesic { geodesic: g, through_singular: through });
            break;
        }
        match made {
            Some(g) => out.push(g),
            None => return Err(Error::NoRegularSample(ATTEMPTS_PER_GEODESIC)),
        }
    }
    Ok(out)
}

/// Actions used by the acceptance battery, with their presets.
pub fn battery_actions() -> Result<Vec<(Preset, ActionSpec)>> {
    let euclidean = [
        Preset::So(2),
        Preset::So(3),
        Preset::TorusStd(2),
        Preset::Hopf,
        Preset::CircleWeights(vec![1, 2]),
        Preset::Trivial(3),
    ];
    let spherical = [Preset::TorusStd(2), Preset::Hopf, Preset::CircleWeights(vec![1, 2]), Preset::Trivial(3)];
    let mut out = Vec::new();
    for p in euclidean {
        let a = p.action()?;
        out.push((p, a));
    }
    for p in spherical {
        let a = p.action()?.on_sphere(1.0)?;
        out.push((p, a));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_are_regular_and_seeded() {
        let p = ToleranceProfile::default();
        for (preset, action) in battery_actions().unwrap() {
            let opts = SuiteOptions { count: 6, seed: 9, ..Default::default() };
            let a = geodesic_suite(&action, Some(&preset), &p, &opts).unwrap();
            let b = geodesic_suite(&action, Some(&preset), &p, &opts).unwrap();
            assert_eq!(a.len(), 6);
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.geodesic, y.geodesic);
                assert!(regular_endpoints(&action, &x.geodesic, &p).unwrap());
            }
            if !action.space().is_sphere() && preset != Preset::Trivial(3) {
                assert!(a.iter().any(|g| g.through_singular), "{}", preset.name());
            }
        }
    }
}
