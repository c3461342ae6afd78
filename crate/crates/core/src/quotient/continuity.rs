//! Behaviour of the crossing number along continuous families of regular
//! horizontal geodesics.

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::crossing::{check_regular_endpoints, crossing_number};
use super::polarity::{polarity_test, Polarity, PolarityOptions};
use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geodesic::HorizontalGeodesic;
use crate::geometry::{orthogonal_complement, span_of_columns, Subspace, ToleranceProfile};
use crate::random::gaussian_vector;
use crate::scan::RankScan;

/// `γ_s` with base and direction interpolated affinely in `s ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicFamily {
    pub base: (Vec<f64>, Vec<f64>),
    pub direction: (Vec<f64>, Vec<f64>),
    pub interval: (f64, f64),
}

impl GeodesicFamily {
    pub fn new(
        base0: &DVector<f64>,
        base1: &DVector<f64>,
        dir0: &DVector<f64>,
        dir1: &DVector<f64>,
        interval: (f64, f64),
    ) -> Self {
        let v = |x: &DVector<f64>| x.iter().copied().collect::<Vec<_>>();
        Self { base: (v(base0), v(base1)), direction: (v(dir0), v(dir1)), interval }
    }

    /// Lines `t ↦ y + s·w + t·v`, horizontal for every `s` when `y` and `w`
    /// are orthogonal to all `A_i v`.
    pub fn translated_lines(y: &DVector<f64>, w: &DVector<f64>, v: &DVector<f64>, interval: (f64, f64)) -> Self {
        Self::new(y, &(y + w), v, v, interval)
    }

    fn lerp(pair: &(Vec<f64>, Vec<f64>), s: f64) -> DVector<f64> {
        DVector::from_iterator(pair.0.len(), pair.0.iter().zip(&pair.1).map(|(a, b)| (1.0 - s) * a + s * b))
    }

    pub fn base_at(&self, s: f64) -> DVector<f64> {
        Self::lerp(&self.base, s)
    }

    pub fn direction_at(&self, s: f64) -> DVector<f64> {
        Self::lerp(&self.direction, s)
    }

    pub fn geodesic(&self, action: &ActionSpec, s: f64) -> Result<HorizontalGeodesic> {
        let base = action.space().normalize_point(&self.base_at(s))?;
        let mut dir = self.direction_at(s);
        if action.space().is_sphere() {
            let u = base.normalize();
            dir = &dir - &u * dir.dot(&u);
        }
        action.make_horizontal_geodesic(&base, &dir, self.interval)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingSample {
    pub s: f64,
    pub c: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingJump {
    pub s_left: f64,
    pub s_right: f64,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub samples: Vec<CrossingSample>,
    pub jumps: Vec<CrossingJump>,
    pub discontinuity_found: bool,
    /// Slice polarity at the singular crossings next to the first jump.
    pub crossing_polarity: Vec<Polarity>,
}

/// Verifies that both endpoints stay regular for every `s ∈ [0, 1]`, not only
/// on the sample grid.
fn check_family_regular(action: &ActionSpec, family: &GeodesicFamily, profile: &ToleranceProfile) -> Result<()> {
    let d = action.max_leaf_dim();
    if d == 0 {
        return Ok(());
    }
    for end in [family.interval.0, family.interval.1] {
        let scan = RankScan {
            eval: |s: f64| {
                let g = family.geodesic(action, s)?;
                Ok(action.killing_matrix(&g.point(end)))
            },
            expected_rank: d,
            interval: (0.0, 1.0),
            include_endpoints: (true, true),
            profile: &ToleranceProfile { grid_points: 256, ..*profile },
        };
        if let Some(bad) = scan.run()?.first() {
            return Err(Error::InvalidArgument(format!(
                "family leaves the regular-endpoint regime at s = {:.6} (endpoint t = {end})",
                bad.t
            )));
        }
    }
    Ok(())
}

pub fn crossing_continuity_probe(
    action: &ActionSpec,
    family: &GeodesicFamily,
    s_grid: &[f64],
    profile: &ToleranceProfile,
) -> Result<ContinuityReport> {
    profile.validate()?;
    if s_grid.len() < 2 || s_grid.windows(2).any(|w| w[1] <= w[0]) || s_grid[0] < 0.0 || s_grid[s_grid.len() - 1] > 1.0
    {
        return Err(Error::InvalidArgument("s-grid must be increasing inside [0, 1] with at least two points".into()));
    }
    check_family_regular(action, family, profile)?;
    let records = s_grid
        .par_iter()
        .map(|&s| {
            let g = family.geodesic(action, s)?;
            check_regular_endpoints(action, &g, profile)?;
            Ok((s, crossing_number(action, &g, profile)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<CrossingSample> = records.iter().map(|(s, r)| CrossingSample { s: *s, c: r.total }).collect();
    let jumps: Vec<CrossingJump> = samples
        .windows(2)
        .filter(|w| w[0].c != w[1].c)
        .map(|w| CrossingJump { s_left: w[0].s, s_right: w[1].s, from: w[0].c, to: w[1].c })
        .collect();

    let mut crossing_polarity = Vec::new();
    if let Some(j) = jumps.first() {
        let opts = PolarityOptions::default();
        for s in [j.s_left, j.s_right] {
            let (_, record) = records.iter().find(|(x, _)| *x == s).expect("sampled");
            let g = family.geodesic(action, s)?;
            for ev in &record.events {
                // The located point is only close to the stratum, so the
                // slice is taken with the detected leaf dimension.
                let slice = action.slice_with_leaf_dim(&g.point(ev.t), ev.leaf_dim)?;
                crossing_polarity.push(polarity_test(&slice, profile, &opts)?.verdict);
            }
        }
        if !crossing_polarity.contains(&Polarity::NonPolar) {
            return Err(Error::Coherence(format!(
                "crossing number jumps between s = {} and s = {} but every crossed slice is polar",
                j.s_left, j.s_right
            )));
        }
    }
    Ok(ContinuityReport { discontinuity_found: !jumps.is_empty(), samples, jumps, crossing_polarity })
}

/// Uniform grid of `n` points on `[0, 1]`.
pub fn uniform_s_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// `(span{A_i v})^⊥`: bases `y` for which `t ↦ y + t v` is horizontal.
pub(crate) fn horizontal_line_bases(
    action: &ActionSpec,
    v: &DVector<f64>,
    profile: &ToleranceProfile,
) -> Result<Subspace> {
    let k = action.killing_matrix(v);
    let (_, span) = span_of_columns(&k, profile);
    orthogonal_complement(&span, &Subspace::full(v.len()))
}

/// A seeded Euclidean family of parallel horizontal lines. Retries until the
/// endpoints stay regular across the whole family.
pub fn random_line_family<R: Rng>(
    action: &ActionSpec,
    half_length: f64,
    profile: &ToleranceProfile,
    rng: &mut R,
) -> Result<GeodesicFamily> {
    let n = action.space().dimension();
    for _ in 0..64 {
        let v = gaussian_vector(n, rng).normalize();
        let bases = horizontal_line_bases(action, &v, profile)?;
        let coords = |rng: &mut R| bases.basis() * gaussian_vector(bases.rank(), rng);
        let y = coords(rng) * 0.4;
        let w = coords(rng) * 0.2;
        let family = GeodesicFamily::translated_lines(&y, &w, &v, (-half_length, half_length));
        if check_family_regular(action, &family, profile).is_ok() {
            return Ok(family);
        }
    }
    Err(Error::NoRegularSample(64))
}

/// Parallel lines `x0 + s·w + t·v` whose first member passes through the
/// singular point `x0` at `t = 0` and the others miss it. `None` when no
/// horizontal offset exists (or no direction keeps the endpoints regular).
pub fn singular_sweep_family<R: Rng>(
    action: &ActionSpec,
    x0: &DVector<f64>,
    half_length: f64,
    offset: f64,
    profile: &ToleranceProfile,
    rng: &mut R,
) -> Result<Option<GeodesicFamily>> {
    if action.space().is_sphere() {
        return Err(Error::InvalidArgument("sweep families are built on Euclidean actions".into()));
    }
    for _ in 0..64 {
        let Some(v) = action.random_horizontal_direction(x0, profile, rng)? else {
            continue;
        };
        let v = v.normalize();
        let bases = horizontal_line_bases(action, &v, profile)?;
        // Offsets along v only reparametrize the line.
        let mut w = bases.basis() * gaussian_vector(bases.rank(), rng);
        w -= &v * w.dot(&v);
        if w.norm() < 1e-9 {
            return Ok(None);
        }
        let w = w.normalize() * offset;
        let family = GeodesicFamily::translated_lines(x0, &w, &v, (-half_length, half_length));
        if check_family_regular(action, &family, profile).is_ok() {
            return Ok(Some(family));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn rotation_of_plane_is_constant() {
        let p = ToleranceProfile::default();
        let a = Preset::So(2).action().unwrap();
        let family =
            GeodesicFamily::new(&v(&[0.0, 0.0]), &v(&[0.0, 0.0]), &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), (-1.0, 1.0));
        let r = crossing_continuity_probe(&a, &family, &uniform_s_grid(9), &p).unwrap();
        assert!(r.samples.iter().all(|s| s.c == 1));
        assert!(!r.discontinuity_found);
    }

    #[test]
    fn hopf_sweep_jumps() {
        let p = ToleranceProfile::default();
        let a = Preset::Hopf.action().unwrap();
        let dir = v(&[1.0, 0.0, 0.0, 0.0]);
        // A v = e₁, so offsets in the e₂ direction keep the lines horizontal.
        let family = GeodesicFamily::translated_lines(&DVector::zeros(4), &v(&[0.0, 0.0, 0.5, 0.0]), &dir, (-1.0, 1.0));
        let r = crossing_continuity_probe(&a, &family, &uniform_s_grid(5), &p).unwrap();
        assert_eq!(r.samples[0].c, 1);
        assert!(r.samples[1..].iter().all(|s| s.c == 0));
        assert_eq!(r.jumps.len(), 1);
        assert_eq!((r.jumps[0].from, r.jumps[0].to), (1, 0));
        assert!(r.crossing_polarity.contains(&Polarity::NonPolar));
    }

    #[test]
    fn sweeps_through_singular_points() {
        let p = ToleranceProfile::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let hopf = Preset::Hopf.action().unwrap();
        let f = singular_sweep_family(&hopf, &DVector::zeros(4), 1.0, 0.5, &p, &mut rng).unwrap().unwrap();
        let r = crossing_continuity_probe(&hopf, &f, &uniform_s_grid(5), &p).unwrap();
        assert!(r.discontinuity_found);

        let torus = Preset::TorusStd(2).action().unwrap();
        let x0 = v(&[0.0, 0.0, 0.7, -0.2]);
        let f = singular_sweep_family(&torus, &x0, 1.0, 0.5, &p, &mut rng).unwrap().unwrap();
        let r = crossing_continuity_probe(&torus, &f, &uniform_s_grid(5), &p).unwrap();
        assert!(!r.discontinuity_found, "{:?}", r.samples);
        assert_eq!(r.samples[0].c, 1);
    }

    #[test]
    fn seeded_torus_families_are_continuous() {
        let p = ToleranceProfile::default();
        let a = Preset::TorusStd(2).action().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let family = random_line_family(&a, 1.5, &p, &mut rng).unwrap();
            let r = crossing_continuity_probe(&a, &family, &uniform_s_grid(7), &p).unwrap();
            assert!(!r.discontinuity_found, "{:?}", r.samples);
        }
    }
}
