//! Executes scenarios and collects the coherence checks that decide the exit
//! status.

use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geodesic::HorizontalGeodesic;
use crate::geometry::ToleranceProfile;
use crate::jacobi::{leaf_lagrangian, vertical_family, wilking_quotient_index, CONTAINMENT_TOL, ISOTROPY_TOL};
use crate::presets::{registry, ExpectedClass, Preset, PresetInfo};
use crate::quotient::{
    crossing_continuity_probe, crossing_number, explosion_probe, horizontal_conjugate_test, infinitesimal_polarity,
    polarity_test, random_line_family, singular_sweep_family, uniform_s_grid, ConjugateReport, ContinuityReport,
    CrossingRecord, ExplosionOptions, ExplosionProbe, ExplosionVerdict, GeodesicFamily, Polarity, PolarityOptions,
    PolarityVerdict, BRACKET_THRESHOLD, GROWTH_THRESHOLD, LIMIT_THRESHOLD,
};
use crate::scenario::{ContinuityParams, ExplosionParams, PolarityParams, Probe, Scenario, SuiteParams};
use crate::suite::{geodesic_suite, SuiteGeodesic, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_COHERENCE: i32 = 2;

pub const REPORT_SCHEMA: &str = "polarlab-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CoherenceCheck {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingResult {
    pub through_singular: bool,
    pub record: CrossingRecord,
    pub reversed_total: usize,
    pub rescaled_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateResult {
    pub through_singular: bool,
    pub report: ConjugateReport,
    /// Index of the quotient family on the open interval.
    pub ind_quotient: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityResult {
    pub label: String,
    pub family: GeodesicFamily,
    pub report: ContinuityReport,
}

/// Yes/no answers of the four probes for one action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoherenceRow {
    pub polar: bool,
    pub bounded_curvature: Option<bool>,
    pub no_conjugate_points: bool,
    pub crossing_continuous: bool,
}

impl CoherenceRow {
    /// All four answers agree (the curvature answer only when present).
    pub fn consistent(&self) -> bool {
        let p = self.polar;
        self.bounded_curvature.is_none_or(|b| b == p) && self.no_conjugate_points == p && self.crossing_continuous == p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ProbeResults {
    pub polarity: Option<PolarityVerdict>,
    pub explosion: Option<ExplosionProbe>,
    pub crossing: Option<Vec<CrossingResult>>,
    pub conjugate: Option<Vec<ConjugateResult>>,
    pub continuity: Option<Vec<ContinuityResult>>,
    pub summary: Option<CoherenceRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub bracket: f64,
    pub explosion_limit: f64,
    pub growth_exponent: f64,
    pub containment: f64,
    pub isotropy: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            bracket: BRACKET_THRESHOLD,
            explosion_limit: LIMIT_THRESHOLD,
            growth_exponent: GROWTH_THRESHOLD,
            containment: CONTAINMENT_TOL,
            isotropy: ISOTROPY_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub action: String,
    pub scenario: Scenario,
    pub tolerances: ToleranceProfile,
    pub thresholds: Thresholds,
    pub results: ProbeResults,
    pub coherence: Vec<CoherenceCheck>,
}

impl Report {
    pub fn coherent(&self) -> bool {
        self.coherence.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.coherent() {
            EXIT_OK
        } else {
            EXIT_COHERENCE
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CoherenceCheck> {
        self.coherence.iter().filter(|c| !c.passed)
    }
}

/// Turns a coherence error into a failed check; other errors propagate.
fn absorb<T>(checks: &mut Vec<CoherenceCheck>, name: &str, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Coherence(msg)) => {
            checks.push(CoherenceCheck::new(name, false, msg));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn sub_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k)
}

struct Ctx<'a> {
    action: &'a ActionSpec,
    preset: Option<&'a Preset>,
    profile: &'a ToleranceProfile,
    seed: u64,
    checks: Vec<CoherenceCheck>,
}

impl Ctx<'_> {
    fn polarity(&mut self, p: &PolarityParams) -> Result<PolarityVerdict> {
        let opts = PolarityOptions { n_points: p.points, seed: sub_seed(self.seed, 1), fast_path: p.fast_path };
        if let Some(at) = &p.at {
            let x = self.action.space().normalize_point(&DVector::from_row_slice(at))?;
            return infinitesimal_polarity(self.action, &x, self.profile, &opts);
        }
        let v = polarity_test(self.action, self.profile, &opts)?;
        if let Some(preset) = self.preset {
            let expected = preset.expected_class();
            let ok = match expected {
                ExpectedClass::Polar => v.verdict.is_polar(),
                ExpectedClass::NonPolar => v.verdict == Polarity::NonPolar,
                ExpectedClass::ForcedPolarByCodim if p.fast_path => v.verdict == Polarity::ForcedPolarByCodim,
                ExpectedClass::ForcedPolarByCodim => v.verdict == Polarity::Polar,
            };
            self.checks.push(CoherenceCheck::new(
                "polarity_matches_preset",
                ok,
                format!("{} expected {expected:?}, found {:?}", preset.name(), v.verdict),
            ));
        }
        Ok(v)
    }

    fn explosion(&mut self, p: &ExplosionParams) -> Result<ExplosionProbe> {
        let n = self.action.space().dimension();
        let x = match &p.point {
            Some(x) => self.action.space().normalize_point(&DVector::from_row_slice(x))?,
            None => DVector::zeros(n),
        };
        let v = match &p.direction {
            Some(v) => DVector::from_row_slice(v),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(self.seed, 2));
                self.action.random_horizontal_direction(&x, self.profile, &mut rng)?.ok_or(Error::NoRegularSample(1))?
            }
        };
        let opts = ExplosionOptions { plane_samples: p.plane_samples, seed: sub_seed(self.seed, 3) };
        let probe = explosion_probe(self.action, &x, &v, &p.radii, self.profile, &opts)?;
        let bounded = probe.verdict == ExplosionVerdict::Bounded;
        self.checks.push(CoherenceCheck::new(
            "explosion_limit_matches_growth",
            bounded == probe.bounded_curvature,
            format!("limit {:.3e}, growth exponent {:.3}", probe.fitted_limit, probe.growth_exponent),
        ));
        let slice = infinitesimal_polarity(
            self.action,
            &x,
            self.profile,
            &PolarityOptions { seed: sub_seed(self.seed, 4), ..Default::default() },
        )?;
        self.checks.push(CoherenceCheck::new(
            "explosion_matches_slice_polarity",
            bounded == slice.verdict.is_polar(),
            format!("{:?} curvature, slice {:?}", probe.verdict, slice.verdict),
        ));
        Ok(probe)
    }

    fn suite(&self, p: &SuiteParams) -> Result<Vec<SuiteGeodesic>> {
        let mut out = Vec::new();
        for g in &p.geodesics {
            let geo = self.action.make_horizontal_geodesic(
                &self.action.space().normalize_point(&DVector::from_row_slice(&g.base))?,
                &DVector::from_row_slice(&g.direction),
                g.interval,
            )?;
            out.push(SuiteGeodesic { geodesic: geo, through_singular: false });
        }
        let opts = SuiteOptions {
            count: p.count,
            seed: sub_seed(self.seed, 5),
            length: p.length,
            through_singular: p.through_singular,
        };
        out.extend(geodesic_suite(self.action, self.preset, self.profile, &opts)?);
        Ok(out)
    }

    fn crossing(&mut self, p: &SuiteParams) -> Result<Vec<CrossingResult>> {
        let mut out = Vec::new();
        for sg in self.suite(p)? {
            let g = &sg.geodesic;
            let name = "crossing_matches_vertical_index";
            let Some(record) = absorb(&mut self.checks, name, crossing_number(self.action, g, self.profile))? else {
                continue;
            };
            let reversed = absorb(&mut self.checks, name, crossing_number(self.action, &g.reversed(), self.profile))?;
            let rescaled =
                absorb(&mut self.checks, name, crossing_number(self.action, &g.reparametrized(2.0)?, self.profile))?;
            let (Some(reversed), Some(rescaled)) = (reversed, rescaled) else {
                continue;
            };
            out.push(CrossingResult {
                through_singular: sg.through_singular,
                reversed_total: reversed.total,
                rescaled_total: rescaled.total,
                record,
            });
        }
        let bad =
            out.iter().filter(|r| r.reversed_total != r.record.total || r.rescaled_total != r.record.total).count();
        self.checks.push(CoherenceCheck::new(
            "crossing_reparametrization_invariant",
            bad == 0,
            format!("{bad} of {} geodesics change under reversal or rescaling", out.len()),
        ));
        if !self.checks.iter().any(|c| c.name == "crossing_matches_vertical_index") {
            self.checks.push(CoherenceCheck::new(
                "crossing_matches_vertical_index",
                true,
                format!("{} geodesics", out.len()),
            ));
        }
        Ok(out)
    }

    fn conjugate(&mut self, p: &SuiteParams) -> Result<Vec<ConjugateResult>> {
        let mut out = Vec::new();
        let mut identity_failures = 0;
        let mut closed_failures = 0;
        for sg in self.suite(p)? {
            let g: Arc<HorizontalGeodesic> = Arc::new(sg.geodesic.clone());
            let report = horizontal_conjugate_test(self.action, &g, self.profile)?;
            let lambda = leaf_lagrangian(self.action, &g, self.profile)?;
            let w = vertical_family(self.action, &g, self.profile)?;
            let q = wilking_quotient_index(&w, &lambda, g.interval(), (false, false), self.profile)?;
            if report.ind_lambda != report.ind_w + q {
                identity_failures += 1;
            }
            if report.closed_identity.is_some_and(|c| c == report.has_conjugate) {
                closed_failures += 1;
            }
            out.push(ConjugateResult { through_singular: sg.through_singular, report, ind_quotient: q });
        }
        self.checks.push(CoherenceCheck::new(
            "index_decomposition",
            identity_failures == 0,
            format!("{identity_failures} of {} geodesics violate ind_lambda = ind_w + ind_quotient", out.len()),
        ));
        self.checks.push(CoherenceCheck::new(
            "closed_interval_index",
            closed_failures == 0,
            format!("{closed_failures} of {} geodesics disagree on the closed interval", out.len()),
        ));
        Ok(out)
    }

    fn continuity(&mut self, p: &ContinuityParams) -> Result<Vec<ContinuityResult>> {
        let mut families = Vec::new();
        if let Some(f) = &p.family {
            let to = |v: &Vec<f64>| DVector::from_row_slice(v);
            families.push((
                "given".to_string(),
                GeodesicFamily::new(&to(&f.base0), &to(&f.base1), &to(&f.direction0), &to(&f.direction1), f.interval),
            ));
        }
        let euclidean = !self.action.space().is_sphere();
        if euclidean {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(self.seed, 6));
            for i in 0..p.families {
                families.push((
                    format!("random-{i}"),
                    random_line_family(self.action, p.half_length, self.profile, &mut rng)?,
                ));
            }
            if p.families > 0 && self.action.max_leaf_dim() > 0 {
                let origin = DVector::zeros(self.action.space().dimension());
                if let Some(f) =
                    singular_sweep_family(self.action, &origin, p.half_length, 0.5, self.profile, &mut rng)?
                {
                    families.push(("sweep".to_string(), f));
                }
            }
        }
        let grid = uniform_s_grid(p.s_points);
        let mut out = Vec::new();
        for (label, family) in families {
            let name = "jump_implies_nonpolar_crossing";
            if let Some(report) =
                absorb(&mut self.checks, name, crossing_continuity_probe(self.action, &family, &grid, self.profile))?
            {
                out.push(ContinuityResult { label, family, report });
            }
        }
        if !self.checks.iter().any(|c| c.name == "jump_implies_nonpolar_crossing") {
            self.checks.push(CoherenceCheck::new(
                "jump_implies_nonpolar_crossing",
                true,
                format!("{} families", out.len()),
            ));
        }
        Ok(out)
    }
}

/// Runs a scenario. `Err` means the input or a computation failed (exit 1);
/// otherwise [`Report::exit_code`] gives 0 or 2.
pub fn run(scenario: &Scenario) -> Result<Report> {
    scenario.tolerances.validate()?;
    let mut ctx = Ctx {
        action: &scenario.action,
        preset: scenario.preset.as_ref(),
        profile: &scenario.tolerances,
        seed: scenario.seed,
        checks: Vec::new(),
    };
    let mut results = ProbeResults::default();
    match &scenario.probe {
        Probe::Polarity(p) => results.polarity = Some(ctx.polarity(p)?),
        Probe::Explosion(p) => results.explosion = Some(ctx.explosion(p)?),
        Probe::Crossing(p) => results.crossing = Some(ctx.crossing(p)?),
        Probe::Conjugate(p) => results.conjugate = Some(ctx.conjugate(p)?),
        Probe::Continuity(p) => results.continuity = Some(ctx.continuity(p)?),
        Probe::Full { polarity, explosion, suite, continuity } => {
            let pol = ctx.polarity(polarity)?;
            let exp = explosion.as_ref().map(|p| ctx.explosion(p)).transpose()?;
            let con = ctx.conjugate(suite)?;
            let cont = ctx.continuity(continuity)?;
            let row = CoherenceRow {
                polar: pol.verdict.is_polar(),
                bounded_curvature: exp.as_ref().map(|e| e.verdict == ExplosionVerdict::Bounded),
                no_conjugate_points: con.iter().all(|c| !c.report.has_conjugate),
                crossing_continuous: cont.iter().all(|c| !c.report.discontinuity_found),
            };
            // Finite samples can miss conjugate points and jumps, so only the
            // polar side is required to agree.
            let mut ok = row.bounded_curvature.is_none_or(|b| b == row.polar);
            if row.polar {
                ok &= row.crossing_continuous;
                if !ctx.action.space().is_sphere() {
                    ok &= row.no_conjugate_points;
                }
            }
            ctx.checks.push(CoherenceCheck::new("polarity_equivalences", ok, format!("{row:?}")));
            results.polarity = Some(pol);
            results.explosion = exp;
            results.conjugate = Some(con);
            results.continuity = Some(cont);
            results.summary = Some(row);
        }
    }
    Ok(Report {
        schema: REPORT_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        action: scenario.action.label(),
        scenario: scenario.clone(),
        tolerances: scenario.tolerances,
        thresholds: Thresholds::default(),
        results,
        coherence: ctx.checks,
    })
}

/// The preset registry as printed by `presets`.
pub fn list_presets() -> Vec<PresetInfo> {
    registry().into_iter().map(|(_, info)| info).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    #[test]
    fn polarity_scenarios() {
        let r = run(&Scenario::for_preset("hopf", "polarity", 0).unwrap()).unwrap();
        assert_eq!(r.results.polarity.as_ref().unwrap().verdict, Polarity::NonPolar);
        assert_eq!(r.exit_code(), EXIT_OK);
        let r = run(&Scenario::for_preset("torus-std(3)", "polarity", 0).unwrap()).unwrap();
        assert_eq!(r.results.polarity.as_ref().unwrap().verdict, Polarity::Polar);
        assert!(r.coherent());
    }

    #[test]
    fn hopf_explosion_scenario() {
        let s = parse_scenario("action = \"hopf\"\n[probe]\nkind = \"explosion\"\nradii = [1, 0.5, 0.25, 0.125]\n")
            .unwrap();
        let r = run(&s).unwrap();
        let e = r.results.explosion.as_ref().unwrap();
        assert_eq!(e.verdict, ExplosionVerdict::QuadraticExplosion);
        assert!((e.fitted_limit - 3.0).abs() < 0.03);
        assert!(r.coherent(), "{:?}", r.coherence);
    }

    #[test]
    fn crossing_and_conjugate_scenarios() {
        let s =
            parse_scenario("seed = 3\naction = \"torus-std(2)\"\n[probe]\nkind = \"crossing\"\ncount = 4\n").unwrap();
        let r = run(&s).unwrap();
        assert_eq!(r.results.crossing.as_ref().unwrap().len(), 4);
        assert!(r.coherent(), "{:?}", r.coherence);
        let s = parse_scenario("seed = 3\naction = \"hopf\"\n[probe]\nkind = \"conjugate\"\ncount = 4\n").unwrap();
        let r = run(&s).unwrap();
        assert!(r.coherent(), "{:?}", r.coherence);
    }

    #[test]
    fn presets_are_listed() {
        let names: Vec<_> = list_presets().into_iter().map(|p| p.name).collect();
        assert!(names.contains(&"hopf") && names.contains(&"so(n)"));
    }
}
