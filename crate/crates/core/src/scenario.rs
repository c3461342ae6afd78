//! Scenario files (TOML).
//!
//! ```toml
//! seed = 7                      # optional, default 0
//! action = "hopf"               # preset name, or a table:
//! # [action]
//! # generators = [[[0, -1], [1, 0]]]   # row-major skew matrices
//! # curvature = 1.0                    # sphere of curvature 1 (default: flat)
//! # name = "my-circle"
//!
//! [probe]
//! kind = "explosion"            # polarity | explosion | crossing | conjugate | continuity | full
//! radii = [1, 0.5, 0.25, 0.125]
//!
//! [tolerances]                  # optional overrides
//! rank_rel_tol = 1e-8
//!
//! [output]                      # optional
//! dir = "out"
//! stem = "hopf-explosion"
//! format = "both"               # json | csv | both
//! ```
//!
//! Probe keys, all optional:
//!
//! | probe | keys |
//! |-------|------|
//! | polarity | `points`, `fast_path`, `at` |
//! | explosion | `point`, `direction`, `radii`, `plane_samples` |
//! | crossing, conjugate | `count`, `length`, `through_singular`, `geodesics` |
//! | continuity | `families`, `s_points`, `half_length`, `family` |
//!
//! `geodesics` is a list of tables `{ base, direction, interval }`; `family`
//! is a table `{ base0, base1, direction0, direction1, interval }`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::action::ActionSpec;
use crate::error::{Error, Result};
use crate::geometry::{AmbientSpace, ToleranceProfile};
use crate::presets::Preset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "both" => Ok(Self::Both),
            _ => Err(Error::InvalidArgument(format!("unknown format {s:?} (json, csv, both)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct OutputSpec {
    pub dir: Option<String>,
    pub stem: Option<String>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicInput {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyInput {
    pub base0: Vec<f64>,
    pub base1: Vec<f64>,
    pub direction0: Vec<f64>,
    pub direction1: Vec<f64>,
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarityParams {
    pub points: usize,
    pub fast_path: bool,
    pub at: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplosionParams {
    pub point: Option<Vec<f64>>,
    pub direction: Option<Vec<f64>>,
    pub radii: Vec<f64>,
    pub plane_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteParams {
    pub count: usize,
    pub length: (f64, f64),
    pub through_singular: bool,
    pub geodesics: Vec<GeodesicInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityParams {
    pub families: usize,
    pub s_points: usize,
    pub half_length: f64,
    pub family: Option<FamilyInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Probe {
    Polarity(PolarityParams),
    Explosion(ExplosionParams),
    Crossing(SuiteParams),
    Conjugate(SuiteParams),
    Continuity(ContinuityParams),
    Full {
        polarity: PolarityParams,
        explosion: Option<ExplosionParams>,
        suite: SuiteParams,
        continuity: ContinuityParams,
    },
}

impl Probe {
    pub fn kind(&self) -> &'static str {
        match self {
            Probe::Polarity(_) => "polarity",
            Probe::Explosion(_) => "explosion",
            Probe::Crossing(_) => "crossing",
            Probe::Conjugate(_) => "conjugate",
            Probe::Continuity(_) => "continuity",
            Probe::Full { .. } => "full",
        }
    }
}

/// Where the action came from, echoed in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSource {
    Preset { name: String, curvature: Option<f64> },
    Generators { dimension: usize, count: usize, curvature: Option<f64>, name: Option<String> },
}

#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub seed: u64,
    pub action_source: ActionSource,
    #[serde(skip)]
    pub action: ActionSpec,
    #[serde(skip)]
    pub preset: Option<Preset>,
    pub probe: Probe,
    pub tolerances: ToleranceProfile,
    pub output: OutputSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    seed: Option<u64>,
    action: Option<RawAction>,
    probe: Option<RawProbe>,
    tolerances: Option<RawTolerances>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawAction {
    Name(String),
    Table(RawActionTable),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawActionTable {
    preset: Option<String>,
    generators: Option<Vec<Vec<Vec<f64>>>>,
    curvature: Option<f64>,
    name: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawProbe {
    Kind(String),
    Table(Box<RawProbeTable>),
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawProbeTable {
    kind: Option<String>,
    points: Option<usize>,
    fast_path: Option<bool>,
    at: Option<Vec<f64>>,
    point: Option<Vec<f64>>,
    direction: Option<Vec<f64>>,
    radii: Option<Vec<f64>>,
    plane_samples: Option<usize>,
    count: Option<usize>,
    length: Option<(f64, f64)>,
    through_singular: Option<bool>,
    geodesics: Option<Vec<GeodesicInput>>,
    families: Option<usize>,
    s_points: Option<usize>,
    half_length: Option<f64>,
    family: Option<FamilyInput>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    rank_rel_tol: Option<f64>,
    zero_abs_tol: Option<f64>,
    fd_step: Option<f64>,
    bisect_resolution: Option<f64>,
    grid_points: Option<usize>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    stem: Option<String>,
    format: Option<String>,
}

fn matrix(rows: &[Vec<f64>], index: usize) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!("generator {index} is not a square matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn build_action(raw: RawAction) -> Result<(ActionSource, ActionSpec, Option<Preset>)> {
    let table = match raw {
        RawAction::Name(name) => RawActionTable { preset: Some(name), generators: None, curvature: None, name: None },
        RawAction::Table(t) => t,
    };
    let curvature = table.curvature.filter(|k| *k != 0.0);
    match (table.preset, table.generators) {
        (Some(_), Some(_)) => Err(Error::InvalidArgument("give either a preset or generators, not both".into())),
        (None, None) => Err(Error::InvalidArgument("action needs a preset or generators".into())),
        (Some(name), None) => {
            let preset = Preset::parse(&name)?;
            let action = preset.action()?;
            let action = match curvature {
                Some(k) => action.on_sphere(k)?,
                None => action,
            };
            Ok((ActionSource::Preset { name: preset.name(), curvature }, action, Some(preset)))
        }
        (None, Some(gens)) => {
            let mats = gens.iter().enumerate().map(|(i, g)| matrix(g, i)).collect::<Result<Vec<_>>>()?;
            let n = mats
                .first()
                .map(|m| m.nrows())
                .ok_or_else(|| Error::InvalidArgument("generator list is empty; use the trivial(n) preset".into()))?;
            if let Some(i) = mats.iter().position(|m| m.nrows() != n) {
                return Err(Error::InvalidArgument(format!("generator {i} has a different size than generator 0")));
            }
            let space = match curvature {
                Some(k) => AmbientSpace::sphere(n, k)?,
                None => AmbientSpace::euclidean(n)?,
            };
            let count = mats.len();
            let action = ActionSpec::new(space, mats, table.name.clone())?;
            Ok((ActionSource::Generators { dimension: n, count, curvature, name: table.name }, action, None))
        }
    }
}

fn tolerances(raw: Option<RawTolerances>) -> Result<ToleranceProfile> {
    let raw = raw.unwrap_or_default();
    let d = ToleranceProfile::default();
    let p = ToleranceProfile {
        rank_rel_tol: raw.rank_rel_tol.unwrap_or(d.rank_rel_tol),
        zero_abs_tol: raw.zero_abs_tol.unwrap_or(d.zero_abs_tol),
        fd_step: raw.fd_step.unwrap_or(d.fd_step),
        bisect_resolution: raw.bisect_resolution.unwrap_or(d.bisect_resolution),
        grid_points: raw.grid_points.unwrap_or(d.grid_points),
    };
    p.validate()?;
    Ok(p)
}

fn check_vec(name: &str, v: &Option<Vec<f64>>, n: usize) -> Result<()> {
    match v {
        Some(v) if v.len() != n => Err(Error::InvalidArgument(format!("{name} has length {}, expected {n}", v.len()))),
        _ => Ok(()),
    }
}

fn suite_params(t: &RawProbeTable, n: usize) -> Result<SuiteParams> {
    let geodesics = t.geodesics.clone().unwrap_or_default();
    for (i, g) in geodesics.iter().enumerate() {
        if g.base.len() != n || g.direction.len() != n {
            return Err(Error::InvalidArgument(format!("geodesic {i} must have base and direction of length {n}")));
        }
    }
    let length = t.length.unwrap_or((0.5, 3.0));
    if !(length.0 > 0.0 && length.1 >= length.0) {
        return Err(Error::InvalidArgument("length must be a positive range [lo, hi]".into()));
    }
    Ok(SuiteParams {
        count: t.count.unwrap_or(if geodesics.is_empty() { 16 } else { 0 }),
        length,
        through_singular: t.through_singular.unwrap_or(true),
        geodesics,
    })
}

fn explosion_params(t: &RawProbeTable, action: &ActionSpec) -> Result<ExplosionParams> {
    let n = action.space().dimension();
    let c = action.codimension();
    if c < 2 {
        return Err(Error::InvalidArgument(format!(
            "explosion probe needs cohomogeneity >= 2, {} has {c}",
            action.label()
        )));
    }
    check_vec("point", &t.point, n)?;
    check_vec("direction", &t.direction, n)?;
    if action.space().is_sphere() && t.point.is_none() {
        return Err(Error::InvalidArgument("sphere explosion probes need an explicit point".into()));
    }
    Ok(ExplosionParams {
        point: t.point.clone(),
        direction: t.direction.clone(),
        radii: t.radii.clone().unwrap_or_else(crate::quotient::default_radii),
        plane_samples: t.plane_samples.unwrap_or(crate::quotient::DEFAULT_PLANE_SAMPLES),
    })
}

fn polarity_params(t: &RawProbeTable, n: usize) -> Result<PolarityParams> {
    check_vec("at", &t.at, n)?;
    Ok(PolarityParams {
        points: t.points.unwrap_or(crate::quotient::DEFAULT_POLARITY_POINTS),
        fast_path: t.fast_path.unwrap_or(true),
        at: t.at.clone(),
    })
}

fn continuity_params(t: &RawProbeTable, action: &ActionSpec) -> Result<ContinuityParams> {
    let n = action.space().dimension();
    let sphere = action.space().is_sphere();
    if sphere && t.families.unwrap_or(0) > 0 {
        return Err(Error::InvalidArgument("random families are Euclidean only; give a family on spheres".into()));
    }
    if let Some(f) = &t.family {
        if [&f.base0, &f.base1, &f.direction0, &f.direction1].iter().any(|v| v.len() != n) {
            return Err(Error::InvalidArgument(format!("family vectors must have length {n}")));
        }
    }
    Ok(ContinuityParams {
        families: t.families.unwrap_or(if t.family.is_some() || sphere { 0 } else { 4 }),
        s_points: t.s_points.unwrap_or(11).max(2),
        half_length: t.half_length.unwrap_or(1.5),
        family: t.family.clone(),
    })
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario =
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("scenario: {}", e.message())))?;
    let (action_source, action, preset) =
        build_action(raw.action.ok_or_else(|| Error::InvalidArgument("missing action".into()))?)?;
    let probe_raw = raw.probe.ok_or_else(|| Error::InvalidArgument("missing probe block".into()))?;
    let table = match probe_raw {
        RawProbe::Kind(k) => RawProbeTable { kind: Some(k), ..Default::default() },
        RawProbe::Table(t) => *t,
    };
    let kind = table.kind.clone().ok_or_else(|| Error::InvalidArgument("probe block has no kind".into()))?;
    let n = action.space().dimension();
    let probe = match kind.as_str() {
        "polarity" => Probe::Polarity(polarity_params(&table, n)?),
        "explosion" => Probe::Explosion(explosion_params(&table, &action)?),
        "crossing" => Probe::Crossing(suite_params(&table, n)?),
        "conjugate" => Probe::Conjugate(suite_params(&table, n)?),
        "continuity" => Probe::Continuity(continuity_params(&table, &action)?),
        "full" => Probe::Full {
            polarity: polarity_params(&table, n)?,
            explosion: if action.codimension() >= 2 && !action.space().is_sphere() {
                Some(explosion_params(&table, &action)?)
            } else {
                None
            },
            suite: suite_params(&table, n)?,
            continuity: continuity_params(&table, &action)?,
        },
        other => return Err(Error::InvalidArgument(format!("unknown probe kind {other:?}"))),
    };
    let out = raw.output.unwrap_or_default();
    let output = OutputSpec {
        dir: out.dir,
        stem: out.stem,
        format: out.format.as_deref().map(str::parse).transpose()?.unwrap_or_default(),
    };
    Ok(Scenario {
        seed: raw.seed.unwrap_or(0),
        action_source,
        action,
        preset,
        probe,
        tolerances: tolerances(raw.tolerances)?,
        output,
    })
}

/// Command-line overrides applied on top of a parsed scenario.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub rank_rel_tol: Option<f64>,
    pub grid_points: Option<usize>,
    pub out_dir: Option<String>,
    pub format: Option<OutputFormat>,
}

impl Scenario {
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(t) = o.rank_rel_tol {
            self.tolerances.rank_rel_tol = t;
        }
        if let Some(g) = o.grid_points {
            self.tolerances.grid_points = g;
        }
        if let Some(d) = &o.out_dir {
            self.output.dir = Some(d.clone());
        }
        if let Some(f) = o.format {
            self.output.format = f;
        }
        self.tolerances.validate()
    }

    /// File stem for outputs: the configured stem, else `<action>-<probe>`.
    pub fn output_stem(&self) -> String {
        if let Some(s) = &self.output.stem {
            return s.clone();
        }
        let raw = format!("{}-{}", self.action.label(), self.probe.kind());
        let mut out = String::new();
        for c in raw.chars() {
            if c.is_ascii_alphanumeric() {
                out.push(c);
            } else if !out.ends_with('-') {
                out.push('-');
            }
        }
        out.trim_matches('-').to_string()
    }

    /// Scenario for a preset with default probe parameters.
    pub fn for_preset(preset: &str, probe_kind: &str, seed: u64) -> Result<Self> {
        parse_scenario(&format!("seed = {seed}\naction = {preset:?}\nprobe = {probe_kind:?}\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_explosion_is_valid() {
        let s = parse_scenario("action = \"hopf\"\n[probe]\nkind = \"explosion\"\nradii = [1, 0.5, 0.25, 0.125]\n")
            .unwrap();
        match &s.probe {
            Probe::Explosion(p) => assert_eq!(p.radii, vec![1.0, 0.5, 0.25, 0.125]),
            other => panic!("{other:?}"),
        }
        assert_eq!(s.seed, 0);
    }

    #[test]
    fn rejects_low_cohomogeneity_explosion() {
        let e = parse_scenario("action = \"so(2)\"\nprobe = \"explosion\"\n").unwrap_err();
        assert!(e.to_string().contains("cohomogeneity"), "{e}");
    }

    #[test]
    fn rejects_non_skew_generators() {
        // |A + Aᵀ| / |A| = 0.1 for this matrix.
        let a = 0.1 / 2f64.sqrt();
        let b = (1.0 - a * a).sqrt();
        let text = format!("[action]\ngenerators = [[[{a}, {m}], [{b}, 0.0]]]\n[probe]\nkind = \"polarity\"\n", m = -b);
        let e = parse_scenario(&text).unwrap_err();
        assert!(e.to_string().contains("not skew-symmetric"), "{e}");
    }

    #[test]
    fn reports_missing_pieces() {
        assert!(parse_scenario("action = \"hopf\"\n").unwrap_err().to_string().contains("missing probe block"));
        assert!(matches!(parse_scenario("action = \"sp(2)\"\nprobe = \"polarity\"\n"), Err(Error::UnknownPreset(_))));
        assert!(parse_scenario("action = \"hopf\"\nprobe = \"nothing\"\n").is_err());
        assert!(parse_scenario("action = \"hopf\"\nprobe = \"polarity\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn stems_and_overrides() {
        let mut s = Scenario::for_preset("circle-weights(1,2)", "polarity", 0).unwrap();
        assert_eq!(s.output_stem(), "circle-weights-1-2-polarity");
        s.apply(&Overrides { seed: Some(4), grid_points: Some(64), ..Default::default() }).unwrap();
        assert_eq!((s.seed, s.tolerances.grid_points), (4, 64));
        assert!(s.apply(&Overrides { rank_rel_tol: Some(-1.0), ..Default::default() }).is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let s = parse_scenario(
            "action = \"hopf\"\nprobe = \"crossing\"\n[tolerances]\nrank_rel_tol = 0.5\ngrid_points = 512\n",
        )
        .unwrap();
        assert_eq!(s.tolerances.rank_rel_tol, 0.5);
        assert_eq!(s.tolerances.grid_points, 512);
        assert!(parse_scenario("action = \"hopf\"\nprobe = \"crossing\"\n[tolerances]\nrank_rel_tol = 2.0\n").is_err());
    }
}
