//! Acceptance battery. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::sync::Arc;
use std::time::Instant;

use nalgebra::DVector;
use polarlab::geometry::AmbientSpace;
use polarlab::jacobi::{
    index, integrate_field, leaf_lagrangian, vertical_family, wilking_quotient_index, wronskian_at, JacobiField,
};
use polarlab::quotient::{
    crossing_continuity_probe, crossing_number, default_radii, explosion_probe, horizontal_conjugate_test,
    infinitesimal_polarity, polarity_test, random_line_family, singular_sweep_family, uniform_s_grid, ExplosionOptions,
    ExplosionVerdict, GeodesicFamily, Polarity, PolarityOptions,
};
use polarlab::random::{gaussian_vector, random_point};
use polarlab::report::to_json;
use polarlab::runner::run;
use polarlab::scenario::parse_scenario;
use polarlab::suite::{battery_actions, geodesic_suite, SuiteGeodesic, SuiteOptions};
use polarlab::{ActionSpec, HorizontalGeodesic, Preset, ToleranceProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Battery = [(String, ActionSpec, Vec<SuiteGeodesic>)];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: polarlab::Error) -> String {
    e.to_string()
}

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_row_slice(x)
}

fn generic_direction(action: &ActionSpec, seed: u64) -> Result<DVector<f64>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DVector::zeros(action.space().dimension());
    action
        .random_horizontal_direction(&x, &ToleranceProfile::default(), &mut rng)
        .map_err(err)?
        .ok_or_else(|| "no horizontal direction".to_string())
}

/// 48 seeded geodesics for each battery action.
fn battery_suite() -> Result<Vec<(String, ActionSpec, Vec<SuiteGeodesic>)>, String> {
    let p = ToleranceProfile::default();
    let mut out = Vec::new();
    for (i, (preset, action)) in battery_actions().map_err(err)?.into_iter().enumerate() {
        let opts = SuiteOptions { count: 48, seed: 100 + i as u64, ..Default::default() };
        let suite = geodesic_suite(&action, Some(&preset), &p, &opts).map_err(err)?;
        out.push((action.label(), action, suite));
    }
    Ok(out)
}

fn hopf_explosion() -> Outcome {
    let start = Instant::now();
    let a = Preset::Hopf.action().map_err(err)?;
    let dir = generic_direction(&a, 1)?;
    let probe = explosion_probe(
        &a,
        &DVector::zeros(4),
        &dir,
        &default_radii(),
        &ToleranceProfile::default(),
        &ExplosionOptions::default(),
    )
    .map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    ensure((probe.fitted_limit - 3.0).abs() <= 0.03, || format!("limit {}", probe.fitted_limit))?;
    ensure(probe.verdict == ExplosionVerdict::QuadraticExplosion, || format!("{:?}", probe.verdict))?;
    ensure(secs < 5.0, || format!("took {secs:.2}s"))?;
    Ok(format!("limit {:.6} over {} radii in {secs:.2}s", probe.fitted_limit, probe.rows.len()))
}

fn torus_flatness() -> Outcome {
    let start = Instant::now();
    let p = ToleranceProfile::default();
    let a = Preset::TorusStd(2).action().map_err(err)?;
    let dir = generic_direction(&a, 1)?;
    let probe = explosion_probe(&a, &DVector::zeros(4), &dir, &default_radii(), &p, &ExplosionOptions::default())
        .map_err(err)?;
    let worst = probe.rows.iter().map(|r| r.product).fold(0.0, f64::max);
    ensure(worst <= 1e-4, || format!("max product {worst:e}"))?;
    let pol = polarity_test(&a, &p, &PolarityOptions::default()).map_err(err)?;
    ensure(pol.verdict.is_polar(), || format!("{:?}", pol.verdict))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("took {secs:.2}s"))?;
    Ok(format!("max kappa_bar r^2 {worst:.2e}, polarity {:?}", pol.verdict))
}

fn coherence_matrix() -> Outcome {
    let p = ToleranceProfile::default();
    let mut rows = Vec::new();
    for (preset, expected) in [
        (Preset::So(3), true),
        (Preset::TorusStd(2), true),
        (Preset::Hopf, false),
        (Preset::CircleWeights(vec![1, 2]), false),
    ] {
        let a = preset.action().map_err(err)?;
        let origin = DVector::zeros(a.space().dimension());
        let slice_polar =
            infinitesimal_polarity(&a, &origin, &p, &PolarityOptions::default()).map_err(err)?.verdict.is_polar();
        // A one-dimensional quotient carries no sectional curvature.
        let (bounded, limit_zero) = if a.codimension() < 2 {
            (true, true)
        } else {
            let dir = generic_direction(&a, 7)?;
            let e =
                explosion_probe(&a, &origin, &dir, &default_radii(), &p, &ExplosionOptions::default()).map_err(err)?;
            (e.bounded_curvature, e.verdict == ExplosionVerdict::Bounded)
        };
        ensure(bounded == limit_zero && limit_zero == slice_polar && slice_polar == expected, || {
            format!("{}: bounded {bounded}, limit zero {limit_zero}, slice polar {slice_polar}", preset.name())
        })?;
        rows.push(format!("{}={}", preset.name(), if expected { "TTT" } else { "FFF" }));
    }
    Ok(rows.join(" "))
}

fn index_decomposition(battery: &Battery) -> Outcome {
    let p = ToleranceProfile::default();
    let mut total = 0;
    let mut failures = Vec::new();
    for (label, action, suite) in battery {
        for sg in suite {
            let g = Arc::new(sg.geodesic.clone());
            let lambda = leaf_lagrangian(action, &g, &p).map_err(err)?;
            let w = vertical_family(action, &g, &p).map_err(err)?;
            for ends in [(false, false), (true, true)] {
                let il = index(&lambda, g.interval(), ends, &p).map_err(err)?;
                let iw = index(&w, g.interval(), ends, &p).map_err(err)?;
                let iq = wilking_quotient_index(&w, &lambda, g.interval(), ends, &p).map_err(err)?;
                if il != iw + iq {
                    failures.push(format!("{label}: {il} != {iw} + {iq}"));
                }
            }
            total += 1;
        }
    }
    ensure(total >= 400, || format!("only {total} geodesics"))?;
    ensure(failures.is_empty(), || format!("{} failures, first {}", failures.len(), failures[0]))?;
    Ok(format!("{total} geodesics, open and closed intervals, 0 failures"))
}

fn crossing_vertical(battery: &Battery) -> Outcome {
    let p = ToleranceProfile::default();
    let mut total = 0;
    let mut nonzero = 0;
    for (label, action, suite) in battery {
        for sg in suite {
            let g = &sg.geodesic;
            let r = crossing_number(action, g, &p).map_err(|e| format!("{label}: {e}"))?;
            let rev = crossing_number(action, &g.reversed(), &p).map_err(err)?.total;
            let scaled = crossing_number(action, &g.reparametrized(2.5).map_err(err)?, &p).map_err(err)?.total;
            ensure(r.total == r.vertical_index && rev == r.total && scaled == r.total, || {
                format!("{label}: c {} vertical {} reversed {rev} rescaled {scaled}", r.total, r.vertical_index)
            })?;
            total += 1;
            nonzero += (r.total > 0) as usize;
        }
    }
    Ok(format!("{total} geodesics ({nonzero} with crossings), reversal and rescaling invariant"))
}

fn load_witness() -> Result<HorizontalGeodesic, String> {
    let text = include_str!("fixtures/hopf_conjugate_witness.json");
    let f: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let vec = |k: &str| -> Vec<f64> { f[k].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect() };
    let interval = vec("interval");
    HorizontalGeodesic::with_speed(
        AmbientSpace::euclidean(4).map_err(err)?,
        v(&vec("base")),
        v(&vec("direction")),
        f["speed"].as_f64().unwrap(),
        (interval[0], interval[1]),
    )
    .map_err(err)
}

fn conjugate_dichotomy() -> Outcome {
    let p = ToleranceProfile::default();
    let torus = Preset::TorusStd(2);
    let a = torus.action().map_err(err)?;
    let opts = SuiteOptions { count: 16, length: (2.0, 2.0), ..Default::default() };
    for sg in geodesic_suite(&a, Some(&torus), &p, &opts).map_err(err)? {
        let r = horizontal_conjugate_test(&a, &sg.geodesic, &p).map_err(err)?;
        ensure(!r.has_conjugate && r.ind_lambda == r.ind_w, || format!("torus: {} vs {}", r.ind_lambda, r.ind_w))?;
    }

    let hopf = Preset::Hopf;
    let a = hopf.action().map_err(err)?;
    let opts = SuiteOptions { count: 32, ..Default::default() };
    let found = geodesic_suite(&a, Some(&hopf), &p, &opts)
        .map_err(err)?
        .iter()
        .filter(|sg| horizontal_conjugate_test(&a, &sg.geodesic, &p).map(|r| r.ind_lambda > r.ind_w).unwrap_or(false))
        .count();
    ensure(found >= 1, || "search found no hopf witness".into())?;

    // Frozen witness: for a line p + t v the Lambda-focal time is -|p|^2 / <v, p>.
    let g = load_witness()?;
    let r = horizontal_conjugate_test(&a, &g, &p).map_err(err)?;
    let (b, d) = (g.base(), g.direction());
    let t0 = -b.norm_squared() / d.dot(b);
    ensure(r.ind_lambda > r.ind_w, || format!("fixture: {} vs {}", r.ind_lambda, r.ind_w))?;
    ensure((r.lambda_events[0].t - t0).abs() < 1e-8, || format!("fixture time {} vs {t0}", r.lambda_events[0].t))?;
    Ok(format!("torus 16/16 without, hopf search {found}/32 witnesses, fixture at t = {t0:.6}"))
}

fn continuity() -> Outcome {
    let p = ToleranceProfile::default();
    let grid = uniform_s_grid(11);
    let hopf = Preset::Hopf.action().map_err(err)?;
    let family = GeodesicFamily::translated_lines(
        &DVector::zeros(4),
        &v(&[0.0, 0.0, 0.5, 0.0]),
        &v(&[1.0, 0.0, 0.0, 0.0]),
        (-1.0, 1.0),
    );
    let r = crossing_continuity_probe(&hopf, &family, &grid, &p).map_err(err)?;
    ensure(r.jumps.len() == 1 && r.jumps[0].from == 1 && r.jumps[0].to == 0, || format!("{:?}", r.jumps))?;
    ensure(r.crossing_polarity.contains(&Polarity::NonPolar), || "jump not at a non-polar slice".into())?;

    let mut families = 0;
    for (i, preset) in
        [Preset::So(2), Preset::So(3), Preset::TorusStd(2), Preset::TorusStd(3), Preset::Trivial(3)].iter().enumerate()
    {
        let a = preset.action().map_err(err)?;
        let mut rng = ChaCha8Rng::seed_from_u64(40 + i as u64);
        let mut list = Vec::new();
        for _ in 0..16 {
            list.push(random_line_family(&a, 1.5, &p, &mut rng).map_err(err)?);
        }
        // Sweeps through the origin and through a sampled singular point.
        let mut bases = vec![DVector::zeros(a.space().dimension())];
        bases.extend(preset.singular_sample(&mut rng));
        for x0 in bases {
            list.extend(singular_sweep_family(&a, &x0, 1.5, 0.5, &p, &mut rng).map_err(err)?);
        }
        for f in &list {
            let r = crossing_continuity_probe(&a, f, &grid, &p).map_err(err)?;
            ensure(!r.discontinuity_found, || format!("{}: jump {:?}", preset.name(), r.jumps))?;
            families += 1;
        }
    }
    Ok(format!("hopf sweep jumps 1 -> 0; {families} polar families without jumps"))
}

fn symplectic(battery: &Battery) -> Outcome {
    let p = ToleranceProfile::default();
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for (_, action, suite) in battery {
        for sg in suite {
            let g = Arc::new(sg.geodesic.clone());
            let lambda = leaf_lagrangian(action, &g, &p).map_err(err)?;
            let fields = lambda.fields();
            let (a, b) = g.interval();
            for i in 0..fields.len() {
                for j in 0..fields.len() {
                    let w0 = wronskian_at(&fields[i], &fields[j], a).map_err(err)?;
                    for k in 1..=64 {
                        let t = a + (b - a) * k as f64 / 64.0;
                        let wt = wronskian_at(&fields[i], &fields[j], t).map_err(err)?;
                        // Ambient coordinates give an independent evaluation.
                        let amb = fields[i].ambient_derivative(t).dot(&fields[j].ambient_value(t))
                            - fields[i].ambient_value(t).dot(&fields[j].ambient_derivative(t));
                        let dev = (wt - w0).abs().max((amb - w0).abs()) / (1.0 + w0.abs());
                        worst = worst.max(dev);
                    }
                    pairs += 1;
                }
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max relative drift {worst:e}"))?;
    Ok(format!("{pairs} pairs x 64 times, max drift {worst:.2e}"))
}

fn ode_regression() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for k in [0.0, 1.0] {
        let space = AmbientSpace::new(4, k).map_err(err)?;
        for _ in 0..25 {
            let x = random_point(&space, &mut rng);
            let mut dir = gaussian_vector(4, &mut rng);
            if space.is_sphere() {
                dir -= &x * (dir.dot(&x) / x.norm_squared());
            }
            let g = Arc::new(HorizontalGeodesic::new(space, x, dir, (0.0, 1.0)).map_err(err)?);
            let d = g.normal_dimension();
            let j =
                JacobiField::new(g.clone(), gaussian_vector(d, &mut rng), gaussian_vector(d, &mut rng)).map_err(err)?;
            let (val, der) = integrate_field(&j, 1.0, 400).map_err(err)?;
            worst = worst.max((val - j.ambient_value(1.0)).norm()).max((der - j.ambient_derivative(1.0)).norm());
            count += 1;
        }
    }
    ensure(worst <= 1e-8, || format!("max deviation {worst:e}"))?;
    Ok(format!("{count} unit-length geodesics, max deviation {worst:.2e}"))
}

fn codim_fast_path() -> Outcome {
    let p = ToleranceProfile::default();
    let presets = [
        Preset::So(2),
        Preset::So(3),
        Preset::So(4),
        Preset::TorusStd(1),
        Preset::TorusStd(2),
        Preset::TorusStd(3),
        Preset::Hopf,
        Preset::CircleWeights(vec![1, 2]),
        Preset::CircleWeights(vec![1, 0, 0]),
        Preset::Trivial(3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut slices = 0;
    let mut forced = 0;
    for preset in &presets {
        let a = preset.action().map_err(err)?;
        let n = a.space().dimension();
        let mut points = vec![DVector::zeros(n), gaussian_vector(n, &mut rng)];
        for _ in 0..3 {
            points.extend(preset.singular_sample(&mut rng));
        }
        for x in points {
            let slice = a.slice_representation(&x, &p).map_err(err)?;
            let fast = polarity_test(&slice, &p, &PolarityOptions::default()).map_err(err)?;
            let slow =
                polarity_test(&slice, &p, &PolarityOptions { fast_path: false, ..Default::default() }).map_err(err)?;
            if fast.quotient_codim <= 2 {
                ensure(fast.verdict == Polarity::ForcedPolarByCodim && slow.verdict == Polarity::Polar, || {
                    format!(
                        "{} at {:?}: fast {:?}, bracket {:?}",
                        preset.name(),
                        x.as_slice(),
                        fast.verdict,
                        slow.verdict
                    )
                })?;
                forced += 1;
            }
            slices += 1;
        }
    }
    Ok(format!("{forced} of {slices} slices have quotient codim <= 2, all forced and confirmed by the bracket test"))
}

fn battery_reports() -> Result<Vec<String>, String> {
    let scenarios = [
        "seed = 3\naction = \"hopf\"\n[probe]\nkind = \"full\"\ncount = 8\nfamilies = 2\n",
        "seed = 3\naction = \"torus-std(2)\"\n[probe]\nkind = \"full\"\ncount = 8\nfamilies = 2\n",
        "seed = 3\naction = \"so(3)\"\n[probe]\nkind = \"full\"\ncount = 8\nfamilies = 2\n",
        "seed = 3\naction = \"circle-weights(1,2)\"\n[probe]\nkind = \"full\"\ncount = 8\nfamilies = 2\n",
        "seed = 3\n[action]\npreset = \"hopf\"\ncurvature = 1.0\n[probe]\nkind = \"crossing\"\ncount = 8\n",
    ];
    scenarios
        .iter()
        .map(|s| {
            let report = run(&parse_scenario(s).map_err(err)?).map_err(err)?;
            ensure(report.coherent(), || format!("{} incoherent", report.action))?;
            to_json(&report).map_err(err)
        })
        .collect()
}

fn determinism() -> Outcome {
    let first = battery_reports()?;
    let second = battery_reports()?;
    ensure(first == second, || "reports differ between runs".into())?;
    let bytes: usize = first.iter().map(String::len).sum();
    Ok(format!("{} reports, {bytes} bytes, identical", first.len()))
}

fn main() {
    let start = Instant::now();
    let battery = battery_suite();
    let suite = |f: fn(&Battery) -> Outcome| -> Outcome {
        match &battery {
            Ok(b) => f(b),
            Err(e) => Err(format!("suite generation failed: {e}")),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("hopf curvature explosion constant", hopf_explosion()),
        ("torus-std(2) flat quotient and polar", torus_flatness()),
        ("polarity coherence matrix", coherence_matrix()),
        ("index decomposition identity", suite(index_decomposition)),
        ("crossing number equals vertical index", suite(crossing_vertical)),
        ("conjugate point dichotomy", conjugate_dichotomy()),
        ("crossing continuity", continuity()),
        ("symplectic conservation", suite(symplectic)),
        ("closed form vs RK4", ode_regression()),
        ("codimension fast path", codim_fast_path()),
        ("deterministic reports", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", results.len() - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
