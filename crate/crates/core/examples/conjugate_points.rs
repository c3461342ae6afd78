//! Searches seeded Hopf geodesics for a horizontal conjugate point and
//! contrasts it with a torus suite, where none exist.
//!
//! Prints the first witness as JSON, which is the format of
//! `tests/fixtures/hopf_conjugate_witness.json`.

use polarlab::quotient::horizontal_conjugate_test;
use polarlab::suite::{geodesic_suite, SuiteOptions};
use polarlab::{Preset, ToleranceProfile};

fn main() -> polarlab::Result<()> {
    let profile = ToleranceProfile::default();

    let torus = Preset::TorusStd(2);
    let action = torus.action()?;
    let opts = SuiteOptions { count: 16, length: (2.0, 2.0), ..Default::default() };
    let mut found = 0;
    for g in geodesic_suite(&action, Some(&torus), &profile, &opts)? {
        let r = horizontal_conjugate_test(&action, &g.geodesic, &profile)?;
        found += r.has_conjugate as usize;
    }
    println!("torus-std(2): {found} of 16 geodesics have horizontal conjugate points");

    let hopf = Preset::Hopf;
    let action = hopf.action()?;
    let opts = SuiteOptions { count: 32, seed: 0, ..Default::default() };
    let mut witness = None;
    let mut hits = 0;
    for g in geodesic_suite(&action, Some(&hopf), &profile, &opts)? {
        let r = horizontal_conjugate_test(&action, &g.geodesic, &profile)?;
        if r.has_conjugate {
            hits += 1;
            witness.get_or_insert(r);
        }
    }
    println!("hopf: {hits} of 32 geodesics have horizontal conjugate points");
    if let Some(w) = witness {
        let fixture = serde_json::json!({
            "base": w.geodesic.base,
            "direction": w.geodesic.direction,
            "speed": w.geodesic.speed,
            "interval": w.geodesic.interval,
            "ind_lambda": w.ind_lambda,
            "ind_w": w.ind_w,
            "conjugate_times": w.lambda_events.iter().map(|e| e.t).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&fixture).expect("json"));
    }
    Ok(())
}
