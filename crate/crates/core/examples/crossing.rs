//! Crossing numbers of seeded geodesic suites and their agreement with the
//! index of the vertical Jacobi family.

use polarlab::quotient::crossing_number;
use polarlab::suite::{geodesic_suite, SuiteOptions};
use polarlab::{Preset, ToleranceProfile};

fn main() -> polarlab::Result<()> {
    let profile = ToleranceProfile::default();
    for preset in [Preset::So(3), Preset::TorusStd(2), Preset::Hopf] {
        let action = preset.action()?;
        let suite = geodesic_suite(
            &action,
            Some(&preset),
            &profile,
            &SuiteOptions { count: 6, seed: 1, ..Default::default() },
        )?;
        println!("{}", preset.name());
        for g in suite {
            let r = crossing_number(&action, &g.geodesic, &profile)?;
            let times: Vec<String> = r.events.iter().map(|e| format!("t={:.4} c={}", e.t, e.c)).collect();
            println!(
                "  through singular {:<5}  c = {}  vertical index = {}  [{}]",
                g.through_singular,
                r.total,
                r.vertical_index,
                times.join(", ")
            );
        }
    }
    Ok(())
}
