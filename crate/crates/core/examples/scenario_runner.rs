//! Runs a scenario document and writes the JSON, CSV and gnuplot outputs to a
//! directory (first argument, default: the system temp directory).

use std::path::PathBuf;

use polarlab::report::write_outputs;
use polarlab::runner::run;
use polarlab::scenario::parse_scenario;

const SCENARIO: &str = r#"
seed = 5
action = "circle-weights(1,2)"

[probe]
kind = "full"
count = 12
families = 2
s_points = 9
"#;

fn main() -> polarlab::Result<()> {
    let dir =
        std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("polarlab-example"));
    let scenario = parse_scenario(SCENARIO)?;
    let report = run(&scenario)?;
    for c in &report.coherence {
        println!("{:<36} {}", c.name, if c.passed { "ok" } else { "FAILED" });
    }
    println!("summary {:?}", report.results.summary);
    for p in write_outputs(&report, &dir, &scenario.output_stem(), scenario.output.format)? {
        println!("wrote {}", p.display());
    }
    std::process::exit(report.exit_code());
}
