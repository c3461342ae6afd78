use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use polarlab::report::{to_json, write_outputs};
use polarlab::runner::{list_presets, run, EXIT_ERROR};
use polarlab::scenario::{parse_scenario, OutputFormat, Overrides, Scenario};

const OUT_DIR_ENV: &str = "POLARLAB_OUT_DIR";

/// Polarity, curvature and Jacobi-index diagnostics for linear isometric
/// actions.
///
/// Exit status: 0 when every coherence check passed, 2 when a check failed,
/// 1 on input or runtime errors.
#[derive(Parser, Debug)]
#[command(
    name = "polarlab",
    version,
    after_help = "Without --out-dir (or POLARLAB_OUT_DIR) the JSON report goes to stdout."
)]
struct Cli {
    /// Seed for every random choice (default 0, or the scenario's seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative rank tolerance for singular values
    #[arg(long = "tol-rank", global = true)]
    tol_rank: Option<f64>,
    /// Grid points used by event scans
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Output directory; falls back to the scenario's output.dir, then $POLARLAB_OUT_DIR
    #[arg(long = "out-dir", global = true)]
    out_dir: Option<PathBuf>,
    /// Report formats written to the output directory
    #[arg(long, global = true, value_parser = ["json", "csv", "both"])]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Target {
    /// Preset name, e.g. hopf, so(3), torus-std(2), circle-weights(1,2), trivial(3)
    preset: String,
    /// Restrict the action to the round sphere of this curvature
    #[arg(long)]
    sphere: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide polarity (or infinitesimal polarity with --at)
    Polarity {
        #[command(flatten)]
        target: Target,
        /// Regular points sampled by the bracket test
        #[arg(long)]
        points: Option<usize>,
        /// Run the bracket test even when the quotient codimension is at most 2
        #[arg(long)]
        no_fast_path: bool,
        /// Test the slice representation at this point (comma separated)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
    },
    /// Quotient curvature growth towards a singular point
    Explosion {
        #[command(flatten)]
        target: Target,
        /// Singular base point (default: origin)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        /// Horizontal direction (default: seeded random)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<f64>>,
        /// Radii (default 1, 1/2, 1/4, 1/8, 1/16)
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        /// Random planes per radius
        #[arg(long)]
        plane_samples: Option<usize>,
    },
    /// Crossing numbers of a seeded geodesic suite
    Crossing {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Horizontal conjugate points on a seeded geodesic suite
    Conjugate {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        count: Option<usize>,
        /// Geodesic lengths as lo,hi
        #[arg(long, value_delimiter = ',', num_args = 2)]
        length: Option<Vec<f64>>,
    },
    /// Continuity of the crossing number along families of geodesics
    Continuity {
        #[command(flatten)]
        target: Target,
        /// Random families (a sweep through the origin is added)
        #[arg(long)]
        families: Option<usize>,
        /// Samples of the family parameter
        #[arg(long)]
        s_points: Option<usize>,
    },
    /// List presets with their expected classification
    Presets,
    /// Run a TOML scenario file
    Run { file: PathBuf },
}

fn toml_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

fn preset_scenario(target: &Target, kind: &str, keys: Vec<(&str, String)>) -> polarlab::Result<Scenario> {
    let mut text = format!("[action]\npreset = {:?}\n", target.preset);
    if let Some(k) = target.sphere {
        text.push_str(&format!("curvature = {k:?}\n"));
    }
    text.push_str(&format!("[probe]\nkind = {kind:?}\n"));
    for (k, v) in keys {
        text.push_str(&format!("{k} = {v}\n"));
    }
    parse_scenario(&text)
}

fn build(command: &Command) -> polarlab::Result<Option<(Scenario, Option<String>)>> {
    let opt = |k: &'static str, v: Option<String>| v.map(|v| (k, v));
    let s = match command {
        Command::Presets => return Ok(None),
        Command::Run { file } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| polarlab::Error::InvalidArgument(format!("{}: {e}", file.display())))?;
            let scenario = parse_scenario(&text)
                .map_err(|e| polarlab::Error::InvalidArgument(format!("{}: {e}", file.display())))?;
            let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned());
            return Ok(Some((scenario, stem)));
        }
        Command::Polarity { target, points, no_fast_path, at } => preset_scenario(
            target,
            "polarity",
            [
                opt("points", points.map(|p| p.to_string())),
                no_fast_path.then(|| ("fast_path", "false".to_string())),
                opt("at", at.as_deref().map(toml_list)),
            ]
            .into_iter()
            .flatten()
            .collect(),
        ),
        Command::Explosion { target, point, direction, radii, plane_samples } => preset_scenario(
            target,
            "explosion",
            [
                opt("point", point.as_deref().map(toml_list)),
                opt("direction", direction.as_deref().map(toml_list)),
                opt("radii", radii.as_deref().map(toml_list)),
                opt("plane_samples", plane_samples.map(|p| p.to_string())),
            ]
            .into_iter()
            .flatten()
            .collect(),
        ),
        Command::Crossing { target, count } => {
            preset_scenario(target, "crossing", opt("count", count.map(|c| c.to_string())).into_iter().collect())
        }
        Command::Conjugate { target, count, length } => preset_scenario(
            target,
            "conjugate",
            [opt("count", count.map(|c| c.to_string())), opt("length", length.as_deref().map(toml_list))]
                .into_iter()
                .flatten()
                .collect(),
        ),
        Command::Continuity { target, families, s_points } => preset_scenario(
            target,
            "continuity",
            [opt("families", families.map(|c| c.to_string())), opt("s_points", s_points.map(|c| c.to_string()))]
                .into_iter()
                .flatten()
                .collect(),
        ),
    }?;
    Ok(Some((s, None)))
}

fn execute(cli: &Cli) -> polarlab::Result<i32> {
    let Some((mut scenario, file_stem)) = build(&cli.command)? else {
        println!("{:<28} {:<5} {:<26} description", "preset", "dim", "expected");
        for p in list_presets() {
            let expected = serde_json::to_value(p.expected).ok().and_then(|v| v.as_str().map(String::from));
            println!("{:<28} {:<5} {:<26} {}", p.name, p.dimension, expected.unwrap_or_default(), p.description);
        }
        return Ok(0);
    };
    scenario.apply(&Overrides {
        seed: cli.seed,
        rank_rel_tol: cli.tol_rank,
        grid_points: cli.grid,
        out_dir: cli.out_dir.as_ref().map(|p| p.to_string_lossy().into_owned()),
        format: cli.format.as_deref().map(str::parse::<OutputFormat>).transpose()?,
    })?;
    let started = Instant::now();
    let report = run(&scenario)?;
    let elapsed = started.elapsed().as_secs_f64();

    let dir = scenario.output.dir.clone().or_else(|| std::env::var(OUT_DIR_ENV).ok().filter(|d| !d.is_empty()));
    match dir {
        Some(dir) => {
            let stem = scenario.output.stem.clone().or(file_stem).unwrap_or_else(|| scenario.output_stem());
            for path in write_outputs(&report, Path::new(&dir), &stem, scenario.output.format)? {
                println!("wrote {}", path.display());
            }
        }
        None => print!("{}", to_json(&report)?),
    }
    for c in report.failed_checks() {
        eprintln!("coherence check {} failed: {}", c.name, c.detail);
    }
    eprintln!("{} {} finished in {elapsed:.2}s", report.action, scenario.probe.kind());
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ERROR as u8),
            };
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
