//! Serialization of run reports: JSON, CSV tables and gnuplot data.
//!
//! Floats in JSON are rounded to 12 significant digits so that reruns with
//! the same seed give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::runner::Report;
use crate::scenario::OutputFormat;

const SIGNIFICANT_DIGITS: usize = 12;

fn round(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = serde_json::Number::from_f64(round(x)).map(Value::Number).unwrap_or(Value::Null);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("output: {e}"))
}

/// Pretty JSON with rounded floats.
pub fn to_json(report: &Report) -> Result<String> {
    let mut v = serde_json::to_value(report).map_err(io)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(io)?;
    s.push('\n');
    Ok(s)
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    String::from_utf8(w.into_inner().map_err(io)?).map_err(io)
}

fn num(x: f64) -> String {
    format!("{}", round(x))
}

/// CSV tables keyed by name.
pub fn csv_tables(report: &Report) -> Result<Vec<(String, String)>> {
    let r = &report.results;
    let mut out = Vec::new();
    if let Some(p) = &r.polarity {
        out.push((
            "polarity".into(),
            csv_table(
                &["verdict", "max_obstruction", "threshold", "quotient_codim", "points_tested"],
                vec![vec![
                    serde_json::to_value(p.verdict).map_err(io)?.as_str().unwrap_or_default().to_string(),
                    num(p.max_obstruction),
                    num(p.threshold),
                    p.quotient_codim.to_string(),
                    p.points_tested.to_string(),
                ]],
            )?,
        ));
    }
    if let Some(e) = &r.explosion {
        let rows = e.rows.iter().map(|x| vec![num(x.r), num(x.kappa_bar), num(x.product)]).collect();
        out.push(("explosion".into(), csv_table(&["r", "kappa_bar", "kappa_bar_r2"], rows)?));
    }
    if let Some(c) = &r.crossing {
        let rows = c
            .iter()
            .enumerate()
            .map(|(i, x)| {
                vec![
                    i.to_string(),
                    x.through_singular.to_string(),
                    x.record.events.len().to_string(),
                    x.record.total.to_string(),
                    x.record.vertical_index.to_string(),
                    x.reversed_total.to_string(),
                    x.rescaled_total.to_string(),
                ]
            })
            .collect();
        out.push((
            "crossing".into(),
            csv_table(
                &[
                    "geodesic",
                    "through_singular",
                    "events",
                    "crossing_number",
                    "vertical_index",
                    "reversed",
                    "rescaled",
                ],
                rows,
            )?,
        ));
    }
    if let Some(c) = &r.conjugate {
        let rows = c
            .iter()
            .enumerate()
            .map(|(i, x)| {
                vec![
                    i.to_string(),
                    x.through_singular.to_string(),
                    x.report.has_conjugate.to_string(),
                    x.report.ind_lambda.to_string(),
                    x.report.ind_w.to_string(),
                    x.ind_quotient.to_string(),
                    x.report.closed_identity.map(|b| b.to_string()).unwrap_or_default(),
                ]
            })
            .collect();
        out.push((
            "conjugate".into(),
            csv_table(
                &[
                    "geodesic",
                    "through_singular",
                    "has_conjugate",
                    "ind_lambda",
                    "ind_w",
                    "ind_quotient",
                    "closed_identity",
                ],
                rows,
            )?,
        ));
    }
    if let Some(c) = &r.continuity {
        let rows = c
            .iter()
            .flat_map(|f| f.report.samples.iter().map(move |s| vec![f.label.clone(), num(s.s), s.c.to_string()]))
            .collect();
        out.push(("continuity".into(), csv_table(&["family", "s", "crossing_number"], rows)?));
    }
    let rows = report.coherence.iter().map(|c| vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]).collect();
    out.push(("coherence".into(), csv_table(&["check", "passed", "detail"], rows)?));
    Ok(out)
}

/// Gnuplot data files and a script plotting them, keyed by file name.
pub fn gnuplot_files(report: &Report, stem: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut script = String::from("set terminal pngcairo size 800,500\n");
    if let Some(e) = &report.results.explosion {
        let mut dat = String::from("# r kappa_bar*r^2\n");
        for row in &e.rows {
            let _ = writeln!(dat, "{} {}", num(row.r), num(row.product));
        }
        let name = format!("{stem}_explosion.dat");
        let _ = writeln!(
            script,
            "set output '{stem}_explosion.png'\nset logscale x\nset xlabel 'r'\nset ylabel 'kappa_bar r^2'\n\
             plot '{name}' using 1:2 with linespoints title 'kappa_bar r^2'\nunset logscale x"
        );
        out.push((name, dat));
    }
    if let Some(c) = &report.results.continuity {
        let mut dat = String::from("# s crossing_number, one block per family\n");
        for f in c {
            let _ = writeln!(dat, "# {}", f.label);
            for s in &f.report.samples {
                let _ = writeln!(dat, "{} {}", num(s.s), s.c);
            }
            dat.push_str("\n\n");
        }
        let name = format!("{stem}_continuity.dat");
        let _ = writeln!(
            script,
            "set output '{stem}_continuity.png'\nset xlabel 's'\nset ylabel 'c'\n\
             plot for [i=0:{}] '{name}' index i using 1:2 with steps notitle",
            c.len().saturating_sub(1)
        );
        out.push((name, dat));
    }
    if !out.is_empty() {
        out.push((format!("{stem}.gp"), script));
    }
    out
}

/// Writes the report files into `dir` and returns their paths.
pub fn write_outputs(report: &Report, dir: &Path, stem: &str, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io)?;
    let mut files = Vec::new();
    if format != OutputFormat::Csv {
        files.push((format!("{stem}.json"), to_json(report)?));
    }
    if format != OutputFormat::Json {
        for (name, body) in csv_tables(report)? {
            files.push((format!("{stem}_{name}.csv"), body));
        }
        files.extend(gnuplot_files(report, stem));
    }
    let mut paths = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round(0.1 + 0.2), 0.3);
        assert_eq!(round(1.234_567_890_123_456e-7), 1.234_567_890_12e-7);
        assert_eq!(round(0.0), 0.0);
    }

    #[test]
    fn json_rounding_walks_nested_values() {
        let mut v = serde_json::json!({"a": [0.30000000000000004, {"b": 2.0000000000001}], "c": 3});
        round_value(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[0.3,{"b":2.0}],"c":3}"#);
    }
}
