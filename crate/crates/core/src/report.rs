//! Deterministic JSON and versioned CSV renderings of results.
//!
//! JSON floats are written with 17 significant digits (`{:.16e}`), object
//! fields keep declaration order, and non-finite floats become `null`, so
//! identical inputs give byte-identical files.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::families::{CurvatureCheck, ProfileRow};
use crate::hardy::QuotientBreakdown;
use crate::sharpness::{OracleBaseline, SweepReport};

/// First line of every CSV file: `# <kind> v<version>`.
pub const CSV_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv output failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv output is not UTF-8")]
    Utf8,
}

/// Pretty JSON with two-space indentation and fixed float formatting.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, ReportError> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Number(n) if n.is_f64() => out.push_str(&float(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(depth + 1), Value::String(k.clone()));
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

fn csv_table(kind: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| if x.is_finite() { format!("{x:.16e}") } else { String::new() }))?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).map_err(|_| ReportError::Utf8)?;
    Ok(format!("# {kind} v{CSV_VERSION}\n{body}"))
}

pub const SWEEP_HEADER: [&str; 16] = [
    "delta", "eps", "k_eps", "t1", "t2", "t3", "t4", "quotient", "gap", "ramp_left", "middle", "ramp_right", "denominator", "l0",
    "l1", "l2",
];

/// One line per evaluated `δ`; the integrals are written in the log domain.
pub fn sweep_csv(report: &SweepReport) -> Result<String, ReportError> {
    csv_table(
        "sweep",
        &SWEEP_HEADER,
        report.rows.iter().map(|r| {
            let b = &r.breakdown;
            let [t1, t2, t3, t4] = b.knots;
            vec![
                r.delta,
                r.eps,
                r.k_eps.unwrap_or(f64::NAN),
                t1,
                t2,
                t3,
                t4,
                r.quotient,
                r.gap,
                b.ramp_left.ln,
                b.middle.ln,
                b.ramp_right.ln,
                b.denominator.ln,
                b.l0,
                b.l1,
                b.l2,
            ]
        }),
    )
}

pub const QUOTIENT_HEADER: [&str; 13] =
    ["t1", "t2", "t3", "t4", "quotient", "ramp_left", "middle", "ramp_right", "denominator", "l0", "l1", "l2", "upper_bound"];

pub fn quotient_csv(b: &QuotientBreakdown) -> Result<String, ReportError> {
    let [t1, t2, t3, t4] = b.knots;
    csv_table(
        "quotient",
        &QUOTIENT_HEADER,
        [vec![
            t1,
            t2,
            t3,
            t4,
            b.quotient,
            b.ramp_left.ln,
            b.middle.ln,
            b.ramp_right.ln,
            b.denominator.ln,
            b.l0,
            b.l1,
            b.l2,
            b.upper_bound.unwrap_or(f64::NAN),
        ]],
    )
}

pub const CURVATURE_HEADER: [&str; 12] = [
    "radius", "flag", "reduced_s", "rev", "h_eps", "engine_flag", "engine_reduced_s", "engine_rev", "engine_h_eps", "eikonal", "rel_dual",
    "rel_fd",
];

pub fn curvature_csv(check: &CurvatureCheck) -> Result<String, ReportError> {
    csv_table(
        "curvature",
        &CURVATURE_HEADER,
        check.rows.iter().map(|r| {
            vec![
                r.radius,
                r.closed.flag,
                r.closed.reduced_s,
                r.closed.rev,
                r.h_eps,
                r.engine.flag,
                r.engine.reduced_s,
                r.engine.rev,
                r.engine_h_eps,
                r.eikonal,
                r.rel_dual,
                r.rel_fd,
            ]
        }),
    )
}

pub const PROFILE_HEADER: [&str; 7] = ["radius", "rho", "rho_rev", "h_eps", "flag", "reduced_s", "rev"];

pub fn profile_csv(rows: &[ProfileRow]) -> Result<String, ReportError> {
    csv_table(
        "profile",
        &PROFILE_HEADER,
        rows.iter().map(|r| vec![r.radius, r.rho, r.rho_rev, r.h_eps, r.flag, r.reduced_s, r.rev]),
    )
}

pub const RESIDUAL_HEADER: [&str; 2] = ["t", "residual"];

pub fn residual_csv(grid: &[(f64, f64)]) -> Result<String, ReportError> {
    csv_table("riccati", &RESIDUAL_HEADER, grid.iter().map(|&(t, r)| vec![t, r]))
}

pub const ORACLE_HEADER: [&str; 6] = ["case", "delta", "quotient", "l0", "l1", "l2"];

pub fn oracle_csv(baseline: &OracleBaseline) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(ORACLE_HEADER)?;
    for e in &baseline.entries {
        for r in &e.rows {
            let mut rec = vec![e.name.clone()];
            rec.extend([r.delta, r.quotient, r.l0, r.l1, r.l2].iter().map(|x| format!("{x:.16e}")));
            w.write_record(&rec)?;
        }
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).map_err(|_| ReportError::Utf8)?;
    Ok(format!("# oracle v{CSV_VERSION}\n{body}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        b: f64,
        a: Option<f64>,
        n: usize,
        nan: f64,
        list: Vec<f64>,
    }

    #[test]
    fn json_layout_is_fixed() {
        let s = Sample { b: 0.1, a: None, n: 3, nan: f64::NAN, list: vec![1.0, -2.5e-300] };
        let out = to_json(&s).unwrap();
        let expected = "{\n  \"b\": 1.0000000000000001e-1,\n  \"a\": null,\n  \"n\": 3,\n  \"nan\": null,\n  \"list\": [\n    1.0000000000000000e0,\n    -2.5000000000000000e-300\n  ]\n}\n";
        assert_eq!(out, expected);
        let back: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
        assert_eq!(back["list"][1].as_f64(), Some(-2.5e-300));
    }

    #[test]
    fn csv_has_version_line() {
        let out = csv_table("t", &["x", "y"], [vec![1.0, f64::INFINITY]]).unwrap();
        assert_eq!(out, "# t v1\nx,y\n1.0000000000000000e0,\n");
    }
}
