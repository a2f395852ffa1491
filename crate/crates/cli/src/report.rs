//! JSON and CSV serialization of sweep results.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::sweep::{Record, Summary, SweepResult};

/// Run metadata. Everything that may differ between identical runs lives
/// here and nowhere else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub wall_time_ms: u64,
    pub workers: usize,
}

impl Meta {
    pub fn now(wall_time: std::time::Duration) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Meta {
            tool: "geoconvex".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp,
            wall_time_ms: wall_time.as_millis() as u64,
            workers: rayon::current_num_threads(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(result: SweepResult, meta: Meta) -> Self {
        Report {
            meta,
            records: result.records,
            summary: result.summary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub const CSV_HEADER: [&str; 12] = [
    "check",
    "a",
    "b",
    "s",
    "q",
    "side",
    "lhs",
    "rhs",
    "margin",
    "case",
    "pass",
    "err_estimate",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn write_json<W: Write>(report: &Report, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)
}

pub fn write_csv<W: Write>(records: &[Record], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.check.name().to_string(),
            format_number(r.a),
            format_number(r.b),
            opt_number(r.s),
            opt_number(r.q),
            r.side.clone(),
            format_number(r.lhs),
            format_number(r.rhs),
            format_number(r.margin),
            r.case.clone().unwrap_or_default(),
            r.pass.to_string(),
            format_number(r.err_estimate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::E, 1e-300, -2.5e17, 5e-324] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_number(f64::NAN), "NaN");
    }
}
