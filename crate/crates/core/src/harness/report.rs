use std::fmt::Write as _;
use std::str::FromStr;

use super::BatchReport;
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidConfig(format!(
                "unknown report format `{other}` (expected csv or json)"
            ))),
        }
    }
}

pub const CSV_HEADER: &str = "pair_id,method,mim,sd,entropy,qabf,degenerate";

// Shortest representation that parses back to the same f64, spelled the
// same way the JSON writer spells it.
fn number(v: f64) -> String {
    serde_json::to_string(&v).expect("report metrics are finite")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Serializes `r`. CSV carries one line per row; JSON carries the rows,
/// the per-method aggregates and the skipped pairs.
pub fn emit_report(r: &BatchReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for row in &r.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    csv_field(&row.pair_id),
                    row.method,
                    number(row.mim),
                    number(row.sd),
                    number(row.entropy),
                    number(row.qabf),
                    row.degenerate
                );
            }
            out.into_bytes()
        }
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(r).expect("report serializes");
            out.push(b'\n');
            out
        }
    }
}
