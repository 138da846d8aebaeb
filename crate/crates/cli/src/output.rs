//! Table rows and their CSV / JSON emission.
//!
//! Numbers are rounded to 12 significant digits once, when a row is built,
//! and printed with the shortest round-trip representation in both formats,
//! so the two emissions carry identical values. Non-finite numbers become an
//! empty CSV field or JSON `null`.

use std::io::Write;

use clap::ValueEnum;
use evidence_core::verification::VerificationReport;
use evidence_core::{EvidenceError, EvidenceResult, HypothesisContrast};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub const HEADER: [&str; 16] = [
    "class",
    "theta2_left",
    "theta2_right",
    "n",
    "x",
    "ratio",
    "S",
    "V",
    "b",
    "c1",
    "E",
    "favored",
    "trp",
    "error",
    "log2E",
    "apex",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRow {
    pub class: String,
    pub theta2_left: Option<f64>,
    pub theta2_right: Option<f64>,
    pub n: Option<f64>,
    pub x: Option<f64>,
    pub ratio: Option<f64>,
    #[serde(rename = "S")]
    pub s: Option<f64>,
    #[serde(rename = "V")]
    pub v: Option<f64>,
    pub b: Option<f64>,
    pub c1: Option<f64>,
    #[serde(rename = "E")]
    pub e: Option<f64>,
    pub favored: Option<String>,
    pub trp: Vec<f64>,
    pub error: String,
    #[serde(rename = "log2E")]
    pub log2_e: Option<f64>,
    pub apex: bool,
}

/// Round to 12 significant digits; `None` for NaN and infinities.
pub fn round12(v: f64) -> Option<f64> {
    if !v.is_finite() {
        return None;
    }
    format!("{v:.11e}").parse().ok()
}

impl OutputRow {
    fn blank(hc: &HypothesisContrast) -> Self {
        Self {
            class: hc.class().tag().to_string(),
            theta2_left: round12(hc.theta2_left()),
            theta2_right: round12(hc.theta2_right()),
            n: None,
            x: None,
            ratio: None,
            s: None,
            v: None,
            b: None,
            c1: None,
            e: None,
            favored: None,
            trp: Vec::new(),
            error: String::new(),
            log2_e: None,
            apex: false,
        }
    }

    pub fn from_result(r: &EvidenceResult) -> Self {
        Self {
            n: round12(r.obs.n()),
            x: round12(r.obs.x()),
            ratio: round12(r.obs.ratio()),
            s: round12(r.s),
            v: round12(r.v),
            b: round12(r.b),
            c1: round12(r.c1),
            e: round12(r.e),
            favored: Some(r.favored.as_str().to_string()),
            trp: r.transition_points.iter().filter_map(|&t| round12(t)).collect(),
            log2_e: round12(r.log_e / std::f64::consts::LN_2),
            ..Self::blank(&r.hc)
        }
    }

    /// A row for a failed evaluation; whatever inputs are known are kept.
    pub fn failed(hc: &HypothesisContrast, n: Option<f64>, x: Option<f64>, err: &EvidenceError) -> Self {
        let ratio = match (n, x) {
            (Some(n), Some(x)) if n > 0.0 => round12(x / n),
            _ => None,
        };
        Self {
            n: n.and_then(round12),
            x: x.and_then(round12),
            ratio,
            error: err.to_string(),
            ..Self::blank(hc)
        }
    }

    pub fn is_error(&self) -> bool {
        !self.error.is_empty()
    }

    fn csv_fields(&self) -> Vec<String> {
        let trp: Vec<String> = self.trp.iter().map(|&t| num(Some(t))).collect();
        vec![
            self.class.clone(),
            num(self.theta2_left),
            num(self.theta2_right),
            num(self.n),
            num(self.x),
            num(self.ratio),
            num(self.s),
            num(self.v),
            num(self.b),
            num(self.c1),
            num(self.e),
            self.favored.clone().unwrap_or_default(),
            trp.join(";"),
            self.error.clone(),
            num(self.log2_e),
            self.apex.to_string(),
        ]
    }
}

/// The JSON text of a number, so both formats print it identically.
fn num(v: Option<f64>) -> String {
    v.and_then(|v| serde_json::to_string(&v).ok()).unwrap_or_default()
}

pub fn write_rows<W: Write>(out: W, rows: &[OutputRow], format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(HEADER)?;
            for row in rows {
                w.write_record(row.csv_fields())?;
            }
            w.flush()
        }
        Format::Json => write_json(out, rows),
    }
}

pub fn write_reports<W: Write>(out: W, reports: &[VerificationReport], format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["check", "passed", "max_deviation", "grid", "notes"])?;
            for r in reports {
                w.write_record([
                    r.check.clone(),
                    r.passed.to_string(),
                    num(r.max_deviation.and_then(round12)),
                    r.grid.clone(),
                    r.notes.join(" | "),
                ])?;
            }
            w.flush()
        }
        Format::Json => write_json(out, reports),
    }
}

fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}
