//! Report envelopes: every command's output is a versioned JSON document
//! (or CSV table) with a fixed field order, byte-stable across runs except
//! for the `generated_at` timestamp.

use crate::config::Format;
use meanlab::characterize::{ClassificationReport, FEReport, OracleOutcome};
use meanlab::wronskians::WronskianProfile;
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: &str = "1.0";

/// Common JSON wrapper; the payload flattens into the top level.
#[derive(Serialize)]
pub struct Envelope<P: Serialize> {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    /// Seconds since the Unix epoch; excluded from byte comparisons.
    pub generated_at: u64,
    pub pass: Option<bool>,
    #[serde(flatten)]
    pub payload: P,
}

impl<P: Serialize> Envelope<P> {
    pub fn new(command: &'static str, seed: u64, pass: Option<bool>, payload: P) -> Self {
        let generated_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            seed,
            generated_at,
            pass,
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

#[derive(Serialize)]
pub struct EvalPayload {
    pub kind: &'static str,
    pub n: usize,
    pub value: f64,
}

#[derive(Serialize)]
pub struct CheckFePayload {
    pub phi: String,
    pub f: String,
    pub t: f64,
    pub threshold: f64,
    #[serde(flatten)]
    pub fe: FEReport,
}

#[derive(Serialize)]
pub struct ConstructPayload {
    pub route: &'static str,
    pub phi: String,
    pub f: String,
    pub t: f64,
    pub p: Option<f64>,
    pub threshold: f64,
    #[serde(flatten)]
    pub fe: FEReport,
}

#[derive(Serialize)]
pub struct ClassifyPayload {
    pub f: String,
    pub g: String,
    pub weighted: bool,
    #[serde(flatten)]
    pub report: ClassificationReport,
}

#[derive(Serialize)]
pub struct OraclePayload {
    pub f: String,
    pub g: String,
    pub h: String,
    pub t: f64,
    pub oracle: OracleOutcome,
}

#[derive(Serialize)]
pub struct ProfilePayload {
    pub f: String,
    pub g: String,
    #[serde(flatten)]
    pub profile: WronskianProfile,
}

/// FE residual grid as CSV, one row per (x, y) node.
pub fn residual_grid_csv(report: &FEReport) -> String {
    let mut out = String::from("x,y,residual\n");
    for (i, &x) in report.grid.iter().enumerate() {
        for (j, &y) in report.grid.iter().enumerate() {
            out.push_str(&format!("{x},{y},{}\n", report.residual_grid[i][j]));
        }
    }
    out
}

/// Write `text` to `output`, or to standard out when no path is given.
pub fn deliver(text: &str, output: Option<&Path>) -> std::io::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
        }
    }
}

/// Render a serializable document in the requested format; CSV is only
/// defined for table-like payloads, which the caller supplies pre-rendered.
pub fn render<P: Serialize>(
    envelope: &Envelope<P>,
    format: Format,
    csv: Option<String>,
) -> Result<String, String> {
    match format {
        Format::Json => Ok(envelope.to_json()),
        Format::Csv => csv.ok_or_else(|| {
            format!(
                "csv format is not defined for the '{}' command",
                envelope.command
            )
        }),
    }
}
