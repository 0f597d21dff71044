//! Run descriptions and their CSV serialisation.
//!
//! Every file starts with a `#` header holding the tool version, the full run
//! description as JSON and (optionally) a Unix timestamp. Floats are written
//! in the shortest decimal form that parses back to the same value, switching
//! to exponent notation for very small or large magnitudes.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::decay::{EnvelopeSample, ScanGrid, SequencePoint};
use crate::error::{Error, Result};
use crate::oscquad::QuadConfig;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const ENVELOPE_COLUMNS: &str = "p,r,theta,scaled_value,err_estimate,method";
pub const SEQUENCE_COLUMNS: &str = "n,r_n,scaled_value,v_of_p,err_estimate";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRun {
    pub p: f64,
    #[serde(flatten)]
    pub grid: ScanGrid,
    #[serde(flatten)]
    pub quad: QuadConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceRun {
    pub p: f64,
    pub n_min: usize,
    pub n_max: usize,
    #[serde(flatten)]
    pub quad: QuadConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRun {
    pub p_list: Vec<f64>,
    pub n_ref: usize,
    #[serde(flatten)]
    pub quad: QuadConfig,
}

/// The `#` header block. The timestamp line is omitted when `timestamp` is false.
pub fn header_block<C: Serialize>(command: &str, config: &C, timestamp: bool) -> Result<String> {
    let json = serde_json::to_string(config).map_err(|e| Error::Config(e.to_string()))?;
    let mut out = format!("# lpdecay {TOOL_VERSION}\n# command: {command}\n# config: {json}\n");
    if timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let _ = writeln!(out, "# timestamp: {secs}");
    }
    Ok(out)
}

pub fn envelope_rows(samples: &[EnvelopeSample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(ENVELOPE_COLUMNS);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?},{}",
            s.p,
            s.r,
            s.theta,
            s.scaled_value,
            s.err_estimate,
            s.method.as_str()
        );
    }
    out
}

pub fn sequence_rows(points: &[SequencePoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(SEQUENCE_COLUMNS);
    out.push('\n');
    for s in points {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{:?},{:?}",
            s.n, s.r_n, s.scaled_value, s.v_of_p, s.err_estimate
        );
    }
    out
}

/// Header block followed by the envelope table.
pub fn envelope_csv(run: &EnvelopeRun, samples: &[EnvelopeSample], timestamp: bool) -> Result<String> {
    Ok(header_block("envelope", run, timestamp)? + &envelope_rows(samples))
}

/// Header block, a `# v_of_p:` reference line and the sequence table.
pub fn sequence_csv(run: &SequenceRun, points: &[SequencePoint], v_of_p: f64, timestamp: bool) -> Result<String> {
    let mut out = header_block("sequence", run, timestamp)?;
    let _ = writeln!(out, "# v_of_p: {v_of_p:?}");
    out.push_str(&sequence_rows(points));
    Ok(out)
}
