//! The trace CSV format.
//!
//! ```text
//! # seed=<n>
//! step,h_act_agent,h_obs_env,h_obs_agent,h_act_env,kl_obs_inst,kl_act_inst,kl_obs_cum,kl_act_cum,r_G,r_P,r_Q,u_G_cum,u_P_cum,u_Q_cum
//! 1,0.00000000000e0,3.25082973391e-1,...
//! ```
//!
//! One row per step, reals printed with 12 significant digits, `inf`/`-inf`
//! for infinite values, `\n` line endings.

use std::io::{Read, Write};

use ioentropy_core::analysis::{EntropyTrace, TraceRow};
use thiserror::Error;

pub const COLUMNS: [&str; 15] = [
    "step",
    "h_act_agent",
    "h_obs_env",
    "h_obs_agent",
    "h_act_env",
    "kl_obs_inst",
    "kl_act_inst",
    "kl_obs_cum",
    "kl_act_cum",
    "r_G",
    "r_P",
    "r_Q",
    "u_G_cum",
    "u_P_cum",
    "u_Q_cum",
];

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("missing `# seed=<n>` comment line")]
    MissingSeed,
    #[error("header does not match the trace schema: {0}")]
    BadHeader(String),
    #[error("row {row}, column {column}: cannot parse {value:?}")]
    BadValue { row: usize, column: &'static str, value: String },
    #[error("row {row}: expected {expected} fields, found {found}")]
    FieldCount { row: usize, expected: usize, found: usize },
    #[error("trace has no data rows")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Formats a real with 12 significant digits.
pub fn format_real(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

fn row_values(r: &TraceRow) -> [f64; 14] {
    [
        r.h_act_agent,
        r.h_obs_env,
        r.h_obs_agent,
        r.h_act_env,
        r.kl_obs_inst,
        r.kl_act_inst,
        r.kl_obs_cum,
        r.kl_act_cum,
        r.r_g,
        r.r_p,
        r.r_q,
        r.u_g_cum,
        r.u_p_cum,
        r.u_q_cum,
    ]
}

pub fn write_trace<W: Write>(mut out: W, seed: u64, trace: &EntropyTrace) -> Result<(), TraceError> {
    writeln!(out, "# seed={seed}")?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS)?;
    for row in &trace.rows {
        let mut record = Vec::with_capacity(COLUMNS.len());
        record.push(row.step.to_string());
        record.extend(row_values(row).iter().map(|&x| format_real(x)));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// A parsed trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub seed: u64,
    pub steps: Vec<u64>,
    /// Row-major values of every column after `step`.
    pub values: Vec<[f64; 14]>,
}

impl TraceFile {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Values of a named column, `step` excluded.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = COLUMNS.iter().position(|c| *c == name)?.checked_sub(1)?;
        Some(self.values.iter().map(|v| v[i]).collect())
    }
}

fn parse_real(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse::<f64>().ok().filter(|x| x.is_finite()),
    }
}

pub fn read_trace<R: Read>(mut input: R) -> Result<TraceFile, TraceError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    let seed = first
        .trim_end_matches('\r')
        .strip_prefix("# seed=")
        .and_then(|s| s.trim().parse::<u64>().ok())
        .ok_or(TraceError::MissingSeed)?;

    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(rest.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(TraceError::BadHeader(header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut steps = Vec::new();
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() != COLUMNS.len() {
            return Err(TraceError::FieldCount { row, expected: COLUMNS.len(), found: record.len() });
        }
        let bad = |c: usize| TraceError::BadValue { row, column: COLUMNS[c], value: record[c].to_string() };
        steps.push(record[0].parse::<u64>().map_err(|_| bad(0))?);
        let mut v = [0.0; 14];
        for (c, slot) in v.iter_mut().enumerate() {
            *slot = parse_real(&record[c + 1]).ok_or_else(|| bad(c + 1))?;
        }
        values.push(v);
    }
    if steps.is_empty() {
        return Err(TraceError::Empty);
    }
    Ok(TraceFile { seed, steps, values })
}
