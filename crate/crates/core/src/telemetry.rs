//! Telemetry records and their CSV interchange format.
//!
//! One row per timestep with true and sensed channels side by side:
//!
//! ```text
//! t,cv,x,x_sensed,p1,p1_sensed,p2,p2_sensed,temp,q,q_sensed,fault_ids,fault_intensities
//! ```
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips `f64` exactly, so rewriting a parsed file is byte-identical.
//! The fault columns are semicolon-separated parallel lists, empty when no
//! fault is active at that timestep.

use thiserror::Error;

use crate::simulator::faults::FaultId;

pub const CSV_HEADER: &str =
    "t,cv,x,x_sensed,p1,p1_sensed,p2,p2_sensed,temp,q,q_sensed,fault_ids,fault_intensities";

const FIELD_COUNT: usize = 13;

/// One simulated sample: commanded input, true plant state and the sensed
/// (noisy, possibly biased) channels, plus the faults in effect.
#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryRecord {
    /// Time \[s\], a multiple of the timestep.
    pub t: f64,
    /// Commanded control signal in [0, 1].
    pub cv: f64,
    /// True stroke fraction in [0, 1].
    pub x: f64,
    pub x_sensed: f64,
    /// True upstream pressure \[kPa\].
    pub p1: f64,
    pub p1_sensed: f64,
    /// True downstream pressure \[kPa\].
    pub p2: f64,
    pub p2_sensed: f64,
    /// Medium temperature \[K\].
    pub temp: f64,
    /// True volumetric flow \[m³/s\].
    pub q: f64,
    pub q_sensed: f64,
    /// Faults with non-zero effective intensity at `t`, in id order.
    pub active_faults: Vec<(FaultId, f64)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TelemetryError {
    #[error("line 1: expected header `{CSV_HEADER}`")]
    BadHeader,
    #[error("line {line}: expected {FIELD_COUNT} fields, got {got}")]
    FieldCount { line: usize, got: usize },
    #[error("line {line}: cannot parse `{value}` in column `{column}`")]
    Parse {
        line: usize,
        column: &'static str,
        value: String,
    },
    #[error("line {line}: {reason}")]
    FaultList { line: usize, reason: String },
}

/// Formats an `f64` with 17 significant digits (exact round trip).
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn record_to_row(r: &TelemetryRecord) -> String {
    let ids: Vec<&str> = r.active_faults.iter().map(|(id, _)| id.as_str()).collect();
    let zs: Vec<String> = r.active_faults.iter().map(|(_, z)| format_float(*z)).collect();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        format_float(r.t),
        format_float(r.cv),
        format_float(r.x),
        format_float(r.x_sensed),
        format_float(r.p1),
        format_float(r.p1_sensed),
        format_float(r.p2),
        format_float(r.p2_sensed),
        format_float(r.temp),
        format_float(r.q),
        format_float(r.q_sensed),
        ids.join(";"),
        zs.join(";"),
    )
}

/// Serializes records to CSV text (header + one row per record).
pub fn write_csv(records: &[TelemetryRecord]) -> String {
    let mut out = String::with_capacity(64 + records.len() * 256);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&record_to_row(r));
        out.push('\n');
    }
    out
}

/// Parses CSV text produced by [`write_csv`] (strict schema).
pub fn read_csv(text: &str) -> Result<Vec<TelemetryRecord>, TelemetryError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim_end() == CSV_HEADER => {}
        _ => return Err(TelemetryError::BadHeader),
    }
    let mut records = Vec::new();
    for (i, row) in lines.enumerate() {
        let line = i + 2;
        if row.is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != FIELD_COUNT {
            return Err(TelemetryError::FieldCount {
                line,
                got: fields.len(),
            });
        }
        let num = |idx: usize, column: &'static str| {
            fields[idx].parse::<f64>().map_err(|_| TelemetryError::Parse {
                line,
                column,
                value: fields[idx].to_string(),
            })
        };
        let active_faults = parse_fault_lists(fields[11], fields[12], line)?;
        records.push(TelemetryRecord {
            t: num(0, "t")?,
            cv: num(1, "cv")?,
            x: num(2, "x")?,
            x_sensed: num(3, "x_sensed")?,
            p1: num(4, "p1")?,
            p1_sensed: num(5, "p1_sensed")?,
            p2: num(6, "p2")?,
            p2_sensed: num(7, "p2_sensed")?,
            temp: num(8, "temp")?,
            q: num(9, "q")?,
            q_sensed: num(10, "q_sensed")?,
            active_faults,
        });
    }
    Ok(records)
}

fn parse_fault_lists(
    ids: &str,
    intensities: &str,
    line: usize,
) -> Result<Vec<(FaultId, f64)>, TelemetryError> {
    if ids.is_empty() && intensities.is_empty() {
        return Ok(Vec::new());
    }
    let id_parts: Vec<&str> = ids.split(';').collect();
    let z_parts: Vec<&str> = intensities.split(';').collect();
    if id_parts.len() != z_parts.len() {
        return Err(TelemetryError::FaultList {
            line,
            reason: format!(
                "fault_ids has {} entries but fault_intensities has {}",
                id_parts.len(),
                z_parts.len()
            ),
        });
    }
    id_parts
        .iter()
        .zip(&z_parts)
        .map(|(id, z)| {
            let id = id.parse::<FaultId>().map_err(|reason| TelemetryError::FaultList {
                line,
                reason,
            })?;
            let z = z.parse::<f64>().map_err(|_| TelemetryError::Parse {
                line,
                column: "fault_intensities",
                value: z.to_string(),
            })?;
            Ok((id, z))
        })
        .collect()
}
