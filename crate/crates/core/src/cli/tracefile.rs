//! Trace files: a `#` JSON header line, CSV rows, and a `#` JSON footer line.
//!
//! ```text
//! # {"format":"bregproj-trace/1","solver":"kl_parallel",...,"columns":[...]}
//! 1,2.5e-1,1e-1,all,0.1 -0.2,1e0,0.0001
//! ...
//! # {"status":"converged","lambda":[...],...}
//! ```

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::problem::MatrixRows;
use crate::error::{Error, Result};
use crate::legendre::ExtendedReal;
use crate::solvers::{monotonicity_breaks, Status, StepIndex, TraceFlags, TraceRecord, DESCENT_SLACK};

pub const TRACE_FORMAT: &str = "bregproj-trace/1";
pub const COLUMNS: [&str; 7] = ["t", "objective", "max_violation", "j", "delta", "trace_y", "seconds"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub problem_hash: String,
    pub subcommand: String,
    pub solver: String,
    pub family: String,
    pub max_iterations: usize,
    pub violation_tol: f64,
    pub divergence_delta_tol: f64,
    pub delta_max: f64,
    pub columns: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFooter {
    pub status: Status,
    pub iterations: usize,
    pub lambda: Vec<f64>,
    pub final_violation: f64,
    #[serde(default)]
    pub flags: TraceFlags,
    /// Final iterate `Y`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<MatrixRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceFile {
    pub header: TraceHeader,
    pub rows: Vec<TraceRecord>,
    pub footer: Option<TraceFooter>,
}

fn format_row(r: &TraceRecord) -> String {
    let objective = match r.objective {
        ExtendedReal::Finite(v) => format!("{v:e}"),
        ExtendedReal::PosInfinity => "inf".to_string(),
    };
    let delta: Vec<String> = r.delta.iter().map(|d| format!("{d:e}")).collect();
    format!(
        "{},{},{:e},{},{},{:e},{:e}",
        r.t,
        objective,
        r.max_violation,
        r.step,
        delta.join(" "),
        r.trace_y,
        r.seconds
    )
}

fn row_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        location: format!("line {line}"),
        message: message.into(),
    }
}

fn parse_row(text: &str, line: usize) -> Result<TraceRecord> {
    let cells: Vec<&str> = text.split(',').collect();
    if cells.len() != COLUMNS.len() {
        return Err(row_error(line, format!("expected {} fields, found {}", COLUMNS.len(), cells.len())));
    }
    let num = |i: usize| -> Result<f64> {
        cells[i]
            .trim()
            .parse::<f64>()
            .map_err(|_| row_error(line, format!("field '{}' is not a number: '{}'", COLUMNS[i], cells[i])))
    };
    let t = cells[0]
        .trim()
        .parse::<usize>()
        .map_err(|_| row_error(line, format!("field 't' is not an integer: '{}'", cells[0])))?;
    let objective = match cells[1].trim() {
        "inf" => ExtendedReal::PosInfinity,
        _ => ExtendedReal::Finite(num(1)?),
    };
    let step: StepIndex = cells[3].trim().parse().map_err(|e: Error| row_error(line, e.to_string()))?;
    let delta = cells[4]
        .split_whitespace()
        .map(|d| d.parse::<f64>().map_err(|_| row_error(line, format!("bad delta entry '{d}'"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceRecord {
        t,
        objective,
        max_violation: num(2)?,
        step,
        delta,
        trace_y: num(5)?,
        seconds: num(6)?,
        auxiliary: None,
    })
}

impl TraceFile {
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# {}", serde_json::to_string(&self.header).expect("header serializes")).unwrap();
        for r in &self.rows {
            writeln!(out, "{}", format_row(r)).unwrap();
        }
        if let Some(f) = &self.footer {
            writeln!(out, "# {}", serde_json::to_string(f).expect("footer serializes")).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| row_error(1, "trace file is empty"))?;
        let header_json = first
            .strip_prefix('#')
            .ok_or_else(|| row_error(1, "missing '#' header line"))?;
        let header: TraceHeader =
            serde_json::from_str(header_json.trim()).map_err(|e| row_error(1, format!("header: {e}")))?;
        let mut rows = Vec::new();
        let mut footer = None;
        for (i, line) in lines {
            if footer.is_some() {
                return Err(row_error(i + 1, "content after the footer line"));
            }
            if let Some(json) = line.strip_prefix('#') {
                footer = Some(
                    serde_json::from_str::<TraceFooter>(json.trim())
                        .map_err(|e| row_error(i + 1, format!("footer: {e}")))?,
                );
            } else {
                rows.push(parse_row(line, i + 1)?);
            }
        }
        Ok(TraceFile { header, rows, footer })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { location, message } => Error::Parse {
                location: format!("{}: {location}", path.display()),
                message,
            },
            other => other,
        })
    }

    /// Writes to a temporary sibling file and renames it over `path`.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let name = path
            .file_name()
            .ok_or_else(|| Error::InvalidInput(format!("'{}' is not a file path", path.display())))?;
        let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
        let result = (|| -> std::io::Result<()> {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(self.render().as_bytes())?;
            f.sync_all()?;
            std::fs::rename(&tmp, path)
        })();
        if result.is_err() {
            let _ = std::fs::remove_file(&tmp);
        }
        result.map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    /// Iterations whose objective rose beyond the solver's descent slack.
    pub fn monotonicity_breaks(&self) -> Vec<usize> {
        let obj: Vec<ExtendedReal> = self.rows.iter().map(|r| r.objective).collect();
        monotonicity_breaks(&obj, DESCENT_SLACK)
            .into_iter()
            .map(|i| self.rows[i].t)
            .collect()
    }
}

/// Human-readable summary of a trace file.
pub fn emit_summary(path: &Path) -> Result<String> {
    let trace = TraceFile::read(path)?;
    let last = trace
        .rows
        .last()
        .ok_or_else(|| Error::InvalidInput(format!("{}: trace has no rows", path.display())))?;
    let mut out = String::new();
    let status = trace.footer.as_ref().map(|f| f.status.as_str()).unwrap_or("incomplete");
    writeln!(out, "status: {status}").unwrap();
    writeln!(out, "solver: {} ({})", trace.header.solver, trace.header.family).unwrap();
    writeln!(out, "iterations: {}", trace.rows.len()).unwrap();
    let objective = match last.objective {
        ExtendedReal::Finite(v) => format!("{v:e}"),
        ExtendedReal::PosInfinity => "inf".into(),
    };
    writeln!(out, "final objective: {objective}").unwrap();
    writeln!(out, "final max violation: {:e}", last.max_violation).unwrap();
    let breaks = trace.monotonicity_breaks();
    if breaks.is_empty() {
        writeln!(out, "monotone objective: yes (slack {DESCENT_SLACK:e})").unwrap();
    } else {
        writeln!(out, "monotone objective: no, rises at t = {breaks:?}").unwrap();
    }
    if let Some(f) = &trace.footer {
        let met = last.max_violation <= trace.header.violation_tol;
        let consistent = match f.status {
            Status::Converged => met,
            Status::BudgetExhausted | Status::Stalled => !met,
            Status::UnboundedStep | Status::Error => true,
        };
        if !consistent {
            writeln!(
                out,
                "warning: status {} disagrees with final violation {:e} against tolerance {:e}",
                f.status, last.max_violation, trace.header.violation_tol
            )
            .unwrap();
        }
        if let Some(m) = &f.message {
            writeln!(out, "message: {m}").unwrap();
        }
    }
    Ok(out)
}
