//! CSV serialization for solver traces and certification reports.
//!
//! Trace schema: header `k,f,gap,step,subgrad_norm,dist_ref`, one row per
//! iteration with floats at 17 significant digits (bit-exact round trip),
//! empty cells for absent optionals, and a final comment line
//! `# reason=<termination token>`. Report schema: `N,lhs,rhs,margin`.

use std::fmt::Write as _;
use std::path::Path;

use geodescent::solver::TraceRow;
use geodescent::{BoundReport, BoundRow, Termination};

use crate::error::{CliError, Result};

pub const TRACE_HEADER: &str = "k,f,gap,step,subgrad_norm,dist_ref";
pub const REPORT_HEADER: &str = "N,lhs,rhs,margin";

/// 17-significant-digit scientific notation: enough to reconstruct any
/// finite `f64` bit-exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_optional(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn render_trace(rows: &[TraceRow], termination: Termination) -> String {
    let mut out = String::with_capacity(96 * (rows.len() + 2));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.k,
            format_float(row.value),
            format_optional(row.gap),
            format_optional(row.step),
            format_float(row.subgradient_norm),
            format_optional(row.dist_reference),
        )
        .expect("string write");
    }
    writeln!(out, "# reason={}", termination.token()).expect("string write");
    out
}

pub fn write_trace(path: &Path, rows: &[TraceRow], termination: Termination) -> Result<()> {
    std::fs::write(path, render_trace(rows, termination)).map_err(CliError::io(path))
}

fn parse_cell(path: &Path, line: usize, field: &str, raw: &str) -> Result<f64> {
    raw.parse::<f64>().map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("column `{field}`: bad float `{raw}`: {e}"),
    })
}

fn parse_optional_cell(path: &Path, line: usize, field: &str, raw: &str) -> Result<Option<f64>> {
    if raw.is_empty() {
        Ok(None)
    } else {
        parse_cell(path, line, field, raw).map(Some)
    }
}

pub fn read_trace(path: &Path) -> Result<(Vec<TraceRow>, Termination)> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut lines = text.lines().enumerate();
    let fail = |line: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    match lines.next() {
        Some((_, header)) if header == TRACE_HEADER => {}
        Some((_, header)) => {
            return Err(fail(
                1,
                format!("expected header `{TRACE_HEADER}`, got `{header}`"),
            ))
        }
        None => return Err(fail(1, "empty trace file".to_string())),
    }
    let mut rows = Vec::new();
    let mut termination = None;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if let Some(reason) = line.strip_prefix("# reason=") {
            let token = Termination::from_token(reason.trim()).ok_or_else(|| {
                fail(line_no, format!("unknown termination reason `{reason}`"))
            })?;
            termination = Some(token);
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if termination.is_some() {
            return Err(fail(line_no, "data after the termination footer".to_string()));
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 6 {
            return Err(fail(
                line_no,
                format!("expected 6 columns, got {}", cells.len()),
            ));
        }
        let k = cells[0].parse::<usize>().map_err(|e| {
            fail(line_no, format!("column `k`: bad index `{}`: {e}", cells[0]))
        })?;
        rows.push(TraceRow {
            k,
            value: parse_cell(path, line_no, "f", cells[1])?,
            gap: parse_optional_cell(path, line_no, "gap", cells[2])?,
            step: parse_optional_cell(path, line_no, "step", cells[3])?,
            subgradient_norm: parse_cell(path, line_no, "subgrad_norm", cells[4])?,
            dist_reference: parse_optional_cell(path, line_no, "dist_ref", cells[5])?,
        });
    }
    let termination = termination.ok_or_else(|| {
        fail(
            text.lines().count(),
            "missing `# reason=<token>` footer".to_string(),
        )
    })?;
    Ok((rows, termination))
}

pub fn render_report(report: &BoundReport) -> String {
    let mut out = String::with_capacity(80 * (report.rows.len() + 1));
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.n,
            format_float(row.lhs),
            format_float(row.rhs),
            format_float(row.margin),
        )
        .expect("string write");
    }
    out
}

pub fn write_report(path: &Path, report: &BoundReport) -> Result<()> {
    std::fs::write(path, render_report(report)).map_err(CliError::io(path))
}

pub fn read_report_rows(path: &Path) -> Result<Vec<BoundRow>> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut lines = text.lines().enumerate();
    let fail = |line: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    match lines.next() {
        Some((_, header)) if header == REPORT_HEADER => {}
        Some((_, header)) => {
            return Err(fail(
                1,
                format!("expected header `{REPORT_HEADER}`, got `{header}`"),
            ))
        }
        None => return Err(fail(1, "empty report file".to_string())),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 4 {
            return Err(fail(
                line_no,
                format!("expected 4 columns, got {}", cells.len()),
            ));
        }
        let n = cells[0].parse::<usize>().map_err(|e| {
            fail(line_no, format!("column `N`: bad index `{}`: {e}", cells[0]))
        })?;
        rows.push(BoundRow {
            n,
            lhs: parse_cell(path, line_no, "lhs", cells[1])?,
            rhs: parse_cell(path, line_no, "rhs", cells[2])?,
            margin: parse_cell(path, line_no, "margin", cells[3])?,
        });
    }
    Ok(rows)
}
