//! Static SVG rendering of certification reports: the two sides of the
//! inequality as polylines over the iteration index, with a log-scaled
//! vertical axis. Output is a pure function of the input rows, so repeated
//! renders are byte-identical.

use geodescent::BoundRow;

use crate::error::{CliError, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 690.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 390.0;
/// Log-scale display floor: values at or below zero are clamped here.
const FLOOR: f64 = 1e-16;

fn fmt(x: f64) -> String {
    format!("{x:.2}")
}

struct LogAxis {
    lo: f64,
    hi: f64,
}

impl LogAxis {
    fn fit(values: impl Iterator<Item = f64>) -> LogAxis {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            let l = v.max(FLOOR).log10();
            lo = lo.min(l);
            hi = hi.max(l);
        }
        let mut lo = lo.floor();
        let mut hi = hi.ceil();
        if lo == hi {
            lo -= 1.0;
            hi += 1.0;
        }
        LogAxis { lo, hi }
    }

    fn y(&self, value: f64) -> f64 {
        let l = value.max(FLOOR).log10();
        BOTTOM - (l - self.lo) / (self.hi - self.lo) * (BOTTOM - TOP)
    }
}

fn x_position(n: usize, n_lo: usize, n_hi: usize) -> f64 {
    if n_hi == n_lo {
        (LEFT + RIGHT) / 2.0
    } else {
        LEFT + (n - n_lo) as f64 / (n_hi - n_lo) as f64 * (RIGHT - LEFT)
    }
}

fn polyline(points: &str, color: &str) -> String {
    format!(r#"  <polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>"#)
}

/// Renders the report as a line chart. Errors on an empty report.
pub fn render_report_chart(rows: &[BoundRow], title: &str) -> Result<String> {
    if rows.is_empty() {
        return Err(CliError::usage("cannot plot an empty report"));
    }
    let n_lo = rows.iter().map(|r| r.n).min().expect("nonempty");
    let n_hi = rows.iter().map(|r| r.n).max().expect("nonempty");
    let axis = LogAxis::fit(rows.iter().flat_map(|r| [r.lhs, r.rhs]));

    let series = |pick: fn(&BoundRow) -> f64| -> String {
        rows.iter()
            .map(|r| format!("{},{}", fmt(x_position(r.n, n_lo, n_hi)), fmt(axis.y(pick(r)))))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut out = String::new();
    out.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    ));
    out.push('\n');
    out.push_str(r##"  <rect width="100%" height="100%" fill="#ffffff"/>"##);
    out.push('\n');
    out.push_str(&format!(
        r#"  <text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{title}</text>"#,
        (LEFT + RIGHT) / 2.0
    ));
    out.push('\n');

    // Horizontal gridlines and labels, one per decade (at most 12 labeled).
    let decades = (axis.hi - axis.lo) as i64;
    let label_stride = (decades as usize).div_ceil(12).max(1);
    let mut exponent = axis.lo as i64;
    let mut index = 0usize;
    while exponent <= axis.hi as i64 {
        let y = axis.y(10f64.powi(exponent as i32));
        out.push_str(&format!(
            r##"  <line x1="{LEFT}" y1="{}" x2="{RIGHT}" y2="{}" stroke="#dddddd"/>"##,
            fmt(y),
            fmt(y)
        ));
        out.push('\n');
        if index.is_multiple_of(label_stride) {
            out.push_str(&format!(
                r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">1e{exponent}</text>"#,
                LEFT - 8.0,
                fmt(y + 4.0)
            ));
            out.push('\n');
        }
        exponent += 1;
        index += 1;
    }

    // A few x-axis ticks at round iteration indices.
    let tick_count = 5.min(n_hi - n_lo + 1);
    for i in 0..tick_count {
        let n = if tick_count == 1 {
            n_lo
        } else {
            n_lo + (n_hi - n_lo) * i / (tick_count - 1)
        };
        let x = x_position(n, n_lo, n_hi);
        out.push_str(&format!(
            r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{n}</text>"#,
            fmt(x),
            BOTTOM + 20.0
        ));
        out.push('\n');
    }

    // Axes.
    out.push_str(&format!(
        r##"  <line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{BOTTOM}" stroke="#000000"/>"##
    ));
    out.push('\n');
    out.push_str(&format!(
        r##"  <line x1="{LEFT}" y1="{BOTTOM}" x2="{RIGHT}" y2="{BOTTOM}" stroke="#000000"/>"##
    ));
    out.push('\n');
    out.push_str(&format!(
        r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">iteration N</text>"#,
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 6.0
    ));
    out.push('\n');

    // The two data series.
    out.push_str(&polyline(&series(|r| r.lhs), "#1f77b4"));
    out.push('\n');
    out.push_str(&polyline(&series(|r| r.rhs), "#d62728"));
    out.push('\n');

    // Legend.
    out.push_str(&format!(
        r##"  <rect x="{}" y="{}" width="12" height="3" fill="#1f77b4"/>"##,
        RIGHT - 150.0,
        TOP + 8.0
    ));
    out.push('\n');
    out.push_str(&format!(
        r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="12">observed</text>"#,
        RIGHT - 132.0,
        TOP + 13.0
    ));
    out.push('\n');
    out.push_str(&format!(
        r##"  <rect x="{}" y="{}" width="12" height="3" fill="#d62728"/>"##,
        RIGHT - 150.0,
        TOP + 26.0
    ));
    out.push('\n');
    out.push_str(&format!(
        r#"  <text x="{}" y="{}" font-family="sans-serif" font-size="12">bound</text>"#,
        RIGHT - 132.0,
        TOP + 31.0
    ));
    out.push('\n');
    out.push_str("</svg>\n");
    Ok(out)
}
