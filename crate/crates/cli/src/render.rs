//! Rendering of command reports as JSON, CSV or an aligned text table.

use num_complex::Complex64;
use serde::Serialize;

use crate::config::Format;

/// A report that knows its CSV and table layouts; JSON comes from serde.
pub trait Tabular: Serialize {
    fn csv(&self) -> String;
    fn table(&self) -> String;
}

pub fn render<R: Tabular>(report: &R, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => report.csv(),
        Format::Table => report.table(),
    }
}

/// Short fixed-width form for tables.
pub fn short_complex(z: Complex64) -> String {
    let z = Complex64::new(clean(z.re), clean(z.im));
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{}{:.6}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
    }
}

/// Maps −0 and round-off below 1e-13 to +0 so that printed values do not flicker in sign.
fn clean(x: f64) -> f64 {
    if x.abs() < 1e-13 {
        0.0
    } else {
        x
    }
}

/// Lays out rows with every column padded to its widest cell.
pub fn align(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}", w = w)).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out += &line(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

/// Quotes a CSV field when it contains a separator or a quote.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn format_links(links: &[(usize, usize)]) -> String {
    let parts: Vec<String> = links.iter().map(|(d, e)| format!("({d},{e})")).collect();
    format!("{{{}}}", parts.join(","))
}
