//! Rectangular tables and deterministic CSV emission.
//!
//! Every file the harness writes goes through [`emit_csv`] so that identical
//! runs produce identical bytes: RFC-4180 quoting, '.' decimal separator,
//! newline-terminated records, reals at 12 significant digits.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row has {got} cells, table has {want} columns")]
    RaggedRow { got: usize, want: usize },
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Header row plus data rows; rows must match the header width.
#[derive(Debug, Clone)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: Vec<S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<(), TableError> {
        if row.len() != self.headers.len() {
            return Err(TableError::RaggedRow {
                got: row.len(),
                want: self.headers.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Render to CSV text. Deterministic for identical content.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        write_record(&mut out, self.headers.iter().map(String::as_str));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(format_cell).collect();
            write_record(&mut out, cells.iter().map(String::as_str));
        }
        out
    }
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Real(v) => format_sig(*v, 12),
        Cell::Text(s) => s.clone(),
    }
}

fn write_record<'a>(out: &mut String, fields: impl Iterator<Item = &'a str>) {
    let mut first = true;
    for f in fields {
        if !first {
            out.push(',');
        }
        first = false;
        if f.contains(',') || f.contains('"') || f.contains('\n') || f.contains('\r') {
            out.push('"');
            out.push_str(&f.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(f);
        }
    }
    out.push('\n');
}

/// Format `x` with `sig` significant digits, plain decimal notation where
/// reasonable, scientific otherwise. `format_sig(1.0/3.0, 12)` is
/// `"0.333333333333"`.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    // plain notation while the exponent keeps the string compact
    if (-5..=(sig as i32)).contains(&mag) {
        let decimals = (sig as i32 - 1 - mag).max(0) as usize;
        // rounding may promote the magnitude (0.99995 -> 1.0000); harmless
        let s = format!("{x:.decimals$}");
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{:.*e}", sig - 1, x)
    }
}

/// Write a table to `path` as CSV, creating parent directories.
pub fn emit_csv(table: &Table, path: &Path) -> Result<(), TableError> {
    let to_io = |source| TableError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(to_io)?;
        }
    }
    let mut f = fs::File::create(path).map_err(to_io)?;
    f.write_all(table.to_csv().as_bytes()).map_err(to_io)?;
    Ok(())
}

/// Write plain text (reports), creating parent directories.
pub fn emit_text(text: &str, path: &Path) -> Result<(), TableError> {
    let to_io = |source| TableError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(to_io)?;
        }
    }
    fs::write(path, text).map_err(to_io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_formats_to_twelve_digits() {
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
    }

    #[test]
    fn sig_formatting_cases() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(1.0, 12), "1.00000000000");
        assert_eq!(format_sig(-2.5, 12), "-2.50000000000");
        assert_eq!(format_sig(1234.5, 12), "1234.50000000");
        assert_eq!(format_sig(1e-9, 12), "1.00000000000e-9");
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(vec!["a", "b"]);
        assert_eq!(t.to_csv(), "a,b\n");
    }

    #[test]
    fn reemission_is_byte_identical() {
        let mut t = Table::new(vec!["p", "y"]);
        t.push(vec![Cell::Real(0.1), Cell::Real(1.0 / 3.0)]).unwrap();
        t.push(vec![Cell::Int(7), Cell::Real(2e-12)]).unwrap();
        assert_eq!(t.to_csv(), t.to_csv());
    }

    #[test]
    fn quoting_only_when_needed() {
        let mut t = Table::new(vec!["k", "v"]);
        t.push(vec![Cell::Text("a,b".into()), Cell::Text("plain".into())])
            .unwrap();
        assert_eq!(t.to_csv(), "k,v\n\"a,b\",plain\n");
    }

    #[test]
    fn ragged_row_rejected() {
        let mut t = Table::new(vec!["a", "b"]);
        assert!(t.push(vec![Cell::Int(1)]).is_err());
    }
}
