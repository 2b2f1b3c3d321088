//! Labeled square matrix CSV codec. The first row is an empty cell followed
//! by the column labels; each subsequent row is its label followed by one
//! value per column. Values are written with the shortest representation that
//! parses back to the identical f64, so write/read round trips are exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Square matrix with shared row and column labels, row major values.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMatrix {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

pub fn write_matrix_csv(path: &Path, labels: &[String], values: &[f64]) -> Result<()> {
    let n = labels.len();
    assert_eq!(values.len(), n * n, "values must be a square over labels");
    for label in labels {
        if label.is_empty() || label.contains(',') || label.contains('\n') {
            return Err(Error::invalid(format!(
                "label `{label}` cannot be stored in csv"
            )));
        }
    }
    let mut out = String::new();
    for label in labels {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        out.push_str(label);
        for j in 0..n {
            let _ = write!(out, ",{}", values[i * n + j]);
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a labeled square matrix, enforcing matching row and column labels,
/// rectangular shape, and finite non-negative values.
pub fn read_matrix_csv(path: &Path) -> Result<LabeledMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
    let fail = |line: usize, column: usize, msg: String| Error::CsvParse {
        path: path.to_path_buf(),
        line,
        column,
        msg,
    };

    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| fail(1, 1, "empty file".into()))?;
    let mut header_cells = header.split(',');
    let corner = header_cells.next().unwrap_or("");
    if !corner.is_empty() {
        return Err(fail(1, 1, format!("expected empty corner cell, got `{corner}`")));
    }
    let labels: Vec<String> = header_cells.map(str::to_string).collect();
    let n = labels.len();
    if n == 0 {
        return Err(fail(1, 2, "no column labels".into()));
    }
    for (j, label) in labels.iter().enumerate() {
        if label.is_empty() {
            return Err(fail(1, j + 2, "empty column label".into()));
        }
        if labels[..j].contains(label) {
            return Err(fail(1, j + 2, format!("duplicate label `{label}`")));
        }
    }

    let mut values = vec![0.0; n * n];
    let mut row = 0usize;
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        if row == n {
            return Err(fail(lineno, 1, format!("expected {n} data rows, found more")));
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != n + 1 {
            return Err(fail(
                lineno,
                1,
                format!("expected {} cells, got {}", n + 1, cells.len()),
            ));
        }
        if cells[0] != labels[row] {
            return Err(fail(
                lineno,
                1,
                format!("row label `{}` does not match column label `{}`", cells[0], labels[row]),
            ));
        }
        for (j, cell) in cells[1..].iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                fail(lineno, j + 2, format!("invalid number `{cell}`"))
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(fail(
                    lineno,
                    j + 2,
                    format!("value {v} must be finite and non-negative"),
                ));
            }
            values[row * n + j] = v;
        }
        row += 1;
    }
    if row != n {
        return Err(fail(
            text.lines().count(),
            1,
            format!("expected {n} data rows, found {row}"),
        ));
    }
    Ok(LabeledMatrix { labels, values })
}
