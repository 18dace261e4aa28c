//! Plain-text matrix files: a `rows cols` header, then `re im` pairs in
//! row-major order, all whitespace separated.

use std::fmt::Write as _;
use std::path::Path;

use schatten_core::{CMatrix, C64};

use crate::error::{CliError, CliResult};

pub fn parse(text: &str) -> CliResult<CMatrix> {
    let mut tokens = text.split_whitespace();
    let mut dim = |what: &str| -> CliResult<usize> {
        tokens
            .next()
            .ok_or_else(|| CliError::MatrixFormat(format!("missing {what}")))?
            .parse()
            .map_err(|_| CliError::MatrixFormat(format!("bad {what}")))
    };
    let rows = dim("row count")?;
    let cols = dim("column count")?;
    let values = tokens
        .map(|t| t.parse::<f64>().map_err(|_| CliError::MatrixFormat(format!("bad number `{t}`"))))
        .collect::<CliResult<Vec<f64>>>()?;
    if values.len() != 2 * rows * cols {
        return Err(CliError::MatrixFormat(format!(
            "expected {} numbers for a {rows}x{cols} matrix, found {}",
            2 * rows * cols,
            values.len()
        )));
    }
    let entries = values.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
    Ok(CMatrix::from_row_major(rows, cols, entries)?)
}

pub fn read(path: &Path) -> CliResult<CMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text)
}

/// One row per line; `{:e}` keeps every bit of each value.
pub fn format(m: &CMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format!("{:e} {:e}", m.get(i, j).re, m.get(i, j).im)).collect();
        let _ = writeln!(out, "{}", row.join("  "));
    }
    out
}
