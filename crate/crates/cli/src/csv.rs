//! CSV matrix format: a `rows,cols` header line followed by one line per
//! row of comma-separated decimal values. Values are written in shortest
//! round-trip form, so write→read→write is byte-stable.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rnmf_core::eval::Mask;
use rnmf_core::DenseMatrix;

use crate::error::{CliError, Result};

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{},{}", m.rows(), m.cols());
    for r in 0..m.rows() {
        let mut first = true;
        for &v in m.row(r) {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{v}");
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str, origin: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::parse(origin, 1, "empty file"))?;
    let mut parts = header.split(',');
    let rows: usize = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| CliError::parse(origin, 1, "header must be `rows,cols`"))?;
    let cols: usize = parts
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| CliError::parse(origin, 1, "header must be `rows,cols`"))?;
    if parts.next().is_some() {
        return Err(CliError::parse(origin, 1, "header must be `rows,cols`"));
    }

    let mut data = Vec::with_capacity(rows * cols);
    let mut row_count = 0usize;
    for (index, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut count = 0usize;
        for field in line.split(',') {
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| CliError::parse(origin, index + 1, format!("bad number `{field}`")))?;
            data.push(value);
            count += 1;
        }
        if count != cols {
            return Err(CliError::parse(
                origin,
                index + 1,
                format!("expected {cols} values, found {count}"),
            ));
        }
        row_count += 1;
    }
    if row_count != rows {
        return Err(CliError::parse(
            origin,
            1,
            format!("expected {rows} rows, found {row_count}"),
        ));
    }
    Ok(DenseMatrix::from_vec(rows, cols, data)?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    parse_matrix(&text, &path.display().to_string())
}

pub fn write_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_matrix(m)).map_err(|e| CliError::io(path.display().to_string(), e))
}

/// Boolean masks travel as {0,1} matrices in the same format.
pub fn mask_to_matrix(mask: &Mask) -> DenseMatrix {
    DenseMatrix::from_fn(mask.rows(), mask.cols(), |r, c| {
        if mask.get(r, c) {
            1.0
        } else {
            0.0
        }
    })
}

pub fn matrix_to_mask(m: &DenseMatrix, origin: &str) -> Result<Mask> {
    for (i, &v) in m.data().iter().enumerate() {
        if v != 0.0 && v != 1.0 {
            return Err(CliError::invalid(format!(
                "{origin}: mask entry at ({}, {}) must be 0 or 1, found {v}",
                i / m.cols(),
                i % m.cols()
            )));
        }
    }
    Ok(Mask::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c) == 1.0))
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<Mask> {
    let path = path.as_ref();
    let m = read_matrix(path)?;
    matrix_to_mask(&m, &path.display().to_string())
}

pub fn write_mask(path: impl AsRef<Path>, mask: &Mask) -> Result<()> {
    write_matrix(path, &mask_to_matrix(mask))
}
