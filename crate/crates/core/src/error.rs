//! Error type shared by all fallible operations in the crate.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{op}: shapes {left_rows}x{left_cols} and {right_rows}x{right_cols} do not conform")]
    ShapeMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("data length {len} does not match shape {rows}x{cols}")]
    LengthMismatch {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("negative entry at ({row}, {col}); input must be nonnegative")]
    NegativeEntry { row: usize, col: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("noise exceeds data at ({row}, {col}); implied clean value is negative")]
    InfeasibleNoise { row: usize, col: usize },
    #[error("coordinate {index} of the anchor is zero; diagonal majorizer undefined there")]
    SingularCoordinate { index: usize },
    #[error("mask entry at ({row}, {col}) is not 0 or 1")]
    NonBinaryMask { row: usize, col: usize },
    #[error("stacked system dimension {dim} exceeds the dense-path limit {limit}")]
    DenseSystemTooLarge { dim: usize, limit: usize },
    #[error("corruption count {count} exceeds column height {rows}")]
    CorruptionTooLarge { count: usize, rows: usize },
    #[error("invalid corruption spec: {0}")]
    InvalidCorruption(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
