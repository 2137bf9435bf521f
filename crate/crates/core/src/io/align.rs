//! Ingestion-time preprocessing for feature matrices whose row counts differ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// How to bring two matrices with equal column counts to a common row count
/// `min(N, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AlignMode {
    /// Keep the leading rows.
    Truncate,
    /// Average contiguous, near-equal bins of rows.
    MeanPool,
}

/// Keeps the first `rows` rows.
pub fn truncate_rows(m: &DenseMatrix, rows: usize) -> Result<DenseMatrix> {
    if rows == 0 || rows > m.rows() {
        return Err(Error::invalid(
            "rows",
            format!("cannot truncate {} rows to {rows}", m.rows()),
        ));
    }
    DenseMatrix::from_vec(rows, m.cols(), m.as_slice()[..rows * m.cols()].to_vec())
}

/// Output row `j` is the mean of input rows `⌊j·N/rows⌋ .. ⌊(j+1)·N/rows⌋`.
pub fn mean_pool_rows(m: &DenseMatrix, rows: usize) -> Result<DenseMatrix> {
    let n = m.rows();
    if rows == 0 || rows > n {
        return Err(Error::invalid("rows", format!("cannot pool {n} rows into {rows}")));
    }
    let cols = m.cols();
    let mut data = Vec::with_capacity(rows * cols);
    for j in 0..rows {
        let (start, end) = (j * n / rows, (j + 1) * n / rows);
        let count = (end - start) as f64;
        for c in 0..cols {
            let sum: f64 = (start..end).map(|r| m.get(r, c)).sum();
            data.push(sum / count);
        }
    }
    DenseMatrix::from_vec(rows, cols, data)
}

/// Equalizes row counts. Column counts must already agree. Equal shapes are
/// passed through untouched whatever the mode.
pub fn align_pair(i: DenseMatrix, t: DenseMatrix, mode: Option<AlignMode>) -> Result<(DenseMatrix, DenseMatrix)> {
    if i.shape() == t.shape() {
        return Ok((i, t));
    }
    let mismatch = Error::ShapeMismatch {
        left: i.shape(),
        right: t.shape(),
    };
    let Some(mode) = mode else {
        return Err(mismatch);
    };
    if i.cols() != t.cols() {
        return Err(mismatch);
    }
    let rows = i.rows().min(t.rows());
    let f = match mode {
        AlignMode::Truncate => truncate_rows,
        AlignMode::MeanPool => mean_pool_rows,
    };
    let i = if i.rows() == rows { i } else { f(&i, rows)? };
    let t = if t.rows() == rows { t } else { f(&t, rows)? };
    Ok((i, t))
}

/// Subtracts each column's mean.
pub fn center_columns(m: &DenseMatrix) -> DenseMatrix {
    let (rows, cols) = m.shape();
    let means: Vec<f64> = (0..cols)
        .map(|c| (0..rows).map(|r| m.get(r, c)).sum::<f64>() / rows as f64)
        .collect();
    let mut out = m.clone();
    for (k, x) in out.data_mut().iter_mut().enumerate() {
        *x -= means[k % cols];
    }
    out
}
