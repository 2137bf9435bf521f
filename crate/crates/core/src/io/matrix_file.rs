//! On-disk matrix formats.
//!
//! `RDM1` is the native binary layout:
//!
//! ```text
//! offset 0   4 bytes   magic "RDM1"
//! offset 4   u32 LE    rows (≥ 1)
//! offset 8   u32 LE    cols (≥ 1)
//! offset 12  rows·cols IEEE-754 binary64 LE values, row-major
//! ```
//!
//! The file length must be exactly `12 + 8·rows·cols`. CSV is headerless,
//! one row per line; written values use 17 significant digits so they parse
//! back to the same bits.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub const MAGIC: &[u8; 4] = b"RDM1";
pub const HEADER_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum MatrixFormat {
    #[default]
    Rdm,
    Csv,
}

impl MatrixFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MatrixFormat::Rdm => "rdm",
            MatrixFormat::Csv => "csv",
        }
    }

    /// `.csv` paths are CSV, everything else is RDM1.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Rdm,
        }
    }
}

pub fn encode_rdm(m: &DenseMatrix) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * m.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(m.rows() as u32).to_le_bytes());
    buf.extend_from_slice(&(m.cols() as u32).to_le_bytes());
    for x in m.as_slice() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    buf
}

/// Parses an RDM1 image; `path` is only used in error messages.
pub fn decode_rdm(bytes: &[u8], path: &Path) -> Result<DenseMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::BadLength {
            path: path.into(),
            expected: HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::BadMagic {
            path: path.into(),
            found: bytes[..4].to_vec(),
        });
    }
    let rows = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    let cols = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if rows == 0 || cols == 0 {
        return Err(Error::BadHeader {
            path: path.into(),
            rows,
            cols,
        });
    }
    let expected = HEADER_LEN as u64 + 8 * rows as u64 * cols as u64;
    if bytes.len() as u64 != expected {
        return Err(Error::BadLength {
            path: path.into(),
            expected,
            actual: bytes.len() as u64,
        });
    }
    let data = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    DenseMatrix::from_vec(rows as usize, cols as usize, data)
}

pub fn write_rdm(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_rdm(m)).map_err(|e| Error::io(path, e))
}

pub fn read_rdm(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_rdm(&bytes, path)
}

/// Scientific notation with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn encode_csv(m: &DenseMatrix) -> String {
    let mut out = String::with_capacity(m.len() * 24);
    for r in 0..m.rows() {
        for (c, x) in m.row(r).iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&format_f64(*x));
        }
        out.push('\n');
    }
    out
}

pub fn decode_csv(text: &str, path: &Path) -> Result<DenseMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::CsvLayout {
            path: path.into(),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(rows.len() as u64 + 1, |p| p.line());
        let mut row = Vec::with_capacity(record.len());
        for (column, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::CsvCell {
                path: path.into(),
                line,
                column: column + 1,
                cell: cell.to_string(),
            })?;
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::CsvLayout {
                    path: path.into(),
                    reason: format!("line {line} has {} cells, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::CsvLayout {
            path: path.into(),
            reason: "no rows".into(),
        });
    }
    DenseMatrix::from_rows(&rows)
}

pub fn write_csv(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_csv(m)).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode_csv(&text, path)
}

/// Reads a matrix, choosing the format from the extension.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    match MatrixFormat::from_path(path) {
        MatrixFormat::Rdm => read_rdm(path),
        MatrixFormat::Csv => read_csv(path),
    }
}

/// Writes a matrix, choosing the format from the extension.
pub fn write_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let path = path.as_ref();
    match MatrixFormat::from_path(path) {
        MatrixFormat::Rdm => write_rdm(path, m),
        MatrixFormat::Csv => write_csv(path, m),
    }
}
