//! File formats and ingestion helpers used by the command-line tool.

mod align;
mod config;
mod manifest;
mod matrix_file;

pub use align::{align_pair, center_columns, mean_pool_rows, truncate_rows, AlignMode};
pub use config::{resolve as resolve_config, ConfigOverrides};
pub use manifest::{sha256_bytes, sha256_file, FileDigest, RunManifest, Stopwatch, Timing, FORMAT_VERSION};
pub use matrix_file::{
    decode_csv, decode_rdm, encode_csv, encode_rdm, format_f64, read_csv, read_matrix, read_rdm, write_csv,
    write_matrix, write_rdm, MatrixFormat, HEADER_LEN, MAGIC,
};
