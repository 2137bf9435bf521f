//! Writes a matrix as RDM1 and CSV, reads both back and checks the bits.
//!
//!     cargo run --example matrix_io [dir]

use std::path::PathBuf;

use rdecomp::io::{read_matrix, sha256_file, write_matrix};
use rdecomp::DenseMatrix;

fn main() -> Result<(), rdecomp::Error> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let m = DenseMatrix::from_fn(3, 4, |i, j| (i as f64 + 1.0) / (j as f64 + 3.0))?;

    for name in ["example.rdm", "example.csv"] {
        let path = dir.join(name);
        write_matrix(&path, &m)?;
        let back = read_matrix(&path)?;
        let same = back
            .as_slice()
            .iter()
            .zip(m.as_slice())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        println!(
            "{}: bitwise round trip {same}, sha256 {}",
            path.display(),
            sha256_file(&path)?
        );
    }
    Ok(())
}
