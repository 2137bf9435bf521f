//! Soft-thresholding and singular value thresholding on small matrices.
//!
//!     cargo run --example proximal_operators

use rdecomp::{soft_threshold, svd, svt, DenseMatrix};

fn main() -> Result<(), rdecomp::Error> {
    let a = DenseMatrix::from_rows(&[vec![3.0, -0.5, 0.2], vec![-4.0, 1.0, 0.0]])?;
    let s = soft_threshold(&a, 1.0)?;
    println!("soft_threshold(A, 1.0) = {:?}", s.as_slice());

    // Rank-2 matrix plus a small perturbation.
    let b = DenseMatrix::from_fn(6, 5, |i, j| {
        let (i, j) = (i as f64, j as f64);
        (i + 1.0) * (j - 2.0) + 0.5 * (i - j).cos() + 1e-3 * ((3.0 * i + j).sin())
    })?;
    let sigma = svd(&b)?.sigma;
    println!("singular values of B: {sigma:.4?}");
    for tau in [0.01, 1.0, sigma[0]] {
        let low = svt(&b, tau)?;
        let shrunk = svd(&low)?.sigma;
        println!("svt(B, {tau:.3}) -> {shrunk:.4?}");
    }
    Ok(())
}
