//! Proximal operators of the ℓ1 and nuclear norms.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::svd::{recompose, svd};

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_nan() || tau < 0.0 || tau.is_infinite() {
        return Err(Error::invalid(
            "tau",
            format!("must be finite and non-negative, got {tau}"),
        ));
    }
    Ok(())
}

/// Scalar shrinkage `sign(x)·max(|x| − tau, 0)`.
#[inline]
pub fn shrink(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// Entry-wise soft-thresholding, the proximal operator of `tau·‖·‖₁`.
pub fn soft_threshold(a: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_tau(tau)?;
    Ok(a.map(|x| shrink(x, tau)))
}

/// Singular value thresholding, the proximal operator of `tau·‖·‖_*`:
/// `U · max(Σ − tau, 0) · Vᵀ`.
pub fn svt(a: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_tau(tau)?;
    let mut dec = svd(a)?;
    for s in &mut dec.sigma {
        *s = (*s - tau).max(0.0);
    }
    Ok(recompose(&dec.u, &dec.sigma, &dec.vt))
}
