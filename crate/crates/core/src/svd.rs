//! Thin singular value decomposition.
//!
//! Golub–Reinsch: Householder reduction to upper bidiagonal form, then
//! implicitly shifted QR sweeps on the bidiagonal with Givens rotations
//! accumulated into both factors. Everything runs sequentially, so results are
//! bitwise reproducible for a given input on a given build.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// QR sweeps allowed per singular value before giving up.
const MAX_SWEEPS: usize = 75;

/// `A = U · diag(sigma) · Vᵀ` with `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// m×k, orthonormal columns.
    pub u: DenseMatrix,
    /// Non-increasing, non-negative, length k.
    pub sigma: Vec<f64>,
    /// k×n, orthonormal rows.
    pub vt: DenseMatrix,
}

impl SvdResult {
    /// Recomposes `U · diag(sigma) · Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        recompose(&self.u, &self.sigma, &self.vt)
    }

    /// Number of singular values strictly above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.sigma.iter().filter(|&&s| s > tol).count()
    }
}

/// Computes the thin SVD of `a`.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    if m >= n {
        let (u, sigma, v) =
            golub_reinsch(a.as_slice().to_vec(), m, n).ok_or(Error::SvdNoConvergence { rows: m, cols: n })?;
        Ok(sorted(u, sigma, v, m, n))
    } else {
        // A = (Aᵀ)ᵀ = (U' Σ V'ᵀ)ᵀ = V' Σ U'ᵀ
        let at = a.transpose();
        let (u, sigma, v) =
            golub_reinsch(at.as_slice().to_vec(), n, m).ok_or(Error::SvdNoConvergence { rows: m, cols: n })?;
        let r = sorted(u, sigma, v, n, m);
        Ok(SvdResult {
            u: r.vt.transpose(),
            sigma: r.sigma,
            vt: r.u.transpose(),
        })
    }
}

/// `U · diag(sigma) · Vᵀ`, skipping zero singular values.
pub(crate) fn recompose(u: &DenseMatrix, sigma: &[f64], vt: &DenseMatrix) -> DenseMatrix {
    let (m, k) = u.shape();
    let n = vt.cols();
    let mut out = vec![0.0; m * n];
    let u = u.as_slice();
    let vt = vt.as_slice();
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for (p, &s) in sigma.iter().enumerate().take(k) {
            if s == 0.0 {
                continue;
            }
            let coef = u[i * k + p] * s;
            for (o, &v) in row.iter_mut().zip(&vt[p * n..(p + 1) * n]) {
                *o += coef * v;
            }
        }
    }
    DenseMatrix::from_parts(m, n, out)
}

/// Orders the triplets by decreasing singular value and packs the factors.
/// `u` is m×n row-major, `v` is n×n row-major (columns are right vectors).
fn sorted(u: Vec<f64>, sigma: Vec<f64>, v: Vec<f64>, m: usize, n: usize) -> SvdResult {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));

    let mut u_out = vec![0.0; m * n];
    let mut vt_out = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..m {
            u_out[r * n + dst] = u[r * n + src];
        }
        for c in 0..n {
            vt_out[dst * n + c] = v[c * n + src];
        }
    }
    SvdResult {
        u: DenseMatrix::from_parts(m, n, u_out),
        sigma: order.iter().map(|&i| sigma[i]).collect(),
        vt: DenseMatrix::from_parts(n, n, vt_out),
    }
}

#[inline]
fn with_sign(magnitude: f64, sign_of: f64) -> f64 {
    if sign_of >= 0.0 {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Golub–Reinsch on an m×n row-major buffer with m ≥ n. On success returns
/// (U m×n, unsorted non-negative singular values, V n×n).
#[allow(clippy::many_single_char_names)]
fn golub_reinsch(mut a: Vec<f64>, m: usize, n: usize) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    debug_assert!(m >= n && n >= 1);
    let idx = |r: usize, c: usize| r * n + c;
    let mut w = vec![0.0; n];
    let mut v = vec![0.0; n * n];
    let mut rv1 = vec![0.0; n];

    // Householder reduction to bidiagonal form.
    let (mut g, mut scale, mut anorm) = (0.0f64, 0.0f64, 0.0f64);
    let mut l = 0;
    for i in 0..n {
        l = i + 1;
        rv1[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        let mut s = 0.0;
        for k in i..m {
            scale += a[idx(k, i)].abs();
        }
        if scale != 0.0 {
            for k in i..m {
                a[idx(k, i)] /= scale;
                s += a[idx(k, i)] * a[idx(k, i)];
            }
            let f = a[idx(i, i)];
            g = -with_sign(s.sqrt(), f);
            let h = f * g - s;
            a[idx(i, i)] = f - g;
            for j in l..n {
                let mut s = 0.0;
                for k in i..m {
                    s += a[idx(k, i)] * a[idx(k, j)];
                }
                let f = s / h;
                for k in i..m {
                    a[idx(k, j)] += f * a[idx(k, i)];
                }
            }
            for k in i..m {
                a[idx(k, i)] *= scale;
            }
        }
        w[i] = scale * g;

        g = 0.0;
        scale = 0.0;
        let mut s = 0.0;
        if i + 1 != n {
            for k in l..n {
                scale += a[idx(i, k)].abs();
            }
            if scale != 0.0 {
                for k in l..n {
                    a[idx(i, k)] /= scale;
                    s += a[idx(i, k)] * a[idx(i, k)];
                }
                let f = a[idx(i, l)];
                g = -with_sign(s.sqrt(), f);
                let h = f * g - s;
                a[idx(i, l)] = f - g;
                for k in l..n {
                    rv1[k] = a[idx(i, k)] / h;
                }
                for j in l..m {
                    let mut s = 0.0;
                    for k in l..n {
                        s += a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in l..n {
                        a[idx(j, k)] += s * rv1[k];
                    }
                }
                for k in l..n {
                    a[idx(i, k)] *= scale;
                }
            }
        }
        anorm = anorm.max(w[i].abs() + rv1[i].abs());
    }

    // Accumulate right-hand transformations.
    for i in (0..n).rev() {
        if i + 1 < n {
            if g != 0.0 {
                // Double division avoids possible underflow.
                for j in l..n {
                    v[idx(j, i)] = (a[idx(i, j)] / a[idx(i, l)]) / g;
                }
                for j in l..n {
                    let mut s = 0.0;
                    for k in l..n {
                        s += a[idx(i, k)] * v[idx(k, j)];
                    }
                    for k in l..n {
                        v[idx(k, j)] += s * v[idx(k, i)];
                    }
                }
            }
            for j in l..n {
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        }
        v[idx(i, i)] = 1.0;
        g = rv1[i];
        l = i;
    }

    // Accumulate left-hand transformations.
    for i in (0..n).rev() {
        let l = i + 1;
        let mut g = w[i];
        for j in l..n {
            a[idx(i, j)] = 0.0;
        }
        if g != 0.0 {
            g = 1.0 / g;
            for j in l..n {
                let mut s = 0.0;
                for k in l..m {
                    s += a[idx(k, i)] * a[idx(k, j)];
                }
                let f = (s / a[idx(i, i)]) * g;
                for k in i..m {
                    a[idx(k, j)] += f * a[idx(k, i)];
                }
            }
            for j in i..m {
                a[idx(j, i)] *= g;
            }
        } else {
            for j in i..m {
                a[idx(j, i)] = 0.0;
            }
        }
        a[idx(i, i)] += 1.0;
    }

    // Diagonalize the bidiagonal form.
    let negligible = |x: f64| x.abs() <= f64::EPSILON * anorm;
    for k in (0..n).rev() {
        let mut sweeps = 0;
        loop {
            // Find the start `l` of the unreduced block ending at k. rv1[0] is
            // always zero, so the scan terminates.
            let mut cancel = true;
            let mut l = k;
            loop {
                if negligible(rv1[l]) {
                    cancel = false;
                    break;
                }
                if negligible(w[l - 1]) {
                    break;
                }
                l -= 1;
            }
            if cancel {
                // w[l-1] is negligible: chase rv1[l] out of the block.
                let nm = l - 1;
                let (mut c, mut s) = (0.0, 1.0);
                for i in l..=k {
                    let f = s * rv1[i];
                    rv1[i] *= c;
                    if negligible(f) {
                        break;
                    }
                    let g = w[i];
                    let h = f.hypot(g);
                    w[i] = h;
                    let h = 1.0 / h;
                    c = g * h;
                    s = -f * h;
                    for j in 0..m {
                        let y = a[idx(j, nm)];
                        let z = a[idx(j, i)];
                        a[idx(j, nm)] = y * c + z * s;
                        a[idx(j, i)] = z * c - y * s;
                    }
                }
            }

            let z = w[k];
            if l == k {
                if z < 0.0 {
                    w[k] = -z;
                    for j in 0..n {
                        v[idx(j, k)] = -v[idx(j, k)];
                    }
                }
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return None;
            }

            // Wilkinson shift from the trailing 2×2 block.
            let mut x = w[l];
            let nm = k - 1;
            let mut y = w[nm];
            let mut g = rv1[nm];
            let mut h = rv1[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = f.hypot(1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + with_sign(g, f))) - h)) / x;

            let (mut c, mut s) = (1.0, 1.0);
            for j in l..=nm {
                let i = j + 1;
                g = rv1[i];
                y = w[i];
                h = s * g;
                g *= c;
                let mut z = f.hypot(h);
                rv1[j] = z;
                c = f / z;
                s = h / z;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                for jj in 0..n {
                    let xv = v[idx(jj, j)];
                    let zv = v[idx(jj, i)];
                    v[idx(jj, j)] = xv * c + zv * s;
                    v[idx(jj, i)] = zv * c - xv * s;
                }
                z = f.hypot(h);
                w[j] = z;
                if z != 0.0 {
                    let zi = 1.0 / z;
                    c = f * zi;
                    s = h * zi;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                for jj in 0..m {
                    let ya = a[idx(jj, j)];
                    let za = a[idx(jj, i)];
                    a[idx(jj, j)] = ya * c + za * s;
                    a[idx(jj, i)] = za * c - ya * s;
                }
            }
            rv1[l] = 0.0;
            rv1[k] = f;
            w[k] = x;
        }
    }

    Some((a, w, v))
}
