//! Helpers shared by the integration tests. Everything here is computed
//! independently of the library's own arithmetic.

#![allow(dead_code)]

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdecomp::{fuse, AttentionParams, DenseMatrix};

pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn matrix(&mut self, rows: usize, cols: usize, scale: f64) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| self.uniform(-scale, scale)).unwrap()
    }

    pub fn vec(&mut self, len: usize, scale: f64) -> Vec<f64> {
        (0..len).map(|_| self.uniform(-scale, scale)).collect()
    }
}

/// Frobenius norm by a compensated (Kahan) sum, separate from the library's.
pub fn frob(a: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for &x in a {
        let y = x * x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum.sqrt()
}

pub fn frob_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let d: Vec<f64> = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x - y).collect();
    frob(&d)
}

/// Dot product accumulated in reverse order with Kahan compensation.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        let v = x * y - c;
        let t = sum + v;
        c = (t - sum) - v;
        sum = t;
    }
    sum
}

/// Naive triple loop, i-j-k order.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols(), b.rows());
    DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum()
    })
    .unwrap()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations. Used to get
/// singular values as sqrt(eig(AᵀA)) independently of the library SVD.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut m: Vec<f64> = a.as_slice().to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

pub fn soft(x: f64, tau: f64) -> f64 {
    x.signum() * (x.abs() - tau).max(0.0)
}

/// Recovery metrics recomputed from scratch: `(l_rel, s_i_rel, s_t_rel, l_rank, support_f1)`.
/// Rank comes from the eigenvalues of `LᵀL`, not from the library SVD.
pub fn independent_metrics(est: [&DenseMatrix; 3], truth: [&DenseMatrix; 3]) -> (f64, f64, f64, usize, f64) {
    let rel = |e: &DenseMatrix, t: &DenseMatrix| frob_diff(e, t) / frob(t.as_slice()).max(1.0);
    let gram = matmul(&est[0].transpose(), est[0]);
    let ev = symmetric_eigenvalues(&gram);
    let top = ev[0].max(0.0).sqrt();
    let rank = if top == 0.0 {
        0
    } else {
        ev.iter().filter(|&&e| e.max(0.0).sqrt() > 1e-6 * top).count()
    };
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for k in 1..3 {
        for (e, t) in est[k].as_slice().iter().zip(truth[k].as_slice()) {
            let (pe, pt) = (e.abs() > 1e-6, t.abs() > 1e-6);
            tp += (pe && pt) as usize;
            fp += (pe && !pt) as usize;
            fn_ += (!pe && pt) as usize;
        }
    }
    let f1 = if tp + fp + fn_ == 0 {
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    };
    (
        rel(est[0], truth[0]),
        rel(est[1], truth[1]),
        rel(est[2], truth[2]),
        rank,
        f1,
    )
}

pub const FD_STEP: f64 = 1e-6;

/// Central differences of `⟨upstream, R(w, b)⟩` over every parameter.
pub fn finite_difference(c: [&DenseMatrix; 3], p: &AttentionParams, upstream: &DenseMatrix) -> (Vec<f64>, f64) {
    let loss = |q: &AttentionParams| dot(upstream.as_slice(), fuse(c[0], c[1], c[2], q).unwrap().r.as_slice());
    let mut grad_w = Vec::with_capacity(p.w.len());
    for j in 0..p.w.len() {
        let mut plus = p.clone();
        plus.w[j] += FD_STEP;
        let mut minus = p.clone();
        minus.w[j] -= FD_STEP;
        grad_w.push((loss(&plus) - loss(&minus)) / (2.0 * FD_STEP));
    }
    let mut plus = p.clone();
    plus.b += FD_STEP;
    let mut minus = p.clone();
    minus.b -= FD_STEP;
    (grad_w, (loss(&plus) - loss(&minus)) / (2.0 * FD_STEP))
}
