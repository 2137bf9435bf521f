//! Synthetic instances with known ground truth, `I = L₀ + S_I⁰`,
//! `T = L₀ + S_T⁰`, and the metrics used to score a recovered decomposition
//! against them.
//!
//! Instances are a pure function of [`SyntheticSpec`]. The random stream is
//! ChaCha8 seeded through `seed_from_u64`, and every draw goes through the
//! integer-only conversions below rather than a distribution crate, so the
//! bits do not depend on platform math libraries or crate versions.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decompose::JointDecomposition;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::svd::svd;

/// Identifies the sampling procedure in exported metadata.
pub const GENERATOR_ID: &str = "chacha8-seed_from_u64/uniform53/fisher-yates-rejection/v1";

/// Entries with magnitude at or below this count as zero when comparing
/// sparse supports.
pub const SUPPORT_THRESHOLD: f64 = 1e-6;

/// Singular values at or below this fraction of the largest are ignored by
/// the rank estimate.
pub const RANK_RELATIVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// Fraction of nonzero entries in each sparse component.
    pub density: f64,
    /// Factor entries of `L₀ = P Qᵀ` are uniform on `[-low_rank_scale, low_rank_scale]`.
    pub low_rank_scale: f64,
    /// Sparse entries are `±spike_scale` with a uniform random sign.
    pub spike_scale: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// The 64×64, rank 4, 5% density instance used by the acceptance suite.
    pub fn acceptance() -> Self {
        Self {
            rows: 64,
            cols: 64,
            rank: 4,
            density: 0.05,
            low_rank_scale: 1.0,
            spike_scale: 5.0,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::EmptyDimension {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rank > self.rows.min(self.cols) {
            return Err(Error::invalid(
                "rank",
                format!("{} exceeds min(rows, cols) = {}", self.rank, self.rows.min(self.cols)),
            ));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::invalid(
                "density",
                format!("must lie in [0, 1], got {}", self.density),
            ));
        }
        for (name, v) in [
            ("low_rank_scale", self.low_rank_scale),
            ("spike_scale", self.spike_scale),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and non-negative, got {v}"),
                ));
            }
        }
        Ok(())
    }

    /// Number of nonzero entries per sparse component.
    pub fn support_size(&self) -> usize {
        (self.density * (self.rows * self.cols) as f64).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticInstance {
    pub i: DenseMatrix,
    pub t: DenseMatrix,
    pub l0: DenseMatrix,
    pub s_i0: DenseMatrix,
    pub s_t0: DenseMatrix,
}

struct Stream(ChaCha8Rng);

impl Stream {
    /// Uniform on [0, 1) with 53 random bits.
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn symmetric(&mut self, scale: f64) -> f64 {
        (2.0 * self.unit() - 1.0) * scale
    }

    /// Uniform on `0..n` by rejection, `n ≥ 1`.
    fn below(&mut self, n: u64) -> u64 {
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.0.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    fn sign(&mut self) -> f64 {
        if self.0.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `count` distinct positions of `0..len`, via a partial Fisher–Yates shuffle.
    fn sample_support(&mut self, len: usize, count: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..len).collect();
        for j in 0..count {
            let r = j + self.below((len - j) as u64) as usize;
            idx.swap(j, r);
        }
        idx.truncate(count);
        idx
    }
}

/// Draws an instance. Draw order: `P` (rows×rank, row-major), `Q` (cols×rank),
/// then support and signs for `S_I⁰`, then for `S_T⁰`.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticInstance> {
    spec.validate()?;
    let (m, n, k) = (spec.rows, spec.cols, spec.rank);
    let mut rng = Stream(ChaCha8Rng::seed_from_u64(spec.seed));

    let p: Vec<f64> = (0..m * k).map(|_| rng.symmetric(spec.low_rank_scale)).collect();
    let q: Vec<f64> = (0..n * k).map(|_| rng.symmetric(spec.low_rank_scale)).collect();
    let l0 = DenseMatrix::from_fn(m, n, |r, c| (0..k).map(|j| p[r * k + j] * q[c * k + j]).sum())?;

    let count = spec.support_size();
    let mut spikes = || -> Result<DenseMatrix> {
        let support = rng.sample_support(m * n, count);
        let mut data = vec![0.0; m * n];
        for pos in support {
            data[pos] = rng.sign() * spec.spike_scale;
        }
        DenseMatrix::from_vec(m, n, data)
    };
    let s_i0 = spikes()?;
    let s_t0 = spikes()?;

    let i = crate::matrix::add(&l0, &s_i0)?;
    let t = crate::matrix::add(&l0, &s_t0)?;
    Ok(SyntheticInstance { i, t, l0, s_i0, s_t0 })
}

/// Borrowed `(L, S_I, S_T)` triple.
#[derive(Debug, Clone, Copy)]
pub struct Components<'a> {
    pub l: &'a DenseMatrix,
    pub s_i: &'a DenseMatrix,
    pub s_t: &'a DenseMatrix,
}

impl JointDecomposition {
    pub fn components(&self) -> Components<'_> {
        Components {
            l: &self.l,
            s_i: &self.s_i,
            s_t: &self.s_t,
        }
    }
}

impl SyntheticInstance {
    pub fn truth(&self) -> Components<'_> {
        Components {
            l: &self.l0,
            s_i: &self.s_i0,
            s_t: &self.s_t0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl SupportMetrics {
    fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        // Empty prediction sets are vacuously precise; empty truth is
        // vacuously recalled.
        let precision = if tp + fp == 0 {
            1.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            1.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self { precision, recall, f1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveryMetrics {
    pub l_rel_error: f64,
    pub s_i_rel_error: f64,
    pub s_t_rel_error: f64,
    pub l_rank: usize,
    pub s_i_support: SupportMetrics,
    pub s_t_support: SupportMetrics,
    /// Support metrics over both sparse components together.
    pub support: SupportMetrics,
}

impl RecoveryMetrics {
    /// Flat `key=value` lines.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        kv("l_rel_error", format!("{:?}", self.l_rel_error));
        kv("s_i_rel_error", format!("{:?}", self.s_i_rel_error));
        kv("s_t_rel_error", format!("{:?}", self.s_t_rel_error));
        kv("l_rank", self.l_rank.to_string());
        for (prefix, m) in [
            ("s_i", self.s_i_support),
            ("s_t", self.s_t_support),
            ("support", self.support),
        ] {
            kv(&format!("{prefix}_precision"), format!("{:?}", m.precision));
            kv(&format!("{prefix}_recall"), format!("{:?}", m.recall));
            kv(&format!("{prefix}_f1"), format!("{:?}", m.f1));
        }
        out
    }
}

fn relative_error(est: &DenseMatrix, truth: &DenseMatrix) -> Result<f64> {
    let diff = crate::matrix::sub(est, truth)?;
    Ok(diff.frobenius_norm() / truth.frobenius_norm().max(1.0))
}

fn support_counts(est: &DenseMatrix, truth: &DenseMatrix) -> (usize, usize, usize) {
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&e, &t) in est.as_slice().iter().zip(truth.as_slice()) {
        match (e.abs() > SUPPORT_THRESHOLD, t.abs() > SUPPORT_THRESHOLD) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    (tp, fp, fn_)
}

/// Numerical rank: singular values above `RANK_RELATIVE_TOLERANCE · σ_max`.
pub fn numerical_rank(a: &DenseMatrix) -> Result<usize> {
    let sigma = svd(a)?.sigma;
    let top = sigma.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sigma.iter().filter(|&&s| s > RANK_RELATIVE_TOLERANCE * top).count())
}

/// Scores an estimated triple against ground truth.
pub fn compare(est: Components<'_>, truth: Components<'_>) -> Result<RecoveryMetrics> {
    let (si_tp, si_fp, si_fn) = {
        est.s_i.ensure_same_shape(truth.s_i)?;
        support_counts(est.s_i, truth.s_i)
    };
    let (st_tp, st_fp, st_fn) = {
        est.s_t.ensure_same_shape(truth.s_t)?;
        support_counts(est.s_t, truth.s_t)
    };
    Ok(RecoveryMetrics {
        l_rel_error: relative_error(est.l, truth.l)?,
        s_i_rel_error: relative_error(est.s_i, truth.s_i)?,
        s_t_rel_error: relative_error(est.s_t, truth.s_t)?,
        l_rank: numerical_rank(est.l)?,
        s_i_support: SupportMetrics::from_counts(si_tp, si_fp, si_fn),
        s_t_support: SupportMetrics::from_counts(st_tp, st_fp, st_fn),
        support: SupportMetrics::from_counts(si_tp + st_tp, si_fp + st_fp, si_fn + st_fn),
    })
}

pub fn recovery_metrics(est: &JointDecomposition, truth: &SyntheticInstance) -> Result<RecoveryMetrics> {
    compare(est.components(), truth.truth())
}
