//! Low-rank + sparse decomposition by augmented-Lagrangian alternating
//! minimization.
//!
//! Two solvers share one configuration type:
//!
//! * [`joint_decompose`] splits a pair of aligned matrices into one shared
//!   low-rank matrix and two modality-specific sparse matrices,
//!   `I = L + S_I`, `T = L + S_T`.
//! * [`lmr_decompose`] is the classical single-matrix robust PCA split
//!   `X = L + S`, used as a baseline and as an oracle for the joint solver.
//!
//! Both start from all-zero iterates, run a fixed step order (sparse update,
//! low-rank update, multiplier update, convergence test) and record the
//! primal residual of every iteration.

mod joint;
mod single;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use joint::{joint_decompose, joint_decompose_observed, joint_step, residuals, JointDecomposition, JointState};
pub use single::{lmr_decompose, lmr_decompose_observed, lmr_step, SingleDecomposition, SingleState};

/// Parameters of both solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Weight of the ℓ1 term relative to the nuclear norm.
    pub lambda: f64,
    /// Augmented-Lagrangian penalty.
    pub mu: f64,
    /// Iteration cap.
    pub max_iters: usize,
    /// Absolute tolerance on the largest Frobenius residual.
    pub epsilon: f64,
}

impl SolverConfig {
    pub const DEFAULT_LAMBDA: f64 = 1.0;
    pub const DEFAULT_MU: f64 = 10.0;
    pub const DEFAULT_MAX_ITERS: usize = 3000;
    pub const DEFAULT_EPSILON: f64 = 1e-7;

    pub fn new(lambda: f64, mu: f64, max_iters: usize, epsilon: f64) -> Result<Self> {
        let cfg = Self {
            lambda,
            mu,
            max_iters,
            epsilon,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &'static str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite and positive, got {v}")))
            }
        }
        positive("lambda", self.lambda)?;
        positive("mu", self.mu)?;
        positive("epsilon", self.epsilon)?;
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be at least 1"));
        }
        Ok(())
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// Threshold of the sparse update, `λ/μ`.
    pub fn sparse_threshold(&self) -> f64 {
        self.lambda / self.mu
    }

    /// Singular value threshold of the joint low-rank update, `1/(2μ)`.
    pub fn joint_svt_threshold(&self) -> f64 {
        1.0 / (2.0 * self.mu)
    }

    /// Default singular value threshold of the single-matrix solver, `1/μ`.
    pub fn single_svt_threshold(&self) -> f64 {
        1.0 / self.mu
    }
}

impl Default for SolverConfig {
    /// λ = 1, μ = 10, K = 3000, ε = 1e-7.
    fn default() -> Self {
        Self {
            lambda: Self::DEFAULT_LAMBDA,
            mu: Self::DEFAULT_MU,
            max_iters: Self::DEFAULT_MAX_ITERS,
            epsilon: Self::DEFAULT_EPSILON,
        }
    }
}
