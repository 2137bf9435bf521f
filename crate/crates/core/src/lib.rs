//! Shared low-rank + modality-specific sparse decomposition of aligned
//! feature matrices, and attention-weighted fusion of the result.
//!
//! Given two equally shaped matrices `I` (visual) and `T` (textual), the joint
//! solver finds
//!
//! ```text
//! min ‖L‖_* + λ(‖S_I‖₁ + ‖S_T‖₁)   s.t.   I = L + S_I,  T = L + S_T
//! ```
//!
//! by alternating soft-thresholding of the sparse parts, singular value
//! thresholding of the shared part and dual ascent on the two constraints.
//! The three components are then scored, softmax-weighted and summed into a
//! single representation `R`.
//!
//! ```
//! use rdecomp::{joint_decompose, fuse, AttentionParams, SolverConfig};
//! use rdecomp::synth::{generate, SyntheticSpec};
//!
//! let inst = generate(&SyntheticSpec { rows: 16, cols: 12, rank: 2, ..SyntheticSpec::acceptance() })?;
//! let dec = joint_decompose(&inst.i, &inst.t, &SolverConfig::default().with_lambda(0.25))?;
//! assert!(dec.converged);
//!
//! let fused = fuse(&dec.l, &dec.s_i, &dec.s_t, &AttentionParams::zeros(16, 12))?;
//! assert!((fused.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! # Ok::<(), rdecomp::Error>(())
//! ```

pub mod cli;
pub mod decompose;
mod error;
pub mod fusion;
pub mod io;
pub mod matrix;
pub mod prox;
pub mod svd;
pub mod synth;

pub use decompose::{
    joint_decompose, joint_step, lmr_decompose, residuals, JointDecomposition, JointState, SingleDecomposition,
    SingleState, SolverConfig,
};
pub use error::{Error, ErrorClass, Result};
pub use fusion::{attention_weights, fuse, fusion_gradients, score, AttentionParams, FusionResult};
pub use matrix::{add, flatten, frobenius_norm, reshape, scale, sub, DenseMatrix};
pub use prox::{soft_threshold, svt};
pub use svd::{svd, SvdResult};
pub use synth::{generate, recovery_metrics, RecoveryMetrics, SyntheticInstance, SyntheticSpec};

/// Crate version, recorded in every run manifest.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
