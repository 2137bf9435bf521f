//! Attention-weighted fusion of decomposed components.
//!
//! Each of `L`, `S_I`, `S_T` is flattened and scored by one shared affine map
//! `s = w · vec(M) + b`; the three scores go through a softmax and the
//! resulting weights mix the components into `R = α_L L + α_I S_I + α_T S_T`.
//! Scoring all components with the same `(w, b)` keeps the scores comparable.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Shared scoring parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams {
    /// One weight per entry of the row-major flattened matrix.
    pub w: Vec<f64>,
    pub b: f64,
}

impl AttentionParams {
    /// `w = 0, b = 0`, which gives uniform weights.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            w: vec![0.0; rows * cols],
            b: 0.0,
        }
    }

    pub fn new(w: Vec<f64>, b: f64) -> Result<Self> {
        if let Some(pos) = w.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid("w", format!("entry {pos} is not finite")));
        }
        if !b.is_finite() {
            return Err(Error::invalid("b", "must be finite"));
        }
        Ok(Self { w, b })
    }

    /// Packs the parameters as a single row `[w…, b]`.
    pub fn to_row(&self) -> Result<DenseMatrix> {
        let mut data = self.w.clone();
        data.push(self.b);
        DenseMatrix::from_vec(1, data.len(), data)
    }

    /// Inverse of [`AttentionParams::to_row`]; `expected_len` is `m·n` for the
    /// matrices the parameters will score.
    pub fn from_row(row: &DenseMatrix, expected_len: usize) -> Result<Self> {
        if row.rows() != 1 || row.cols() != expected_len + 1 {
            return Err(Error::LengthMismatch {
                what: "attention parameters (1 x (m*n + 1))",
                expected: expected_len + 1,
                actual: row.len(),
            });
        }
        let mut w = row.flatten();
        let b = w.pop().unwrap_or(0.0);
        Ok(Self { w, b })
    }

    fn check_len(&self, m: &DenseMatrix) -> Result<()> {
        if self.w.len() != m.len() {
            return Err(Error::LengthMismatch {
                what: "attention weight vector",
                expected: m.len(),
                actual: self.w.len(),
            });
        }
        Ok(())
    }
}

/// Output of [`fuse`].
#[derive(Debug, Clone, PartialEq)]
pub struct FusionResult {
    /// `(s_L, s_I, s_T)`
    pub scores: [f64; 3],
    /// `(α_L, α_I, α_T)`
    pub weights: [f64; 3],
    pub r: DenseMatrix,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `w · vec(m) + b`.
pub fn score(m: &DenseMatrix, p: &AttentionParams) -> Result<f64> {
    p.check_len(m)?;
    Ok(dot(&p.w, m.as_slice()) + p.b)
}

/// Max-shifted softmax over three scores.
pub fn attention_weights(s_l: f64, s_i: f64, s_t: f64) -> Result<[f64; 3]> {
    let scores = [s_l, s_i, s_t];
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::invalid("score", format!("must be finite, got {bad}")));
    }
    let max = s_l.max(s_i).max(s_t);
    let e = scores.map(|s| (s - max).exp());
    let total = e[0] + e[1] + e[2];
    Ok(e.map(|x| x / total))
}

/// Scores, weights and the aggregated representation `R`.
pub fn fuse(l: &DenseMatrix, s_i: &DenseMatrix, s_t: &DenseMatrix, p: &AttentionParams) -> Result<FusionResult> {
    l.ensure_same_shape(s_i)?;
    l.ensure_same_shape(s_t)?;
    let scores = [score(l, p)?, score(s_i, p)?, score(s_t, p)?];
    let weights = attention_weights(scores[0], scores[1], scores[2])?;
    let r = combine(l, s_i, s_t, weights);
    Ok(FusionResult { scores, weights, r })
}

/// `α_L L + α_I S_I + α_T S_T` with weights supplied by the caller instead of
/// computed from scores. Test hook only, not part of the stable API; `scores`
/// in the result are zeros.
#[doc(hidden)]
pub fn fuse_with_weights(
    l: &DenseMatrix,
    s_i: &DenseMatrix,
    s_t: &DenseMatrix,
    weights: [f64; 3],
) -> Result<FusionResult> {
    l.ensure_same_shape(s_i)?;
    l.ensure_same_shape(s_t)?;
    Ok(FusionResult {
        scores: [0.0; 3],
        weights,
        r: combine(l, s_i, s_t, weights),
    })
}

/// Recombines components with fixed weights. Evaluation order matches
/// [`fuse`] exactly, so stored weights reproduce a stored `R` bitwise.
pub fn combine(l: &DenseMatrix, s_i: &DenseMatrix, s_t: &DenseMatrix, weights: [f64; 3]) -> DenseMatrix {
    let [a_l, a_i, a_t] = weights;
    let data = l
        .as_slice()
        .iter()
        .zip(s_i.as_slice())
        .zip(s_t.as_slice())
        .map(|((&l, &si), &st)| a_l * l + a_i * si + a_t * st)
        .collect();
    DenseMatrix::from_parts(l.rows(), l.cols(), data)
}

/// Gradient of a loss with respect to `(w, b)`, given `upstream = ∂loss/∂R`.
/// The components are treated as constants.
///
/// With `g_k = ⟨upstream, C_k⟩` and `ḡ = Σ α_k g_k`, the chain rule through
/// the softmax gives `∂loss/∂s_k = α_k (g_k − ḡ)`, hence
/// `∂loss/∂w = Σ_k ∂loss/∂s_k · vec(C_k)` and `∂loss/∂b = Σ_k ∂loss/∂s_k`,
/// which vanishes up to rounding since a common shift of the scores does not
/// change the weights.
pub fn fusion_gradients(
    l: &DenseMatrix,
    s_i: &DenseMatrix,
    s_t: &DenseMatrix,
    p: &AttentionParams,
    upstream: &DenseMatrix,
) -> Result<(Vec<f64>, f64)> {
    let fused = fuse(l, s_i, s_t, p)?;
    l.ensure_same_shape(upstream)?;
    let comps = [l, s_i, s_t];
    let g = comps.map(|c| dot(upstream.as_slice(), c.as_slice()));
    let alpha = fused.weights;
    // g_k − ḡ written as Σ_j α_j (g_k − g_j), exact zero when all g_k agree.
    let d_score = [0, 1, 2].map(|k| alpha[k] * (0..3).map(|j| alpha[j] * (g[k] - g[j])).sum::<f64>());

    let grad_w = (0..l.len())
        .map(|j| d_score[0] * l.as_slice()[j] + d_score[1] * s_i.as_slice()[j] + d_score[2] * s_t.as_slice()[j])
        .collect();
    let grad_b = d_score[0] + d_score[1] + d_score[2];
    Ok((grad_w, grad_b))
}
