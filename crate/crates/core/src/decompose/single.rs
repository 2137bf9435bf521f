use crate::decompose::joint::residual_norm;
use crate::decompose::SolverConfig;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::prox::{shrink, svt};

/// Iterates of the single-matrix solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleState {
    pub l: DenseMatrix,
    pub s: DenseMatrix,
    pub z: DenseMatrix,
}

impl SingleState {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        let z = DenseMatrix::zeros(rows, cols)?;
        Ok(Self {
            l: z.clone(),
            s: z.clone(),
            z,
        })
    }
}

/// Output of [`lmr_decompose`].
#[derive(Debug, Clone)]
pub struct SingleDecomposition {
    pub l: DenseMatrix,
    pub s: DenseMatrix,
    pub z: DenseMatrix,
    pub iterations_run: usize,
    pub converged: bool,
    /// `‖X − L − S‖_F` after every iteration.
    pub residual_history: Vec<f64>,
}

impl SingleDecomposition {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }
}

fn check_tau(svt_tau: f64) -> Result<()> {
    if svt_tau > 0.0 && svt_tau.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "svt_tau",
            format!("must be finite and positive, got {svt_tau}"),
        ))
    }
}

/// One iteration of the single-matrix solver:
///
/// ```text
/// S ← soft(X − L + Z/μ, λ/μ)
/// L ← svt((X − S) + Z/μ, svt_tau)
/// Z ← Z + μ(X − L − S)
/// ```
pub fn lmr_step(state: &SingleState, x: &DenseMatrix, cfg: &SolverConfig, svt_tau: f64) -> Result<SingleState> {
    cfg.validate()?;
    check_tau(svt_tau)?;
    for m in [&state.l, &state.s, &state.z] {
        x.ensure_same_shape(m)?;
    }
    step_unchecked(state, x, cfg, svt_tau)
}

fn step_unchecked(state: &SingleState, x: &DenseMatrix, cfg: &SolverConfig, svt_tau: f64) -> Result<SingleState> {
    let (rows, cols) = x.shape();
    let mu = cfg.mu;
    let thr = cfg.sparse_threshold();
    let xv = x.as_slice();
    let (l, z) = (state.l.as_slice(), state.z.as_slice());

    let n = xv.len();
    let mut s = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    for k in 0..n {
        let sk = shrink((xv[k] - l[k]) + z[k] / mu, thr);
        s.push(sk);
        a.push((xv[k] - sk) + z[k] / mu);
    }

    let l_new = svt(&DenseMatrix::from_parts(rows, cols, a), svt_tau)?;
    let ln = l_new.as_slice();
    let z_new = (0..n).map(|k| z[k] + mu * ((xv[k] - ln[k]) - s[k])).collect();

    Ok(SingleState {
        l: l_new,
        s: DenseMatrix::from_parts(rows, cols, s),
        z: DenseMatrix::from_parts(rows, cols, z_new),
    })
}

/// Robust PCA split `X = L + S` of a single matrix. `svt_tau` is the singular
/// value threshold; the conventional choice is
/// [`SolverConfig::single_svt_threshold`] (`1/μ`).
pub fn lmr_decompose(x: &DenseMatrix, cfg: &SolverConfig, svt_tau: f64) -> Result<SingleDecomposition> {
    lmr_decompose_observed(x, cfg, svt_tau, |_, _, _| {})
}

pub fn lmr_decompose_observed(
    x: &DenseMatrix,
    cfg: &SolverConfig,
    svt_tau: f64,
    mut observe: impl FnMut(usize, &SingleState, f64),
) -> Result<SingleDecomposition> {
    cfg.validate()?;
    check_tau(svt_tau)?;
    let (rows, cols) = x.shape();
    let mut state = SingleState::zeros(rows, cols)?;
    let mut history = Vec::new();
    let mut converged = false;
    for iteration in 1..=cfg.max_iters {
        state = step_unchecked(&state, x, cfg, svt_tau).map_err(|e| Error::AtIteration {
            iteration,
            source: Box::new(e),
        })?;
        let r = residual_norm(x, &state.l, &state.s);
        history.push(r);
        observe(iteration, &state, r);
        if r < cfg.epsilon {
            converged = true;
            break;
        }
    }
    Ok(SingleDecomposition {
        l: state.l,
        s: state.s,
        z: state.z,
        iterations_run: history.len(),
        converged,
        residual_history: history,
    })
}
