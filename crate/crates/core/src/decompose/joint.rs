use crate::decompose::SolverConfig;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::prox::{shrink, svt};

/// Iterates of the joint solver.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub l: DenseMatrix,
    pub s_i: DenseMatrix,
    pub s_t: DenseMatrix,
    pub z_i: DenseMatrix,
    pub z_t: DenseMatrix,
}

impl JointState {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        let z = DenseMatrix::zeros(rows, cols)?;
        Ok(Self {
            l: z.clone(),
            s_i: z.clone(),
            s_t: z.clone(),
            z_i: z.clone(),
            z_t: z,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.l.shape()
    }

    fn ensure_shape(&self, shape: (usize, usize)) -> Result<()> {
        for m in [&self.l, &self.s_i, &self.s_t, &self.z_i, &self.z_t] {
            if m.shape() != shape {
                return Err(Error::ShapeMismatch {
                    left: m.shape(),
                    right: shape,
                });
            }
        }
        Ok(())
    }
}

/// Output of [`joint_decompose`].
#[derive(Debug, Clone)]
pub struct JointDecomposition {
    pub l: DenseMatrix,
    pub s_i: DenseMatrix,
    pub s_t: DenseMatrix,
    pub z_i: DenseMatrix,
    pub z_t: DenseMatrix,
    pub iterations_run: usize,
    pub converged: bool,
    /// `(‖I − L − S_I‖_F, ‖T − L − S_T‖_F)` after every iteration.
    pub residual_history: Vec<(f64, f64)>,
}

impl JointDecomposition {
    pub fn final_residuals(&self) -> (f64, f64) {
        self.residual_history.last().copied().unwrap_or((0.0, 0.0))
    }

    fn from_state(state: JointState, converged: bool, residual_history: Vec<(f64, f64)>) -> Self {
        Self {
            l: state.l,
            s_i: state.s_i,
            s_t: state.s_t,
            z_i: state.z_i,
            z_t: state.z_t,
            iterations_run: residual_history.len(),
            converged,
            residual_history,
        }
    }
}

/// `(‖I − L − S_I‖_F, ‖T − L − S_T‖_F)`.
pub fn residuals(state: &JointState, i: &DenseMatrix, t: &DenseMatrix) -> Result<(f64, f64)> {
    i.ensure_same_shape(t)?;
    state.ensure_shape(i.shape())?;
    Ok((
        residual_norm(i, &state.l, &state.s_i),
        residual_norm(t, &state.l, &state.s_t),
    ))
}

/// `‖x − l − s‖_F` with the same operation order as the multiplier update.
pub(crate) fn residual_norm(x: &DenseMatrix, l: &DenseMatrix, s: &DenseMatrix) -> f64 {
    x.as_slice()
        .iter()
        .zip(l.as_slice())
        .zip(s.as_slice())
        .map(|((&x, &l), &s)| {
            let r = (x - l) - s;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// One iteration of the joint solver:
///
/// ```text
/// S_I ← soft(I − L + Z_I/μ, λ/μ)
/// S_T ← soft(T − L + Z_T/μ, λ/μ)
/// A   ← ½((I − S_I) + (T − S_T) + (Z_I + Z_T)/μ)
/// L   ← svt(A, 1/(2μ))
/// Z_I ← Z_I + μ(I − L − S_I)
/// Z_T ← Z_T + μ(T − L − S_T)
/// ```
pub fn joint_step(state: &JointState, i: &DenseMatrix, t: &DenseMatrix, cfg: &SolverConfig) -> Result<JointState> {
    cfg.validate()?;
    i.ensure_same_shape(t)?;
    state.ensure_shape(i.shape())?;
    step_unchecked(state, i, t, cfg)
}

fn step_unchecked(state: &JointState, i: &DenseMatrix, t: &DenseMatrix, cfg: &SolverConfig) -> Result<JointState> {
    let (rows, cols) = i.shape();
    let mu = cfg.mu;
    let thr = cfg.sparse_threshold();
    let (iv, tv) = (i.as_slice(), t.as_slice());
    let (l, z_i, z_t) = (state.l.as_slice(), state.z_i.as_slice(), state.z_t.as_slice());

    let n = iv.len();
    let mut s_i = Vec::with_capacity(n);
    let mut s_t = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    for k in 0..n {
        let si = shrink((iv[k] - l[k]) + z_i[k] / mu, thr);
        let st = shrink((tv[k] - l[k]) + z_t[k] / mu, thr);
        s_i.push(si);
        s_t.push(st);
        a.push(0.5 * (((iv[k] - si) + (tv[k] - st)) + (z_i[k] + z_t[k]) / mu));
    }

    let l_new = svt(&DenseMatrix::from_parts(rows, cols, a), cfg.joint_svt_threshold())?;
    let ln = l_new.as_slice();
    let mut z_i_new = Vec::with_capacity(n);
    let mut z_t_new = Vec::with_capacity(n);
    for k in 0..n {
        z_i_new.push(z_i[k] + mu * ((iv[k] - ln[k]) - s_i[k]));
        z_t_new.push(z_t[k] + mu * ((tv[k] - ln[k]) - s_t[k]));
    }

    Ok(JointState {
        l: l_new,
        s_i: DenseMatrix::from_parts(rows, cols, s_i),
        s_t: DenseMatrix::from_parts(rows, cols, s_t),
        z_i: DenseMatrix::from_parts(rows, cols, z_i_new),
        z_t: DenseMatrix::from_parts(rows, cols, z_t_new),
    })
}

/// Joint decomposition of two aligned, equally shaped matrices.
pub fn joint_decompose(i: &DenseMatrix, t: &DenseMatrix, cfg: &SolverConfig) -> Result<JointDecomposition> {
    joint_decompose_observed(i, t, cfg, |_, _, _| {})
}

/// [`joint_decompose`], calling `observe(iteration, state, residuals)` after
/// every iteration (1-based). The stopping rule is unaffected.
pub fn joint_decompose_observed(
    i: &DenseMatrix,
    t: &DenseMatrix,
    cfg: &SolverConfig,
    mut observe: impl FnMut(usize, &JointState, (f64, f64)),
) -> Result<JointDecomposition> {
    cfg.validate()?;
    i.ensure_same_shape(t)?;
    let (rows, cols) = i.shape();
    let mut state = JointState::zeros(rows, cols)?;
    let mut history = Vec::new();
    for iteration in 1..=cfg.max_iters {
        state = step_unchecked(&state, i, t, cfg).map_err(|e| Error::AtIteration {
            iteration,
            source: Box::new(e),
        })?;
        let r = (
            residual_norm(i, &state.l, &state.s_i),
            residual_norm(t, &state.l, &state.s_t),
        );
        history.push(r);
        observe(iteration, &state, r);
        if r.0.max(r.1) < cfg.epsilon {
            return Ok(JointDecomposition::from_state(state, true, history));
        }
    }
    Ok(JointDecomposition::from_state(state, false, history))
}
