mod common;

use common::{frob, soft, TestRng};
use proptest::prelude::*;
use rdecomp::decompose::{lmr_step, JointState, SingleState};
use rdecomp::{joint_decompose, joint_step, lmr_decompose, residuals, svd, DenseMatrix, SolverConfig};

/// Independent evaluation of one joint iteration: scalar soft-threshold,
/// SVT assembled from the library SVD's factors by an explicit triple loop.
fn reference_step(s: &JointState, i: &DenseMatrix, t: &DenseMatrix, cfg: &SolverConfig) -> JointState {
    let (m, n) = i.shape();
    let mu = cfg.mu;
    let thr = cfg.lambda / mu;
    let s_i = DenseMatrix::from_fn(m, n, |r, c| {
        soft(i.get(r, c) - s.l.get(r, c) + s.z_i.get(r, c) / mu, thr)
    })
    .unwrap();
    let s_t = DenseMatrix::from_fn(m, n, |r, c| {
        soft(t.get(r, c) - s.l.get(r, c) + s.z_t.get(r, c) / mu, thr)
    })
    .unwrap();
    let a = DenseMatrix::from_fn(m, n, |r, c| {
        0.5 * ((i.get(r, c) - s_i.get(r, c)) + (t.get(r, c) - s_t.get(r, c)) + (s.z_i.get(r, c) + s.z_t.get(r, c)) / mu)
    })
    .unwrap();
    let f = svd(&a).unwrap();
    let tau = 1.0 / (2.0 * mu);
    let shrunk: Vec<f64> = f.sigma.iter().map(|&x| (x - tau).max(0.0)).collect();
    let l = DenseMatrix::from_fn(m, n, |r, c| {
        (0..shrunk.len())
            .map(|k| f.u.get(r, k) * shrunk[k] * f.vt.get(k, c))
            .sum()
    })
    .unwrap();
    let z_i = DenseMatrix::from_fn(m, n, |r, c| {
        s.z_i.get(r, c) + mu * (i.get(r, c) - l.get(r, c) - s_i.get(r, c))
    })
    .unwrap();
    let z_t = DenseMatrix::from_fn(m, n, |r, c| {
        s.z_t.get(r, c) + mu * (t.get(r, c) - l.get(r, c) - s_t.get(r, c))
    })
    .unwrap();
    JointState { l, s_i, s_t, z_i, z_t }
}

fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn random_state(rng: &mut TestRng, m: usize, n: usize) -> JointState {
    JointState {
        l: rng.matrix(m, n, 1.0),
        s_i: rng.matrix(m, n, 1.0),
        s_t: rng.matrix(m, n, 1.0),
        z_i: rng.matrix(m, n, 0.5),
        z_t: rng.matrix(m, n, 0.5),
    }
}

#[test]
fn step_agrees_with_reference() {
    let mut rng = TestRng::new(3);
    let cfg = SolverConfig::default().with_lambda(0.3);
    for _ in 0..10 {
        let (m, n) = (2 + rng.below(14), 2 + rng.below(14));
        let (i, t) = (rng.matrix(m, n, 2.0), rng.matrix(m, n, 2.0));
        let state = random_state(&mut rng, m, n);
        let got = joint_step(&state, &i, &t, &cfg).unwrap();
        let want = reference_step(&state, &i, &t, &cfg);
        for (g, w) in [
            (&got.l, &want.l),
            (&got.s_i, &want.s_i),
            (&got.s_t, &want.s_t),
            (&got.z_i, &want.z_i),
            (&got.z_t, &want.z_t),
        ] {
            assert!(max_abs_diff(g, w) < 1e-10, "diff {}", max_abs_diff(g, w));
        }
    }
}

#[test]
fn sparse_update_is_bitwise_soft_threshold() {
    let mut rng = TestRng::new(9);
    let cfg = SolverConfig::default();
    let (i, t) = (rng.matrix(7, 9, 3.0), rng.matrix(7, 9, 3.0));
    let state = random_state(&mut rng, 7, 9);
    let next = joint_step(&state, &i, &t, &cfg).unwrap();
    for k in 0..i.len() {
        let want = soft(
            i.as_slice()[k] - state.l.as_slice()[k] + state.z_i.as_slice()[k] / cfg.mu,
            0.1,
        );
        assert_eq!(next.s_i.as_slice()[k], want);
    }
}

#[test]
fn residuals_match_independent_norm() {
    let mut rng = TestRng::new(21);
    let (i, t) = (rng.matrix(6, 11, 1.0), rng.matrix(6, 11, 1.0));
    let state = random_state(&mut rng, 6, 11);
    let (r_i, r_t) = residuals(&state, &i, &t).unwrap();
    let e_i: Vec<f64> = (0..i.len())
        .map(|k| i.as_slice()[k] - state.l.as_slice()[k] - state.s_i.as_slice()[k])
        .collect();
    let e_t: Vec<f64> = (0..t.len())
        .map(|k| t.as_slice()[k] - state.l.as_slice()[k] - state.s_t.as_slice()[k])
        .collect();
    assert!((r_i - frob(&e_i)).abs() <= 1e-12 * frob(&e_i));
    assert!((r_t - frob(&e_t)).abs() <= 1e-12 * frob(&e_t));
}

#[test]
fn single_solver_matches_joint_on_duplicated_input() {
    let mut rng = TestRng::new(77);
    let cfg = SolverConfig::default().with_lambda(0.4);
    let tau = cfg.joint_svt_threshold();
    for _ in 0..5 {
        let (m, n) = (3 + rng.below(10), 3 + rng.below(10));
        let x = rng.matrix(m, n, 2.0);
        let mut joint = JointState::zeros(m, n).unwrap();
        let mut single = SingleState::zeros(m, n).unwrap();
        for _ in 0..60 {
            joint = joint_step(&joint, &x, &x, &cfg).unwrap();
            single = lmr_step(&single, &x, &cfg, tau).unwrap();
            assert_eq!(joint.l, single.l);
            assert_eq!(joint.s_i, single.s);
            assert_eq!(joint.z_i, single.z);
        }
    }
}

#[test]
fn full_runs_match_on_duplicated_input() {
    let x = TestRng::new(5).matrix(12, 10, 1.5);
    let cfg = SolverConfig::default().with_lambda(0.5).with_max_iters(400);
    let joint = joint_decompose(&x, &x, &cfg).unwrap();
    let single = lmr_decompose(&x, &cfg, cfg.joint_svt_threshold()).unwrap();
    assert_eq!(joint.iterations_run, single.iterations_run);
    assert_eq!(joint.l, single.l);
    assert_eq!(joint.s_i, single.s);
    let hist: Vec<f64> = joint.residual_history.iter().map(|r| r.0).collect();
    assert_eq!(hist, single.residual_history);
}

#[test]
fn zero_input_stops_after_one_iteration() {
    let z = DenseMatrix::zeros(5, 4).unwrap();
    let dec = joint_decompose(&z, &z, &SolverConfig::default()).unwrap();
    assert!(dec.converged);
    assert_eq!(dec.iterations_run, 1);
    assert!(dec.l.is_zero() && dec.s_i.is_zero() && dec.s_t.is_zero());
}

#[test]
fn runs_are_deterministic() {
    let mut rng = TestRng::new(8);
    let (i, t) = (rng.matrix(10, 8, 1.0), rng.matrix(10, 8, 1.0));
    let cfg = SolverConfig::default().with_max_iters(50);
    let a = joint_decompose(&i, &t, &cfg).unwrap();
    let b = joint_decompose(&i, &t, &cfg).unwrap();
    assert_eq!(a.l, b.l);
    assert_eq!(a.s_i, b.s_i);
    assert_eq!(a.residual_history, b.residual_history);
}

#[test]
fn larger_lambda_never_grows_sparse_support() {
    let mut rng = TestRng::new(13);
    let (i, t) = (rng.matrix(9, 9, 3.0), rng.matrix(9, 9, 3.0));
    let state = JointState::zeros(9, 9).unwrap();
    let mut prev = usize::MAX;
    for lambda in [0.01, 0.5, 1.0, 5.0, 20.0, 40.0] {
        let next = joint_step(&state, &i, &t, &SolverConfig::default().with_lambda(lambda)).unwrap();
        let nnz = next.s_i.count_nonzero() + next.s_t.count_nonzero();
        assert!(nnz <= prev, "support grew at lambda {lambda}");
        prev = nnz;
    }
    assert_eq!(prev, 0);
}

#[test]
fn invalid_configuration_is_rejected() {
    let x = DenseMatrix::zeros(2, 2).unwrap();
    for cfg in [
        SolverConfig::default().with_lambda(-1.0),
        SolverConfig::default().with_mu(0.0),
        SolverConfig::default().with_max_iters(0),
        SolverConfig::default().with_epsilon(f64::NAN),
    ] {
        assert!(joint_decompose(&x, &x, &cfg).is_err());
    }
    let y = DenseMatrix::zeros(2, 3).unwrap();
    assert!(joint_decompose(&x, &y, &SolverConfig::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn swapping_inputs_swaps_sparse_parts(seed in any::<u64>(), lambda in 0.05f64..2.0) {
        let mut rng = TestRng::new(seed);
        let (m, n) = (1 + rng.below(10), 1 + rng.below(10));
        let (i, t) = (rng.matrix(m, n, 2.0), rng.matrix(m, n, 2.0));
        let cfg = SolverConfig::default().with_lambda(lambda).with_max_iters(30);
        let a = joint_decompose(&i, &t, &cfg).unwrap();
        let b = joint_decompose(&t, &i, &cfg).unwrap();
        prop_assert_eq!(&a.l, &b.l);
        prop_assert_eq!(&a.s_i, &b.s_t);
        prop_assert_eq!(&a.s_t, &b.s_i);
    }

    #[test]
    fn identical_inputs_give_identical_sparse_parts(seed in any::<u64>()) {
        let mut rng = TestRng::new(seed);
        let (m, n) = (1 + rng.below(12), 1 + rng.below(12));
        let x = rng.matrix(m, n, 2.0);
        let dec = joint_decompose(&x, &x, &SolverConfig::default().with_max_iters(40)).unwrap();
        prop_assert_eq!(&dec.s_i, &dec.s_t);
        prop_assert_eq!(&dec.z_i, &dec.z_t);
    }

    #[test]
    fn residual_history_is_finite(seed in any::<u64>()) {
        let mut rng = TestRng::new(seed);
        let (i, t) = (rng.matrix(6, 5, 10.0), rng.matrix(6, 5, 10.0));
        let dec = joint_decompose(&i, &t, &SolverConfig::default().with_max_iters(25)).unwrap();
        prop_assert!(dec.residual_history.iter().all(|r| r.0.is_finite() && r.1.is_finite()));
        prop_assert_eq!(dec.residual_history.len(), dec.iterations_run);
    }
}
