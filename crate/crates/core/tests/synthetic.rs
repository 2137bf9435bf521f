mod common;

use common::{independent_metrics, TestRng};
use proptest::prelude::*;
use rdecomp::synth::{compare, numerical_rank, Components};
use rdecomp::{generate, joint_decompose, recovery_metrics, DenseMatrix, SolverConfig, SyntheticSpec};

#[test]
fn acceptance_instance_has_requested_structure() {
    let spec = SyntheticSpec::acceptance();
    let inst = generate(&spec).unwrap();
    assert_eq!(inst.i.shape(), (64, 64));
    assert_eq!(spec.support_size(), 205);
    assert_eq!(inst.s_i0.count_nonzero(), 205);
    assert_eq!(inst.s_t0.count_nonzero(), 205);
    assert!(inst.s_i0.as_slice().iter().all(|&x| x == 0.0 || x.abs() == 5.0));
    assert_eq!(numerical_rank(&inst.l0).unwrap(), 4);
    for k in 0..inst.i.len() {
        assert_eq!(inst.i.as_slice()[k], inst.l0.as_slice()[k] + inst.s_i0.as_slice()[k]);
        assert_eq!(inst.t.as_slice()[k], inst.l0.as_slice()[k] + inst.s_t0.as_slice()[k]);
    }
    assert_ne!(inst.s_i0, inst.s_t0);
}

#[test]
fn generation_is_seed_deterministic() {
    let spec = SyntheticSpec::acceptance();
    assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    assert_ne!(
        generate(&spec).unwrap(),
        generate(&SyntheticSpec { seed: 43, ..spec }).unwrap()
    );
}

#[test]
fn invalid_specs_are_rejected() {
    let base = SyntheticSpec::acceptance();
    assert!(generate(&SyntheticSpec { rank: 65, ..base }).is_err());
    assert!(generate(&SyntheticSpec { density: 1.5, ..base }).is_err());
    assert!(generate(&SyntheticSpec { rows: 0, ..base }).is_err());
    assert!(generate(&SyntheticSpec {
        spike_scale: -1.0,
        ..base
    })
    .is_err());
}

#[test]
fn truth_scores_perfectly_against_itself() {
    let inst = generate(&SyntheticSpec::acceptance()).unwrap();
    let m = compare(inst.truth(), inst.truth()).unwrap();
    assert_eq!((m.l_rel_error, m.s_i_rel_error, m.s_t_rel_error), (0.0, 0.0, 0.0));
    assert_eq!(m.l_rank, 4);
    assert_eq!(m.support.f1, 1.0);
}

#[test]
fn metrics_agree_with_independent_computation() {
    let spec = SyntheticSpec {
        rows: 24,
        cols: 20,
        rank: 3,
        density: 0.08,
        ..SyntheticSpec::acceptance()
    };
    let inst = generate(&spec).unwrap();
    for lambda in [0.1, 0.3, 1.0] {
        let cfg = SolverConfig::default().with_lambda(lambda).with_max_iters(400);
        let dec = joint_decompose(&inst.i, &inst.t, &cfg).unwrap();
        let m = recovery_metrics(&dec, &inst).unwrap();
        let (l, si, st, rank, f1) =
            independent_metrics([&dec.l, &dec.s_i, &dec.s_t], [&inst.l0, &inst.s_i0, &inst.s_t0]);
        assert!(
            (m.l_rel_error - l).abs() <= 1e-12 * l.max(1e-300) + 1e-15,
            "lambda {lambda}"
        );
        assert!((m.s_i_rel_error - si).abs() <= 1e-12 * si + 1e-15);
        assert!((m.s_t_rel_error - st).abs() <= 1e-12 * st + 1e-15);
        assert_eq!(m.l_rank, rank, "lambda {lambda}");
        assert!((m.support.f1 - f1).abs() <= 1e-15);
    }
}

#[test]
fn empty_predictions_are_vacuously_precise() {
    let z = DenseMatrix::zeros(3, 3).unwrap();
    let mut spike = z.flatten();
    spike[4] = 2.0;
    let s = DenseMatrix::from_vec(3, 3, spike).unwrap();
    let m = compare(
        Components {
            l: &z,
            s_i: &z,
            s_t: &z,
        },
        Components {
            l: &z,
            s_i: &s,
            s_t: &s,
        },
    )
    .unwrap();
    assert_eq!(m.support.precision, 1.0);
    assert_eq!(m.support.recall, 0.0);
    assert_eq!(m.support.f1, 0.0);
    assert_eq!(m.l_rank, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn instances_respect_their_spec(seed in any::<u64>(), density in 0.0f64..0.3) {
        let mut rng = TestRng::new(seed);
        let (rows, cols) = (2 + rng.below(20), 2 + rng.below(20));
        let rank = 1 + rng.below(rows.min(cols));
        let spec = SyntheticSpec { rows, cols, rank, density, low_rank_scale: 1.0, spike_scale: 2.0, seed };
        let inst = generate(&spec).unwrap();
        prop_assert_eq!(inst.s_i0.count_nonzero(), spec.support_size());
        prop_assert_eq!(inst.s_t0.count_nonzero(), spec.support_size());
        prop_assert!(numerical_rank(&inst.l0).unwrap() <= rank);
    }
}

#[test]
fn degenerate_specs() {
    let base = SyntheticSpec::acceptance();
    let empty = generate(&SyntheticSpec {
        rank: 0,
        density: 0.0,
        ..base
    })
    .unwrap();
    assert!(empty.i.is_zero() && empty.t.is_zero() && empty.l0.is_zero());

    let dense = generate(&SyntheticSpec {
        rank: 2,
        density: 0.0,
        ..base
    })
    .unwrap();
    assert_eq!(dense.i, dense.l0);
    assert_eq!(dense.t, dense.l0);
    assert_eq!(numerical_rank(&dense.l0).unwrap(), 2);
}

#[test]
fn generic_seeds_reach_full_rank() {
    for seed in 0..10 {
        let spec = SyntheticSpec {
            rows: 20,
            cols: 15,
            rank: 5,
            seed,
            ..SyntheticSpec::acceptance()
        };
        let sigma = rdecomp::svd(&generate(&spec).unwrap().l0).unwrap().sigma;
        assert_eq!(sigma.iter().filter(|&&s| s > 1e-9 * sigma[0]).count(), 5, "seed {seed}");
    }
}

#[test]
fn zero_estimate_scores_unit_error_and_no_recall() {
    let inst = generate(&SyntheticSpec::acceptance()).unwrap();
    let z = DenseMatrix::zeros(64, 64).unwrap();
    let m = compare(
        Components {
            l: &z,
            s_i: &z,
            s_t: &z,
        },
        inst.truth(),
    )
    .unwrap();
    assert_eq!((m.l_rel_error, m.s_i_rel_error, m.s_t_rel_error), (1.0, 1.0, 1.0));
    assert_eq!(m.support.recall, 0.0);
}
