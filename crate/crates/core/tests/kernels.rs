mod common;

use common::{frob, frob_diff, matmul, symmetric_eigenvalues, TestRng};
use proptest::prelude::*;
use rdecomp::{flatten, reshape, soft_threshold, svd, svt, DenseMatrix};

fn arb_matrix(max_dim: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_dim, 1..=max_dim, any::<u64>()).prop_map(|(m, n, seed)| TestRng::new(seed).matrix(m, n, 3.0))
}

fn check_svd(a: &DenseMatrix) {
    let r = svd(a).unwrap();
    let k = a.rows().min(a.cols());
    assert!(r.sigma.windows(2).all(|w| w[0] >= w[1]));
    assert!(r.sigma.iter().all(|&s| s >= 0.0));
    let scaled = DenseMatrix::from_fn(a.rows(), k, |i, j| r.u.get(i, j) * r.sigma[j]).unwrap();
    let recon = matmul(&scaled, &r.vt);
    let bound = 1e-10 * frob(a.as_slice()).max(1.0);
    assert!(
        frob_diff(&recon, a) <= bound,
        "reconstruction {} > {bound}",
        frob_diff(&recon, a)
    );
    let eye = DenseMatrix::identity(k).unwrap();
    assert!(frob_diff(&matmul(&r.u.transpose(), &r.u), &eye) <= 1e-10);
    assert!(frob_diff(&matmul(&r.vt, &r.vt.transpose()), &eye) <= 1e-10);
}

#[test]
fn svd_invariants_on_large_matrices() {
    let mut rng = TestRng::new(11);
    for &(m, n) in &[(256, 256), (256, 97), (61, 256), (128, 128)] {
        check_svd(&rng.matrix(m, n, 1.0));
    }
}

#[test]
fn svd_random_8x5_reconstructs() {
    check_svd(&TestRng::new(85).matrix(8, 5, 1.0));
}

#[test]
fn singular_values_match_gram_eigenvalues() {
    let mut rng = TestRng::new(5);
    for _ in 0..10 {
        let (m, n) = (3 + rng.below(12), 3 + rng.below(12));
        let a = rng.matrix(m, n, 2.0);
        let sigma = svd(&a).unwrap().sigma;
        let gram = if m >= n {
            matmul(&a.transpose(), &a)
        } else {
            matmul(&a, &a.transpose())
        };
        let ev = symmetric_eigenvalues(&gram);
        for (s, e) in sigma.iter().zip(&ev) {
            assert!((s - e.max(0.0).sqrt()).abs() < 1e-9, "{s} vs {}", e.sqrt());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_invariants(a in arb_matrix(40)) {
        check_svd(&a);
    }

    #[test]
    fn soft_threshold_is_a_contraction(seed in any::<u64>(), tau in 0.0f64..3.0) {
        let mut rng = TestRng::new(seed);
        let (m, n) = (1 + rng.below(20), 1 + rng.below(20));
        let a = rng.matrix(m, n, 4.0);
        let b = rng.matrix(m, n, 4.0);
        let sa = soft_threshold(&a, tau).unwrap();
        let sb = soft_threshold(&b, tau).unwrap();
        prop_assert!(frob_diff(&sa, &sb) <= frob_diff(&a, &b) * (1.0 + 1e-15));
    }

    #[test]
    fn soft_threshold_matches_closed_form(a in arb_matrix(12), tau in 0.0f64..2.0) {
        let s = soft_threshold(&a, tau).unwrap();
        for (x, y) in a.as_slice().iter().zip(s.as_slice()) {
            prop_assert_eq!(*y, common::soft(*x, tau));
        }
    }

    #[test]
    fn svt_shrinks_singular_values(a in arb_matrix(24), frac in 0.0f64..1.2) {
        let sigma = svd(&a).unwrap().sigma;
        let tau = frac * sigma[0];
        let out = svt(&a, tau).unwrap();
        let out_sigma = svd(&out).unwrap().sigma;
        let rank_in = sigma.iter().filter(|&&s| s > 1e-9 * sigma[0].max(1.0)).count();
        let rank_out = out_sigma.iter().filter(|&&s| s > 1e-9 * sigma[0].max(1.0)).count();
        prop_assert!(rank_out <= rank_in);
        for (s, o) in sigma.iter().zip(&out_sigma) {
            prop_assert!(((s - tau).max(0.0) - o).abs() <= 1e-9, "{} vs {}", (s - tau).max(0.0), o);
        }
    }

    #[test]
    fn flatten_reshape_identity(a in arb_matrix(30)) {
        let back = reshape(flatten(&a), a.rows(), a.cols()).unwrap();
        prop_assert_eq!(back, a);
    }
}
