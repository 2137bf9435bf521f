//! Single-matrix robust PCA, and its exact agreement with the joint solver when
//! both inputs are the same matrix and the SVT threshold is halved.
//!
//!     cargo run --release --example lmr_baseline

use rdecomp::synth::{generate, SyntheticSpec};
use rdecomp::{joint_decompose, lmr_decompose, SolverConfig};

fn main() -> Result<(), rdecomp::Error> {
    let x = generate(&SyntheticSpec {
        rows: 40,
        cols: 30,
        rank: 2,
        ..SyntheticSpec::acceptance()
    })?
    .i;
    let cfg = SolverConfig::default().with_lambda(0.2);

    let plain = lmr_decompose(&x, &cfg, cfg.single_svt_threshold())?;
    println!(
        "svt_tau=1/mu:    {} iterations, residual {:.3e}",
        plain.iterations_run,
        plain.final_residual()
    );

    let half = lmr_decompose(&x, &cfg, cfg.joint_svt_threshold())?;
    let joint = joint_decompose(&x, &x, &cfg)?;
    println!(
        "svt_tau=1/(2mu): {} iterations, residual {:.3e}",
        half.iterations_run,
        half.final_residual()
    );
    println!("joint(X, X):     {} iterations", joint.iterations_run);
    println!(
        "L identical: {}  S identical: {}",
        half.l == joint.l,
        half.s == joint.s_i
    );
    Ok(())
}
