//! Residuals and recovery quality at a series of iteration checkpoints.
//!
//!     cargo run --release --example convergence_sweep [lambda]

use rdecomp::cli::sweep;
use rdecomp::synth::{compare, generate, Components, SyntheticSpec};
use rdecomp::SolverConfig;

fn main() -> Result<(), rdecomp::Error> {
    let lambda: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let inst = generate(&SyntheticSpec::acceptance())?;
    // A tolerance below round-off keeps the solver running to every checkpoint.
    let cfg = SolverConfig::default().with_lambda(lambda).with_epsilon(1e-13);

    println!("checkpoint  iters  max_residual  l_rel_error  support_f1");
    for row in sweep(&inst.i, &inst.t, &cfg, &[10, 50, 100, 500, 1000, 2000])? {
        let s = &row.state;
        let m = compare(
            Components {
                l: &s.l,
                s_i: &s.s_i,
                s_t: &s.s_t,
            },
            inst.truth(),
        )?;
        println!(
            "{:>10}  {:>5}  {:>12.3e}  {:>11.3e}  {:>10.4}",
            row.checkpoint,
            row.iterations_run,
            row.residuals.0.max(row.residuals.1),
            m.l_rel_error,
            m.support.f1
        );
    }
    Ok(())
}
