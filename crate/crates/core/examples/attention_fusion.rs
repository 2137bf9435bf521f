//! Fuses decomposed components with attention weights and takes a few plain
//! gradient steps on the shared scoring parameters.
//!
//!     cargo run --release --example attention_fusion

use rdecomp::synth::{generate, SyntheticSpec};
use rdecomp::{fuse, fusion_gradients, joint_decompose, AttentionParams, SolverConfig};

fn main() -> Result<(), rdecomp::Error> {
    let inst = generate(&SyntheticSpec {
        rows: 16,
        cols: 16,
        rank: 2,
        ..SyntheticSpec::acceptance()
    })?;
    let dec = joint_decompose(&inst.i, &inst.t, &SolverConfig::default().with_lambda(0.25))?;

    let mut params = AttentionParams::zeros(16, 16);
    let f = fuse(&dec.l, &dec.s_i, &dec.s_t, &params)?;
    println!("uniform start: weights {:.4?}", f.weights);

    // Toy objective: pull R toward the shared part, loss = ½‖R − L‖².
    let rate = 2e-4;
    for step in 0..=40 {
        let f = fuse(&dec.l, &dec.s_i, &dec.s_t, &params)?;
        let upstream = rdecomp::sub(&f.r, &dec.l)?;
        if step % 10 == 0 {
            let loss = 0.5 * upstream.frobenius_norm().powi(2);
            println!("step {step:>2}: loss {loss:.4}  weights {:.4?}", f.weights);
        }
        let (gw, gb) = fusion_gradients(&dec.l, &dec.s_i, &dec.s_t, &params, &upstream)?;
        params.w.iter_mut().zip(&gw).for_each(|(w, g)| *w -= rate * g);
        params.b -= rate * gb;
    }
    Ok(())
}
