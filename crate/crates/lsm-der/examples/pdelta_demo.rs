//! The parallel-perceptron baseline: the margin-stabilized p-delta rule on
//! a separable toy problem, the five-case update in action, and weight
//! checkpointing.
//!
//! Run with: cargo run --release -p lsm-der --example pdelta_demo

use lsm_der::dataset::SampleSet;
use lsm_der::perceptron::{
    pdelta_train, pdelta_update_with_output, BankSquash, PDeltaParams, PerceptronBank,
    PprOutputMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lsm_der::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    // The five-case rule on one sample, shown explicitly.
    let mut bank = PerceptronBank::random(3, 2, &mut rng)?;
    let x_aug = [0.9, -0.4, 1.0];
    let params = PDeltaParams {
        eta: 0.05,
        epsilon: 0.1,
        gamma: 0.2,
        mu: 1.0,
    };
    let o_hat = bank.output(&x_aug, &BankSquash::ClippedLinear { rho: 3.0 });
    let cases = pdelta_update_with_output(&mut bank, &x_aug, o_hat, 1.0, &params);
    println!("one update with output {o_hat:+.2} against target +1:");
    for (i, case) in cases.iter().enumerate() {
        let norm: f64 = bank.weight_row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
        println!("  perceptron {i}: {case:?}, |w| = {norm:.12}");
    }

    // Train a single perceptron on a linearly separable problem.
    let mut data = SampleSet::new(2);
    for _ in 0..60 {
        let a = rng.gen::<f64>() * 2.0 - 1.0;
        let b = rng.gen::<f64>() * 2.0 - 1.0;
        if (a - b).abs() < 0.1 {
            continue;
        }
        data.push(&[a, b], if a > b { 1.0 } else { 0.0 })?;
    }
    let mut bank = PerceptronBank::random(1, 2, &mut rng)?;
    let mode = PprOutputMode::Vote(BankSquash::SignThreshold);
    let train_params = PDeltaParams {
        eta: 0.05,
        epsilon: 0.0,
        gamma: 0.05,
        mu: 1.0,
    };
    let trace = pdelta_train(&mut bank, &data, &train_params, 200, &mode)?;
    println!(
        "separable toy set: initial mae {:.3}, best {:.3} at epoch {}",
        trace.initial_mae, trace.best_mae, trace.best_epoch
    );

    let mut buf = Vec::new();
    bank.write_text(&mut buf)?;
    println!("--- weight file ---");
    print!("{}", String::from_utf8_lossy(&buf));
    Ok(())
}
