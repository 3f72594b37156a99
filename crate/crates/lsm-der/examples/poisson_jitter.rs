//! Spike-train generation: homogeneous and sinusoidally modulated Poisson
//! trains, Gaussian jitter, and the spike-train text format.
//!
//! Run with: cargo run --release -p lsm-der --example poisson_jitter

use lsm_der::spike::{jitter_train, modulated_poisson, poisson_train, write_trains, RateSignal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lsm_der::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let template = poisson_train(20.0, 0.5, &mut rng)?;
    println!("template: {} spikes at 20 Hz over 0.5 s", template.len());
    println!("  times: {:?}", template.times());

    let jittered = jitter_train(&template, 0.004, &mut rng)?;
    println!("jittered by 4 ms std: {} spikes survive the window", jittered.len());

    let signal = RateSignal {
        a_offset: 50.0,
        b_amplitude: 50.0,
        freq: 2.0,
        phase: 0.0,
    };
    let modulated = modulated_poisson(&signal, 0.5, &mut rng)?;
    println!(
        "modulated train (50 + 50 sin(2 pi 2 t)): {} spikes, trough near t = 0.375 s",
        modulated.len()
    );

    // The text format: header line with the duration, one line per train.
    let mut buf = Vec::new();
    write_trains(&mut buf, &[template, jittered, modulated])?;
    println!("--- spike-train file ---");
    print!("{}", String::from_utf8_lossy(&buf));
    Ok(())
}
