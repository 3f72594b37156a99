//! Converting spike trains into analog readout states: the
//! double-exponential post-synaptic current kernel, pointwise filtering,
//! and sampling into a state matrix.
//!
//! Run with: cargo run --release -p lsm-der --example psc_filtering

use lsm_der::spike::{poisson_train, psc_value, sample_states, KernelParams, SpikeTrain};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lsm_der::Result<()> {
    let kernel = KernelParams::peak_normalized(0.030, 0.0075)?;
    println!(
        "kernel: decay 30 ms, rise 7.5 ms, gain {:.4} (peak 1 at t* = {:.2} ms)",
        kernel.i0,
        kernel.peak_time() * 1e3
    );

    let single = SpikeTrain::new(vec![0.1], 0.5)?;
    println!("single spike at 100 ms, filtered:");
    for t in [0.1, 0.11, 0.12, 0.15, 0.2, 0.3] {
        println!("  s_a({:.0} ms) = {:.4}", t * 1e3, psc_value(&single, &kernel, t));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trains: Vec<SpikeTrain> = (0..4)
        .map(|_| poisson_train(30.0, 0.5, &mut rng))
        .collect::<lsm_der::Result<_>>()?;
    let states = sample_states(&trains, &kernel, 0.025)?;
    println!(
        "sampled 4 channels every 25 ms: {} rows x {} columns",
        states.num_samples(),
        states.num_channels()
    );
    let mut buf = Vec::new();
    states.write_text(&mut buf)?;
    println!("--- state matrix (row = sample, column = channel) ---");
    print!("{}", String::from_utf8_lossy(&buf));
    Ok(())
}
