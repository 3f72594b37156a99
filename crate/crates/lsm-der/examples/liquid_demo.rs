//! Builds the default liquid, drives it with a Poisson input, and prints
//! activity statistics plus the kernel fit derived from them.
//!
//! Run with: cargo run --release -p lsm-der --example liquid_demo

use lsm_der::liquid::{build_liquid, LiquidConfig};
use lsm_der::spike::{mean_isi, optimal_tau_decay, poisson_train, sample_states, KernelParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lsm_der::Result<()> {
    let config = LiquidConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let network = build_liquid(&config, &mut rng)?;
    println!(
        "liquid: {} neurons, {} recurrent connections",
        network.num_neurons(),
        network.connection_count()
    );

    let duration = 0.5;
    let input = poisson_train(20.0, duration, &mut rng)?;
    println!("input: {} spikes at 20 Hz over {duration} s", input.len());

    let out = network.simulate(std::slice::from_ref(&input), duration, 2e-4)?;
    let total: usize = out.iter().map(|t| t.len()).sum();
    let active = out.iter().filter(|t| !t.is_empty()).count();
    let mean_rate = total as f64 / network.num_neurons() as f64 / duration;
    println!(
        "liquid response: {total} spikes, {active}/{} neurons active, mean rate {mean_rate:.2} Hz",
        network.num_neurons()
    );

    let n = mean_isi(&out)?;
    println!("population mean inter-spike interval: {:.4} ms", n * 1e3);
    let fitted_ms = optimal_tau_decay(n * 1e3);
    println!("fitted kernel decay constant: {fitted_ms:.2} ms");

    let kernel = KernelParams::peak_normalized(0.030, 0.0075)?;
    let states = sample_states(&out, &kernel, 0.025)?;
    let mut active_sum = 0.0;
    let mut active_count = 0usize;
    for row in states.rows() {
        for &v in row {
            if v > 0.0 {
                active_sum += v;
                active_count += 1;
            }
        }
    }
    println!(
        "sampled states: {} rows x {} channels, mean active entry {:.3}",
        states.num_samples(),
        states.num_channels(),
        active_sum / active_count.max(1) as f64
    );
    Ok(())
}
