//! Hardware-mismatch robustness: trains both readouts on the
//! classification benchmark, then re-evaluates the test set with the
//! measured circuit variation statistics injected (synaptic gain, kernel
//! decay constant and square-law factor), per mismatch source and
//! combined. The matched protocol gives the baseline bank one perceptron
//! per dendritic branch and the same kernel and square nonlinearity.
//!
//! Run with: cargo run --release -p lsm-der --example robustness_demo

use lsm_der::harness::robustness::{mean_delta, run_robustness, VariationMode};
use lsm_der::harness::{ExperimentConfig, ReadoutKind, Task};
use lsm_der::mismatch::VariationSpec;

fn main() -> lsm_der::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let mut cfg = ExperimentConfig::for_task(Task::SpikeClassification);
    if full {
        cfg.seeds = (0..20).collect();
    } else {
        cfg.seeds = (0..4).collect();
        cfg.patterns = 60;
        cfg.liquid.num_neurons = 80;
        cfg.trainer.max_iterations = 400;
        cfg.ppr.epochs = Some(400);
    }

    // worst-case spreads measured for the synapse and squaring circuits
    let spec = VariationSpec::worst_case(0);
    println!(
        "mismatch spreads: decay {:.1}%, gain {:.0}%, square-law {:.0}%; {} trials",
        spec.cv_tau * 100.0,
        spec.cv_i0 * 100.0,
        spec.cv_cni * 100.0,
        cfg.seeds.len()
    );

    let rows = run_robustness(&cfg, &spec, &VariationMode::ALL_MODES)?;
    println!("{:>6} {:>12} {:>12}", "mode", "delta der", "delta ppr");
    for mode in [
        VariationMode::Tau,
        VariationMode::Cni,
        VariationMode::I0,
        VariationMode::All,
    ] {
        let der = mean_delta(&rows, ReadoutKind::Der, mode).unwrap();
        let ppr = mean_delta(&rows, ReadoutKind::Ppr, mode).unwrap();
        println!("{:>6} {:>+12.4} {:>+12.4}", mode.name(), der, ppr);
    }
    println!("(binary rewired synapses should degrade less than analog weights)");
    Ok(())
}
