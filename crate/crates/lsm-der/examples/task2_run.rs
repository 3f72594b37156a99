//! Runs the sum-of-rates retrieval benchmark end to end: sinusoidally
//! modulated inputs, liquid simulation, and both readouts trained to
//! output the windowed, normalized input rate.
//!
//! By default this runs a reduced setup; pass `--full` for the complete
//! benchmark (140 neurons, 200 patterns, 10 trials — takes minutes).
//!
//! Run with: cargo run --release -p lsm-der --example task2_run [-- --full]

use lsm_der::harness::{mean_test_mae, run_experiment, ExperimentConfig, ReadoutKind, Task};

fn main() -> lsm_der::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let mut cfg = ExperimentConfig::for_task(Task::SumOfRates);
    if !full {
        cfg.seeds = (0..3).collect();
        cfg.patterns = 80;
        cfg.liquid.num_neurons = 80;
        cfg.der.branches = 5;
        cfg.der.slots = 8;
        cfg.ppr.n = 1; // equal synapse budget at demo scale
        cfg.trainer.max_iterations = 600;
        cfg.trainer.target_set = 12;
        cfg.ppr.epochs = Some(600);
    }

    println!(
        "task II: {} neurons, {} patterns, {} trials; targets are windowed mean rates in (0,1)",
        cfg.liquid.num_neurons,
        cfg.patterns,
        cfg.seeds.len()
    );
    let out = run_experiment(&cfg)?;
    for r in &out.records {
        println!(
            "  seed {:>2} {}: train mae {:.4}, test mae {:.4}",
            r.seed,
            r.readout.name(),
            r.train_mae,
            r.test_mae
        );
    }
    let der = mean_test_mae(&out.records, ReadoutKind::Der).unwrap();
    let ppr = mean_test_mae(&out.records, ReadoutKind::Ppr).unwrap();
    println!("mean test mae: der {der:.4}, ppr(n={}) {ppr:.4}", cfg.ppr.n);
    Ok(())
}
