//! Runs the spike-train classification benchmark end to end: generates
//! jittered templates, drives the liquid, trains both readouts and prints
//! per-seed and mean errors plus the convergence markers.
//!
//! By default this runs a reduced setup so it finishes in seconds; pass
//! `--full` for the complete benchmark (140 neurons, 200 patterns,
//! 10 trials — takes minutes).
//!
//! Run with: cargo run --release -p lsm-der --example task1_run [-- --full]

use lsm_der::harness::{
    convergence_markers, mean_test_mae, run_experiment, ExperimentConfig, ReadoutKind, Task,
};

fn main() -> lsm_der::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let mut cfg = ExperimentConfig::for_task(Task::SpikeClassification);
    if !full {
        cfg.seeds = (0..3).collect();
        cfg.patterns = 40;
        cfg.liquid.num_neurons = 60;
        cfg.der.branches = 4;
        cfg.der.slots = 7;
        cfg.trainer.max_iterations = 300;
        cfg.trainer.target_set = 10;
        cfg.ppr.epochs = Some(300);
    }
    cfg.ppr.n = 1; // equal synapse budget: one perceptron vs the pair

    println!(
        "task I: {} neurons, {} patterns, {} trials, {} rewiring iterations",
        cfg.liquid.num_neurons,
        cfg.patterns,
        cfg.seeds.len(),
        cfg.trainer.max_iterations
    );
    let out = run_experiment(&cfg)?;
    for r in &out.records {
        println!(
            "  seed {:>2} {}: train mae {:.4}, test mae {:.4}, pattern error {:.3}",
            r.seed,
            r.readout.name(),
            r.train_mae,
            r.test_mae,
            r.test_pattern_error.unwrap_or(f64::NAN),
        );
    }
    let der = mean_test_mae(&out.records, ReadoutKind::Der).unwrap();
    let ppr = mean_test_mae(&out.records, ReadoutKind::Ppr).unwrap();
    println!("mean test mae: der {der:.4}, ppr(n={}) {ppr:.4}, ratio {:.2}", cfg.ppr.n, ppr / der);

    if let (Some((_, dt)), Some((_, pt))) = (out.der_traces.first(), out.ppr_traces.first()) {
        let m = convergence_markers(&dt.mae, &pt.mae)?;
        println!(
            "convergence markers (seed {}): baseline saturates at {}, curves cross at {:?}, dendritic minimum at {}",
            out.der_traces[0].0, m.n0, m.n1, m.n2
        );
    }
    Ok(())
}
