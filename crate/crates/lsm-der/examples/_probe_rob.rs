use lsm_der::harness::robustness::{mean_delta, run_robustness, VariationMode};
use lsm_der::harness::{ExperimentConfig, ReadoutKind, Task};
use lsm_der::mismatch::VariationSpec;

fn main() -> lsm_der::Result<()> {
    let mut cfg = ExperimentConfig::for_task(Task::SpikeClassification);
    let seeds: u64 = std::env::var("SEEDS").ok().and_then(|v| v.parse().ok()).unwrap_or(4);
    cfg.seeds = (0..seeds).collect();
    if let Ok(kd) = std::env::var("KD") { cfg.kernel_tau_decay = Some(kd.parse().unwrap()); }
    if let Ok(kr) = std::env::var("KR") { cfg.kernel_tau_rise = kr.parse().unwrap(); }
    if let Ok(xs) = std::env::var("XSAT") { cfg.der.x_sat = xs.parse().unwrap(); }
    let mut spec = VariationSpec::worst_case(0);
    if std::env::var("PERBRANCH").is_ok() {
        spec.tau_granularity = lsm_der::mismatch::TauGranularity::PerBranch;
    }
    let rows = run_robustness(&cfg, &spec, &VariationMode::ALL_MODES)?;
    // base MAEs per readout
    for readout in [ReadoutKind::Der, ReadoutKind::Ppr] {
        let base: Vec<f64> = rows
            .iter()
            .filter(|r| r.readout == readout && r.mode == VariationMode::None)
            .map(|r| r.mae)
            .collect();
        let mean = base.iter().sum::<f64>() / base.len() as f64;
        println!("{} base test mae: {:.4} (n={})", readout.name(), mean, base.len());
    }
    for mode in [VariationMode::Tau, VariationMode::Cni, VariationMode::I0, VariationMode::All] {
        let d = mean_delta(&rows, ReadoutKind::Der, mode).unwrap();
        let p = mean_delta(&rows, ReadoutKind::Ppr, mode).unwrap();
        println!("{:>4}: delta der {:+.4} delta ppr {:+.4}", mode.name(), d, p);
    }
    Ok(())
}
