// Full-dress rehearsal of the benchmark-scale checks.

use lsm_der::harness::robustness::{mean_delta, run_robustness, VariationMode};
use lsm_der::harness::*;
use lsm_der::mismatch::VariationSpec;
use lsm_der::rewiring::FitnessKind;

fn main() -> lsm_der::Result<()> {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());

    if which == "c4" || which == "all" {
        let t0 = std::time::Instant::now();
        let mut cfg = ExperimentConfig::for_task(Task::SpikeClassification);
        cfg.seeds = (0..10).collect();
        cfg.ppr.n = 1;
        let out = run_experiment(&cfg)?;
        let der = mean_test_mae(&out.records, ReadoutKind::Der).unwrap();
        let ppr = mean_test_mae(&out.records, ReadoutKind::Ppr).unwrap();
        println!(
            "c4: der {der:.4} ppr(n=1) {ppr:.4} ratio {:.2} need>=1.5 pass={} [{:?}]",
            ppr / der,
            der <= ppr / 1.5,
            t0.elapsed()
        );
    }

    if which == "c5" || which == "all" {
        let t0 = std::time::Instant::now();
        let mut cfg = ExperimentConfig::for_task(Task::SumOfRates);
        cfg.seeds = (0..10).collect();
        cfg.ppr.n = 40;
        let out = run_experiment(&cfg)?;
        let der = mean_test_mae(&out.records, ReadoutKind::Der).unwrap();
        let ppr = mean_test_mae(&out.records, ReadoutKind::Ppr).unwrap();
        println!(
            "c5: der {der:.4} ppr(n=40) {ppr:.4} pass={} [{:?}]",
            der < ppr,
            t0.elapsed()
        );
    }

    if which == "c6" || which == "all" {
        let t0 = std::time::Instant::now();
        let mut linear = ExperimentConfig::for_task(Task::SumOfRates);
        linear.seeds = (0..5).collect();
        linear.readouts.ppr = false;
        let mut signum = linear.clone();
        signum.trainer.fitness = FitnessKind::SignumError;
        let lin_out = run_experiment(&linear)?;
        let sig_out = run_experiment(&signum)?;
        let mut worse = 0;
        for (l, s) in lin_out.records.iter().zip(&sig_out.records) {
            println!(
                "  c6 seed {}: linear train {:.4} signum train {:.4}",
                l.seed, l.train_mae, s.train_mae
            );
            if s.train_mae > l.train_mae {
                worse += 1;
            }
        }
        println!("c6: signum worse in {worse}/5 seeds pass={} [{:?}]", worse >= 4, t0.elapsed());
    }

    if which == "c7" || which == "all" {
        let t0 = std::time::Instant::now();
        let mut cfg = ExperimentConfig::for_task(Task::SpikeClassification);
        cfg.seeds = (0..20).collect();
        let spec = VariationSpec::worst_case(0);
        let rows = run_robustness(&cfg, &spec, &[VariationMode::None, VariationMode::All])?;
        let d_der = mean_delta(&rows, ReadoutKind::Der, VariationMode::All).unwrap();
        let d_ppr = mean_delta(&rows, ReadoutKind::Ppr, VariationMode::All).unwrap();
        println!(
            "c7: delta der {d_der:.4} delta ppr {d_ppr:.4} pass={} [{:?}]",
            d_der < d_ppr && d_der.abs() < 0.15 && d_ppr.abs() < 0.15,
            t0.elapsed()
        );
    }
    Ok(())
}
