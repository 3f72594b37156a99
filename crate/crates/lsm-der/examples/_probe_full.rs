use lsm_der::harness::run::*;
use lsm_der::harness::*;

fn arg(name: &str, default: f64) -> f64 {
    std::env::var(name)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(default)
}

fn main() -> lsm_der::Result<()> {
    let mut cfg = ExperimentConfig::for_task(Task::SpikeClassification);
    cfg.seeds = (0..(arg("SEEDS", 2.0) as u64)).collect();
    cfg.ppr.n = 1;
    let wmul = arg("WMUL", 1.0);
    cfg.liquid.classes.ee.weight_mean *= wmul;
    cfg.liquid.classes.ei.weight_mean *= wmul;
    cfg.liquid.classes.ie.weight_mean *= wmul;
    cfg.liquid.classes.ii.weight_mean *= wmul;
    cfg.liquid.input.weight_mean = arg("WIN", cfg.liquid.input.weight_mean);
    cfg.liquid.background_drive = arg("BG", cfg.liquid.background_drive);
    cfg.trainer.max_iterations = arg("ITERS", 1000.0) as usize;
    cfg.trainer.target_set = arg("NT", cfg.trainer.target_set as f64) as usize;
    cfg.trainer.replacement_set = arg("NR", cfg.trainer.replacement_set as f64) as usize;
    cfg.trainer.max_local = arg("ML", cfg.trainer.max_local as f64) as usize;
    if std::env::var("XSAT").is_ok() { cfg.der.x_sat = arg("XSAT", 75.0); }
    if std::env::var("XTHR").is_ok() { cfg.der.x_thr = Some(arg("XTHR", 1.8)); }
    if std::env::var("KD").is_ok() { cfg.kernel_tau_decay = Some(arg("KD", 0.03)); }
    cfg.liquid.classes.ee.weight_mean *= arg("EEW", 1.0);
    cfg.liquid.classes.ie.weight_mean *= arg("IEW", 1.0);
    cfg.ppr.eta = arg("PETA", cfg.ppr.eta);
    cfg.ppr.gamma = arg("PGAM", cfg.ppr.gamma);
    cfg.kernel_tau_rise = arg("KR", cfg.kernel_tau_rise);
    cfg.state_scale = arg("SSCALE", cfg.state_scale);
    if std::env::var("TASK2").is_ok() {
        let seeds = cfg.seeds.clone();
        cfg = ExperimentConfig::for_task(Task::SumOfRates);
        cfg.seeds = seeds;
        cfg.ppr.n = arg("PPRN", 40.0) as usize;
    }
    if std::env::var("PPEP").is_ok() { cfg.ppr.epochs = Some(arg("PPEP", 1000.0) as usize); }
    if std::env::var("NOPPR").is_ok() { cfg.readouts.ppr = false; }
    if std::env::var("SIGNUM").is_ok() { cfg.trainer.fitness = lsm_der::rewiring::FitnessKind::SignumError; }

    // quick rate probe
    {
        use lsm_der::liquid::build_liquid;
        use lsm_der::spike::poisson_train;
        use rand::SeedableRng;
        let mut lc = cfg.liquid.clone();
        lc.input.channels = 1;
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let net = build_liquid(&lc, &mut r)?;
        let inp = poisson_train(20.0, 0.5, &mut r)?;
        let out = net.simulate(std::slice::from_ref(&inp), 0.5, 2e-4)?;
        let total: usize = out.iter().map(|t| t.len()).sum();
        let active = out.iter().filter(|t| !t.is_empty()).count();
        println!(
            "liquid probe: {total} spikes, {active}/140 active, mean {:.1} Hz",
            total as f64 / 140.0 / 0.5
        );
    }

    let t0 = std::time::Instant::now();
    let out = run_experiment(&cfg)?;
    println!("elapsed {:?}", t0.elapsed());
    for r in &out.records {
        println!(
            "seed {} {}: train {:.4} test {:.4} pat_err {:.3}",
            r.seed,
            r.readout.name(),
            r.train_mae,
            r.test_mae,
            r.test_pattern_error.unwrap_or(f64::NAN)
        );
    }
    {
        use lsm_der::harness::run::prepare_probe;
        let (xthr, mean_active) = prepare_probe(&cfg, cfg.seeds[0])?;
        println!("x_thr auto {:.3} (mean active state {:.3})", xthr, mean_active);
    }
    let der = mean_test_mae(&out.records, ReadoutKind::Der).unwrap();
    let ppr = mean_test_mae(&out.records, ReadoutKind::Ppr).unwrap_or(f64::NAN);
    println!("mean: der {der:.4} ppr {ppr:.4} ratio {:.2}", ppr / der);
    for (seed, tr) in &out.der_traces {
        println!(
            "der seed {seed}: init {:.3} best {:.3} acc {} esc {}",
            tr.initial_mae,
            tr.best_mae,
            tr.accepted_count(),
            tr.escape_count()
        );
    }
    Ok(())
}
// knobs appended via env in main above
