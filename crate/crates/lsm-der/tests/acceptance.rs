//! Acceptance suite: every benchmark-level guarantee of the crate, one
//! test per criterion, each printing a PASS/FAIL line. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines and
//! the measured values; the statistical criteria run the full benchmark
//! pipeline and take minutes.

use std::time::Instant;

use lsm_der::capacity::{bn_capacity, capacity_sweep, CellShape};
use lsm_der::dataset::SampleSet;
use lsm_der::dendrite::{DendriticCell, NonlinearityParams, ReadoutPair, Squash};
use lsm_der::harness::robustness::{mean_delta, run_robustness, VariationMode};
use lsm_der::harness::{
    mean_test_mae, run_experiment, ExperimentConfig, ReadoutKind, Task,
};
use lsm_der::mismatch::VariationSpec;
use lsm_der::perceptron::{
    pdelta_update_with_output, PDeltaParams, PerceptronBank, UpdateCase,
};
use lsm_der::rewiring::{
    evaluate_mae, synapse_fitness, train, CellSide, FitnessKind, TrainerConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(number: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {number:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_01_capacity_exactness() {
    let started = Instant::now();
    let points = capacity_sweep(70, 140);
    let best = points
        .iter()
        .max_by(|a, b| a.bits.partial_cmp(&b.bits).unwrap())
        .unwrap();
    let hand = bn_capacity(&CellShape::new(2, 2, 3));
    let expected = 21f64.log2();
    let elapsed = started.elapsed();
    let pass = best.branches == 14 && (hand - expected).abs() < 1e-9 && elapsed.as_secs_f64() < 1.0;
    report(
        1,
        "capacity-exactness",
        pass,
        &format!(
            "sweep max at m={}, B_N(2,2,3)={hand:.9} vs {expected:.9}, {elapsed:?}",
            best.branches
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_gradient_consistency() {
    let started = Instant::now();
    let (d, m, k, samples) = (12usize, 3usize, 4usize, 20usize);
    let delta = 1e-4;
    let mut worst_rel = 0.0f64;
    let mut pass = true;

    for instance in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + instance);
        let x_thr = 0.5 + rng.gen::<f64>() * 2.0;
        let nl = NonlinearityParams::unbounded(x_thr).unwrap();
        let pair = ReadoutPair::random(m, k, d, nl, Squash::Identity, &mut rng).unwrap();
        let mut data = SampleSet::new(d);
        for _ in 0..samples {
            let row: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0).collect();
            data.push(&row, rng.gen::<f64>()).unwrap();
        }
        let branch = rng.gen_range(0..m);
        let slot = rng.gen_range(0..k);

        // Independent oracle: mean squared error as a function of a
        // virtual analog weight on the probed synapse of the positive
        // cell, all other weights 1.
        let mse = |w: f64| -> f64 {
            let mut total = 0.0;
            for i in 0..data.len() {
                let x = data.row(i);
                let mut fp = 0.0;
                for j in 0..m {
                    let mut v = 0.0;
                    for s in 0..k {
                        let weight = if j == branch && s == slot { w } else { 1.0 };
                        v += weight * x[pair.positive.afferent(j, s)];
                    }
                    fp += v * v / x_thr;
                }
                let y = fp - pair.negative.output(x, &nl);
                let e = data.target(i) - y;
                total += e * e;
            }
            total / data.len() as f64
        };

        let fitness = synapse_fitness(
            &pair,
            &data,
            CellSide::Positive,
            branch,
            slot,
            FitnessKind::LinearError,
        );
        let fd = -(mse(1.0 + delta) - mse(1.0 - delta)) / (2.0 * delta);
        let expected = x_thr / 4.0 * fd;
        let denom = fitness.abs().max(expected.abs());
        if denom > 1e-12 {
            let rel = (fitness - expected).abs() / denom;
            worst_rel = worst_rel.max(rel);
            if rel >= 1e-5 {
                pass = false;
            }
        }
    }
    let elapsed = started.elapsed();
    let pass = pass && elapsed.as_secs_f64() < 10.0;
    report(
        2,
        "gradient-consistency",
        pass,
        &format!("worst relative error {worst_rel:.2e} over 100 instances, {elapsed:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_03_brute_force_optimality() {
    let started = Instant::now();
    let nl = NonlinearityParams::unbounded(1.0).unwrap();
    let mut wirings = Vec::new();
    for a in 0..4usize {
        for b in a..4 {
            wirings.push(vec![a, b]);
        }
    }
    let seeds = 100u64;
    let mut hits = 0;
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + seed);
        let mut data = SampleSet::new(4);
        for _ in 0..3 {
            let row: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
            data.push(&row, rng.gen::<f64>()).unwrap();
        }
        let mut best = f64::INFINITY;
        for wp in &wirings {
            for wn in &wirings {
                let pos = DendriticCell::new(1, 2, 4, wp.clone()).unwrap();
                let neg = DendriticCell::new(1, 2, 4, wn.clone()).unwrap();
                let pair = ReadoutPair::new(pos, neg, nl, Squash::SigmoidHalf).unwrap();
                best = best.min(evaluate_mae(&pair, &data).unwrap());
            }
        }
        let mut pair = ReadoutPair::random(1, 2, 4, nl, Squash::SigmoidHalf, &mut rng).unwrap();
        let cfg = TrainerConfig {
            target_set: 2,
            replacement_set: 2,
            max_iterations: 500,
            max_local: 3,
            seed,
            fitness: FitnessKind::LinearError,
        };
        let trace = train(&mut pair, &data, &cfg).unwrap();
        if trace.best_mae <= best + 1e-9 {
            hits += 1;
        }
    }
    let elapsed = started.elapsed();
    let pass = hits >= 95 && elapsed.as_secs_f64() < 30.0;
    report(
        3,
        "brute-force-optimality",
        pass,
        &format!("{hits}/{seeds} seeds reached the exhaustive optimum, {elapsed:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_der_beats_single_perceptron() {
    let started = Instant::now();
    let mut cfg = ExperimentConfig::for_task(Task::SpikeClassification);
    cfg.seeds = (0..10).collect();
    cfg.ppr.n = 1;
    assert_eq!(cfg.liquid.num_neurons, 140);
    assert_eq!(cfg.patterns, 200);
    let out = run_experiment(&cfg).unwrap();
    let der = mean_test_mae(&out.records, ReadoutKind::Der).unwrap();
    let ppr = mean_test_mae(&out.records, ReadoutKind::Ppr).unwrap();
    let elapsed = started.elapsed();
    let pass = der <= ppr / 1.5 && elapsed.as_secs() < 1800;
    report(
        4,
        "der-beats-equal-resource-ppr",
        pass,
        &format!("mean test mae der {der:.4} vs ppr(n=1) {ppr:.4}, ratio {:.2}, {elapsed:?}", ppr / der),
    );
    assert!(pass);
}

#[test]
fn criterion_05_der_beats_saturated_ppr() {
    let started = Instant::now();
    let mut cfg = ExperimentConfig::for_task(Task::SumOfRates);
    cfg.seeds = (0..10).collect();
    cfg.ppr.n = 40;
    let out = run_experiment(&cfg).unwrap();
    let der = mean_test_mae(&out.records, ReadoutKind::Der).unwrap();
    let ppr = mean_test_mae(&out.records, ReadoutKind::Ppr).unwrap();
    let elapsed = started.elapsed();
    let pass = der < ppr;
    report(
        5,
        "der-beats-saturated-ppr",
        pass,
        &format!("mean test mae der {der:.4} vs ppr(n=40) {ppr:.4}, {elapsed:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_06_fitness_ablation() {
    let started = Instant::now();
    let mut linear = ExperimentConfig::for_task(Task::SumOfRates);
    linear.seeds = (0..5).collect();
    linear.readouts.ppr = false;
    let mut signum = linear.clone();
    signum.trainer.fitness = FitnessKind::SignumError;
    let lin = run_experiment(&linear).unwrap();
    let sig = run_experiment(&signum).unwrap();
    let mut worse = 0;
    let mut detail = String::new();
    for (l, s) in lin.records.iter().zip(&sig.records) {
        if s.train_mae > l.train_mae {
            worse += 1;
        }
        detail.push_str(&format!("[seed {} {:.4} vs {:.4}] ", l.seed, l.train_mae, s.train_mae));
    }
    let elapsed = started.elapsed();
    let pass = worse >= 4;
    report(
        6,
        "fitness-ablation",
        pass,
        &format!("signum worse in {worse}/5 seeds {detail}{elapsed:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_robustness_ordering() {
    let started = Instant::now();
    let mut cfg = ExperimentConfig::for_task(Task::SpikeClassification);
    cfg.seeds = (0..20).collect();
    let spec = VariationSpec::worst_case(0);
    assert_eq!(spec.cv_tau, 0.101);
    assert_eq!(spec.cv_i0, 0.13);
    assert_eq!(spec.cv_cni, 0.18);
    let rows = run_robustness(&cfg, &spec, &[VariationMode::None, VariationMode::All]).unwrap();
    let d_der = mean_delta(&rows, ReadoutKind::Der, VariationMode::All).unwrap();
    let d_ppr = mean_delta(&rows, ReadoutKind::Ppr, VariationMode::All).unwrap();
    let elapsed = started.elapsed();
    let pass = d_der < d_ppr && d_der.abs() < 0.15 && d_ppr.abs() < 0.15;
    report(
        7,
        "robustness-ordering",
        pass,
        &format!("delta der {d_der:+.4} vs delta ppr {d_ppr:+.4}, {elapsed:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_saturation_limit_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut pass = true;
    for _ in 0..1000 {
        let m = rng.gen_range(1..6);
        let k = rng.gen_range(1..8);
        let d = rng.gen_range(4..24);
        let x_thr = 0.3 + rng.gen::<f64>() * 3.0;
        let unbounded = NonlinearityParams::unbounded(x_thr).unwrap();
        let cell = DendriticCell::random(m, k, d, &mut rng).unwrap();
        let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 30.0).collect();
        // pure square law computed independently
        let expected: f64 = (0..m)
            .map(|j| {
                let v = cell.branch_drive(j, &x);
                v * v / x_thr
            })
            .sum();
        if cell.output(&x, &unbounded).to_bits() != expected.to_bits() {
            pass = false;
            break;
        }
    }
    report(8, "saturation-limit-identity", pass, "1000 random evaluations bit-for-bit");
    assert!(pass);
}

/// Literal transcription of the five-case margin rule, written directly
/// from its definition and kept independent of the implementation.
fn literal_pdelta(
    weights: &mut [f64],
    width: usize,
    x: &[f64],
    o_hat: f64,
    o: f64,
    p: &PDeltaParams,
) -> Vec<UpdateCase> {
    let n = weights.len() / width;
    let mut cases = Vec::with_capacity(n);
    for i in 0..n {
        let row = &mut weights[i * width..(i + 1) * width];
        let mut s = 0.0;
        for j in 0..width {
            s += row[j] * x[j];
        }
        let case;
        if o_hat > o + p.epsilon && s >= 0.0 {
            for j in 0..width {
                row[j] += p.eta * (-x[j]);
            }
            case = UpdateCase::TooHigh;
        } else if o_hat < o - p.epsilon && s < 0.0 {
            for j in 0..width {
                row[j] += p.eta * x[j];
            }
            case = UpdateCase::TooLow;
        } else if o_hat <= o + p.epsilon && 0.0 <= s && s < p.gamma {
            for j in 0..width {
                row[j] += p.eta * p.mu * x[j];
            }
            case = UpdateCase::MarginPositive;
        } else if o_hat >= o - p.epsilon && -p.gamma < s && s < 0.0 {
            for j in 0..width {
                row[j] += p.eta * p.mu * (-x[j]);
            }
            case = UpdateCase::MarginNegative;
        } else {
            case = UpdateCase::None;
        }
        if case != UpdateCase::None {
            let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for v in row.iter_mut() {
                    *v /= norm;
                }
            }
        }
        cases.push(case);
    }
    cases
}

#[test]
fn criterion_09_pdelta_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut pass = true;
    let mut worst_norm = 0.0f64;
    for round in 0..10_000 {
        let dim = 1 + (round % 5);
        let n = 1 + (round % 4);
        let mut bank = PerceptronBank::random(n, dim, &mut rng).unwrap();
        let mut mirror: Vec<f64> = (0..bank.n())
            .flat_map(|i| bank.weight_row(i).to_vec())
            .collect();
        let mut x: Vec<f64> = (0..dim).map(|_| (rng.gen::<f64>() - 0.5) * 4.0).collect();
        x.push(1.0);
        let o_hat = (rng.gen::<f64>() - 0.5) * 2.5;
        let o = (rng.gen::<f64>() - 0.5) * 2.5;
        let params = PDeltaParams {
            eta: rng.gen::<f64>() * 0.2,
            epsilon: rng.gen::<f64>() * 0.3,
            gamma: rng.gen::<f64>() * 0.5,
            mu: rng.gen::<f64>() * 2.0,
        };
        let got = pdelta_update_with_output(&mut bank, &x, o_hat, o, &params);
        let expect = literal_pdelta(&mut mirror, dim + 1, &x, o_hat, o, &params);
        if got != expect {
            pass = false;
            break;
        }
        for i in 0..bank.n() {
            let row = bank.weight_row(i);
            if row != &mirror[i * (dim + 1)..(i + 1) * (dim + 1)] {
                pass = false;
            }
            let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            worst_norm = worst_norm.max((norm - 1.0).abs());
            if (norm - 1.0).abs() >= 1e-12 {
                pass = false;
            }
        }
        if !pass {
            break;
        }
    }
    report(
        9,
        "pdelta-contract",
        pass,
        &format!("10000 randomized cases, worst |norm-1| = {worst_norm:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_10_determinism() {
    let mut cfg = ExperimentConfig::for_task(Task::SpikeClassification);
    cfg.seeds = vec![3, 5];
    cfg.patterns = 8;
    cfg.liquid.num_neurons = 24;
    cfg.task1.duration = 0.25;
    cfg.der.branches = 3;
    cfg.der.slots = 4;
    cfg.ppr.n = 2;
    cfg.trainer.target_set = 6;
    cfg.trainer.replacement_set = 10;
    cfg.trainer.max_iterations = 40;
    cfg.trainer.max_local = 5;
    cfg.ppr.epochs = Some(30);
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    let mut pass = a.records.len() == b.records.len();
    if pass {
        for (ra, rb) in a.records.iter().zip(&b.records) {
            if ra.train_mae.to_bits() != rb.train_mae.to_bits()
                || ra.test_mae.to_bits() != rb.test_mae.to_bits()
                || ra.train_pattern_error != rb.train_pattern_error
                || ra.test_pattern_error != rb.test_pattern_error
            {
                pass = false;
            }
        }
    }
    report(
        10,
        "determinism",
        pass,
        "re-run reproduces every recorded error bit-for-bit",
    );
    assert!(pass);
}
