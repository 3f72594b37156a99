// Synthetic coincidence benchmark: class is decided by WHICH pairs of
// line-groups co-activate (XOR structure), so a single linear unit cannot
// separate it while branch coincidence detectors can.

use lsm_der::dataset::SampleSet;
use lsm_der::dendrite::{NonlinearityParams, ReadoutPair, Squash};
use lsm_der::perceptron::{pdelta_train, BankSquash, PDeltaParams, PerceptronBank, PprOutputMode};
use lsm_der::rewiring::{train, FitnessKind, TrainerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lsm_der::Result<()> {
    let d = 140;
    let groups = 4; // A,B,C,D; class 1 = (A,B) or (C,D); class 0 = (A,C) or (B,D)
    let per_group = d / groups;
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let mut make = |n: usize, rng: &mut ChaCha8Rng| -> SampleSet {
        let mut set = SampleSet::new(d);
        for i in 0..n {
            let label = i % 2;
            let pair = if rng.gen::<bool>() {
                if label == 1 { (0, 1) } else { (0, 2) }
            } else if label == 1 {
                (2, 3)
            } else {
                (1, 3)
            };
            let mut x = vec![0.0; d];
            for g in [pair.0, pair.1] {
                for j in 0..per_group {
                    if rng.gen::<f64>() < 0.5 {
                        x[g * per_group + j] = 0.8 + 0.4 * rng.gen::<f64>();
                    }
                }
            }
            // background noise lines
            for v in x.iter_mut() {
                if rng.gen::<f64>() < 0.05 {
                    *v += 0.5;
                }
            }
            set.push(&x, label as f64).unwrap();
        }
        set
    };
    let train_set = make(2000, &mut rng);
    let test_set = make(2000, &mut rng);

    let nl = NonlinearityParams::new(1.5, 75.0)?;
    let mut pair = ReadoutPair::random(7, 10, d, nl, Squash::Signum01, &mut rng)?;
    let cfg = TrainerConfig {
        target_set: 15,
        replacement_set: 25,
        max_iterations: 1000,
        max_local: 30,
        seed: 2,
        fitness: FitnessKind::LinearError,
    };
    let trace = train(&mut pair, &train_set, &cfg)?;
    let test_mae = lsm_der::rewiring::evaluate_mae(&pair, &test_set)?;

    if std::env::var("LANDSCAPE").is_ok() {
        // at the returned best wiring: how many single swaps strictly
        // improve the training MAE, and where do they rank by fitness?
        let base = lsm_der::rewiring::evaluate_mae(&pair, &train_set)?;
        let mut improving = 0usize;
        let mut total = 0usize;
        let mut best_gain = 0.0f64;
        for side in [lsm_der::rewiring::CellSide::Positive, lsm_der::rewiring::CellSide::Negative] {
            for branch in 0..7 {
                for slot in 0..10 {
                    let old = match side {
                        lsm_der::rewiring::CellSide::Positive => pair.positive.afferent(branch, slot),
                        lsm_der::rewiring::CellSide::Negative => pair.negative.afferent(branch, slot),
                    };
                    for line in 0..d {
                        if line == old { continue; }
                        total += 1;
                        match side {
                            lsm_der::rewiring::CellSide::Positive => pair.positive.set_afferent(branch, slot, line)?,
                            lsm_der::rewiring::CellSide::Negative => pair.negative.set_afferent(branch, slot, line)?,
                        }
                        let m = lsm_der::rewiring::evaluate_mae(&pair, &train_set)?;
                        if m < base { improving += 1; best_gain = best_gain.max(base - m); }
                        match side {
                            lsm_der::rewiring::CellSide::Positive => pair.positive.set_afferent(branch, slot, old)?,
                            lsm_der::rewiring::CellSide::Negative => pair.negative.set_afferent(branch, slot, old)?,
                        }
                    }
                }
            }
        }
        println!("landscape at best: {improving}/{total} single swaps improve, best gain {best_gain:.4}");

        // For slots that have improving lines: what is the improving
        // line's rank when all d lines are ordered by candidate fitness?
        use lsm_der::rewiring::{synapse_fitness_candidate, CellSide};
        let mut ranks = Vec::new();
        for side in [CellSide::Positive, CellSide::Negative] {
            for branch in 0..7 {
                // fitness ranking of every line as a candidate on this branch
                let mut scored: Vec<(f64, usize)> = (0..d)
                    .map(|line| (synapse_fitness_candidate(&pair, &train_set, side, branch, line, FitnessKind::LinearError), line))
                    .collect();
                scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
                let rank_of = |line: usize| scored.iter().position(|&(_, l)| l == line).unwrap();
                for slot in 0..10 {
                    let old = match side {
                        CellSide::Positive => pair.positive.afferent(branch, slot),
                        CellSide::Negative => pair.negative.afferent(branch, slot),
                    };
                    let base = lsm_der::rewiring::evaluate_mae(&pair, &train_set)?;
                    for line in 0..d {
                        if line == old { continue; }
                        match side {
                            CellSide::Positive => pair.positive.set_afferent(branch, slot, line)?,
                            CellSide::Negative => pair.negative.set_afferent(branch, slot, line)?,
                        }
                        let m = lsm_der::rewiring::evaluate_mae(&pair, &train_set)?;
                        if m < base { ranks.push(rank_of(line)); }
                        match side {
                            CellSide::Positive => pair.positive.set_afferent(branch, slot, old)?,
                            CellSide::Negative => pair.negative.set_afferent(branch, slot, old)?,
                        }
                    }
                }
            }
        }
        ranks.sort_unstable();
        if !ranks.is_empty() {
            println!(
                "improving-line fitness ranks: min {} median {} p90 {} of {}",
                ranks[0], ranks[ranks.len()/2], ranks[ranks.len()*9/10], d
            );
            let top25 = ranks.iter().filter(|&&r| r < 25).count();
            println!("improving lines ranked in top 25: {top25}/{}", ranks.len());
        }
    }
    println!(
        "der: init {:.3} best train {:.3} test {:.3} (acc {} esc {})",
        trace.initial_mae,
        trace.best_mae,
        test_mae,
        trace.accepted_count(),
        trace.escape_count()
    );

    let mut bank = PerceptronBank::random(1, d, &mut rng)?;
    let params = PDeltaParams {
        eta: 0.01,
        epsilon: 0.0,
        gamma: 0.05,
        mu: 1.0,
    };
    let mode = PprOutputMode::Vote(BankSquash::SignThreshold);
    let etrace = pdelta_train(&mut bank, &train_set, &params, 1000, &mode)?;
    let ppr_test = lsm_der::perceptron::evaluate_bank_mae(&bank, &test_set, &mode)?;
    println!(
        "ppr(n=1): init {:.3} best train {:.3} test {:.3}",
        etrace.initial_mae, etrace.best_mae, ppr_test
    );
    Ok(())
}

// appended: stall-point landscape analysis in a second binary? no — extend main via env
