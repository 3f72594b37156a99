//! Network-rewiring training for the dendritic readout pair.
//!
//! Synapses are binary, so learning replaces afferents instead of scaling
//! weights. Each iteration scores a random target set of existing synapses
//! with a correlation fitness, picks the worst one, auditions a random
//! replacement set of candidate lines on that synapse's branch, and commits
//! the best candidate when it strictly lowers the training error. A stall
//! counter forces a swap after too many rejected replacement sets, which
//! lets the search climb out of local minima; the best wiring seen across
//! all iterations is what training finally returns.

use std::io::Write;

use rand::seq::index;

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::dataset::SampleSet;
use crate::dendrite::{branch_nl, ReadoutPair};
use crate::error::{Error, Result};

/// Which error term drives the synapse fitness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitnessKind {
    /// Correlate with the signed error `t - y` (the default).
    #[default]
    LinearError,
    /// Correlate with `signum(t - y)` only; kept as a diagnostic variant,
    /// it discards the error magnitude and trains measurably worse.
    SignumError,
}

/// Trainer settings. `target_set` existing synapses are scored per
/// iteration and `replacement_set` candidate lines audition for the worst
/// one; after `max_local` consecutive rejected auditions the best candidate
/// is committed anyway.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainerConfig {
    pub target_set: usize,
    pub replacement_set: usize,
    pub max_iterations: usize,
    pub max_local: usize,
    pub seed: u64,
    pub fitness: FitnessKind,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            target_set: 15,
            replacement_set: 25,
            max_iterations: 1000,
            max_local: 30,
            seed: 0,
            fitness: FitnessKind::LinearError,
        }
    }
}

impl TrainerConfig {
    fn validate(&self, pair: &ReadoutPair) -> Result<()> {
        let per_cell = pair.branches() * pair.slots();
        if self.target_set == 0 || self.target_set > 2 * per_cell {
            return Err(Error::invalid(format!(
                "target set size {} outside [1, {}]",
                self.target_set,
                2 * per_cell
            )));
        }
        if self.replacement_set == 0 || self.replacement_set > pair.input_dim() {
            return Err(Error::invalid(format!(
                "replacement set size {} outside [1, {}]",
                self.replacement_set,
                pair.input_dim()
            )));
        }
        if self.max_iterations == 0 || self.max_local == 0 {
            return Err(Error::invalid("iteration budgets must be at least 1"));
        }
        Ok(())
    }
}

/// Which opponent cell a synapse belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellSide {
    Positive,
    Negative,
}

impl CellSide {
    fn sign(self) -> f64 {
        match self {
            CellSide::Positive => 1.0,
            CellSide::Negative => -1.0,
        }
    }
}

/// Mean absolute error between targets and outputs.
pub fn mae(targets: &[f64], outputs: &[f64]) -> Result<f64> {
    if targets.is_empty() || targets.len() != outputs.len() {
        return Err(Error::invalid(format!(
            "mae needs equal non-empty slices, got {} and {}",
            targets.len(),
            outputs.len()
        )));
    }
    let sum: f64 = targets
        .iter()
        .zip(outputs)
        .map(|(t, y)| (t - y).abs())
        .sum();
    Ok(sum / targets.len() as f64)
}

/// `signum` with the zero convention used by the fitness ablation.
pub fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Correlation fitness of one existing synapse, computed from scratch:
/// the dataset mean of `x_ij * v_j * e` where `v_j` is the host branch
/// drive, `e` the error term, and the sign flips for the negative cell.
pub fn synapse_fitness(
    pair: &ReadoutPair,
    data: &SampleSet,
    side: CellSide,
    branch: usize,
    slot: usize,
    kind: FitnessKind,
) -> f64 {
    let cell = match side {
        CellSide::Positive => &pair.positive,
        CellSide::Negative => &pair.negative,
    };
    let line = cell.afferent(branch, slot);
    let mut acc = 0.0;
    for i in 0..data.len() {
        let x = data.row(i);
        let y = pair.output(x);
        let err = match kind {
            FitnessKind::LinearError => data.target(i) - y,
            FitnessKind::SignumError => signum(data.target(i) - y),
        };
        acc += x[line] * cell.branch_drive(branch, x) * err;
    }
    side.sign() * acc / data.len() as f64
}

/// Correlation fitness of a silent candidate line auditioning on a branch,
/// computed from scratch: the candidate contributes its own input while the
/// branch drive remains that of the current wiring.
pub fn synapse_fitness_candidate(
    pair: &ReadoutPair,
    data: &SampleSet,
    side: CellSide,
    branch: usize,
    line: usize,
    kind: FitnessKind,
) -> f64 {
    let cell = match side {
        CellSide::Positive => &pair.positive,
        CellSide::Negative => &pair.negative,
    };
    let mut acc = 0.0;
    for i in 0..data.len() {
        let x = data.row(i);
        let y = pair.output(x);
        let err = match kind {
            FitnessKind::LinearError => data.target(i) - y,
            FitnessKind::SignumError => signum(data.target(i) - y),
        };
        acc += x[line] * cell.branch_drive(branch, x) * err;
    }
    side.sign() * acc / data.len() as f64
}

/// The outcome of one rewiring iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Training MAE after the iteration's action.
    pub mae: f64,
    /// The provisional swap strictly lowered the MAE and was committed.
    pub accepted: bool,
    /// The stall counter expired and the swap was committed despite not
    /// lowering the MAE.
    pub escaped: bool,
}

/// Per-iteration record of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    /// MAE before the first iteration, under the initial wiring.
    pub initial_mae: f64,
    /// MAE after each iteration.
    pub mae: Vec<f64>,
    pub accepted: Vec<bool>,
    pub escaped: Vec<bool>,
    /// Lowest MAE observed (including the initial wiring).
    pub best_mae: f64,
    /// Iteration (1-based) that produced the best MAE; 0 means the initial
    /// wiring was never improved.
    pub best_iteration: usize,
}

impl TrainingTrace {
    pub fn accepted_count(&self) -> usize {
        self.accepted.iter().filter(|&&a| a).count()
    }

    pub fn escape_count(&self) -> usize {
        self.escaped.iter().filter(|&&e| e).count()
    }

    /// Writes the trace as delimited text: `iteration mae accepted escaped`.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# iteration mae accepted escaped")?;
        for (i, m) in self.mae.iter().enumerate() {
            writeln!(
                w,
                "{} {} {} {}",
                i + 1,
                m,
                self.accepted[i] as u8,
                self.escaped[i] as u8
            )?;
        }
        Ok(())
    }
}

/// One synapse slot in the pooled (both cells) index space.
#[derive(Debug, Clone, Copy)]
struct SynapseRef {
    side: CellSide,
    branch: usize,
    slot: usize,
}

/// Incremental evaluation state: per-sample branch drives and cell sums,
/// kept consistent with the pair's wiring across swaps.
struct EvalCache {
    branch_pos: Vec<f64>, // samples * m
    branch_neg: Vec<f64>,
    sum_pos: Vec<f64>, // samples
    sum_neg: Vec<f64>,
    mae: f64,
}

/// Drives the rewiring search over a borrowed pair. The trainer owns the
/// only mutable reference for its lifetime, so the cache cannot go stale.
pub struct NrwTrainer<'a> {
    pair: &'a mut ReadoutPair,
    data: &'a SampleSet,
    config: TrainerConfig,
    cache: EvalCache,
    stalled_iterations: usize,
    rng: ChaCha8Rng,
}

impl<'a> NrwTrainer<'a> {
    pub fn new(pair: &'a mut ReadoutPair, data: &'a SampleSet, config: TrainerConfig) -> Result<Self> {
        config.validate(pair)?;
        if data.is_empty() {
            return Err(Error::invalid("training set is empty"));
        }
        if data.dim() != pair.input_dim() {
            return Err(Error::invalid(format!(
                "data dimension {} does not match readout input dimension {}",
                data.dim(),
                pair.input_dim()
            )));
        }
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let cache = EvalCache::build(pair, data);
        Ok(NrwTrainer {
            pair,
            data,
            config,
            cache,
            stalled_iterations: 0,
            rng,
        })
    }

    pub fn current_mae(&self) -> f64 {
        self.cache.mae
    }

    fn pool_ref(&self, pool_index: usize) -> SynapseRef {
        let per_cell = self.pair.branches() * self.pair.slots();
        let (side, local) = if pool_index < per_cell {
            (CellSide::Positive, pool_index)
        } else {
            (CellSide::Negative, pool_index - per_cell)
        };
        SynapseRef {
            side,
            branch: local / self.pair.slots(),
            slot: local % self.pair.slots(),
        }
    }

    fn error_term(&self, sample: usize) -> f64 {
        let y = self
            .pair
            .squash
            .apply(self.cache.sum_pos[sample] - self.cache.sum_neg[sample]);
        let e = self.data.target(sample) - y;
        match self.config.fitness {
            FitnessKind::LinearError => e,
            FitnessKind::SignumError => signum(e),
        }
    }

    /// Fitness of an existing synapse from the cached drives.
    fn cached_fitness(&self, sref: SynapseRef) -> f64 {
        let (cell, drives) = match sref.side {
            CellSide::Positive => (&self.pair.positive, &self.cache.branch_pos),
            CellSide::Negative => (&self.pair.negative, &self.cache.branch_neg),
        };
        let m = cell.branches();
        let line = cell.afferent(sref.branch, sref.slot);
        let mut acc = 0.0;
        for i in 0..self.data.len() {
            let x = self.data.row(i);
            acc += x[line] * drives[i * m + sref.branch] * self.error_term(i);
        }
        sref.side.sign() * acc / self.data.len() as f64
    }

    /// Commits a swap and updates the cache incrementally.
    fn commit(&mut self, sref: SynapseRef, new_line: usize) {
        let nl = self.pair.nl;
        {
            let (cell, drives, sums) = match sref.side {
                CellSide::Positive => (
                    &mut self.pair.positive,
                    &mut self.cache.branch_pos,
                    &mut self.cache.sum_pos,
                ),
                CellSide::Negative => (
                    &mut self.pair.negative,
                    &mut self.cache.branch_neg,
                    &mut self.cache.sum_neg,
                ),
            };
            let old_line = cell.afferent(sref.branch, sref.slot);
            cell.set_afferent(sref.branch, sref.slot, new_line)
                .expect("candidate line validated against input dim");
            let m = cell.branches();
            for i in 0..self.data.len() {
                let x = self.data.row(i);
                let v_old = drives[i * m + sref.branch];
                let v_new = v_old + x[new_line] - x[old_line];
                drives[i * m + sref.branch] = v_new;
                sums[i] += branch_nl(v_new, &nl) - branch_nl(v_old, &nl);
            }
        }
        let mut total = 0.0;
        for i in 0..self.data.len() {
            let y = self
                .pair
                .squash
                .apply(self.cache.sum_pos[i] - self.cache.sum_neg[i]);
            total += (self.data.target(i) - y).abs();
        }
        self.cache.mae = total / self.data.len() as f64;
    }

    /// Runs one rewiring iteration: score a target set, pick its
    /// lowest-fitness synapse, then audition up to `max_local` replacement
    /// sets on that synapse's branch, committing the first candidate that
    /// strictly lowers the training error. An iteration whose auditions
    /// all fail leaves the wiring untouched; after `max_local` consecutive
    /// failed iterations the last candidate is committed anyway, escaping
    /// the local minimum at the cost of a temporarily higher error.
    pub fn step(&mut self) -> StepOutcome {
        let per_cell = self.pair.branches() * self.pair.slots();
        let pool = 2 * per_cell;

        // (a) target set drawn across both cells without replacement
        let chosen = index::sample(&mut self.rng, pool, self.config.target_set.min(pool));

        // (b)-(c) lowest-fitness synapse; ties broken by pool order
        let mut worst: Option<(f64, usize)> = None;
        let mut indices: Vec<usize> = chosen.into_iter().collect();
        indices.sort_unstable();
        for idx in indices {
            let c = self.cached_fitness(self.pool_ref(idx));
            let better = match worst {
                None => true,
                Some((wc, _)) => c < wc,
            };
            if better {
                worst = Some((c, idx));
            }
        }
        let (_, worst_idx) = worst.expect("target set is non-empty");
        let worst_ref = self.pool_ref(worst_idx);

        // (d)-(f) audition a replacement set on that branch: candidates are
        // ranked by fitness and tried in that order, and the first one
        // whose swap strictly lowers the training error is committed. When
        // a whole set fails, a fresh set is drawn, up to `max_local` sets;
        // per-line fitness and rejected swaps are memoized since the
        // wiring is frozen until a commit.
        let mut line_fitness: Vec<Option<f64>> = vec![None; self.pair.input_dim()];
        let mut line_mae: Vec<Option<f64>> = vec![None; self.pair.input_dim()];
        // fitness-best candidate across the iteration's auditions, used
        // if a stall forces an escape commit
        let mut fitness_best: Option<(f64, usize)> = None;
        for _attempt in 0..self.config.max_local {
            let cand = index::sample(
                &mut self.rng,
                self.pair.input_dim(),
                self.config.replacement_set,
            );
            let mut lines: Vec<usize> = cand.into_iter().collect();
            lines.sort_unstable();
            let mut scored: Vec<(f64, usize)> = lines
                .into_iter()
                .map(|line| {
                    let c = *line_fitness[line].get_or_insert_with(|| {
                        candidate_fitness_standalone(
                            self.pair,
                            self.data,
                            &self.cache,
                            self.config.fitness,
                            worst_ref.side,
                            worst_ref.branch,
                            line,
                        )
                    });
                    (c, line)
                })
                .collect();
            // descending fitness; ties broken toward the lower line index
            scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            if let Some(&(c, line)) = scored.first() {
                let better = match fitness_best {
                    None => true,
                    Some((bc, bl)) => c > bc || (c == bc && line < bl),
                };
                if better {
                    fitness_best = Some((c, line));
                }
            }
            for &(_, line) in &scored {
                let provisional = *line_mae[line].get_or_insert_with(|| {
                    provisional_mae_standalone(self.pair, self.data, &self.cache, worst_ref, line)
                });
                if provisional < self.cache.mae {
                    self.commit(worst_ref, line);
                    self.stalled_iterations = 0;
                    return StepOutcome {
                        mae: self.cache.mae,
                        accepted: true,
                        escaped: false,
                    };
                }
            }
        }
        self.stalled_iterations += 1;
        if self.stalled_iterations >= self.config.max_local {
            let (_, line) = fitness_best.expect("at least one candidate audited");
            self.commit(worst_ref, line);
            self.stalled_iterations = 0;
            return StepOutcome {
                mae: self.cache.mae,
                accepted: false,
                escaped: true,
            };
        }
        StepOutcome {
            mae: self.cache.mae,
            accepted: false,
            escaped: false,
        }
    }
}

/// Fitness of a silent candidate line placed on a branch: the candidate
/// uses its own input but the branch's current drive.
fn candidate_fitness_standalone(
    pair: &ReadoutPair,
    data: &SampleSet,
    cache: &EvalCache,
    kind: FitnessKind,
    side: CellSide,
    branch: usize,
    line: usize,
) -> f64 {
    let drives = match side {
        CellSide::Positive => &cache.branch_pos,
        CellSide::Negative => &cache.branch_neg,
    };
    let m = pair.branches();
    let mut acc = 0.0;
    for i in 0..data.len() {
        let x = data.row(i);
        let y = pair.squash.apply(cache.sum_pos[i] - cache.sum_neg[i]);
        let e = data.target(i) - y;
        let err = match kind {
            FitnessKind::LinearError => e,
            FitnessKind::SignumError => signum(e),
        };
        acc += x[line] * drives[i * m + branch] * err;
    }
    side.sign() * acc / data.len() as f64
}

/// MAE if the synapse's current line were replaced by `new_line`, without
/// touching the cache.
fn provisional_mae_standalone(
    pair: &ReadoutPair,
    data: &SampleSet,
    cache: &EvalCache,
    sref: SynapseRef,
    new_line: usize,
) -> f64 {
    let (cell, drives) = match sref.side {
        CellSide::Positive => (&pair.positive, &cache.branch_pos),
        CellSide::Negative => (&pair.negative, &cache.branch_neg),
    };
    let old_line = cell.afferent(sref.branch, sref.slot);
    let m = cell.branches();
    let nl = &pair.nl;
    let mut total = 0.0;
    for i in 0..data.len() {
        let x = data.row(i);
        let v_old = drives[i * m + sref.branch];
        let v_new = v_old + x[new_line] - x[old_line];
        let delta = branch_nl(v_new, nl) - branch_nl(v_old, nl);
        let (fp, fm) = match sref.side {
            CellSide::Positive => (cache.sum_pos[i] + delta, cache.sum_neg[i]),
            CellSide::Negative => (cache.sum_pos[i], cache.sum_neg[i] + delta),
        };
        let y = pair.squash.apply(fp - fm);
        total += (data.target(i) - y).abs();
    }
    total / data.len() as f64
}

impl EvalCache {
    fn build(pair: &ReadoutPair, data: &SampleSet) -> EvalCache {
        let m = pair.branches();
        let n = data.len();
        let mut branch_pos = vec![0.0; n * m];
        let mut branch_neg = vec![0.0; n * m];
        let mut sum_pos = vec![0.0; n];
        let mut sum_neg = vec![0.0; n];
        let mut total = 0.0;
        for i in 0..n {
            let x = data.row(i);
            let mut fp = 0.0;
            let mut fm = 0.0;
            for j in 0..m {
                let vp = pair.positive.branch_drive(j, x);
                let vm = pair.negative.branch_drive(j, x);
                branch_pos[i * m + j] = vp;
                branch_neg[i * m + j] = vm;
                fp += branch_nl(vp, &pair.nl);
                fm += branch_nl(vm, &pair.nl);
            }
            sum_pos[i] = fp;
            sum_neg[i] = fm;
            let y = pair.squash.apply(fp - fm);
            total += (data.target(i) - y).abs();
        }
        EvalCache {
            branch_pos,
            branch_neg,
            sum_pos,
            sum_neg,
            mae: total / n as f64,
        }
    }
}

/// Trains the pair for `max_iterations` rewiring iterations and restores
/// the wiring with the lowest observed training MAE.
pub fn train(pair: &mut ReadoutPair, data: &SampleSet, config: &TrainerConfig) -> Result<TrainingTrace> {
    let mut trainer = NrwTrainer::new(pair, data, *config)?;
    let initial_mae = trainer.current_mae();
    let mut best_mae = initial_mae;
    let mut best_iteration = 0usize;
    let mut best_wiring: (Vec<usize>, Vec<usize>) = (
        trainer.pair.positive.wiring().to_vec(),
        trainer.pair.negative.wiring().to_vec(),
    );
    let mut mae_trace = Vec::with_capacity(config.max_iterations);
    let mut accepted = Vec::with_capacity(config.max_iterations);
    let mut escaped = Vec::with_capacity(config.max_iterations);

    for it in 1..=config.max_iterations {
        let out = trainer.step();
        mae_trace.push(out.mae);
        accepted.push(out.accepted);
        escaped.push(out.escaped);
        if out.mae < best_mae {
            best_mae = out.mae;
            best_iteration = it;
            best_wiring = (
                trainer.pair.positive.wiring().to_vec(),
                trainer.pair.negative.wiring().to_vec(),
            );
        }
    }

    pair.positive.replace_wiring(best_wiring.0);
    pair.negative.replace_wiring(best_wiring.1);

    Ok(TrainingTrace {
        initial_mae,
        mae: mae_trace,
        accepted,
        escaped,
        best_mae,
        best_iteration,
    })
}

/// Outputs of the pair over a whole sample set.
pub fn pair_outputs(pair: &ReadoutPair, data: &SampleSet) -> Vec<f64> {
    data.rows().map(|x| pair.output(x)).collect()
}

/// Training-set MAE of the pair as currently wired.
pub fn evaluate_mae(pair: &ReadoutPair, data: &SampleSet) -> Result<f64> {
    mae(data.targets(), &pair_outputs(pair, data))
}
