//! The parallel-perceptron baseline readout and its p-delta training rule.
//!
//! A bank of sign perceptrons shares one input vector (augmented with a
//! constant 1 for the bias); the vote sum goes through a squashing
//! function chosen per task. Training applies the margin-stabilized
//! delta rule to the subset of perceptrons that are wrong or barely
//! right, then re-normalizes every updated weight vector to unit length.

use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::SampleSet;
use crate::dendrite::NonlinearityParams;
use crate::error::{Error, Result};

/// A layer of `n` perceptrons over a `d`-dimensional input. Each weight
/// vector has `d + 1` entries, the last being the bias weight, and is kept
/// at unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronBank {
    input_dim: usize,
    weights: Vec<f64>, // n rows of (input_dim + 1)
}

impl PerceptronBank {
    /// A bank with unit-norm Gaussian-random weight vectors.
    pub fn random<R: Rng + ?Sized>(n: usize, input_dim: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || input_dim == 0 {
            return Err(Error::invalid("bank shape must be non-zero"));
        }
        let w = input_dim + 1;
        let mut weights = vec![0.0; n * w];
        for row in weights.chunks_mut(w) {
            loop {
                for v in row.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    for v in row.iter_mut() {
                        *v /= norm;
                    }
                    break;
                }
            }
        }
        Ok(PerceptronBank { input_dim, weights })
    }

    pub fn from_weights(input_dim: usize, weights: Vec<f64>) -> Result<Self> {
        if input_dim == 0 || weights.is_empty() || weights.len() % (input_dim + 1) != 0 {
            return Err(Error::invalid("weight shape mismatch"));
        }
        Ok(PerceptronBank { input_dim, weights })
    }

    pub fn n(&self) -> usize {
        self.weights.len() / (self.input_dim + 1)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn weight_row(&self, i: usize) -> &[f64] {
        let w = self.input_dim + 1;
        &self.weights[i * w..(i + 1) * w]
    }

    fn weight_row_mut(&mut self, i: usize) -> &mut [f64] {
        let w = self.input_dim + 1;
        &mut self.weights[i * w..(i + 1) * w]
    }

    /// The vote sum `p`: each perceptron contributes +1 or -1.
    pub fn vote_sum(&self, x_aug: &[f64]) -> f64 {
        (0..self.n())
            .map(|i| perceptron_out(self.weight_row(i), x_aug))
            .sum()
    }

    /// The bank output under the given squash.
    pub fn output(&self, x_aug: &[f64], squash: &BankSquash) -> f64 {
        squash.apply(self.vote_sum(x_aug), self.n())
    }

    /// Diagnostic variant: each perceptron's sign output is replaced by a
    /// signed saturating square of its activation, preserving analog
    /// information at the summing node.
    pub fn square_sum(&self, x_aug: &[f64], nl: &NonlinearityParams) -> f64 {
        (0..self.n())
            .map(|i| {
                let s = dot(self.weight_row(i), x_aug);
                s.signum() * (s * s / nl.x_thr).min(nl.x_sat)
            })
            .sum()
    }

    /// Writes weights as delimited text with a `n=<n> d=<d>` header line
    /// followed by one row of `d + 1` values per perceptron.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n={} d={}", self.n(), self.input_dim)?;
        for i in 0..self.n() {
            let line: Vec<String> = self.weight_row(i).iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Reads a bank written by [`PerceptronBank::write_text`].
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("missing bank header".into()))??;
        let mut n = None;
        let mut d = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("n=") {
                n = v.parse::<usize>().ok();
            } else if let Some(v) = tok.strip_prefix("d=") {
                d = v.parse::<usize>().ok();
            }
        }
        let (n, d) = match (n, d) {
            (Some(n), Some(d)) => (n, d),
            _ => return Err(Error::Format(format!("bad bank header: {header}"))),
        };
        let mut weights = Vec::with_capacity(n * (d + 1));
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            for tok in line.split_whitespace() {
                weights.push(
                    tok.parse::<f64>()
                        .map_err(|_| Error::Format(format!("bad weight: {tok}")))?,
                );
            }
        }
        if weights.len() != n * (d + 1) {
            return Err(Error::Format(format!(
                "expected {} weights, found {}",
                n * (d + 1),
                weights.len()
            )));
        }
        PerceptronBank::from_weights(d, weights)
    }
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    debug_assert_eq!(w.len(), x.len());
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Single perceptron output: +1 when `w . x >= 0`, -1 otherwise.
pub fn perceptron_out(w: &[f64], x_aug: &[f64]) -> f64 {
    if dot(w, x_aug) >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Squashing of the vote sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BankSquash {
    /// `clamp(p / rho, -1, 1)`; the resolution `rho` controls the output
    /// quantum `2 / rho`.
    ClippedLinear { rho: f64 },
    /// `p >= 0` maps to 1, otherwise 0 (two-class decisions).
    SignThreshold,
    /// `1 / (1 + exp(-p/2))`, matching the dendritic readout's squash.
    SigmoidHalf,
}

impl BankSquash {
    pub fn apply(&self, p: f64, _n: usize) -> f64 {
        match *self {
            BankSquash::ClippedLinear { rho } => (p / rho).clamp(-1.0, 1.0),
            BankSquash::SignThreshold => {
                if p >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            BankSquash::SigmoidHalf => 1.0 / (1.0 + (-p / 2.0).exp()),
        }
    }
}

/// How the bank's forward pass is computed during training/evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PprOutputMode {
    /// Sign votes summed, then squashed.
    Vote(BankSquash),
    /// Saturating-square per-perceptron outputs summed, then squashed.
    Square(NonlinearityParams, BankSquash),
}

impl PprOutputMode {
    pub fn evaluate(&self, bank: &PerceptronBank, x_aug: &[f64]) -> f64 {
        match self {
            PprOutputMode::Vote(sq) => bank.output(x_aug, sq),
            PprOutputMode::Square(nl, sq) => sq.apply(bank.square_sum(x_aug, nl), bank.n()),
        }
    }
}

/// p-delta parameters: learning rate, output accuracy, clearance margin
/// and the margin-term scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PDeltaParams {
    pub eta: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub mu: f64,
}

impl Default for PDeltaParams {
    fn default() -> Self {
        PDeltaParams {
            eta: 0.01,
            epsilon: 0.05,
            gamma: 0.05,
            mu: 1.0,
        }
    }
}

/// Which branch of the update rule fired for one perceptron.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateCase {
    /// Output too high and this perceptron voted +1: push along `-x`.
    TooHigh,
    /// Output too low and this perceptron voted -1: push along `+x`.
    TooLow,
    /// Correct but `0 <= w.x < gamma`: nudge `mu * (+x)`.
    MarginPositive,
    /// Correct but `-gamma < w.x < 0`: nudge `mu * (-x)`.
    MarginNegative,
    None,
}

/// One p-delta update for a single augmented sample, given the bank output
/// `o_hat` computed by the caller. Every updated weight vector is
/// re-normalized to unit length. Returns the rule case applied per
/// perceptron.
pub fn pdelta_update_with_output(
    bank: &mut PerceptronBank,
    x_aug: &[f64],
    o_hat: f64,
    target: f64,
    params: &PDeltaParams,
) -> Vec<UpdateCase> {
    let n = bank.n();
    let mut cases = Vec::with_capacity(n);
    for i in 0..n {
        let row = bank.weight_row_mut(i);
        let s = dot(row, x_aug);
        let case = if o_hat > target + params.epsilon && s >= 0.0 {
            for (w, &x) in row.iter_mut().zip(x_aug) {
                *w += params.eta * -x;
            }
            UpdateCase::TooHigh
        } else if o_hat < target - params.epsilon && s < 0.0 {
            for (w, &x) in row.iter_mut().zip(x_aug) {
                *w += params.eta * x;
            }
            UpdateCase::TooLow
        } else if o_hat <= target + params.epsilon && (0.0..params.gamma).contains(&s) {
            for (w, &x) in row.iter_mut().zip(x_aug) {
                *w += params.eta * params.mu * x;
            }
            UpdateCase::MarginPositive
        } else if o_hat >= target - params.epsilon && s > -params.gamma && s < 0.0 {
            for (w, &x) in row.iter_mut().zip(x_aug) {
                *w += params.eta * params.mu * -x;
            }
            UpdateCase::MarginNegative
        } else {
            UpdateCase::None
        };
        if case != UpdateCase::None {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
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

/// One p-delta update, computing the bank output under the given mode.
pub fn pdelta_update(
    bank: &mut PerceptronBank,
    x_aug: &[f64],
    target: f64,
    params: &PDeltaParams,
    mode: &PprOutputMode,
) -> Vec<UpdateCase> {
    let o_hat = mode.evaluate(bank, x_aug);
    pdelta_update_with_output(bank, x_aug, o_hat, target, params)
}

/// Per-epoch record of a p-delta run.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochTrace {
    pub initial_mae: f64,
    /// MAE over the training set after each epoch, with frozen weights.
    pub mae: Vec<f64>,
    pub best_mae: f64,
    /// Epoch (1-based) that produced the best MAE; 0 if never improved.
    pub best_epoch: usize,
}

impl EpochTrace {
    /// Same text layout as the rewiring trace; the accept/escape columns
    /// do not apply and are written as zeros.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# iteration mae accepted escaped")?;
        for (i, m) in self.mae.iter().enumerate() {
            writeln!(w, "{} {} 0 0", i + 1, m)?;
        }
        Ok(())
    }
}

/// MAE of the bank over a sample set under the given output mode.
pub fn evaluate_bank_mae(bank: &PerceptronBank, data: &SampleSet, mode: &PprOutputMode) -> Result<f64> {
    let mut x_aug = vec![0.0; data.dim() + 1];
    x_aug[data.dim()] = 1.0;
    let mut total = 0.0;
    for i in 0..data.len() {
        x_aug[..data.dim()].copy_from_slice(data.row(i));
        total += (data.target(i) - mode.evaluate(bank, &x_aug)).abs();
    }
    if data.is_empty() {
        return Err(Error::invalid("empty sample set"));
    }
    Ok(total / data.len() as f64)
}

/// Per-sample outputs of the bank over a sample set.
pub fn bank_outputs(bank: &PerceptronBank, data: &SampleSet, mode: &PprOutputMode) -> Vec<f64> {
    let mut x_aug = vec![0.0; data.dim() + 1];
    x_aug[data.dim()] = 1.0;
    (0..data.len())
        .map(|i| {
            x_aug[..data.dim()].copy_from_slice(data.row(i));
            mode.evaluate(bank, &x_aug)
        })
        .collect()
}

/// Trains the bank with per-sample p-delta updates for the given number of
/// epochs and restores the weights of the best epoch. The learning rate
/// and the clearance margin both decay as `1/sqrt(epoch)`.
pub fn pdelta_train(
    bank: &mut PerceptronBank,
    data: &SampleSet,
    params: &PDeltaParams,
    epochs: usize,
    mode: &PprOutputMode,
) -> Result<EpochTrace> {
    if data.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    if data.dim() != bank.input_dim() {
        return Err(Error::invalid(format!(
            "data dimension {} does not match bank input dimension {}",
            data.dim(),
            bank.input_dim()
        )));
    }
    let initial_mae = evaluate_bank_mae(bank, data, mode)?;
    let mut best_mae = initial_mae;
    let mut best_epoch = 0usize;
    let mut best_weights = bank.weights.clone();
    let mut mae_trace = Vec::with_capacity(epochs);
    let mut x_aug = vec![0.0; data.dim() + 1];
    x_aug[data.dim()] = 1.0;

    for epoch in 1..=epochs {
        let decay = 1.0 / (epoch as f64).sqrt();
        let epoch_params = PDeltaParams {
            eta: params.eta * decay,
            epsilon: params.epsilon,
            gamma: params.gamma * decay,
            mu: params.mu,
        };
        for i in 0..data.len() {
            x_aug[..data.dim()].copy_from_slice(data.row(i));
            pdelta_update(bank, &x_aug, data.target(i), &epoch_params, mode);
        }
        let epoch_mae = evaluate_bank_mae(bank, data, mode)?;
        mae_trace.push(epoch_mae);
        if epoch_mae < best_mae {
            best_mae = epoch_mae;
            best_epoch = epoch;
            best_weights.copy_from_slice(&bank.weights);
        }
    }

    bank.weights = best_weights;
    Ok(EpochTrace {
        initial_mae,
        mae: mae_trace,
        best_mae,
        best_epoch,
    })
}
