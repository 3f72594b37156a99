//! The matched-protocol robustness comparison: train both readouts on the
//! same liquid, then evaluate the test set with hardware mismatch injected
//! and compare the error increase.
//!
//! The protocol matches resources across readouts: the baseline bank uses
//! one perceptron per dendritic branch (`n = 2m`), the same convolution
//! kernel, and the same saturating-square output stage so that the
//! square-law mismatch factor applies to both.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dendrite::NonlinearityParams;
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Task};
use crate::harness::run::{
    mix_seed, pattern_error, prepare_trial, run_der_trial, run_ppr_trial, ReadoutKind,
    STAGE_VARIATION,
};
use crate::mismatch::{
    der_outputs_with_variation, draw_variation, ppr_outputs_with_variation, ReadoutTopology,
    VariationSpec,
};
use crate::perceptron::{BankSquash, PprOutputMode};
use crate::rewiring::mae;

/// Which mismatch sources are switched on for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariationMode {
    /// Unperturbed baseline.
    None,
    /// Decay-constant spread only.
    Tau,
    /// Square-law factor spread only.
    Cni,
    /// Synaptic gain spread only.
    I0,
    /// All three simultaneously.
    All,
}

impl VariationMode {
    pub const ALL_MODES: [VariationMode; 5] = [
        VariationMode::None,
        VariationMode::Tau,
        VariationMode::Cni,
        VariationMode::I0,
        VariationMode::All,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            VariationMode::None => "none",
            VariationMode::Tau => "tau",
            VariationMode::Cni => "cni",
            VariationMode::I0 => "i0",
            VariationMode::All => "all",
        }
    }

    /// Restricts a base specification to this mode's sources.
    pub fn restrict(&self, base: &VariationSpec) -> VariationSpec {
        let mut spec = *base;
        match self {
            VariationMode::None => {
                spec.cv_tau = 0.0;
                spec.cv_i0 = 0.0;
                spec.cv_cni = 0.0;
            }
            VariationMode::Tau => {
                spec.cv_i0 = 0.0;
                spec.cv_cni = 0.0;
            }
            VariationMode::Cni => {
                spec.cv_tau = 0.0;
                spec.cv_i0 = 0.0;
            }
            VariationMode::I0 => {
                spec.cv_tau = 0.0;
                spec.cv_cni = 0.0;
            }
            VariationMode::All => {}
        }
        spec
    }
}

/// One robustness measurement: the test MAE of one readout under one
/// mismatch mode for one trial seed. `none` rows carry the unperturbed
/// baseline so error increases can be derived from the report alone.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessRow {
    pub mode: VariationMode,
    pub readout: ReadoutKind,
    pub seed: u64,
    pub mae: f64,
}

/// Writes the report as delimited text: `mode readout seed mae`.
pub fn write_robustness<W: Write>(mut w: W, rows: &[RobustnessRow]) -> Result<()> {
    writeln!(w, "# mode readout seed mae")?;
    for r in rows {
        writeln!(w, "{} {} {} {}", r.mode.name(), r.readout.name(), r.seed, r.mae)?;
    }
    Ok(())
}

/// Mean error increase of one readout between a mode and the baseline.
pub fn mean_delta(rows: &[RobustnessRow], readout: ReadoutKind, mode: VariationMode) -> Option<f64> {
    let pick = |m: VariationMode| -> Vec<(u64, f64)> {
        rows.iter()
            .filter(|r| r.readout == readout && r.mode == m)
            .map(|r| (r.seed, r.mae))
            .collect()
    };
    let base = pick(VariationMode::None);
    let perturbed = pick(mode);
    if base.is_empty() || base.len() != perturbed.len() {
        return None;
    }
    let deltas: Vec<f64> = perturbed
        .iter()
        .zip(&base)
        .map(|((_, p), (_, b))| p - b)
        .collect();
    Some(deltas.iter().sum::<f64>() / deltas.len() as f64)
}

/// Runs the matched robustness protocol. Per seed: train the dendritic
/// readout and a square-output baseline bank with `n = 2m` on the same
/// trial, then re-evaluate the test set under each mismatch mode with this
/// seed's variation draw. Mismatch touches only evaluation, never
/// training.
pub fn run_robustness(
    cfg: &ExperimentConfig,
    base_spec: &VariationSpec,
    modes: &[VariationMode],
) -> Result<Vec<RobustnessRow>> {
    if cfg.task != Task::SpikeClassification {
        // The protocol is defined on the classification benchmark.
        return Err(Error::Config(
            "robustness protocol runs on spike_classification".into(),
        ));
    }
    let per_seed: Vec<Result<Vec<RobustnessRow>>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let trial = prepare_trial(cfg, seed, true)?;
            let test_liquid = trial.test_liquid.as_ref().expect("kept by prepare_trial");
            let test_labels = trial.test_labels.as_ref().expect("classification task");

            let der = run_der_trial(cfg, seed, &trial)?;
            let nl = NonlinearityParams::new(trial.x_thr, cfg.der.x_sat)?;
            let matched_n = 2 * cfg.der.branches;
            let ppr_mode = PprOutputMode::Square(nl, BankSquash::SignThreshold);
            let ppr = run_ppr_trial(cfg, seed, &trial, Some(matched_n), Some(ppr_mode))?;

            let der_topology = ReadoutTopology::for_pair(&der.pair);
            let ppr_topology = ReadoutTopology::for_bank(&ppr.bank);
            let targets = trial.test_set.targets();

            let mut rows = Vec::new();
            for (mode_idx, &mode) in modes.iter().enumerate() {
                let spec = mode.restrict(base_spec);
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(
                    seed,
                    STAGE_VARIATION + ((mode_idx as u64) << 8),
                ));
                let der_draw = draw_variation(&spec, der_topology, &mut rng)?;
                let ppr_draw = draw_variation(&spec, ppr_topology, &mut rng)?;

                let mut der_outputs = Vec::with_capacity(targets.len());
                let mut ppr_outputs = Vec::with_capacity(targets.len());
                for trains in test_liquid {
                    der_outputs.extend(der_outputs_with_variation(
                        &der.pair,
                        trains,
                        &trial.kernel,
                        cfg.sample_period,
                        &der_draw,
                    )?);
                    ppr_outputs.extend(ppr_outputs_with_variation(
                        &ppr.bank,
                        trains,
                        &trial.kernel,
                        cfg.sample_period,
                        &nl,
                        &BankSquash::SignThreshold,
                        &ppr_draw,
                    )?);
                }
                let _ = pattern_error(&der_outputs, test_labels, trial.samples_per_pattern)?;
                rows.push(RobustnessRow {
                    mode,
                    readout: ReadoutKind::Der,
                    seed,
                    mae: mae(targets, &der_outputs)?,
                });
                rows.push(RobustnessRow {
                    mode,
                    readout: ReadoutKind::Ppr,
                    seed,
                    mae: mae(targets, &ppr_outputs)?,
                });
            }
            Ok(rows)
        })
        .collect();

    let mut rows = Vec::new();
    for r in per_seed {
        rows.extend(r?);
    }
    rows.sort_by_key(|r| (r.seed, r.mode.name(), r.readout.name()));
    Ok(rows)
}
