//! Parameter sweeps: baseline size, branch saturation ceiling and
//! dendrite count. Each sweep re-uses one liquid simulation per seed and
//! varies only the readout under study.

use std::io::Write;

use rayon::prelude::*;

use crate::capacity::{bn_capacity, CellShape};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::run::{prepare_trial, run_der_trial, run_ppr_trial};

/// One sweep row: the swept parameter (as text so `inf` prints cleanly),
/// mean train/test MAE over the seeds, and the cell capacity in bits when
/// the sweep varies the cell shape.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: String,
    pub mean_train_mae: f64,
    pub mean_test_mae: f64,
    pub capacity_bits: Option<f64>,
}

/// Writes sweep rows as delimited text.
pub fn write_sweep_rows<W: Write>(mut w: W, header: &str, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "# {header}")?;
    for r in rows {
        match r.capacity_bits {
            Some(bits) => writeln!(
                w,
                "{} {} {} {}",
                r.param, r.mean_train_mae, r.mean_test_mae, bits
            )?,
            None => writeln!(w, "{} {} {}", r.param, r.mean_train_mae, r.mean_test_mae)?,
        }
    }
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Trains the baseline at each bank size `n` against the dendritic
/// readout's fixed configuration. Returns the baseline rows plus the
/// dendritic reference row (first element of the tuple).
pub fn sweep_ppr_n(
    cfg: &ExperimentConfig,
    n_values: &[usize],
) -> Result<(SweepRow, Vec<SweepRow>)> {
    if n_values.is_empty() {
        return Err(Error::invalid("sweep needs at least one bank size"));
    }
    // per-seed: prepare once, train everything on the same states
    let per_seed: Vec<Result<(f64, f64, Vec<(f64, f64)>)>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let trial = prepare_trial(cfg, seed, false)?;
            let der = run_der_trial(cfg, seed, &trial)?;
            let mut ppr = Vec::with_capacity(n_values.len());
            for &n in n_values {
                let r = run_ppr_trial(cfg, seed, &trial, Some(n), None)?;
                ppr.push((r.train_mae, r.test_mae));
            }
            Ok((der.train_mae, der.test_mae, ppr))
        })
        .collect();

    let mut der_train = Vec::new();
    let mut der_test = Vec::new();
    let mut ppr_train = vec![Vec::new(); n_values.len()];
    let mut ppr_test = vec![Vec::new(); n_values.len()];
    for r in per_seed {
        let (dt, dv, ppr) = r?;
        der_train.push(dt);
        der_test.push(dv);
        for (i, (t, v)) in ppr.into_iter().enumerate() {
            ppr_train[i].push(t);
            ppr_test[i].push(v);
        }
    }
    let der_row = SweepRow {
        param: "der".into(),
        mean_train_mae: mean(&der_train),
        mean_test_mae: mean(&der_test),
        capacity_bits: None,
    };
    let rows = n_values
        .iter()
        .enumerate()
        .map(|(i, &n)| SweepRow {
            param: n.to_string(),
            mean_train_mae: mean(&ppr_train[i]),
            mean_test_mae: mean(&ppr_test[i]),
            capacity_bits: None,
        })
        .collect();
    Ok((der_row, rows))
}

/// Trains the dendritic readout at each saturation ceiling; pass
/// `f64::INFINITY` for the unbounded square law.
pub fn sweep_xsat(cfg: &ExperimentConfig, xsat_values: &[f64]) -> Result<Vec<SweepRow>> {
    if xsat_values.is_empty() {
        return Err(Error::invalid("sweep needs at least one ceiling"));
    }
    let per_seed: Vec<Result<Vec<(f64, f64)>>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let trial = prepare_trial(cfg, seed, false)?;
            let mut out = Vec::with_capacity(xsat_values.len());
            for &x_sat in xsat_values {
                let mut varied = cfg.clone();
                varied.der.x_sat = x_sat;
                let r = run_der_trial(&varied, seed, &trial)?;
                out.push((r.train_mae, r.test_mae));
            }
            Ok(out)
        })
        .collect();

    let mut train = vec![Vec::new(); xsat_values.len()];
    let mut test = vec![Vec::new(); xsat_values.len()];
    for r in per_seed {
        for (i, (t, v)) in r?.into_iter().enumerate() {
            train[i].push(t);
            test[i].push(v);
        }
    }
    Ok(xsat_values
        .iter()
        .enumerate()
        .map(|(i, &x)| SweepRow {
            param: if x.is_infinite() {
                "inf".into()
            } else {
                format!("{x}")
            },
            mean_train_mae: mean(&train[i]),
            mean_test_mae: mean(&test[i]),
            capacity_bits: None,
        })
        .collect())
}

/// How the dendrite sweep varies the cell shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DendriteSweepMode {
    /// Vary branch count `m`, keep slots-per-branch `k` fixed: the synapse
    /// budget grows with `m`.
    FixedSlots,
    /// Keep the per-cell synapse budget `s = m*k` fixed: swept values must
    /// divide it.
    FixedTotal,
}

/// Trains the dendritic readout across branch counts, reporting the cell
/// capacity next to each error. In `FixedTotal` mode the budget is the
/// configured `branches * slots`.
pub fn sweep_dendrites(
    cfg: &ExperimentConfig,
    mode: DendriteSweepMode,
    m_values: &[usize],
) -> Result<Vec<SweepRow>> {
    if m_values.is_empty() {
        return Err(Error::invalid("sweep needs at least one branch count"));
    }
    let budget = cfg.der.branches * cfg.der.slots;
    let mut shapes = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let k = match mode {
            DendriteSweepMode::FixedSlots => cfg.der.slots,
            DendriteSweepMode::FixedTotal => {
                if m == 0 || budget % m != 0 {
                    return Err(Error::invalid(format!(
                        "branch count {m} does not divide the synapse budget {budget}"
                    )));
                }
                budget / m
            }
        };
        shapes.push((m, k));
    }

    let per_seed: Vec<Result<Vec<(f64, f64)>>> = cfg
        .seeds
        .par_iter()
        .map(|&seed| {
            let trial = prepare_trial(cfg, seed, false)?;
            let mut out = Vec::with_capacity(shapes.len());
            for &(m, k) in &shapes {
                let mut varied = cfg.clone();
                varied.der.branches = m;
                varied.der.slots = k;
                // keep the trainer's target set inside the pooled synapse
                // count for small shapes
                varied.trainer.target_set = varied.trainer.target_set.min(2 * m * k);
                let r = run_der_trial(&varied, seed, &trial)?;
                out.push((r.train_mae, r.test_mae));
            }
            Ok(out)
        })
        .collect();

    let mut train = vec![Vec::new(); shapes.len()];
    let mut test = vec![Vec::new(); shapes.len()];
    for r in per_seed {
        for (i, (t, v)) in r?.into_iter().enumerate() {
            train[i].push(t);
            test[i].push(v);
        }
    }
    Ok(shapes
        .iter()
        .enumerate()
        .map(|(i, &(m, k))| SweepRow {
            param: m.to_string(),
            mean_train_mae: mean(&train[i]),
            mean_test_mae: mean(&test[i]),
            capacity_bits: Some(bn_capacity(&CellShape::new(m, k, cfg.liquid.num_neurons))),
        })
        .collect())
}
