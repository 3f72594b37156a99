//! The dendritically enhanced readout: two opponent cells, each with `m`
//! branches of `k` binary synapses, a saturating square branch nonlinearity
//! and a task-dependent output squashing.
//!
//! Synaptic weights are identically 1; what is learned is *which* afferent
//! line occupies each synapse slot. See [`crate::rewiring`] for the
//! structural-plasticity trainer that rewires these cells.

use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::spike::StateMatrix;

/// A neuronal cell with `branches` dendrites, each holding `slots` binary
/// synapses wired to afferent lines in `[0, input_dim)`. The same line may
/// occupy several slots of one branch and counts once per slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DendriticCell {
    branches: usize,
    slots: usize,
    input_dim: usize,
    wiring: Vec<usize>, // branch-major, branches * slots entries
}

impl DendriticCell {
    pub fn new(branches: usize, slots: usize, input_dim: usize, wiring: Vec<usize>) -> Result<Self> {
        if branches == 0 || slots == 0 || input_dim == 0 {
            return Err(Error::invalid("cell shape must be non-zero"));
        }
        if wiring.len() != branches * slots {
            return Err(Error::invalid(format!(
                "wiring has {} entries, expected {}",
                wiring.len(),
                branches * slots
            )));
        }
        if let Some(&bad) = wiring.iter().find(|&&a| a >= input_dim) {
            return Err(Error::invalid(format!(
                "afferent index {bad} outside [0, {input_dim})"
            )));
        }
        Ok(DendriticCell {
            branches,
            slots,
            input_dim,
            wiring,
        })
    }

    /// A cell with every slot wired to a uniformly random afferent line.
    pub fn random<R: Rng + ?Sized>(
        branches: usize,
        slots: usize,
        input_dim: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let wiring = (0..branches * slots)
            .map(|_| rng.gen_range(0..input_dim))
            .collect();
        DendriticCell::new(branches, slots, input_dim, wiring)
    }

    pub fn branches(&self) -> usize {
        self.branches
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn wiring(&self) -> &[usize] {
        &self.wiring
    }

    /// The afferent lines feeding branch `j`.
    pub fn branch_afferents(&self, branch: usize) -> &[usize] {
        &self.wiring[branch * self.slots..(branch + 1) * self.slots]
    }

    pub fn afferent(&self, branch: usize, slot: usize) -> usize {
        self.wiring[branch * self.slots + slot]
    }

    /// Rewires one synapse slot to a new afferent line.
    pub fn set_afferent(&mut self, branch: usize, slot: usize, line: usize) -> Result<()> {
        if line >= self.input_dim {
            return Err(Error::invalid(format!(
                "afferent index {line} outside [0, {})",
                self.input_dim
            )));
        }
        self.wiring[branch * self.slots + slot] = line;
        Ok(())
    }

    pub(crate) fn replace_wiring(&mut self, wiring: Vec<usize>) {
        debug_assert_eq!(wiring.len(), self.wiring.len());
        self.wiring = wiring;
    }

    /// Summed synaptic drive of branch `j`: the sum of the state entries at
    /// the branch's afferent lines, repeats counted per slot.
    pub fn branch_drive(&self, branch: usize, x: &[f64]) -> f64 {
        self.branch_afferents(branch).iter().map(|&a| x[a]).sum()
    }

    /// Cell output: the branch nonlinearity applied to every branch drive,
    /// summed over branches. Bounded above by `branches * x_sat`.
    pub fn output(&self, x: &[f64], nl: &NonlinearityParams) -> f64 {
        (0..self.branches)
            .map(|j| branch_nl(self.branch_drive(j, x), nl))
            .sum()
    }

    /// Writes the wiring as text: one line per branch, `slots` afferent
    /// indices separated by spaces.
    pub fn write_wiring<W: Write>(&self, mut w: W) -> Result<()> {
        for j in 0..self.branches {
            let line: Vec<String> = self
                .branch_afferents(j)
                .iter()
                .map(|a| a.to_string())
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Reads a wiring written by [`DendriticCell::write_wiring`]. The
    /// afferent dimension is not stored in the file and must be supplied.
    pub fn read_wiring<R: BufRead>(r: R, input_dim: usize) -> Result<Self> {
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<usize> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| Error::Format(format!("bad afferent index: {tok}")))
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        let branches = rows.len();
        if branches == 0 {
            return Err(Error::Format("empty wiring file".into()));
        }
        let slots = rows[0].len();
        if rows.iter().any(|r| r.len() != slots) {
            return Err(Error::Format("ragged wiring rows".into()));
        }
        DendriticCell::new(branches, slots, input_dim, rows.concat())
    }
}

/// Parameters of the saturating square branch nonlinearity
/// `b(v) = min(v^2 / x_thr, x_sat)`. `x_sat` may be infinite, in which case
/// the branch output is the pure square law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearityParams {
    pub x_thr: f64,
    pub x_sat: f64,
}

impl NonlinearityParams {
    pub fn new(x_thr: f64, x_sat: f64) -> Result<Self> {
        if !(x_thr > 0.0) || x_thr.is_infinite() {
            return Err(Error::invalid(format!("x_thr must be positive and finite, got {x_thr}")));
        }
        if !(x_sat > 0.0) {
            return Err(Error::invalid(format!("x_sat must be positive, got {x_sat}")));
        }
        Ok(NonlinearityParams { x_thr, x_sat })
    }

    /// Square law with no saturation ceiling.
    pub fn unbounded(x_thr: f64) -> Result<Self> {
        Self::new(x_thr, f64::INFINITY)
    }
}

/// The branch nonlinearity. Supra-linear for `v > x_thr` (it crosses
/// `b(v) = v` exactly at `v = x_thr`) and clamped at `x_sat`.
pub fn branch_nl(v: f64, nl: &NonlinearityParams) -> f64 {
    (v * v / nl.x_thr).min(nl.x_sat)
}

/// Output squashing applied to the difference of the two cell outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Squash {
    /// `z >= 0` maps to 1, `z < 0` to 0. Ties go to the positive class.
    Signum01,
    /// `1 / (1 + exp(-z/2))`, used for approximation tasks.
    SigmoidHalf,
    /// The raw difference, used for analysis and gradient checks.
    Identity,
}

impl Squash {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Squash::Signum01 => {
                if z >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Squash::SigmoidHalf => 1.0 / (1.0 + (-z / 2.0).exp()),
            Squash::Identity => z,
        }
    }
}

/// Two opponent cells sharing one shape and nonlinearity; the readout
/// output is the squashed difference of their responses.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutPair {
    pub positive: DendriticCell,
    pub negative: DendriticCell,
    pub nl: NonlinearityParams,
    pub squash: Squash,
}

impl ReadoutPair {
    pub fn new(
        positive: DendriticCell,
        negative: DendriticCell,
        nl: NonlinearityParams,
        squash: Squash,
    ) -> Result<Self> {
        if positive.branches() != negative.branches()
            || positive.slots() != negative.slots()
            || positive.input_dim() != negative.input_dim()
        {
            return Err(Error::invalid("opponent cells must share one shape"));
        }
        Ok(ReadoutPair {
            positive,
            negative,
            nl,
            squash,
        })
    }

    /// A pair with both cells randomly wired.
    pub fn random<R: Rng + ?Sized>(
        branches: usize,
        slots: usize,
        input_dim: usize,
        nl: NonlinearityParams,
        squash: Squash,
        rng: &mut R,
    ) -> Result<Self> {
        let positive = DendriticCell::random(branches, slots, input_dim, rng)?;
        let negative = DendriticCell::random(branches, slots, input_dim, rng)?;
        ReadoutPair::new(positive, negative, nl, squash)
    }

    pub fn branches(&self) -> usize {
        self.positive.branches()
    }

    pub fn slots(&self) -> usize {
        self.positive.slots()
    }

    pub fn input_dim(&self) -> usize {
        self.positive.input_dim()
    }

    /// The readout output for one state vector.
    pub fn output(&self, x: &[f64]) -> f64 {
        let fp = self.positive.output(x, &self.nl);
        let fm = self.negative.output(x, &self.nl);
        self.squash.apply(fp - fm)
    }

    /// Writes both wirings: the positive cell's branches first, then the
    /// negative cell's, one line per branch.
    pub fn write_wiring<W: Write>(&self, mut w: W) -> Result<()> {
        self.positive.write_wiring(&mut w)?;
        self.negative.write_wiring(&mut w)
    }

    /// Reads a pair wiring written by [`ReadoutPair::write_wiring`]; the
    /// file holds `2 * branches` lines.
    pub fn read_wiring<R: BufRead>(
        r: R,
        branches: usize,
        input_dim: usize,
        nl: NonlinearityParams,
        squash: Squash,
    ) -> Result<Self> {
        let joint = DendriticCell::read_wiring(r, input_dim)?;
        if joint.branches() != 2 * branches {
            return Err(Error::Format(format!(
                "expected {} wiring lines, found {}",
                2 * branches,
                joint.branches()
            )));
        }
        let slots = joint.slots();
        let half = branches * slots;
        let positive = DendriticCell::new(branches, slots, input_dim, joint.wiring()[..half].to_vec())?;
        let negative = DendriticCell::new(branches, slots, input_dim, joint.wiring()[half..].to_vec())?;
        ReadoutPair::new(positive, negative, nl, squash)
    }
}

/// Majority vote over per-sample binary outputs; ties go to class 1.
/// Outputs above 0.5 count as class 1.
pub fn classify_pattern(per_sample_outputs: &[f64]) -> Result<u8> {
    if per_sample_outputs.is_empty() {
        return Err(Error::invalid("cannot classify an empty output list"));
    }
    let ones = per_sample_outputs.iter().filter(|&&y| y > 0.5).count();
    Ok(if 2 * ones >= per_sample_outputs.len() {
        1
    } else {
        0
    })
}

/// Mean of the non-zero entries of a state matrix: the average contribution
/// of an active synapse.
pub fn mean_active_state(states: &StateMatrix) -> Result<f64> {
    mean_active_states(std::slice::from_ref(states))
}

/// Pooled mean of the non-zero entries across several state matrices.
pub fn mean_active_states(states: &[StateMatrix]) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for m in states {
        for row in m.rows() {
            for &v in row {
                if v > 0.0 {
                    sum += v;
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::UndefinedStatistic(
            "no active state entries to average".into(),
        ));
    }
    Ok(sum / count as f64)
}

/// Picks the branch-nonlinearity threshold from the states it will see:
/// the supra-linearity crossover should sit between the mean active
/// synaptic value and twice that value; this returns the midpoint,
/// `1.5 * mean`.
pub fn choose_x_thr(states: &StateMatrix) -> Result<f64> {
    Ok(1.5 * mean_active_state(states)?)
}

/// [`choose_x_thr`] pooled over several state matrices.
pub fn choose_x_thr_pooled(states: &[StateMatrix]) -> Result<f64> {
    Ok(1.5 * mean_active_states(states)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn branch_drive_zero_input() {
        let cell = DendriticCell::new(1, 2, 4, vec![0, 1]).unwrap();
        assert_eq!(cell.branch_drive(0, &[0.0; 4]), 0.0);
    }

    #[test]
    fn branch_drive_counts_repeats() {
        let cell = DendriticCell::new(1, 2, 4, vec![3, 3]).unwrap();
        let mut x = [0.0; 4];
        x[3] = 2.0;
        assert_eq!(cell.branch_drive(0, &x), 4.0);
    }

    #[test]
    fn branch_drive_matches_explicit_loop() {
        let mut r = rng(5);
        let cell = DendriticCell::random(3, 5, 12, &mut r).unwrap();
        let x: Vec<f64> = (0..12).map(|_| r.gen::<f64>() * 3.0).collect();
        for j in 0..3 {
            let mut acc = 0.0;
            for s in 0..5 {
                acc += x[cell.afferent(j, s)];
            }
            assert_eq!(cell.branch_drive(j, &x), acc);
        }
    }

    #[test]
    fn nonlinearity_crossover_at_threshold() {
        let nl = NonlinearityParams::new(1.8, 75.0).unwrap();
        assert!((branch_nl(1.8, &nl) - 1.8).abs() < 1e-12);
    }

    #[test]
    fn nonlinearity_saturation_onset() {
        let nl = NonlinearityParams::new(1.8, 75.0).unwrap();
        let v = (1.8f64 * 75.0).sqrt();
        assert!((branch_nl(v, &nl) - 75.0).abs() < 1e-9);
        assert_eq!(branch_nl(v * 2.0, &nl), 75.0);
    }

    #[test]
    fn nonlinearity_task_value() {
        let nl = NonlinearityParams::new(1.8, 75.0).unwrap();
        assert!((branch_nl(3.0, &nl) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn cell_output_zero_and_saturated_bounds() {
        let nl = NonlinearityParams::new(1.0, 2.0).unwrap();
        let cell = DendriticCell::new(3, 2, 4, vec![0, 1, 1, 2, 2, 3]).unwrap();
        assert_eq!(cell.output(&[0.0; 4], &nl), 0.0);
        // Huge inputs saturate every branch.
        assert_eq!(cell.output(&[100.0; 4], &nl), 3.0 * 2.0);
    }

    #[test]
    fn cell_output_matches_double_loop() {
        let mut r = rng(9);
        let nl = NonlinearityParams::new(1.3, 8.0).unwrap();
        for _ in 0..20 {
            let cell = DendriticCell::random(4, 3, 10, &mut r).unwrap();
            let x: Vec<f64> = (0..10).map(|_| r.gen::<f64>() * 2.0).collect();
            let mut expect = 0.0;
            for j in 0..4 {
                let mut v = 0.0;
                for s in 0..3 {
                    v += x[cell.afferent(j, s)];
                }
                expect += (v * v / 1.3).min(8.0);
            }
            assert!((cell.output(&x, &nl) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_tie_goes_to_positive_class() {
        let nl = NonlinearityParams::new(1.0, 10.0).unwrap();
        let cell = DendriticCell::new(1, 1, 2, vec![0]).unwrap();
        let pair = ReadoutPair::new(cell.clone(), cell, nl, Squash::Signum01).unwrap();
        // identical cells: f+ - f- = 0 exactly
        assert_eq!(pair.output(&[1.0, 0.5]), 1.0);
    }

    #[test]
    fn sigmoid_half_properties() {
        assert!((Squash::SigmoidHalf.apply(0.0) - 0.5).abs() < 1e-15);
        let mut r = rng(2);
        for _ in 0..100 {
            let z = (r.gen::<f64>() - 0.5) * 20.0;
            let s = Squash::SigmoidHalf.apply(z) + Squash::SigmoidHalf.apply(-z);
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn classify_majority_and_ties() {
        assert_eq!(classify_pattern(&[1.0, 1.0, 0.0]).unwrap(), 1);
        assert_eq!(classify_pattern(&[0.0, 0.0, 0.0, 0.0]).unwrap(), 0);
        assert_eq!(classify_pattern(&[1.0, 0.0]).unwrap(), 1); // tie
        assert!(classify_pattern(&[]).is_err());
    }

    #[test]
    fn x_thr_midpoint_of_bracket() {
        // uniform states all equal c: mean active = c, midpoint 1.5c
        let m = StateMatrix::new(vec![2.0; 12], 3, 0.025).unwrap();
        let got = choose_x_thr(&m).unwrap();
        assert!((got - 3.0).abs() < 1e-12);
    }

    #[test]
    fn x_thr_ignores_zero_entries() {
        let m = StateMatrix::new(vec![0.0, 4.0, 0.0, 2.0], 2, 0.025).unwrap();
        assert!((mean_active_state(&m).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn x_thr_undefined_on_silence() {
        let m = StateMatrix::new(vec![0.0; 8], 2, 0.025).unwrap();
        assert!(matches!(
            choose_x_thr(&m),
            Err(crate::error::Error::UndefinedStatistic(_))
        ));
    }

    #[test]
    fn output_bound_holds() {
        let mut r = rng(13);
        let nl = NonlinearityParams::new(0.7, 3.0).unwrap();
        for _ in 0..50 {
            let cell = DendriticCell::random(5, 4, 8, &mut r).unwrap();
            let x: Vec<f64> = (0..8).map(|_| r.gen::<f64>() * 10.0).collect();
            let y = cell.output(&x, &nl);
            assert!((0.0..=5.0 * 3.0 + 1e-12).contains(&y));
        }
    }

    #[test]
    fn output_monotone_in_each_state_entry() {
        let mut r = rng(17);
        let nl = NonlinearityParams::new(1.1, 6.0).unwrap();
        for _ in 0..30 {
            let cell = DendriticCell::random(4, 3, 6, &mut r).unwrap();
            let x: Vec<f64> = (0..6).map(|_| r.gen::<f64>()).collect();
            let base = cell.output(&x, &nl);
            for i in 0..6 {
                let mut bumped = x.clone();
                bumped[i] += 0.5;
                assert!(cell.output(&bumped, &nl) >= base - 1e-12);
            }
        }
    }

    #[test]
    fn permutation_invariance() {
        let nl = NonlinearityParams::new(1.0, 50.0).unwrap();
        let x: Vec<f64> = (0..6).map(|i| i as f64 * 0.3).collect();
        let cell = DendriticCell::new(2, 3, 6, vec![0, 1, 2, 3, 4, 5]).unwrap();
        // permute slots within branches and swap the branches
        let permuted = DendriticCell::new(2, 3, 6, vec![5, 3, 4, 2, 0, 1]).unwrap();
        assert!((cell.output(&x, &nl) - permuted.output(&x, &nl)).abs() < 1e-12);
    }

    #[test]
    fn unbounded_saturation_is_pure_square_law() {
        let mut r = rng(23);
        let nl = NonlinearityParams::unbounded(1.8).unwrap();
        for _ in 0..100 {
            let cell = DendriticCell::random(3, 4, 9, &mut r).unwrap();
            let x: Vec<f64> = (0..9).map(|_| r.gen::<f64>() * 40.0).collect();
            let expect: f64 = (0..3)
                .map(|j| {
                    let v = cell.branch_drive(j, &x);
                    v * v / 1.8
                })
                .sum();
            // bit-for-bit: min(q, inf) must return q unchanged
            assert_eq!(cell.output(&x, &nl), expect);
        }
    }

    #[test]
    fn wiring_text_round_trip() {
        let mut r = rng(31);
        let cell = DendriticCell::random(7, 10, 140, &mut r).unwrap();
        let mut buf = Vec::new();
        cell.write_wiring(&mut buf).unwrap();
        let back = DendriticCell::read_wiring(std::io::Cursor::new(&buf), 140).unwrap();
        assert_eq!(back, cell);
    }

    #[test]
    fn pair_wiring_round_trip() {
        let mut r = rng(37);
        let nl = NonlinearityParams::new(1.8, 75.0).unwrap();
        let pair = ReadoutPair::random(7, 10, 140, nl, Squash::Signum01, &mut r).unwrap();
        let mut buf = Vec::new();
        pair.write_wiring(&mut buf).unwrap();
        let back =
            ReadoutPair::read_wiring(std::io::Cursor::new(&buf), 7, 140, nl, Squash::Signum01)
                .unwrap();
        assert_eq!(back, pair);
    }

    #[test]
    fn invalid_wirings_rejected() {
        assert!(DendriticCell::new(1, 2, 4, vec![0, 4]).is_err()); // out of range
        assert!(DendriticCell::new(1, 2, 4, vec![0]).is_err()); // wrong count
        let a = DendriticCell::new(1, 2, 4, vec![0, 1]).unwrap();
        let b = DendriticCell::new(2, 2, 4, vec![0, 1, 2, 3]).unwrap();
        let nl = NonlinearityParams::new(1.0, 1.0).unwrap();
        assert!(ReadoutPair::new(a, b, nl, Squash::Signum01).is_err());
    }
}
