//! Flat sample storage shared by the readout trainers: one state vector
//! and one scalar target per sample.

use crate::error::{Error, Result};
use crate::spike::StateMatrix;

/// A set of `(state vector, target)` pairs with a fixed input dimension,
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl SampleSet {
    pub fn new(dim: usize) -> Self {
        SampleSet {
            dim,
            inputs: Vec::new(),
            targets: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, samples: usize) -> Self {
        SampleSet {
            dim,
            inputs: Vec::with_capacity(dim * samples),
            targets: Vec::with_capacity(samples),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn push(&mut self, row: &[f64], target: f64) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::invalid(format!(
                "sample has {} entries, expected {}",
                row.len(),
                self.dim
            )));
        }
        self.inputs.extend_from_slice(row);
        self.targets.push(target);
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn target(&self, i: usize) -> f64 {
        self.targets[i]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.inputs.chunks(self.dim)
    }

    /// Appends every sample of a state matrix with one shared target.
    pub fn push_matrix(&mut self, states: &StateMatrix, target: f64) -> Result<()> {
        for row in states.rows() {
            self.push(row, target)?;
        }
        Ok(())
    }

    /// Appends a state matrix with one target per sample row.
    pub fn push_matrix_with_targets(
        &mut self,
        states: &StateMatrix,
        targets: &[f64],
    ) -> Result<()> {
        if targets.len() != states.num_samples() {
            return Err(Error::invalid("one target per sample row required"));
        }
        for (row, &t) in states.rows().zip(targets) {
            self.push(row, t)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_index() {
        let mut s = SampleSet::new(3);
        s.push(&[1.0, 2.0, 3.0], 0.5).unwrap();
        s.push(&[4.0, 5.0, 6.0], 1.0).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.row(1), &[4.0, 5.0, 6.0]);
        assert_eq!(s.target(0), 0.5);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut s = SampleSet::new(3);
        assert!(s.push(&[1.0], 0.0).is_err());
    }

    #[test]
    fn matrix_targets_must_align() {
        let m = StateMatrix::new(vec![0.0; 6], 2, 0.025).unwrap();
        let mut s = SampleSet::new(2);
        assert!(s.push_matrix_with_targets(&m, &[1.0, 2.0]).is_err());
        assert!(s.push_matrix_with_targets(&m, &[1.0, 2.0, 3.0]).is_ok());
        assert_eq!(s.len(), 3);
    }
}
