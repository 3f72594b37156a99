//! Convergence markers comparing the two readouts' training curves:
//! where the baseline saturates, where the curves first cross, and where
//! the dendritic readout reaches its minimum.

use crate::error::{Error, Result};

/// Default saturation window (iterations) and improvement threshold.
pub const SATURATION_WINDOW: usize = 50;
pub const SATURATION_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Markers {
    /// First iteration (1-based) after which the baseline's running best
    /// improves by less than the threshold over the next window.
    pub n0: usize,
    /// First iteration where the dendritic curve dips to or below the
    /// baseline curve; absent when they never meet.
    pub n1: Option<usize>,
    /// Iteration of the dendritic curve's minimum (first occurrence).
    pub n2: usize,
}

/// Computes the markers with the default window and threshold.
pub fn convergence_markers(der_mae: &[f64], ppr_mae: &[f64]) -> Result<Markers> {
    convergence_markers_with(der_mae, ppr_mae, SATURATION_WINDOW, SATURATION_THRESHOLD)
}

pub fn convergence_markers_with(
    der_mae: &[f64],
    ppr_mae: &[f64],
    window: usize,
    threshold: f64,
) -> Result<Markers> {
    if der_mae.is_empty() || ppr_mae.is_empty() {
        return Err(Error::invalid("markers need non-empty traces"));
    }

    // running best of the baseline curve
    let mut running = Vec::with_capacity(ppr_mae.len());
    let mut best = f64::INFINITY;
    for &m in ppr_mae {
        best = best.min(m);
        running.push(best);
    }
    let n0 = (0..running.len())
        .find(|&i| {
            let end = (i + window).min(running.len() - 1);
            running[i] - running[end] < threshold
        })
        .map(|i| i + 1)
        .unwrap_or(running.len());

    let n1 = der_mae
        .iter()
        .zip(ppr_mae)
        .position(|(d, p)| d <= p)
        .map(|i| i + 1);

    let min = der_mae.iter().copied().fold(f64::INFINITY, f64::min);
    let n2 = der_mae.iter().position(|&m| m == min).unwrap() + 1;

    Ok(Markers { n0, n1, n2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_traces_cross_immediately() {
        let t = vec![0.5, 0.4, 0.3];
        let m = convergence_markers(&t, &t).unwrap();
        assert_eq!(m.n1, Some(1));
    }

    #[test]
    fn strictly_decreasing_curve_minimizes_at_the_end() {
        let der: Vec<f64> = (0..120).map(|i| 1.0 - i as f64 * 1e-3).collect();
        let ppr = vec![0.5; 120];
        let m = convergence_markers(&der, &ppr).unwrap();
        assert_eq!(m.n2, 120);
    }

    #[test]
    fn flat_baseline_saturates_at_once() {
        let ppr = vec![0.4; 200];
        let der = vec![0.5; 200];
        let m = convergence_markers(&der, &ppr).unwrap();
        assert_eq!(m.n0, 1);
    }

    #[test]
    fn curves_that_never_meet_leave_n1_absent() {
        let der = vec![0.9; 10];
        let ppr = vec![0.1; 10];
        let m = convergence_markers(&der, &ppr).unwrap();
        assert_eq!(m.n1, None);
    }

    #[test]
    fn saturation_detected_after_the_fast_phase() {
        // fast drop for 60 iterations, flat afterwards
        let mut ppr: Vec<f64> = (0..60).map(|i| 1.0 - i as f64 * 0.01).collect();
        ppr.extend(std::iter::repeat(0.4).take(200));
        let der = vec![1.0; 260];
        let m = convergence_markers(&der, &ppr).unwrap();
        assert!(m.n0 >= 50 && m.n0 <= 70, "n0 = {}", m.n0);
    }
}
