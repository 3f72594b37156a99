//! Test-time injection of hardware mismatch into readout evaluation.
//!
//! Fabricated synapse and squaring circuits deviate from their nominal
//! gain, decay constant and square-law factor; the deviations are modeled
//! as independent Gaussian multipliers around 1 with the measured
//! coefficients of variation, floored at a small positive value. A
//! perturbed evaluation re-filters each readout synapse's afferent spike
//! train with that synapse's own perturbed kernel, so the shared state
//! matrix cannot be reused here.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dendrite::{branch_nl, ReadoutPair};
use crate::error::{Error, Result};
use crate::perceptron::{BankSquash, PerceptronBank};
use crate::spike::{sampled_psc, KernelParams, SpikeTrain};

/// Multipliers may not dip below this floor; gains and time constants
/// cannot physically go negative.
pub const MULTIPLIER_FLOOR: f64 = 0.05;

/// Whether the decay-constant variation is drawn per synapse slot or once
/// per branch (shared-synapse hardware).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauGranularity {
    #[default]
    PerSynapse,
    PerBranch,
}

/// Coefficients of variation of the three mismatch sources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationSpec {
    /// Fractional spread of the kernel decay constant.
    pub cv_tau: f64,
    /// Fractional spread of the synaptic gain.
    pub cv_i0: f64,
    /// Fractional spread of the square-law gain factor.
    pub cv_cni: f64,
    pub tau_granularity: TauGranularity,
    pub seed: u64,
}

impl VariationSpec {
    pub fn new(cv_tau: f64, cv_i0: f64, cv_cni: f64, seed: u64) -> Result<Self> {
        if cv_tau < 0.0 || cv_i0 < 0.0 || cv_cni < 0.0 {
            return Err(Error::invalid("coefficients of variation must be >= 0"));
        }
        Ok(VariationSpec {
            cv_tau,
            cv_i0,
            cv_cni,
            tau_granularity: TauGranularity::PerSynapse,
            seed,
        })
    }

    /// The worst-case spreads measured for the synapse and squaring
    /// circuits: 10.1% on the decay constant, 13% on the gain, 18% on the
    /// square-law factor.
    pub fn worst_case(seed: u64) -> Self {
        VariationSpec {
            cv_tau: 0.101,
            cv_i0: 0.13,
            cv_cni: 0.18,
            tau_granularity: TauGranularity::PerSynapse,
            seed,
        }
    }

    pub fn none(seed: u64) -> Self {
        VariationSpec {
            cv_tau: 0.0,
            cv_i0: 0.0,
            cv_cni: 0.0,
            tau_granularity: TauGranularity::PerSynapse,
            seed,
        }
    }
}

/// The element counts a draw must cover. For the dendritic pair this is
/// both cells' branches; for a perceptron bank each perceptron acts as one
/// branch with a single shared synapse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadoutTopology {
    pub branches: usize,
    pub synapses_per_branch: usize,
}

impl ReadoutTopology {
    pub fn for_pair(pair: &ReadoutPair) -> Self {
        ReadoutTopology {
            branches: 2 * pair.branches(),
            synapses_per_branch: pair.slots(),
        }
    }

    /// Each perceptron acts as one branch carrying one synapse per input
    /// line (the bias input is not a synapse and is never perturbed).
    pub fn for_bank(bank: &PerceptronBank) -> Self {
        ReadoutTopology {
            branches: bank.n(),
            synapses_per_branch: bank.input_dim(),
        }
    }

    pub fn num_synapses(&self) -> usize {
        self.branches * self.synapses_per_branch
    }
}

/// One realization of the mismatch: per-synapse gain and decay multipliers
/// and per-branch square-law multipliers, all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationDraw {
    pub syn_gain: Vec<f64>,
    pub syn_decay: Vec<f64>,
    pub branch_gain: Vec<f64>,
}

impl VariationDraw {
    /// A draw that leaves evaluation untouched.
    pub fn identity(topology: ReadoutTopology) -> Self {
        VariationDraw {
            syn_gain: vec![1.0; topology.num_synapses()],
            syn_decay: vec![1.0; topology.num_synapses()],
            branch_gain: vec![1.0; topology.branches],
        }
    }
}

fn draw_multiplier<R: Rng + ?Sized>(dist: &Normal<f64>, rng: &mut R) -> f64 {
    dist.sample(rng).max(MULTIPLIER_FLOOR)
}

/// Draws one mismatch realization. Gains are drawn first for every
/// synapse, then decay multipliers, then branch factors, each coordinate
/// independent; `cv = 0` yields exactly 1.
pub fn draw_variation<R: Rng + ?Sized>(
    spec: &VariationSpec,
    topology: ReadoutTopology,
    rng: &mut R,
) -> Result<VariationDraw> {
    let gain_dist =
        Normal::new(1.0, spec.cv_i0).map_err(|e| Error::invalid(format!("bad cv_i0: {e}")))?;
    let tau_dist =
        Normal::new(1.0, spec.cv_tau).map_err(|e| Error::invalid(format!("bad cv_tau: {e}")))?;
    let cni_dist =
        Normal::new(1.0, spec.cv_cni).map_err(|e| Error::invalid(format!("bad cv_cni: {e}")))?;

    let n_syn = topology.num_synapses();
    let syn_gain: Vec<f64> = (0..n_syn).map(|_| draw_multiplier(&gain_dist, rng)).collect();
    let syn_decay: Vec<f64> = match spec.tau_granularity {
        TauGranularity::PerSynapse => (0..n_syn).map(|_| draw_multiplier(&tau_dist, rng)).collect(),
        TauGranularity::PerBranch => {
            let per_branch: Vec<f64> = (0..topology.branches)
                .map(|_| draw_multiplier(&tau_dist, rng))
                .collect();
            (0..n_syn)
                .map(|s| per_branch[s / topology.synapses_per_branch])
                .collect()
        }
    };
    let branch_gain: Vec<f64> = (0..topology.branches)
        .map(|_| draw_multiplier(&cni_dist, rng))
        .collect();
    Ok(VariationDraw {
        syn_gain,
        syn_decay,
        branch_gain,
    })
}

/// The kernel a synapse sees under its multipliers: the decay constant is
/// scaled, then the amplitude re-normalized so the peak equals the
/// original peak times the gain multiplier. Unit multipliers return the
/// kernel unmodified (bit-identical evaluation).
fn perturbed_kernel(kernel: &KernelParams, gain: f64, decay: f64) -> Result<KernelParams> {
    if gain == 1.0 && decay == 1.0 {
        return Ok(*kernel);
    }
    let new_decay = (kernel.tau_decay * decay).max(kernel.tau_rise * (1.0 + 1e-9));
    KernelParams::with_peak(new_decay, kernel.tau_rise, kernel.peak() * gain)
}

/// Per-sample outputs of a dendritic pair over one pattern's liquid spike
/// trains, with each synapse filtering its afferent train through its own
/// perturbed kernel and each branch output scaled by its square-law
/// factor. Synapse order: positive cell branch-major, then negative cell.
pub fn der_outputs_with_variation(
    pair: &ReadoutPair,
    trains: &[SpikeTrain],
    kernel: &KernelParams,
    sample_period: f64,
    draw: &VariationDraw,
) -> Result<Vec<f64>> {
    let topology = ReadoutTopology::for_pair(pair);
    if draw.syn_gain.len() != topology.num_synapses()
        || draw.branch_gain.len() != topology.branches
    {
        return Err(Error::invalid("variation draw does not match readout shape"));
    }
    if trains.len() != pair.input_dim() {
        return Err(Error::invalid(format!(
            "{} liquid trains supplied, readout expects {}",
            trains.len(),
            pair.input_dim()
        )));
    }
    let duration = trains[0].duration();
    if trains.iter().any(|t| t.duration() != duration) {
        return Err(Error::invalid("all trains must share one duration"));
    }
    let n_samples = (duration / sample_period).floor() as usize;

    let cells = [&pair.positive, &pair.negative];
    let m = pair.branches();
    let k = pair.slots();
    // branch drives per sample, both cells
    let mut drives = vec![0.0; n_samples * 2 * m];
    for (c, cell) in cells.iter().enumerate() {
        for j in 0..m {
            let global_branch = c * m + j;
            for s in 0..k {
                let syn = global_branch * k + s;
                let line = cell.afferent(j, s);
                let kp = perturbed_kernel(kernel, draw.syn_gain[syn], draw.syn_decay[syn])?;
                let values = sampled_psc(&trains[line], &kp, sample_period, n_samples);
                for (i, &v) in values.iter().enumerate() {
                    drives[i * 2 * m + global_branch] += v;
                }
            }
        }
    }

    let mut outputs = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let row = &drives[i * 2 * m..(i + 1) * 2 * m];
        let mut fp = 0.0;
        let mut fm = 0.0;
        for j in 0..m {
            fp += branch_nl(row[j], &pair.nl) * draw.branch_gain[j];
        }
        for j in 0..m {
            fm += branch_nl(row[m + j], &pair.nl) * draw.branch_gain[m + j];
        }
        outputs.push(pair.squash.apply(fp - fm));
    }
    Ok(outputs)
}

/// Per-sample outputs of a perceptron bank under mismatch. Every
/// (perceptron, input) connection filters its afferent train through its
/// own perturbed kernel — the same per-synapse granularity applied to the
/// dendritic readout — and each perceptron's saturating-square output is
/// scaled by its square-law factor. The bias input is not a synapse and
/// stays clean.
pub fn ppr_outputs_with_variation(
    bank: &PerceptronBank,
    trains: &[SpikeTrain],
    kernel: &KernelParams,
    sample_period: f64,
    nl: &crate::dendrite::NonlinearityParams,
    squash: &BankSquash,
    draw: &VariationDraw,
) -> Result<Vec<f64>> {
    let topology = ReadoutTopology::for_bank(bank);
    if draw.syn_gain.len() != topology.num_synapses()
        || draw.branch_gain.len() != topology.branches
    {
        return Err(Error::invalid("variation draw does not match readout shape"));
    }
    if trains.len() != bank.input_dim() {
        return Err(Error::invalid(format!(
            "{} liquid trains supplied, bank expects {}",
            trains.len(),
            bank.input_dim()
        )));
    }
    let duration = trains[0].duration();
    if trains.iter().any(|t| t.duration() != duration) {
        return Err(Error::invalid("all trains must share one duration"));
    }
    let n_samples = (duration / sample_period).floor() as usize;
    let d = bank.input_dim();

    let mut sums = vec![0.0; n_samples];
    let mut activation = vec![0.0; n_samples];
    for p in 0..bank.n() {
        let w = bank.weight_row(p);
        // bias contribution, unperturbed
        for a in activation.iter_mut() {
            *a = w[d];
        }
        for (j, train) in trains.iter().enumerate() {
            let syn = p * d + j;
            let kp = perturbed_kernel(kernel, draw.syn_gain[syn], draw.syn_decay[syn])?;
            let values = sampled_psc(train, &kp, sample_period, n_samples);
            for (a, &v) in activation.iter_mut().zip(&values) {
                *a += w[j] * v;
            }
        }
        for (sum, &s) in sums.iter_mut().zip(&activation) {
            *sum += draw.branch_gain[p] * s.signum() * (s * s / nl.x_thr).min(nl.x_sat);
        }
    }
    Ok(sums.iter().map(|&p| squash.apply(p, bank.n())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dendrite::{NonlinearityParams, ReadoutPair, Squash};
    use crate::spike::{poisson_train, sample_states};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn test_trains(seed: u64, channels: usize) -> Vec<SpikeTrain> {
        (0..channels)
            .map(|c| poisson_train(25.0, 0.5, &mut rng(seed + c as u64)).unwrap())
            .collect()
    }

    #[test]
    fn zero_cv_draw_is_exactly_identity() {
        let spec = VariationSpec::none(1);
        let topo = ReadoutTopology {
            branches: 6,
            synapses_per_branch: 4,
        };
        let draw = draw_variation(&spec, topo, &mut rng(2)).unwrap();
        assert_eq!(draw, VariationDraw::identity(topo));
    }

    #[test]
    fn gain_spread_matches_requested_cv() {
        let spec = VariationSpec::new(0.0, 0.13, 0.0, 0).unwrap();
        let topo = ReadoutTopology {
            branches: 1,
            synapses_per_branch: 100_000,
        };
        let draw = draw_variation(&spec, topo, &mut rng(3)).unwrap();
        let n = draw.syn_gain.len() as f64;
        let mean: f64 = draw.syn_gain.iter().sum::<f64>() / n;
        let var: f64 = draw.syn_gain.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / n;
        let cv = var.sqrt() / mean;
        assert!((cv - 0.13).abs() / 0.13 < 0.02, "cv {cv}");
    }

    #[test]
    fn square_law_spread_matches_requested_cv() {
        let spec = VariationSpec::new(0.0, 0.0, 0.18, 0).unwrap();
        let topo = ReadoutTopology {
            branches: 100_000,
            synapses_per_branch: 1,
        };
        let draw = draw_variation(&spec, topo, &mut rng(4)).unwrap();
        let n = draw.branch_gain.len() as f64;
        let mean: f64 = draw.branch_gain.iter().sum::<f64>() / n;
        let var: f64 =
            draw.branch_gain.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / n;
        let cv = var.sqrt() / mean;
        assert!((cv - 0.18).abs() / 0.18 < 0.02, "cv {cv}");
    }

    #[test]
    fn draws_are_uncorrelated_across_elements() {
        let spec = VariationSpec::worst_case(0);
        let topo = ReadoutTopology {
            branches: 2,
            synapses_per_branch: 1,
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut r = rng(5);
        for _ in 0..10_000 {
            let d = draw_variation(&spec, topo, &mut r).unwrap();
            a.push(d.syn_gain[0]);
            b.push(d.syn_gain[1]);
        }
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n;
        let sa = (a.iter().map(|x| (x - ma) * (x - ma)).sum::<f64>() / n).sqrt();
        let sb = (b.iter().map(|y| (y - mb) * (y - mb)).sum::<f64>() / n).sqrt();
        let corr = cov / (sa * sb);
        assert!(corr.abs() < 0.05, "correlation {corr}");
    }

    #[test]
    fn multipliers_respect_floor() {
        let spec = VariationSpec::new(0.0, 2.0, 0.0, 0).unwrap(); // absurd spread
        let topo = ReadoutTopology {
            branches: 1,
            synapses_per_branch: 10_000,
        };
        let draw = draw_variation(&spec, topo, &mut rng(6)).unwrap();
        assert!(draw.syn_gain.iter().all(|&g| g >= MULTIPLIER_FLOOR));
    }

    #[test]
    fn identity_draw_matches_plain_evaluation_bitwise() {
        let kernel = KernelParams::peak_normalized(0.030, 0.0075).unwrap();
        let trains = test_trains(10, 8);
        let nl = NonlinearityParams::new(1.5, 40.0).unwrap();
        let pair = ReadoutPair::random(3, 4, 8, nl, Squash::SigmoidHalf, &mut rng(11)).unwrap();
        let draw = VariationDraw::identity(ReadoutTopology::for_pair(&pair));
        let varied = der_outputs_with_variation(&pair, &trains, &kernel, 0.025, &draw).unwrap();
        let states = sample_states(&trains, &kernel, 0.025).unwrap();
        let plain: Vec<f64> = states.rows().map(|x| pair.output(x)).collect();
        assert_eq!(varied, plain);
    }

    #[test]
    fn zero_drive_branch_stays_zero_under_square_gain() {
        let kernel = KernelParams::peak_normalized(0.030, 0.0075).unwrap();
        // only channel 0 carries spikes; wire one branch entirely to the
        // silent channel 1
        let active = poisson_train(30.0, 0.5, &mut rng(12)).unwrap();
        let silent = SpikeTrain::empty(0.5);
        let trains = vec![active, silent];
        let nl = NonlinearityParams::new(1.0, 10.0).unwrap();
        let pos = crate::dendrite::DendriticCell::new(2, 2, 2, vec![0, 0, 1, 1]).unwrap();
        let neg = crate::dendrite::DendriticCell::new(2, 2, 2, vec![1, 1, 1, 1]).unwrap();
        let pair = ReadoutPair::new(pos, neg, nl, Squash::Identity).unwrap();
        let topo = ReadoutTopology::for_pair(&pair);
        let mut draw = VariationDraw::identity(topo);
        // enormous square-law gains everywhere
        for g in draw.branch_gain.iter_mut() {
            *g = 50.0;
        }
        let varied = der_outputs_with_variation(&pair, &trains, &kernel, 0.025, &draw).unwrap();
        // the negative cell sees only the silent channel: outputs must be
        // exactly 50x the positive cell's active branch, never NaN or
        // negative drift from the silent branches
        let states = sample_states(&trains, &kernel, 0.025).unwrap();
        for (i, y) in varied.iter().enumerate() {
            let v = 2.0 * states.get(i, 0);
            let expect = 50.0 * (v * v / 1.0).min(10.0);
            assert!((y - expect).abs() < 1e-9, "sample {i}: {y} vs {expect}");
        }
    }

    #[test]
    fn per_branch_tau_mode_shares_multiplier_within_branch() {
        let spec = VariationSpec {
            tau_granularity: TauGranularity::PerBranch,
            ..VariationSpec::worst_case(0)
        };
        let topo = ReadoutTopology {
            branches: 4,
            synapses_per_branch: 5,
        };
        let draw = draw_variation(&spec, topo, &mut rng(13)).unwrap();
        for b in 0..4 {
            let first = draw.syn_decay[b * 5];
            for s in 0..5 {
                assert_eq!(draw.syn_decay[b * 5 + s], first);
            }
        }
    }

    #[test]
    fn ppr_identity_draw_matches_plain_square_evaluation() {
        let kernel = KernelParams::peak_normalized(0.030, 0.0075).unwrap();
        let trains = test_trains(20, 6);
        let nl = NonlinearityParams::new(2.0, 30.0).unwrap();
        let bank = PerceptronBank::random(4, 6, &mut rng(21)).unwrap();
        let draw = VariationDraw::identity(ReadoutTopology::for_bank(&bank));
        let squash = BankSquash::SignThreshold;
        let varied =
            ppr_outputs_with_variation(&bank, &trains, &kernel, 0.025, &nl, &squash, &draw)
                .unwrap();
        let states = sample_states(&trains, &kernel, 0.025).unwrap();
        let mut x_aug = vec![0.0; 7];
        x_aug[6] = 1.0;
        let plain: Vec<f64> = states
            .rows()
            .map(|x| {
                x_aug[..6].copy_from_slice(x);
                squash.apply(bank.square_sum(&x_aug, &nl), bank.n())
            })
            .collect();
        assert_eq!(varied, plain);
    }

    #[test]
    fn draw_is_deterministic_under_seed() {
        let spec = VariationSpec::worst_case(0);
        let topo = ReadoutTopology {
            branches: 14,
            synapses_per_branch: 10,
        };
        let a = draw_variation(&spec, topo, &mut rng(30)).unwrap();
        let b = draw_variation(&spec, topo, &mut rng(30)).unwrap();
        assert_eq!(a, b);
    }
}
