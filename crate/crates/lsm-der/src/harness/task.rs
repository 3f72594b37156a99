//! The two benchmark tasks: jittered spike-train classification and
//! retrieval of the windowed sum of input rates.

use rand::Rng;

use crate::error::{Error, Result};
use crate::spike::{jitter_train, modulated_poisson, poisson_train, RateSignal, SpikeTrain};

/// Spike-train classification: `classes` fixed Poisson template arrays of
/// `trains_per_class` trains each; instances are jittered copies and the
/// task is to recover the template class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskOneParams {
    pub classes: usize,
    pub trains_per_class: usize,
    /// Template Poisson rate (Hz).
    pub rate: f64,
    /// Std of the Gaussian spike-time jitter (seconds).
    pub jitter_std: f64,
    pub duration: f64,
}

impl Default for TaskOneParams {
    fn default() -> Self {
        TaskOneParams {
            classes: 2,
            trains_per_class: 1,
            rate: 20.0,
            jitter_std: 0.004,
            duration: 0.5,
        }
    }
}

/// Sum-of-rates retrieval: `trains` Poisson inputs share one sinusoidal
/// rate; the target at time `t` is the rate averaged over
/// `(t - lag - window, t - lag)`, normalized by the largest admissible
/// rate. Training draws the sinusoid parameters from two-interval unions;
/// testing uses fixed values in the gap between them.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskTwoParams {
    pub trains: usize,
    pub window: f64,
    pub lag: f64,
    pub duration: f64,
    pub phase: f64,
    pub a_intervals: Vec<(f64, f64)>,
    pub b_intervals: Vec<(f64, f64)>,
    pub f_intervals: Vec<(f64, f64)>,
    pub test_a: f64,
    pub test_b: f64,
    pub test_freq: f64,
}

impl Default for TaskTwoParams {
    fn default() -> Self {
        TaskTwoParams {
            trains: 4,
            window: 0.030,
            lag: 0.0,
            duration: 0.5,
            phase: 0.0,
            a_intervals: vec![(0.0, 30.0), (70.0, 100.0)],
            b_intervals: vec![(0.0, 30.0), (70.0, 100.0)],
            f_intervals: vec![(0.5, 1.0), (3.0, 5.0)],
            test_a: 50.0,
            test_b: 50.0,
            test_freq: 2.0,
        }
    }
}

impl TaskTwoParams {
    /// Largest admissible instantaneous rate: targets are divided by this
    /// so they land in (0, 1).
    pub fn rate_normalizer(&self) -> f64 {
        let max_of = |iv: &[(f64, f64)]| iv.iter().map(|&(_, hi)| hi).fold(0.0, f64::max);
        max_of(&self.a_intervals) + max_of(&self.b_intervals)
    }
}

/// One classification instance: the input trains and the template class.
pub type LabeledPattern = (Vec<SpikeTrain>, usize);

#[derive(Debug, Clone)]
pub struct Task1Dataset {
    /// The frozen templates, `classes` arrays of `trains_per_class` trains.
    pub templates: Vec<Vec<SpikeTrain>>,
    pub train: Vec<LabeledPattern>,
    pub test: Vec<LabeledPattern>,
}

/// One approximation pattern: the input trains and the rate signal that
/// modulated them (targets derive from the signal).
#[derive(Debug, Clone)]
pub struct SignalPattern {
    pub inputs: Vec<SpikeTrain>,
    pub signal: RateSignal,
}

#[derive(Debug, Clone)]
pub struct Task2Dataset {
    pub train: Vec<SignalPattern>,
    pub test: Vec<SignalPattern>,
}

/// Generates the classification dataset: fixed templates, then
/// `p_patterns` jittered training instances balanced across classes, then
/// an equally sized test set with fresh jitter realizations.
pub fn generate_task1<R: Rng + ?Sized>(
    params: &TaskOneParams,
    p_patterns: usize,
    rng: &mut R,
) -> Result<Task1Dataset> {
    if params.classes < 2 {
        return Err(Error::invalid("need at least two classes"));
    }
    if p_patterns < params.classes {
        return Err(Error::invalid("need at least one pattern per class"));
    }
    let mut templates = Vec::with_capacity(params.classes);
    for _ in 0..params.classes {
        let array: Vec<SpikeTrain> = (0..params.trains_per_class)
            .map(|_| poisson_train(params.rate, params.duration, rng))
            .collect::<Result<_>>()?;
        templates.push(array);
    }
    let make_set = |rng: &mut R| -> Result<Vec<LabeledPattern>> {
        (0..p_patterns)
            .map(|i| {
                let label = i % params.classes;
                let inputs: Vec<SpikeTrain> = templates[label]
                    .iter()
                    .map(|tpl| jitter_train(tpl, params.jitter_std, rng))
                    .collect::<Result<_>>()?;
                Ok((inputs, label))
            })
            .collect()
    };
    let train = make_set(rng)?;
    let test = make_set(rng)?;
    Ok(Task1Dataset {
        templates,
        train,
        test,
    })
}

fn draw_from_intervals<R: Rng + ?Sized>(intervals: &[(f64, f64)], rng: &mut R) -> f64 {
    let total: f64 = intervals.iter().map(|&(lo, hi)| hi - lo).sum();
    if total == 0.0 {
        return intervals[0].0;
    }
    let mut u = rng.gen::<f64>() * total;
    for &(lo, hi) in intervals {
        let len = hi - lo;
        if u <= len {
            return lo + u;
        }
        u -= len;
    }
    intervals.last().unwrap().1
}

/// Generates the approximation dataset: training patterns draw their
/// sinusoid parameters from the interval unions; test patterns all use the
/// fixed test values (fresh Poisson realizations each).
pub fn generate_task2<R: Rng + ?Sized>(
    params: &TaskTwoParams,
    p_patterns: usize,
    rng: &mut R,
) -> Result<Task2Dataset> {
    if params.trains == 0 {
        return Err(Error::invalid("need at least one input train"));
    }
    let make_pattern = |signal: RateSignal, rng: &mut R| -> Result<SignalPattern> {
        let inputs: Vec<SpikeTrain> = (0..params.trains)
            .map(|_| modulated_poisson(&signal, params.duration, rng))
            .collect::<Result<_>>()?;
        Ok(SignalPattern { inputs, signal })
    };
    let mut train = Vec::with_capacity(p_patterns);
    for _ in 0..p_patterns {
        let signal = RateSignal {
            a_offset: draw_from_intervals(&params.a_intervals, rng),
            b_amplitude: draw_from_intervals(&params.b_intervals, rng),
            freq: draw_from_intervals(&params.f_intervals, rng),
            phase: params.phase,
        };
        train.push(make_pattern(signal, rng)?);
    }
    let test_signal = RateSignal {
        a_offset: params.test_a,
        b_amplitude: params.test_b,
        freq: params.test_freq,
        phase: params.phase,
    };
    let mut test = Vec::with_capacity(p_patterns);
    for _ in 0..p_patterns {
        test.push(make_pattern(test_signal, rng)?);
    }
    Ok(Task2Dataset { train, test })
}

/// Mean of the raw (unclipped) sinusoid over `(t - lag - window, t - lag)`
/// in closed form.
pub fn windowed_rate_mean(signal: &RateSignal, t: f64, window: f64, lag: f64) -> f64 {
    let t1 = t - lag;
    let t0 = t1 - window;
    if signal.freq == 0.0 || signal.b_amplitude == 0.0 {
        return signal.a_offset + signal.b_amplitude * signal.phase.sin();
    }
    let w = 2.0 * std::f64::consts::PI * signal.freq;
    signal.a_offset
        + signal.b_amplitude / (w * window) * ((w * t0 + signal.phase).cos() - (w * t1 + signal.phase).cos())
}

/// Per-sample targets of a pattern: the windowed rate mean at each sample
/// instant, divided by the normalizer.
pub fn task2_targets(
    signal: &RateSignal,
    params: &TaskTwoParams,
    n_samples: usize,
    sample_period: f64,
) -> Vec<f64> {
    let norm = params.rate_normalizer();
    (0..n_samples)
        .map(|i| windowed_rate_mean(signal, i as f64 * sample_period, params.window, params.lag) / norm)
        .collect()
}
