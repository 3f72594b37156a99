//! Spike trains, the post-synaptic current kernel, and the conversion of
//! spike trains into sampled analog state vectors for the readout stage.
//!
//! A spike train is an ordered list of firing times inside a finite window.
//! Convolving it with a fast-rising, slow-decaying double-exponential kernel
//! produces an analog waveform; sampling that waveform at a fixed period
//! yields the state vectors consumed by the readouts.

use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::error::{Error, Result};

/// An ordered set of spike times over a finite recording window.
///
/// Times are strictly increasing and lie in `[0, duration)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrain {
    times: Vec<f64>,
    duration: f64,
}

impl SpikeTrain {
    /// Builds a train from sorted times, validating the invariants.
    pub fn new(times: Vec<f64>, duration: f64) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::invalid(format!(
                "spike train duration must be positive and finite, got {duration}"
            )));
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &times {
            if !t.is_finite() || t < 0.0 || t >= duration {
                return Err(Error::invalid(format!(
                    "spike time {t} outside [0, {duration})"
                )));
            }
            if t <= prev {
                return Err(Error::invalid(format!(
                    "spike times must be strictly increasing ({prev} then {t})"
                )));
            }
            prev = t;
        }
        Ok(SpikeTrain { times, duration })
    }

    /// A train with no spikes.
    pub fn empty(duration: f64) -> Self {
        SpikeTrain {
            times: Vec::new(),
            duration: duration.max(f64::MIN_POSITIVE),
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Merges two trains over the same window into one sorted train.
    /// Coincident spikes are kept as distinct events is not representable,
    /// so an exact collision is nudged by one ulp; callers that care should
    /// avoid constructing coincident merges.
    pub fn merge(&self, other: &SpikeTrain) -> Result<SpikeTrain> {
        if self.duration != other.duration {
            return Err(Error::invalid("cannot merge trains of different durations"));
        }
        let mut all: Vec<f64> = self
            .times
            .iter()
            .chain(other.times.iter())
            .copied()
            .collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for i in 1..all.len() {
            if all[i] <= all[i - 1] {
                all[i] = next_after(all[i - 1]);
            }
        }
        SpikeTrain::new(all, self.duration)
    }
}

fn next_after(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

/// Double-exponential post-synaptic current kernel
/// `h(t) = i0 * (exp(-t/tau_decay) - exp(-t/tau_rise))` for `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub tau_decay: f64,
    pub tau_rise: f64,
    pub i0: f64,
}

impl KernelParams {
    pub fn new(tau_decay: f64, tau_rise: f64, i0: f64) -> Result<Self> {
        if !(tau_decay > tau_rise && tau_rise > 0.0) {
            return Err(Error::invalid(format!(
                "kernel requires tau_decay > tau_rise > 0, got {tau_decay} and {tau_rise}"
            )));
        }
        if !(i0 > 0.0) {
            return Err(Error::invalid(format!("kernel gain must be positive, got {i0}")));
        }
        Ok(KernelParams {
            tau_decay,
            tau_rise,
            i0,
        })
    }

    /// Kernel normalized so that its peak value is exactly 1.
    pub fn peak_normalized(tau_decay: f64, tau_rise: f64) -> Result<Self> {
        Self::with_peak(tau_decay, tau_rise, 1.0)
    }

    /// Kernel normalized so that its peak value equals `peak`.
    pub fn with_peak(tau_decay: f64, tau_rise: f64, peak: f64) -> Result<Self> {
        if !(peak > 0.0) {
            return Err(Error::invalid(format!("kernel peak must be positive, got {peak}")));
        }
        let probe = KernelParams::new(tau_decay, tau_rise, 1.0)?;
        let unit_peak = probe.value(probe.peak_time());
        KernelParams::new(tau_decay, tau_rise, peak / unit_peak)
    }

    /// Kernel value at elapsed time `t` since a spike; zero for `t < 0`.
    pub fn value(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.i0 * ((-t / self.tau_decay).exp() - (-t / self.tau_rise).exp())
        }
    }

    /// Time of the kernel maximum, from solving `dh/dt = 0`.
    pub fn peak_time(&self) -> f64 {
        let (td, tr) = (self.tau_decay, self.tau_rise);
        td * tr / (td - tr) * (td / tr).ln()
    }

    /// The kernel maximum.
    pub fn peak(&self) -> f64 {
        self.value(self.peak_time())
    }
}

/// Sinusoidally modulated firing rate `r(t) = a + b*sin(2*pi*f*t + phase)`,
/// clipped at zero when evaluated as a rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSignal {
    pub a_offset: f64,
    pub b_amplitude: f64,
    pub freq: f64,
    pub phase: f64,
}

impl RateSignal {
    pub fn constant(rate: f64) -> Self {
        RateSignal {
            a_offset: rate,
            b_amplitude: 0.0,
            freq: 0.0,
            phase: 0.0,
        }
    }

    /// The raw sinusoid, which may be negative.
    pub fn raw(&self, t: f64) -> f64 {
        self.a_offset
            + self.b_amplitude * (2.0 * std::f64::consts::PI * self.freq * t + self.phase).sin()
    }

    /// The value used as a firing rate: the sinusoid clipped at zero.
    pub fn rate(&self, t: f64) -> f64 {
        self.raw(t).max(0.0)
    }

    /// An upper envelope of the rate, used by the thinning sampler.
    pub fn max_rate(&self) -> f64 {
        (self.a_offset + self.b_amplitude.abs()).max(0.0)
    }
}

/// Sampled analog liquid states: one row per sample instant, one column per
/// spike-train channel. All entries are non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    samples: Vec<f64>,
    num_channels: usize,
    sample_period: f64,
}

impl StateMatrix {
    pub fn new(samples: Vec<f64>, num_channels: usize, sample_period: f64) -> Result<Self> {
        if num_channels == 0 || samples.len() % num_channels != 0 {
            return Err(Error::invalid("state matrix shape mismatch"));
        }
        if !(sample_period > 0.0) {
            return Err(Error::invalid("sample period must be positive"));
        }
        Ok(StateMatrix {
            samples,
            num_channels,
            sample_period,
        })
    }

    pub fn num_samples(&self) -> usize {
        self.samples.len() / self.num_channels
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    /// The state vector at sample instant `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.num_channels;
        &self.samples[i * w..(i + 1) * w]
    }

    pub fn get(&self, sample: usize, channel: usize) -> f64 {
        self.samples[sample * self.num_channels + channel]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks(self.num_channels)
    }

    /// Writes the matrix as delimited text: one row per sample, one column
    /// per channel (column order = channel index), space separated.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Reads a matrix previously written by [`StateMatrix::write_text`].
    pub fn read_text<R: BufRead>(r: R, sample_period: f64) -> Result<Self> {
        let mut samples = Vec::new();
        let mut num_channels = None;
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| Error::Format(format!("bad state value: {tok}")))
                })
                .collect::<Result<_>>()?;
            match num_channels {
                None => num_channels = Some(row.len()),
                Some(n) if n != row.len() => {
                    return Err(Error::Format("ragged state matrix rows".into()))
                }
                _ => {}
            }
            samples.extend(row);
        }
        let num_channels =
            num_channels.ok_or_else(|| Error::Format("empty state matrix file".into()))?;
        StateMatrix::new(samples, num_channels, sample_period)
    }
}

/// Draws a homogeneous Poisson spike train at the given rate.
pub fn poisson_train<R: Rng + ?Sized>(rate: f64, duration: f64, rng: &mut R) -> Result<SpikeTrain> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::invalid(format!("rate must be non-negative, got {rate}")));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::invalid(format!(
            "duration must be positive, got {duration}"
        )));
    }
    let mut times = Vec::new();
    if rate > 0.0 {
        let gap = Exp::new(rate).map_err(|e| Error::invalid(format!("bad rate: {e}")))?;
        let mut t = gap.sample(rng);
        while t < duration {
            times.push(t);
            t += gap.sample(rng);
        }
    }
    SpikeTrain::new(times, duration)
}

/// Displaces every spike of the template by an independent zero-mean
/// Gaussian draw with the given standard deviation. Spikes pushed outside
/// the recording window are dropped; the result is re-sorted.
pub fn jitter_train<R: Rng + ?Sized>(
    template: &SpikeTrain,
    std: f64,
    rng: &mut R,
) -> Result<SpikeTrain> {
    if !(std >= 0.0) || !std.is_finite() {
        return Err(Error::invalid(format!(
            "jitter std must be non-negative, got {std}"
        )));
    }
    if std == 0.0 {
        return Ok(template.clone());
    }
    let noise = Normal::new(0.0, std).map_err(|e| Error::invalid(format!("bad std: {e}")))?;
    let duration = template.duration();
    let mut times: Vec<f64> = template
        .times()
        .iter()
        .map(|&t| t + noise.sample(rng))
        .filter(|&t| (0.0..duration).contains(&t))
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Collisions after jittering are measure-zero but not impossible.
    for i in 1..times.len() {
        if times[i] <= times[i - 1] {
            times[i] = next_after(times[i - 1]);
        }
    }
    SpikeTrain::new(times, duration)
}

/// Draws an inhomogeneous Poisson train whose rate follows the signal,
/// using thinning against the constant envelope `a + |b|`.
pub fn modulated_poisson<R: Rng + ?Sized>(
    signal: &RateSignal,
    duration: f64,
    rng: &mut R,
) -> Result<SpikeTrain> {
    let envelope = signal.max_rate();
    let candidates = poisson_train(envelope, duration, rng)?;
    if envelope == 0.0 {
        return Ok(candidates);
    }
    let times: Vec<f64> = candidates
        .times()
        .iter()
        .copied()
        .filter(|&t| rng.gen::<f64>() < signal.rate(t) / envelope)
        .collect();
    SpikeTrain::new(times, duration)
}

/// The filtered analog waveform at time `t`: the sum of kernel responses of
/// all spikes at or before `t`. Spikes after `t` contribute nothing.
pub fn psc_value(train: &SpikeTrain, kernel: &KernelParams, t: f64) -> f64 {
    train
        .times()
        .iter()
        .take_while(|&&tf| tf <= t)
        .map(|&tf| kernel.value(t - tf))
        .sum()
}

/// Filters a train and evaluates the waveform at `i * sample_period` for
/// `i` in `0..n_samples`. Uses exact exponential decay between events, so
/// each value equals [`psc_value`] up to floating-point roundoff.
pub(crate) fn sampled_psc(
    train: &SpikeTrain,
    kernel: &KernelParams,
    sample_period: f64,
    n_samples: usize,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_samples);
    let mut decay_state = 0.0_f64;
    let mut rise_state = 0.0_f64;
    let mut now = 0.0_f64;
    let mut spikes = train.times().iter().copied().peekable();
    for i in 0..n_samples {
        let t_sample = i as f64 * sample_period;
        // Fold in every spike up to and including the sample instant.
        while let Some(&tf) = spikes.peek() {
            if tf > t_sample {
                break;
            }
            let dt = tf - now;
            decay_state *= (-dt / kernel.tau_decay).exp();
            rise_state *= (-dt / kernel.tau_rise).exp();
            decay_state += kernel.i0;
            rise_state += kernel.i0;
            now = tf;
            spikes.next();
        }
        let dt = t_sample - now;
        decay_state *= (-dt / kernel.tau_decay).exp();
        rise_state *= (-dt / kernel.tau_rise).exp();
        now = t_sample;
        out.push(decay_state - rise_state);
    }
    out
}

/// Converts a set of equal-duration spike trains into a state matrix by
/// filtering each train with the kernel and sampling every `sample_period`
/// seconds. Row `i`, column `c` equals `psc_value(trains[c], kernel, i*Ts)`.
pub fn sample_states(
    trains: &[SpikeTrain],
    kernel: &KernelParams,
    sample_period: f64,
) -> Result<StateMatrix> {
    if trains.is_empty() {
        return Err(Error::invalid("sample_states requires at least one train"));
    }
    if !(sample_period > 0.0) {
        return Err(Error::invalid("sample period must be positive"));
    }
    let duration = trains[0].duration();
    if trains.iter().any(|tr| tr.duration() != duration) {
        return Err(Error::invalid("all trains must share one duration"));
    }
    let n_samples = (duration / sample_period).floor() as usize;
    let n_channels = trains.len();
    let mut samples = vec![0.0; n_samples * n_channels];
    let columns: Vec<Vec<f64>> = trains
        .iter()
        .map(|tr| sampled_psc(tr, kernel, sample_period, n_samples))
        .collect();
    for (c, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            samples[i * n_channels + c] = v;
        }
    }
    StateMatrix::new(samples, n_channels, sample_period)
}

/// Mean inter-spike interval across a whole set of trains, defined as
/// `1 / (L * mean_rate)` where `mean_rate` is the average per-train firing
/// rate. Equivalent to `1 / sum_i(count_i / duration_i)`.
pub fn mean_isi(trains: &[SpikeTrain]) -> Result<f64> {
    if trains.is_empty() {
        return Err(Error::UndefinedStatistic("no trains supplied".into()));
    }
    let rate_sum: f64 = trains
        .iter()
        .map(|tr| tr.len() as f64 / tr.duration())
        .sum();
    if rate_sum <= 0.0 {
        return Err(Error::UndefinedStatistic(
            "mean ISI undefined with zero spikes".into(),
        ));
    }
    Ok(1.0 / rate_sum)
}

/// Affine fit mapping the population mean inter-spike interval to the
/// kernel decay constant that best preserves temporal structure. The fit
/// is dimensionally consistent with whatever unit the caller supplies;
/// the coefficients were obtained on millisecond axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauDecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Lower bound applied to the result, keeping it physically positive.
    pub min: f64,
}

impl Default for TauDecayFit {
    fn default() -> Self {
        TauDecayFit {
            slope: 52.83,
            intercept: -3.1,
            min: 1e-3,
        }
    }
}

impl TauDecayFit {
    pub fn apply(&self, n_isi: f64) -> f64 {
        (self.slope * n_isi + self.intercept).max(self.min)
    }
}

/// [`TauDecayFit::apply`] with the default coefficients.
pub fn optimal_tau_decay(n_isi: f64) -> f64 {
    TauDecayFit::default().apply(n_isi)
}

/// Writes trains in the spike-train file format: a header line
/// `duration=<seconds>` followed by one line per train holding
/// whitespace-separated spike times in seconds.
pub fn write_trains<W: Write>(mut w: W, trains: &[SpikeTrain]) -> Result<()> {
    if trains.is_empty() {
        return Err(Error::invalid("cannot write an empty set of trains"));
    }
    let duration = trains[0].duration();
    if trains.iter().any(|tr| tr.duration() != duration) {
        return Err(Error::invalid("all trains must share one duration"));
    }
    writeln!(w, "duration={duration}")?;
    for tr in trains {
        let line: Vec<String> = tr.times().iter().map(|t| format!("{t}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Reads trains written by [`write_trains`].
pub fn read_trains<R: BufRead>(r: R) -> Result<Vec<SpikeTrain>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("missing duration header".into()))??;
    let duration: f64 = header
        .trim()
        .strip_prefix("duration=")
        .ok_or_else(|| Error::Format(format!("bad header line: {header}")))?
        .parse()
        .map_err(|_| Error::Format(format!("bad duration in header: {header}")))?;
    let mut trains = Vec::new();
    for line in lines {
        let line = line?;
        let times: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Format(format!("bad spike time: {tok}")))
            })
            .collect::<Result<_>>()?;
        trains.push(SpikeTrain::new(times, duration)?);
    }
    Ok(trains)
}
