//! Experiment configuration: a flat `key = value` text format covering
//! every knob of a run, with task-dependent automatic defaults.
//!
//! Lines starting with `#` and blank lines are ignored. Unknown keys are
//! rejected. Values taking `auto` are resolved at run time; `der.x_sat`
//! accepts `inf` for the unbounded square law. The configuration digest
//! identifies every result-affecting parameter except the seed list, so a
//! record is reproducible from its digest plus its seed.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::harness::task::{TaskOneParams, TaskTwoParams};
use crate::liquid::LiquidConfig;
use crate::perceptron::{BankSquash, PDeltaParams};
use crate::rewiring::{FitnessKind, TrainerConfig};

/// Which benchmark the experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Two-class classification of jittered spike-train templates.
    SpikeClassification,
    /// Retrieval of the windowed, normalized sum of input rates.
    SumOfRates,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::SpikeClassification => "spike_classification",
            Task::SumOfRates => "sum_of_rates",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "spike_classification" => Ok(Task::SpikeClassification),
            "sum_of_rates" => Ok(Task::SumOfRates),
            other => Err(Error::Config(format!("unknown task: {other}"))),
        }
    }
}

/// Dendritic readout settings. `x_thr = None` selects the threshold
/// automatically from the training states (midpoint of the admissible
/// bracket); `x_sat` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerConfig {
    pub branches: usize,
    pub slots: usize,
    pub x_thr: Option<f64>,
    pub x_sat: f64,
}

impl Default for DerConfig {
    fn default() -> Self {
        DerConfig {
            branches: 7,
            slots: 10,
            x_thr: None,
            x_sat: 75.0,
        }
    }
}

/// Squash selection for the perceptron bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PprSquashKind {
    ClippedLinear,
    SignThreshold,
    SigmoidHalf,
}

impl PprSquashKind {
    pub fn name(&self) -> &'static str {
        match self {
            PprSquashKind::ClippedLinear => "clipped_linear",
            PprSquashKind::SignThreshold => "sign_threshold",
            PprSquashKind::SigmoidHalf => "sigmoid_half",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "clipped_linear" => Ok(PprSquashKind::ClippedLinear),
            "sign_threshold" => Ok(PprSquashKind::SignThreshold),
            "sigmoid_half" => Ok(PprSquashKind::SigmoidHalf),
            other => Err(Error::Config(format!("unknown squash: {other}"))),
        }
    }
}

/// Perceptron baseline settings. `epsilon`, `squash`, `rho` and `epochs`
/// default per task / from the other fields when left at `auto`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PprConfig {
    pub n: usize,
    pub eta: f64,
    pub epsilon: Option<f64>,
    pub gamma: f64,
    pub mu: f64,
    pub squash: Option<PprSquashKind>,
    pub rho: Option<f64>,
    pub epochs: Option<usize>,
}

impl Default for PprConfig {
    fn default() -> Self {
        PprConfig {
            n: 40,
            eta: 0.01,
            epsilon: None,
            gamma: 0.05,
            mu: 1.0,
            squash: None,
            rho: None,
            epochs: None,
        }
    }
}

impl PprConfig {
    /// Accuracy margin: zero for classification, 0.05 for approximation.
    pub fn resolved_epsilon(&self, task: Task) -> f64 {
        self.epsilon.unwrap_or(match task {
            Task::SpikeClassification => 0.0,
            Task::SumOfRates => 0.05,
        })
    }

    pub fn resolved_squash_kind(&self, task: Task) -> PprSquashKind {
        self.squash.unwrap_or(match task {
            Task::SpikeClassification => PprSquashKind::SignThreshold,
            Task::SumOfRates => PprSquashKind::ClippedLinear,
        })
    }

    /// Builds the squash value, resolving the clipped-linear resolution.
    /// The automatic resolution makes the output quantum equal the
    /// accuracy margin (`rho = 2/epsilon`), falling back to `n` when the
    /// margin is zero.
    pub fn resolved_squash(&self, task: Task) -> BankSquash {
        match self.resolved_squash_kind(task) {
            PprSquashKind::SignThreshold => BankSquash::SignThreshold,
            PprSquashKind::SigmoidHalf => BankSquash::SigmoidHalf,
            PprSquashKind::ClippedLinear => {
                let eps = self.resolved_epsilon(task);
                let rho = self.rho.unwrap_or(if eps > 0.0 {
                    2.0 / eps
                } else {
                    self.n as f64
                });
                BankSquash::ClippedLinear { rho }
            }
        }
    }

    pub fn pdelta_params(&self, task: Task) -> PDeltaParams {
        PDeltaParams {
            eta: self.eta,
            epsilon: self.resolved_epsilon(task),
            gamma: self.gamma,
            mu: self.mu,
        }
    }
}

/// Which readouts an experiment trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadoutSelection {
    pub der: bool,
    pub ppr: bool,
}

impl Default for ReadoutSelection {
    fn default() -> Self {
        ReadoutSelection { der: true, ppr: true }
    }
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub task: Task,
    pub seeds: Vec<u64>,
    /// Training patterns; the test set holds the same number.
    pub patterns: usize,
    pub readouts: ReadoutSelection,
    pub liquid: LiquidConfig,
    /// Liquid integration step.
    pub dt: f64,
    /// Kernel decay constant; `None` fits it from the liquid's mean
    /// inter-spike interval.
    pub kernel_tau_decay: Option<f64>,
    pub kernel_tau_rise: f64,
    /// Kernel peak amplitude; `None` calibrates it per trial so the mean
    /// active state entry equals `state_scale`.
    pub kernel_gain: Option<f64>,
    /// Calibration target for the mean active state entry under automatic
    /// kernel gain. The dendritic readout's squashed difference output
    /// scales with it, so approximation tasks want it small enough to
    /// keep the sigmoid out of saturation.
    pub state_scale: f64,
    pub sample_period: f64,
    pub der: DerConfig,
    pub ppr: PprConfig,
    pub trainer: TrainerConfig,
    pub task1: TaskOneParams,
    pub task2: TaskTwoParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            task: Task::SpikeClassification,
            seeds: (0..10).collect(),
            patterns: 200,
            readouts: ReadoutSelection::default(),
            liquid: LiquidConfig::default(),
            dt: 2e-4,
            kernel_tau_decay: Some(0.0075),
            kernel_tau_rise: 0.001,
            kernel_gain: None,
            state_scale: 1.0,
            sample_period: 0.025,
            der: DerConfig::default(),
            ppr: PprConfig::default(),
            trainer: TrainerConfig::default(),
            task1: TaskOneParams::default(),
            task2: TaskTwoParams::default(),
        }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got `{value}`")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("{key}: expected a count, got `{value}`")))
}

fn parse_intervals(key: &str, value: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for piece in value.split(',') {
        let (lo, hi) = piece
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("{key}: expected lo:hi pairs, got `{piece}`")))?;
        let lo = parse_f64(key, lo.trim())?;
        let hi = parse_f64(key, hi.trim())?;
        if hi < lo {
            return Err(Error::Config(format!("{key}: empty interval {lo}:{hi}")));
        }
        out.push((lo, hi));
    }
    if out.is_empty() {
        return Err(Error::Config(format!("{key}: no intervals given")));
    }
    Ok(out)
}

fn intervals_text(intervals: &[(f64, f64)]) -> String {
    intervals
        .iter()
        .map(|(lo, hi)| format!("{lo}:{hi}"))
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    /// Defaults for a task. The kernel constants, the state-scale
    /// calibration target and the branch saturation ceiling differ per
    /// task: classification wants short, punchy state traces while the
    /// windowed-rate approximation needs the kernel to span its averaging
    /// window and the squashed output to stay inside the sigmoid's
    /// dynamic range.
    pub fn for_task(task: Task) -> Self {
        let mut cfg = ExperimentConfig {
            task,
            ..ExperimentConfig::default()
        };
        cfg.apply_task_defaults();
        cfg
    }

    fn apply_task_defaults(&mut self) {
        match self.task {
            Task::SpikeClassification => {
                self.kernel_tau_decay = Some(0.0075);
                self.kernel_tau_rise = 0.001;
                self.state_scale = 1.0;
                self.der.x_sat = 75.0;
            }
            Task::SumOfRates => {
                self.kernel_tau_decay = Some(0.030);
                self.kernel_tau_rise = 0.0075;
                self.state_scale = 0.3;
                self.der.x_sat = 8.0;
            }
        }
    }

    /// Parses the flat key=value format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one key. Exposed so command-line overrides reuse the same
    /// names as the file format.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "task" => {
                // Switching the task re-applies its dependent defaults;
                // later keys still override them, so `task` should come
                // first in a configuration file.
                self.task = Task::from_name(value)?;
                self.apply_task_defaults();
            }
            "seeds" => {
                let mut seeds = Vec::new();
                for tok in value.split(',') {
                    seeds.push(tok.trim().parse::<u64>().map_err(|_| {
                        Error::Config(format!("seeds: bad entry `{tok}`"))
                    })?);
                }
                self.seeds = seeds;
            }
            "seed" => {
                let base = value
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("seed: bad value `{value}`")))?;
                let n = self.seeds.len().max(1) as u64;
                self.seeds = (base..base + n).collect();
            }
            "trials" => {
                let n = parse_usize(key, value)?;
                let base = self.seeds.first().copied().unwrap_or(0);
                self.seeds = (base..base + n as u64).collect();
            }
            "patterns" => self.patterns = parse_usize(key, value)?,
            "readouts" => {
                let mut sel = ReadoutSelection { der: false, ppr: false };
                for tok in value.split(',') {
                    match tok.trim() {
                        "der" => sel.der = true,
                        "ppr" => sel.ppr = true,
                        other => {
                            return Err(Error::Config(format!("unknown readout: {other}")))
                        }
                    }
                }
                self.readouts = sel;
            }
            "dt" => self.dt = parse_f64(key, value)?,
            "kernel.tau_decay" => {
                self.kernel_tau_decay = if value == "auto" {
                    None
                } else {
                    Some(parse_f64(key, value)?)
                }
            }
            "kernel.tau_rise" => self.kernel_tau_rise = parse_f64(key, value)?,
            "kernel.gain" => {
                self.kernel_gain = if value == "auto" {
                    None
                } else {
                    Some(parse_f64(key, value)?)
                }
            }
            "kernel.state_scale" => self.state_scale = parse_f64(key, value)?,
            "sample_period" => self.sample_period = parse_f64(key, value)?,

            "liquid.num_neurons" => self.liquid.num_neurons = parse_usize(key, value)?,
            "liquid.inhibitory_fraction" => {
                self.liquid.inhibitory_fraction = parse_f64(key, value)?
            }
            "liquid.lambda" => self.liquid.lambda = parse_f64(key, value)?,
            "liquid.background_drive" => self.liquid.background_drive = parse_f64(key, value)?,
            "liquid.refractory_inhibitory" => {
                self.liquid.refractory_inhibitory = parse_f64(key, value)?
            }
            "liquid.input_fraction" => self.liquid.input.fraction = parse_f64(key, value)?,
            "liquid.input_weight_mean" => self.liquid.input.weight_mean = parse_f64(key, value)?,
            "liquid.lif.membrane_tau" => self.liquid.lif.membrane_tau = parse_f64(key, value)?,
            "liquid.lif.threshold" => self.liquid.lif.threshold = parse_f64(key, value)?,
            "liquid.lif.reset" => self.liquid.lif.reset = parse_f64(key, value)?,
            "liquid.lif.resting" => self.liquid.lif.resting = parse_f64(key, value)?,
            "liquid.lif.refractory" => self.liquid.lif.refractory = parse_f64(key, value)?,
            "liquid.lif.input_resistance" => {
                self.liquid.lif.input_resistance = parse_f64(key, value)?
            }
            _ if key.starts_with("liquid.ee.")
                || key.starts_with("liquid.ei.")
                || key.starts_with("liquid.ie.")
                || key.starts_with("liquid.ii.") =>
            {
                let class = &key[7..9];
                let field = &key[10..];
                let params = match class {
                    "ee" => &mut self.liquid.classes.ee,
                    "ei" => &mut self.liquid.classes.ei,
                    "ie" => &mut self.liquid.classes.ie,
                    _ => &mut self.liquid.classes.ii,
                };
                match field {
                    "connect_prob" => params.connect_prob = parse_f64(key, value)?,
                    "weight_mean" => params.weight_mean = parse_f64(key, value)?,
                    "tau_decay" => params.tau_decay = parse_f64(key, value)?,
                    "tau_rise" => params.tau_rise = parse_f64(key, value)?,
                    "delay" => params.delay = parse_f64(key, value)?,
                    other => {
                        return Err(Error::Config(format!("unknown synapse field: {other}")))
                    }
                }
            }

            "der.branches" => self.der.branches = parse_usize(key, value)?,
            "der.slots" => self.der.slots = parse_usize(key, value)?,
            "der.x_thr" => {
                self.der.x_thr = if value == "auto" {
                    None
                } else {
                    Some(parse_f64(key, value)?)
                }
            }
            "der.x_sat" => {
                self.der.x_sat = if value == "inf" {
                    f64::INFINITY
                } else {
                    parse_f64(key, value)?
                }
            }

            "ppr.n" => self.ppr.n = parse_usize(key, value)?,
            "ppr.eta" => self.ppr.eta = parse_f64(key, value)?,
            "ppr.epsilon" => {
                self.ppr.epsilon = if value == "auto" {
                    None
                } else {
                    Some(parse_f64(key, value)?)
                }
            }
            "ppr.gamma" => self.ppr.gamma = parse_f64(key, value)?,
            "ppr.mu" => self.ppr.mu = parse_f64(key, value)?,
            "ppr.squash" => {
                self.ppr.squash = if value == "auto" {
                    None
                } else {
                    Some(PprSquashKind::from_name(value)?)
                }
            }
            "ppr.rho" => {
                self.ppr.rho = if value == "auto" {
                    None
                } else {
                    Some(parse_f64(key, value)?)
                }
            }
            "ppr.epochs" => {
                self.ppr.epochs = if value == "auto" {
                    None
                } else {
                    Some(parse_usize(key, value)?)
                }
            }

            "trainer.target_set" => self.trainer.target_set = parse_usize(key, value)?,
            "trainer.replacement_set" => self.trainer.replacement_set = parse_usize(key, value)?,
            "trainer.max_iterations" => self.trainer.max_iterations = parse_usize(key, value)?,
            "trainer.max_local" => self.trainer.max_local = parse_usize(key, value)?,
            "trainer.fitness" => {
                self.trainer.fitness = match value {
                    "linear" => FitnessKind::LinearError,
                    "signum" => FitnessKind::SignumError,
                    other => return Err(Error::Config(format!("unknown fitness: {other}"))),
                }
            }

            "task1.classes" => self.task1.classes = parse_usize(key, value)?,
            "task1.trains_per_class" => self.task1.trains_per_class = parse_usize(key, value)?,
            "task1.rate" => self.task1.rate = parse_f64(key, value)?,
            "task1.jitter_std" => self.task1.jitter_std = parse_f64(key, value)?,
            "task1.duration" => self.task1.duration = parse_f64(key, value)?,

            "task2.trains" => self.task2.trains = parse_usize(key, value)?,
            "task2.window" => self.task2.window = parse_f64(key, value)?,
            "task2.lag" => self.task2.lag = parse_f64(key, value)?,
            "task2.duration" => self.task2.duration = parse_f64(key, value)?,
            "task2.phase" => self.task2.phase = parse_f64(key, value)?,
            "task2.a_intervals" => self.task2.a_intervals = parse_intervals(key, value)?,
            "task2.b_intervals" => self.task2.b_intervals = parse_intervals(key, value)?,
            "task2.f_intervals" => self.task2.f_intervals = parse_intervals(key, value)?,
            "task2.test_a" => self.task2.test_a = parse_f64(key, value)?,
            "task2.test_b" => self.task2.test_b = parse_f64(key, value)?,
            "task2.test_freq" => self.task2.test_freq = parse_f64(key, value)?,

            other => return Err(Error::Config(format!("unknown key: {other}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed required".into()));
        }
        if self.patterns == 0 {
            return Err(Error::Config("patterns must be positive".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config("dt must be positive".into()));
        }
        if !(self.sample_period > 0.0) {
            return Err(Error::Config("sample_period must be positive".into()));
        }
        if let Some(tau) = self.kernel_tau_decay {
            if tau <= self.kernel_tau_rise {
                return Err(Error::Config(
                    "kernel.tau_decay must exceed kernel.tau_rise".into(),
                ));
            }
        }
        if self.der.branches == 0 || self.der.slots == 0 {
            return Err(Error::Config("der shape must be non-zero".into()));
        }
        if self.ppr.n == 0 {
            return Err(Error::Config("ppr.n must be positive".into()));
        }
        if self.task == Task::SpikeClassification && self.task1.classes != 2 {
            return Err(Error::Config(
                "the two-cell readout runs two-class experiments (task1.classes = 2)".into(),
            ));
        }
        Ok(())
    }

    /// Canonical text form: every key in a fixed order. Parsing it back
    /// reproduces the configuration exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "task = {}", self.task.name());
        let seeds: Vec<String> = self.seeds.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "seeds = {}", seeds.join(","));
        let _ = writeln!(s, "patterns = {}", self.patterns);
        let mut readouts = Vec::new();
        if self.readouts.der {
            readouts.push("der");
        }
        if self.readouts.ppr {
            readouts.push("ppr");
        }
        let _ = writeln!(s, "readouts = {}", readouts.join(","));
        let _ = writeln!(s, "dt = {}", self.dt);
        match self.kernel_tau_decay {
            Some(v) => {
                let _ = writeln!(s, "kernel.tau_decay = {v}");
            }
            None => {
                let _ = writeln!(s, "kernel.tau_decay = auto");
            }
        }
        let _ = writeln!(s, "kernel.tau_rise = {}", self.kernel_tau_rise);
        match self.kernel_gain {
            Some(v) => {
                let _ = writeln!(s, "kernel.gain = {v}");
            }
            None => {
                let _ = writeln!(s, "kernel.gain = auto");
            }
        }
        let _ = writeln!(s, "kernel.state_scale = {}", self.state_scale);
        let _ = writeln!(s, "sample_period = {}", self.sample_period);

        let _ = writeln!(s, "liquid.num_neurons = {}", self.liquid.num_neurons);
        let _ = writeln!(
            s,
            "liquid.inhibitory_fraction = {}",
            self.liquid.inhibitory_fraction
        );
        let _ = writeln!(s, "liquid.lambda = {}", self.liquid.lambda);
        let _ = writeln!(s, "liquid.background_drive = {}", self.liquid.background_drive);
        let _ = writeln!(
            s,
            "liquid.refractory_inhibitory = {}",
            self.liquid.refractory_inhibitory
        );
        let _ = writeln!(s, "liquid.input_fraction = {}", self.liquid.input.fraction);
        let _ = writeln!(
            s,
            "liquid.input_weight_mean = {}",
            self.liquid.input.weight_mean
        );
        let lif = &self.liquid.lif;
        let _ = writeln!(s, "liquid.lif.membrane_tau = {}", lif.membrane_tau);
        let _ = writeln!(s, "liquid.lif.threshold = {}", lif.threshold);
        let _ = writeln!(s, "liquid.lif.reset = {}", lif.reset);
        let _ = writeln!(s, "liquid.lif.resting = {}", lif.resting);
        let _ = writeln!(s, "liquid.lif.refractory = {}", lif.refractory);
        let _ = writeln!(s, "liquid.lif.input_resistance = {}", lif.input_resistance);
        for (name, p) in [
            ("ee", &self.liquid.classes.ee),
            ("ei", &self.liquid.classes.ei),
            ("ie", &self.liquid.classes.ie),
            ("ii", &self.liquid.classes.ii),
        ] {
            let _ = writeln!(s, "liquid.{name}.connect_prob = {}", p.connect_prob);
            let _ = writeln!(s, "liquid.{name}.weight_mean = {}", p.weight_mean);
            let _ = writeln!(s, "liquid.{name}.tau_decay = {}", p.tau_decay);
            let _ = writeln!(s, "liquid.{name}.tau_rise = {}", p.tau_rise);
            let _ = writeln!(s, "liquid.{name}.delay = {}", p.delay);
        }

        let _ = writeln!(s, "der.branches = {}", self.der.branches);
        let _ = writeln!(s, "der.slots = {}", self.der.slots);
        match self.der.x_thr {
            Some(v) => {
                let _ = writeln!(s, "der.x_thr = {v}");
            }
            None => {
                let _ = writeln!(s, "der.x_thr = auto");
            }
        }
        if self.der.x_sat.is_infinite() {
            let _ = writeln!(s, "der.x_sat = inf");
        } else {
            let _ = writeln!(s, "der.x_sat = {}", self.der.x_sat);
        }

        let _ = writeln!(s, "ppr.n = {}", self.ppr.n);
        let _ = writeln!(s, "ppr.eta = {}", self.ppr.eta);
        match self.ppr.epsilon {
            Some(v) => {
                let _ = writeln!(s, "ppr.epsilon = {v}");
            }
            None => {
                let _ = writeln!(s, "ppr.epsilon = auto");
            }
        }
        let _ = writeln!(s, "ppr.gamma = {}", self.ppr.gamma);
        let _ = writeln!(s, "ppr.mu = {}", self.ppr.mu);
        match self.ppr.squash {
            Some(k) => {
                let _ = writeln!(s, "ppr.squash = {}", k.name());
            }
            None => {
                let _ = writeln!(s, "ppr.squash = auto");
            }
        }
        match self.ppr.rho {
            Some(v) => {
                let _ = writeln!(s, "ppr.rho = {v}");
            }
            None => {
                let _ = writeln!(s, "ppr.rho = auto");
            }
        }
        match self.ppr.epochs {
            Some(v) => {
                let _ = writeln!(s, "ppr.epochs = {v}");
            }
            None => {
                let _ = writeln!(s, "ppr.epochs = auto");
            }
        }

        let _ = writeln!(s, "trainer.target_set = {}", self.trainer.target_set);
        let _ = writeln!(s, "trainer.replacement_set = {}", self.trainer.replacement_set);
        let _ = writeln!(s, "trainer.max_iterations = {}", self.trainer.max_iterations);
        let _ = writeln!(s, "trainer.max_local = {}", self.trainer.max_local);
        let fitness = match self.trainer.fitness {
            FitnessKind::LinearError => "linear",
            FitnessKind::SignumError => "signum",
        };
        let _ = writeln!(s, "trainer.fitness = {fitness}");

        let _ = writeln!(s, "task1.classes = {}", self.task1.classes);
        let _ = writeln!(s, "task1.trains_per_class = {}", self.task1.trains_per_class);
        let _ = writeln!(s, "task1.rate = {}", self.task1.rate);
        let _ = writeln!(s, "task1.jitter_std = {}", self.task1.jitter_std);
        let _ = writeln!(s, "task1.duration = {}", self.task1.duration);

        let _ = writeln!(s, "task2.trains = {}", self.task2.trains);
        let _ = writeln!(s, "task2.window = {}", self.task2.window);
        let _ = writeln!(s, "task2.lag = {}", self.task2.lag);
        let _ = writeln!(s, "task2.duration = {}", self.task2.duration);
        let _ = writeln!(s, "task2.phase = {}", self.task2.phase);
        let _ = writeln!(s, "task2.a_intervals = {}", intervals_text(&self.task2.a_intervals));
        let _ = writeln!(s, "task2.b_intervals = {}", intervals_text(&self.task2.b_intervals));
        let _ = writeln!(s, "task2.f_intervals = {}", intervals_text(&self.task2.f_intervals));
        let _ = writeln!(s, "task2.test_a = {}", self.task2.test_a);
        let _ = writeln!(s, "task2.test_b = {}", self.task2.test_b);
        let _ = writeln!(s, "task2.test_freq = {}", self.task2.test_freq);
        s
    }

    /// Hex digest over the canonical text with the seed list removed:
    /// records are identified by (digest, seed).
    pub fn digest(&self) -> String {
        let canonical: String = self
            .to_text()
            .lines()
            .filter(|l| !l.starts_with("seeds ="))
            .collect::<Vec<_>>()
            .join("\n");
        format!("{:016x}", fnv1a64(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_text() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_text();
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn task2_config_round_trips() {
        let mut cfg = ExperimentConfig::for_task(Task::SumOfRates);
        cfg.der.x_sat = f64::INFINITY;
        cfg.der.x_thr = Some(7.0);
        cfg.ppr.squash = Some(PprSquashKind::SigmoidHalf);
        cfg.seeds = vec![3, 5, 8];
        let back = ExperimentConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::parse("bogus = 3").is_err());
        assert!(ExperimentConfig::parse("task = juggling").is_err());
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let cfg = ExperimentConfig::parse("# comment\n\npatterns = 50\n").unwrap();
        assert_eq!(cfg.patterns, 50);
    }

    #[test]
    fn seed_plus_trials_expand() {
        let cfg = ExperimentConfig::parse("trials = 3\nseed = 10\n").unwrap();
        assert_eq!(cfg.seeds, vec![10, 11, 12]);
        let cfg = ExperimentConfig::parse("seed = 5\ntrials = 4\n").unwrap();
        assert_eq!(cfg.seeds, vec![5, 6, 7, 8]);
    }

    #[test]
    fn digest_ignores_seeds_but_not_parameters() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.seeds = vec![99];
        assert_eq!(a.digest(), b.digest());
        let mut c = a.clone();
        c.patterns = 17;
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn auto_rho_matches_epsilon_quantum() {
        let cfg = ExperimentConfig::for_task(Task::SumOfRates);
        match cfg.ppr.resolved_squash(Task::SumOfRates) {
            BankSquash::ClippedLinear { rho } => assert!((rho - 40.0).abs() < 1e-12),
            other => panic!("unexpected squash {other:?}"),
        }
    }

    #[test]
    fn epsilon_defaults_per_task() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.ppr.resolved_epsilon(Task::SpikeClassification), 0.0);
        assert_eq!(cfg.ppr.resolved_epsilon(Task::SumOfRates), 0.05);
    }

    #[test]
    fn multiclass_task1_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.task1.classes = 3;
        assert!(cfg.validate().is_err());
    }
}
