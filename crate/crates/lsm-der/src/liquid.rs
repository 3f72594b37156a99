//! A recurrent pool of leaky integrate-and-fire neurons that maps input
//! spike trains to a high-dimensional set of liquid spike trains.
//!
//! Neurons sit on a 3-D integer grid; a connection from `a` to `b` exists
//! with probability `C * exp(-D(a,b)^2 / lambda^2)` where `D` is Euclidean
//! grid distance and `C` depends on the excitatory/inhibitory classes of
//! the two endpoints. Synapses are static double-exponential current
//! kernels with a per-class delay. Integration is forward Euler.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::spike::SpikeTrain;

/// Membrane parameters of the integrate-and-fire neurons. Voltages are in
/// volts, times in seconds; `input_resistance` converts synaptic current
/// units into volts (the default units treat currents as volt-equivalents,
/// so it is 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifParams {
    pub membrane_tau: f64,
    pub threshold: f64,
    pub reset: f64,
    pub resting: f64,
    /// Refractory period of excitatory neurons.
    pub refractory: f64,
    pub input_resistance: f64,
}

impl Default for LifParams {
    fn default() -> Self {
        LifParams {
            membrane_tau: 0.030,
            threshold: 0.015,
            reset: 0.0,
            resting: 0.0,
            refractory: 0.003,
            input_resistance: 1.0,
        }
    }
}

impl LifParams {
    fn validate(&self) -> Result<()> {
        if !(self.threshold > self.reset) {
            return Err(Error::invalid("threshold must exceed reset"));
        }
        if !(self.membrane_tau > 0.0) {
            return Err(Error::invalid("membrane tau must be positive"));
        }
        if self.refractory < 0.0 {
            return Err(Error::invalid("refractory period must be non-negative"));
        }
        Ok(())
    }
}

/// Synapse parameters of one connection class: connection probability
/// scale, mean peak amplitude (negative for inhibitory sources), kernel
/// time constants, the axonal delay, and the short-term plasticity
/// constants of the Markram-Tsodyks release model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynapseClassParams {
    pub connect_prob: f64,
    pub weight_mean: f64,
    pub tau_decay: f64,
    pub tau_rise: f64,
    pub delay: f64,
    /// Baseline release probability U; 1 disables short-term dynamics.
    pub use_fraction: f64,
    /// Depression recovery time constant (seconds).
    pub depression_tau: f64,
    /// Facilitation decay time constant (seconds).
    pub facilitation_tau: f64,
}

/// The four recurrent connection classes, keyed source-class first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionClasses {
    pub ee: SynapseClassParams,
    pub ei: SynapseClassParams,
    pub ie: SynapseClassParams,
    pub ii: SynapseClassParams,
}

impl Default for ConnectionClasses {
    fn default() -> Self {
        // Depression/facilitation constants follow the standard cortical
        // column recipe per connection class.
        let exc = |c: f64, w: f64| SynapseClassParams {
            connect_prob: c,
            weight_mean: w,
            tau_decay: 0.003,
            tau_rise: 0.0003,
            delay: 0.0015,
            use_fraction: 0.5,
            depression_tau: 1.1,
            facilitation_tau: 0.05,
        };
        let inh = |c: f64, w: f64| SynapseClassParams {
            connect_prob: c,
            weight_mean: w,
            tau_decay: 0.006,
            tau_rise: 0.0006,
            delay: 0.0008,
            use_fraction: 0.25,
            depression_tau: 0.7,
            facilitation_tau: 0.02,
        };
        ConnectionClasses {
            ee: exc(0.3, 0.010),
            ei: SynapseClassParams {
                delay: 0.0008,
                use_fraction: 0.05,
                depression_tau: 0.125,
                facilitation_tau: 1.2,
                ..exc(0.2, 0.012)
            },
            ie: inh(0.4, -0.016),
            ii: SynapseClassParams {
                use_fraction: 0.32,
                depression_tau: 0.144,
                facilitation_tau: 0.06,
                ..inh(0.1, -0.012)
            },
        }
    }
}

/// How external input channels project into the pool: each channel
/// contacts a random fraction of the neurons with positive weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputProjection {
    pub channels: usize,
    pub fraction: f64,
    pub weight_mean: f64,
}

impl Default for InputProjection {
    fn default() -> Self {
        InputProjection {
            channels: 1,
            fraction: 0.3,
            weight_mean: 0.018,
        }
    }
}

/// Full construction recipe for a liquid.
#[derive(Debug, Clone, PartialEq)]
pub struct LiquidConfig {
    pub num_neurons: usize,
    pub inhibitory_fraction: f64,
    /// Length scale of the distance-dependent connection profile.
    pub lambda: f64,
    pub lif: LifParams,
    /// Refractory period of inhibitory neurons.
    pub refractory_inhibitory: f64,
    /// Constant background drive (volt-equivalent steady state), kept
    /// below threshold so a silent liquid stays silent.
    pub background_drive: f64,
    pub classes: ConnectionClasses,
    pub input: InputProjection,
    pub seed: u64,
}

impl Default for LiquidConfig {
    fn default() -> Self {
        LiquidConfig {
            num_neurons: 140,
            inhibitory_fraction: 0.2,
            lambda: 2.0,
            lif: LifParams::default(),
            refractory_inhibitory: 0.002,
            background_drive: 0.0135,
            classes: ConnectionClasses::default(),
            input: InputProjection::default(),
            seed: 0,
        }
    }
}

impl LiquidConfig {
    fn validate(&self) -> Result<()> {
        if self.num_neurons == 0 {
            return Err(Error::invalid("liquid needs at least one neuron"));
        }
        if !(0.0..1.0).contains(&self.inhibitory_fraction) {
            return Err(Error::invalid("inhibitory fraction must lie in [0, 1)"));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::invalid("lambda must be positive"));
        }
        if self.input.channels == 0 {
            return Err(Error::invalid("at least one input channel required"));
        }
        if !(0.0..=1.0).contains(&self.input.fraction) {
            return Err(Error::invalid("input fraction must lie in [0, 1]"));
        }
        self.lif.validate()
    }
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    target: u32,
    weight: f64,
}

/// An immutable liquid: neuron placement, recurrent wiring and the input
/// projection. Simulation keeps all per-call state private, so one network
/// can run on several threads at once.
#[derive(Debug, Clone)]
pub struct LiquidNetwork {
    config: LiquidConfig,
    positions: Vec<[i32; 3]>,
    inhibitory: Vec<bool>,
    /// Outgoing recurrent edges per source neuron.
    edges: Vec<Vec<Edge>>,
    /// Input targets per channel.
    input_map: Vec<Vec<Edge>>,
}

/// Chooses a 3-D grid with exactly `n` sites and near-balanced edges.
fn grid_dims(n: usize) -> [usize; 3] {
    let mut best = [1, 1, n];
    let mut best_spread = usize::MAX;
    let mut a = 1;
    while a * a * a <= n {
        if n % a == 0 {
            let rest = n / a;
            let mut b = a;
            while b * b <= rest {
                if rest % b == 0 {
                    let c = rest / b;
                    let spread = c - a;
                    if spread < best_spread {
                        best_spread = spread;
                        best = [a, b, c];
                    }
                }
                b += 1;
            }
        }
        a += 1;
    }
    best
}

/// Builds a liquid from the recipe. Fully deterministic under the supplied
/// generator: the same configuration and generator state reproduce the
/// identical network.
pub fn build_liquid<R: Rng + ?Sized>(config: &LiquidConfig, rng: &mut R) -> Result<LiquidNetwork> {
    config.validate()?;
    let n = config.num_neurons;
    let dims = grid_dims(n);
    let mut positions = Vec::with_capacity(n);
    for x in 0..dims[0] {
        for y in 0..dims[1] {
            for z in 0..dims[2] {
                if positions.len() < n {
                    positions.push([x as i32, y as i32, z as i32]);
                }
            }
        }
    }

    let num_inhibitory = (n as f64 * config.inhibitory_fraction).round() as usize;
    let mut inhibitory = vec![false; n];
    for idx in index::sample(rng, n, num_inhibitory.min(n)) {
        inhibitory[idx] = true;
    }

    let lambda_sq = config.lambda * config.lambda;
    let mut edges: Vec<Vec<Edge>> = vec![Vec::new(); n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let class = class_params(&config.classes, inhibitory[a], inhibitory[b]);
            let d2 = dist_sq(positions[a], positions[b]);
            let p = class.connect_prob * (-d2 / lambda_sq).exp();
            if rng.gen::<f64>() < p {
                let weight = class.weight_mean * (0.5 + rng.gen::<f64>());
                edges[a].push(Edge {
                    target: b as u32,
                    weight,
                });
            }
        }
    }

    let targets_per_channel = ((config.input.fraction * n as f64).ceil() as usize).clamp(1, n);
    let mut input_map = Vec::with_capacity(config.input.channels);
    for _ in 0..config.input.channels {
        let chosen = index::sample(rng, n, targets_per_channel);
        let mut targets: Vec<usize> = chosen.into_iter().collect();
        targets.sort_unstable();
        let channel: Vec<Edge> = targets
            .into_iter()
            .map(|t| Edge {
                target: t as u32,
                weight: config.input.weight_mean * (0.5 + rng.gen::<f64>()),
            })
            .collect();
        input_map.push(channel);
    }

    Ok(LiquidNetwork {
        config: config.clone(),
        positions,
        inhibitory,
        edges,
        input_map,
    })
}

fn class_params(
    classes: &ConnectionClasses,
    src_inhibitory: bool,
    dst_inhibitory: bool,
) -> SynapseClassParams {
    match (src_inhibitory, dst_inhibitory) {
        (false, false) => classes.ee,
        (false, true) => classes.ei,
        (true, false) => classes.ie,
        (true, true) => classes.ii,
    }
}

fn dist_sq(a: [i32; 3], b: [i32; 3]) -> f64 {
    let dx = (a[0] - b[0]) as f64;
    let dy = (a[1] - b[1]) as f64;
    let dz = (a[2] - b[2]) as f64;
    dx * dx + dy * dy + dz * dz
}

/// Peak-normalization factor for a double-exponential difference kernel,
/// so that injecting `w * i0` into both states yields a peak current `w`.
fn peak_factor(tau_decay: f64, tau_rise: f64) -> f64 {
    let t_star = tau_decay * tau_rise / (tau_decay - tau_rise) * (tau_decay / tau_rise).ln();
    1.0 / ((-t_star / tau_decay).exp() - (-t_star / tau_rise).exp())
}

impl LiquidNetwork {
    pub fn num_neurons(&self) -> usize {
        self.config.num_neurons
    }

    pub fn config(&self) -> &LiquidConfig {
        &self.config
    }

    pub fn is_inhibitory(&self, neuron: usize) -> bool {
        self.inhibitory[neuron]
    }

    pub fn position(&self, neuron: usize) -> [i32; 3] {
        self.positions[neuron]
    }

    pub fn connection_count(&self) -> usize {
        self.edges.iter().map(|e| e.len()).sum()
    }

    pub fn input_targets(&self, channel: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.input_map[channel]
            .iter()
            .map(|e| (e.target as usize, e.weight))
    }

    /// A copy of this network with every inhibitory neuron's outgoing
    /// recurrent connections removed.
    pub fn excitatory_only(&self) -> LiquidNetwork {
        let mut copy = self.clone();
        for (src, list) in copy.edges.iter_mut().enumerate() {
            if copy.inhibitory[src] {
                list.clear();
            }
        }
        copy
    }

    /// Runs the pool on the given input spike trains and returns one spike
    /// train per neuron. Forward Euler at step `dt`; `dt` must not exceed
    /// a tenth of the membrane time constant.
    pub fn simulate(
        &self,
        inputs: &[SpikeTrain],
        duration: f64,
        dt: f64,
    ) -> Result<Vec<SpikeTrain>> {
        if !(dt > 0.0) {
            return Err(Error::invalid("dt must be positive"));
        }
        if dt > self.config.lif.membrane_tau / 10.0 {
            return Err(Error::invalid(format!(
                "dt {dt} too coarse for membrane tau {} (need dt <= tau/10)",
                self.config.lif.membrane_tau
            )));
        }
        if inputs.len() != self.input_map.len() {
            return Err(Error::invalid(format!(
                "{} input trains supplied, network expects {}",
                inputs.len(),
                self.input_map.len()
            )));
        }
        if inputs.iter().any(|t| t.duration() != duration) {
            return Err(Error::invalid("input trains must match the duration"));
        }

        let n = self.num_neurons();
        let lif = self.config.lif;
        let classes = &self.config.classes;
        let n_steps = (duration / dt).round() as usize;

        // Per-target-class kernels: targets of class X receive from-E
        // current through the (E,X) kernel and from-I current through the
        // (I,X) kernel. States are difference-of-exponential pairs.
        struct ChannelKernel {
            decay_mul: f64,
            rise_mul: f64,
            inject: f64, // peak-normalization factor
        }
        let kernel_for = |p: &SynapseClassParams| ChannelKernel {
            decay_mul: (-dt / p.tau_decay).exp(),
            rise_mul: (-dt / p.tau_rise).exp(),
            inject: peak_factor(p.tau_decay, p.tau_rise),
        };
        // indexed by [target_inhibitory][source_inhibitory]
        let kernels = [
            [kernel_for(&classes.ee), kernel_for(&classes.ie)],
            [kernel_for(&classes.ei), kernel_for(&classes.ii)],
        ];
        let delay_steps = |p: &SynapseClassParams| ((p.delay / dt).round() as usize).max(1);
        let delays = [
            [delay_steps(&classes.ee), delay_steps(&classes.ie)],
            [delay_steps(&classes.ei), delay_steps(&classes.ii)],
        ];
        let max_delay = 1 + delays.iter().flatten().copied().max().unwrap();

        // Ring buffer of pending deliveries: (target, amount, from_inhibitory).
        let mut pending: Vec<Vec<(u32, f64, bool)>> = vec![Vec::new(); max_delay];

        // Short-term plasticity state per recurrent edge: release fraction,
        // available resources, and the step of the previous release.
        let mut syn_u: Vec<Vec<f64>> = self.edges.iter().map(|l| vec![0.0; l.len()]).collect();
        let mut syn_r: Vec<Vec<f64>> = self.edges.iter().map(|l| vec![1.0; l.len()]).collect();
        let mut syn_last: Vec<Vec<usize>> = self.edges.iter().map(|l| vec![usize::MAX; l.len()]).collect();

        // Input spikes become deliveries at the step after their timestamp.
        let mut input_events: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_steps + 1];
        for (channel, train) in inputs.iter().enumerate() {
            for &t in train.times() {
                let step = ((t / dt).floor() as usize + 1).min(n_steps);
                for e in &self.input_map[channel] {
                    input_events[step].push((e.target, e.weight));
                }
            }
        }

        let mut v = vec![lif.resting; n];
        let mut state_d_e = vec![0.0; n];
        let mut state_r_e = vec![0.0; n];
        let mut state_d_i = vec![0.0; n];
        let mut state_r_i = vec![0.0; n];
        let mut refractory_until = vec![0usize; n];
        let mut spikes: Vec<Vec<f64>> = vec![Vec::new(); n];

        for step in 1..=n_steps {
            // Advance membranes using the currents valid over the last step.
            for j in 0..n {
                if refractory_until[j] > step {
                    v[j] = lif.reset;
                    continue;
                }
                let current = (state_d_e[j] - state_r_e[j]) + (state_d_i[j] - state_r_i[j]);
                let drive = self.config.background_drive + lif.input_resistance * current;
                v[j] += dt * (-(v[j] - lif.resting) + drive) / lif.membrane_tau;
            }

            // Update synaptic filter states to the current instant.
            for j in 0..n {
                let ke = &kernels[self.inhibitory[j] as usize][0];
                let ki = &kernels[self.inhibitory[j] as usize][1];
                state_d_e[j] *= ke.decay_mul;
                state_r_e[j] *= ke.rise_mul;
                state_d_i[j] *= ki.decay_mul;
                state_r_i[j] *= ki.rise_mul;
            }
            let slot = step % max_delay;
            for &(target, amount, from_inhibitory) in &pending[slot] {
                let t = target as usize;
                let k = &kernels[self.inhibitory[t] as usize][from_inhibitory as usize];
                let inj = amount * k.inject;
                if from_inhibitory {
                    state_d_i[t] += inj;
                    state_r_i[t] += inj;
                } else {
                    state_d_e[t] += inj;
                    state_r_e[t] += inj;
                }
            }
            pending[slot].clear();
            for &(target, weight) in &input_events[step] {
                let t = target as usize;
                let k = &kernels[self.inhibitory[t] as usize][0];
                let inj = weight * k.inject;
                state_d_e[t] += inj;
                state_r_e[t] += inj;
            }

            // Threshold crossings fire at this instant; the final boundary
            // instant belongs to the next window and is not recorded.
            if step < n_steps {
                let t_now = step as f64 * dt;
                for j in 0..n {
                    if refractory_until[j] > step || v[j] < lif.threshold {
                        continue;
                    }
                    spikes[j].push(t_now);
                    v[j] = lif.reset;
                    let refrac = if self.inhibitory[j] {
                        self.config.refractory_inhibitory
                    } else {
                        lif.refractory
                    };
                    refractory_until[j] = step + ((refrac / dt).round() as usize).max(1);
                    let src_inhib = self.inhibitory[j];
                    for (idx, e) in self.edges[j].iter().enumerate() {
                        let class = class_params(
                            &self.config.classes,
                            src_inhib,
                            self.inhibitory[e.target as usize],
                        );
                        // Markram-Tsodyks release: facilitation raises the
                        // release fraction toward 1, depression depletes
                        // the resource pool; the weight is scaled so an
                        // isolated spike delivers exactly `e.weight`.
                        let eff = if class.use_fraction >= 1.0 {
                            e.weight
                        } else {
                            let (u, r) = if syn_last[j][idx] == usize::MAX {
                                (class.use_fraction, 1.0)
                            } else {
                                let dt_e = (step - syn_last[j][idx]) as f64 * dt;
                                let u_prev = syn_u[j][idx];
                                let r_prev = syn_r[j][idx];
                                let u = class.use_fraction
                                    + u_prev * (1.0 - class.use_fraction)
                                        * (-dt_e / class.facilitation_tau).exp();
                                let r = 1.0
                                    + (r_prev - u_prev * r_prev - 1.0)
                                        * (-dt_e / class.depression_tau).exp();
                                (u, r)
                            };
                            syn_u[j][idx] = u;
                            syn_r[j][idx] = r;
                            syn_last[j][idx] = step;
                            e.weight * u * r / class.use_fraction
                        };
                        let d = delays[self.inhibitory[e.target as usize] as usize]
                            [src_inhib as usize];
                        let arrival = step + d;
                        if arrival <= n_steps {
                            pending[arrival % max_delay].push((e.target, eff, src_inhib));
                        }
                    }
                }
            }
        }

        spikes
            .into_iter()
            .map(|times| SpikeTrain::new(times, duration))
            .collect()
    }
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
    fn grid_for_140_is_balanced() {
        let dims = grid_dims(140);
        assert_eq!(dims[0] * dims[1] * dims[2], 140);
        let mut sorted = dims;
        sorted.sort_unstable();
        assert_eq!(sorted, [4, 5, 7]);
    }

    #[test]
    fn tiny_lambda_kills_recurrence() {
        let config = LiquidConfig {
            num_neurons: 30,
            lambda: 1e-9,
            ..LiquidConfig::default()
        };
        let net = build_liquid(&config, &mut rng(1)).unwrap();
        assert_eq!(net.connection_count(), 0);
    }

    #[test]
    fn unit_prob_infinite_lambda_fully_connects() {
        let mut config = LiquidConfig {
            num_neurons: 12,
            lambda: f64::INFINITY,
            ..LiquidConfig::default()
        };
        config.classes.ee.connect_prob = 1.0;
        config.classes.ei.connect_prob = 1.0;
        config.classes.ie.connect_prob = 1.0;
        config.classes.ii.connect_prob = 1.0;
        // lambda is validated as > 0; infinity passes and removes the
        // distance penalty entirely.
        let net = build_liquid(&config, &mut rng(2)).unwrap();
        assert_eq!(net.connection_count(), 12 * 11);
    }

    #[test]
    fn build_is_deterministic() {
        let config = LiquidConfig::default();
        let a = build_liquid(&config, &mut rng(7)).unwrap();
        let b = build_liquid(&config, &mut rng(7)).unwrap();
        assert_eq!(a.connection_count(), b.connection_count());
        for j in 0..a.num_neurons() {
            assert_eq!(a.inhibitory[j], b.inhibitory[j]);
            assert_eq!(a.edges[j].len(), b.edges[j].len());
            for (ea, eb) in a.edges[j].iter().zip(&b.edges[j]) {
                assert_eq!(ea.target, eb.target);
                assert_eq!(ea.weight, eb.weight);
            }
        }
    }

    #[test]
    fn sign_convention_respected() {
        let net = build_liquid(&LiquidConfig::default(), &mut rng(3)).unwrap();
        for (src, list) in net.edges.iter().enumerate() {
            for e in list {
                if net.inhibitory[src] {
                    assert!(e.weight <= 0.0);
                } else {
                    assert!(e.weight >= 0.0);
                }
            }
        }
    }

    #[test]
    fn silent_network_stays_silent() {
        // no input, no background: resting membranes never cross threshold
        let config = LiquidConfig {
            num_neurons: 20,
            background_drive: 0.0,
            ..LiquidConfig::default()
        };
        let net = build_liquid(&config, &mut rng(4)).unwrap();
        let silent = SpikeTrain::empty(0.3);
        let out = net.simulate(&[silent], 0.3, 2e-4).unwrap();
        assert!(out.iter().all(|t| t.is_empty()));
    }

    #[test]
    fn default_background_alone_is_subthreshold() {
        let config = LiquidConfig {
            num_neurons: 20,
            ..LiquidConfig::default()
        };
        let net = build_liquid(&config, &mut rng(4)).unwrap();
        let out = net.simulate(&[SpikeTrain::empty(0.3)], 0.3, 2e-4).unwrap();
        assert!(out.iter().all(|t| t.is_empty()));
    }

    #[test]
    fn strong_single_input_spike_fires_once() {
        // An isolated neuron driven by one overwhelming input spike fires
        // exactly once within a membrane time constant. The refractory
        // hold outlasts the synaptic pulse, so no rebound spike follows.
        let mut config = LiquidConfig {
            num_neurons: 4,
            inhibitory_fraction: 0.0,
            lambda: 1e-9, // no recurrence
            background_drive: 0.0,
            ..LiquidConfig::default()
        };
        config.lif.refractory = 0.012;
        config.input.fraction = 1.0;
        config.input.weight_mean = 0.3; // far above anything threshold-like
        let net = build_liquid(&config, &mut rng(5)).unwrap();
        let spike_at = 0.05;
        let train = SpikeTrain::new(vec![spike_at], 0.3).unwrap();
        let out = net.simulate(&[train], 0.3, 2e-4).unwrap();
        for t in &out {
            assert_eq!(t.len(), 1, "expected exactly one spike, got {:?}", t.times());
            let ts = t.times()[0];
            assert!(ts > spike_at && ts <= spike_at + config.lif.membrane_tau);
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let config = LiquidConfig {
            num_neurons: 30,
            ..LiquidConfig::default()
        };
        let net = build_liquid(&config, &mut rng(6)).unwrap();
        let input = crate::spike::poisson_train(20.0, 0.3, &mut rng(60)).unwrap();
        let a = net.simulate(std::slice::from_ref(&input), 0.3, 2e-4).unwrap();
        let b = net.simulate(std::slice::from_ref(&input), 0.3, 2e-4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn refractory_interval_enforced() {
        let config = LiquidConfig {
            num_neurons: 30,
            ..LiquidConfig::default()
        };
        let net = build_liquid(&config, &mut rng(8)).unwrap();
        let input = crate::spike::poisson_train(80.0, 0.4, &mut rng(80)).unwrap();
        let out = net.simulate(std::slice::from_ref(&input), 0.4, 2e-4).unwrap();
        for (j, t) in out.iter().enumerate() {
            let refrac = if net.is_inhibitory(j) {
                config.refractory_inhibitory
            } else {
                config.lif.refractory
            };
            for w in t.times().windows(2) {
                assert!(
                    w[1] - w[0] >= refrac - 1e-12,
                    "neuron {j} violated refractory: {} then {}",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn removing_inhibition_never_reduces_firing() {
        // Per-neuron monotonicity is provable when excitatory recurrence
        // is absent: dropping inhibitory outputs leaves every neuron's
        // remaining drive pointwise greater or equal.
        let mut config = LiquidConfig {
            num_neurons: 40,
            ..LiquidConfig::default()
        };
        config.classes.ee.connect_prob = 0.0;
        config.classes.ei.connect_prob = 0.0;
        let net = build_liquid(&config, &mut rng(9)).unwrap();
        let exc = net.excitatory_only();
        for seed in 0..3 {
            let input = crate::spike::poisson_train(40.0, 0.3, &mut rng(900 + seed)).unwrap();
            let with = net.simulate(std::slice::from_ref(&input), 0.3, 2e-4).unwrap();
            let without = exc.simulate(std::slice::from_ref(&input), 0.3, 2e-4).unwrap();
            for j in 0..net.num_neurons() {
                assert!(
                    without[j].len() >= with[j].len(),
                    "neuron {j}: {} spikes without inhibition vs {} with",
                    without[j].len(),
                    with[j].len()
                );
            }
        }
    }

    #[test]
    fn removing_inhibition_raises_population_activity() {
        // Under full recurrence, spike-time shifts make the per-neuron
        // count non-monotone in corner cases, but the population total
        // rises clearly.
        let config = LiquidConfig {
            num_neurons: 40,
            ..LiquidConfig::default()
        };
        let net = build_liquid(&config, &mut rng(9)).unwrap();
        let exc = net.excitatory_only();
        for seed in 0..3 {
            let input = crate::spike::poisson_train(40.0, 0.3, &mut rng(900 + seed)).unwrap();
            let with = net.simulate(std::slice::from_ref(&input), 0.3, 2e-4).unwrap();
            let without = exc.simulate(std::slice::from_ref(&input), 0.3, 2e-4).unwrap();
            let total_with: usize = with.iter().map(|t| t.len()).sum();
            let total_without: usize = without.iter().map(|t| t.len()).sum();
            assert!(
                total_without >= total_with,
                "population: {total_without} without inhibition vs {total_with} with"
            );
        }
    }

    #[test]
    fn coarse_dt_rejected() {
        let net = build_liquid(
            &LiquidConfig {
                num_neurons: 5,
                ..LiquidConfig::default()
            },
            &mut rng(10),
        )
        .unwrap();
        let err = net.simulate(&[SpikeTrain::empty(0.1)], 0.1, 0.02);
        assert!(err.is_err());
    }

    #[test]
    fn input_channel_count_checked() {
        let net = build_liquid(
            &LiquidConfig {
                num_neurons: 5,
                ..LiquidConfig::default()
            },
            &mut rng(11),
        )
        .unwrap();
        let trains = vec![SpikeTrain::empty(0.1), SpikeTrain::empty(0.1)];
        assert!(net.simulate(&trains, 0.1, 2e-4).is_err());
    }
}
