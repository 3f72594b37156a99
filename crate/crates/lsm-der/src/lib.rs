//! Desk-scale simulation and training library for liquid state machines
//! with a dendritically enhanced readout.
//!
//! The pipeline has three stages. Input spike trains drive a fixed
//! recurrent pool of leaky integrate-and-fire neurons ([`liquid`]); the
//! pool's spike trains are low-pass filtered with a post-synaptic current
//! kernel and sampled into analog state vectors ([`spike`]); a trained
//! readout maps each state vector to the task output. Two readouts are
//! provided:
//!
//! * [`dendrite`] — two opponent cells with `m` dendritic branches of `k`
//!   binary synapses each and a saturating square branch nonlinearity,
//!   trained by structural rewiring ([`rewiring`]) that searches over
//!   which afferent occupies each synapse slot;
//! * [`perceptron`] — the classical parallel-perceptron bank trained by
//!   the margin-stabilized p-delta rule, used as the baseline.
//!
//! Supporting modules: [`capacity`] counts the distinct wirings of a
//! dendritic cell exactly (arbitrary-precision binomials) to guide the
//! branch-count choice; [`mismatch`] injects measured hardware variation
//! statistics at evaluation time to compare readout robustness; and
//! [`harness`] generates the two benchmark tasks (jittered spike-train
//! classification and windowed sum-of-rates retrieval), runs complete
//! experiments, and persists plot-ready results.
//!
//! Every randomized operation takes an explicit seeded generator and is
//! deterministic given it; see the `examples/` directory for runnable
//! walkthroughs of each capability.

pub mod capacity;
pub mod dataset;
pub mod dendrite;
pub mod error;
pub mod harness;
pub mod liquid;
pub mod mismatch;
pub mod perceptron;
pub mod rewiring;
pub mod spike;

pub use dataset::SampleSet;
pub use dendrite::{DendriticCell, NonlinearityParams, ReadoutPair, Squash};
pub use error::{Error, Result};
pub use liquid::{build_liquid, LiquidConfig, LiquidNetwork};
pub use perceptron::{BankSquash, PDeltaParams, PerceptronBank};
pub use rewiring::{train, FitnessKind, TrainerConfig, TrainingTrace};
pub use spike::{KernelParams, RateSignal, SpikeTrain, StateMatrix};
