//! Experiment harness: benchmark task generation, full experiment runs,
//! parameter sweeps, convergence markers and the robustness protocol.

pub mod config;
pub mod markers;
pub mod robustness;
pub mod run;
pub mod sweep;
pub mod task;

pub use config::{DerConfig, ExperimentConfig, PprConfig, PprSquashKind, Task};
pub use markers::{convergence_markers, Markers};
pub use robustness::{run_robustness, RobustnessRow, VariationMode};
pub use run::{
    append_records, mean_test_mae, mean_train_mae, read_records, run_experiment, ReadoutKind,
    RunOutput, RunRecord,
};
pub use sweep::{sweep_dendrites, sweep_ppr_n, sweep_xsat, DendriteSweepMode, SweepRow};
pub use task::{generate_task1, generate_task2, Task1Dataset, Task2Dataset, TaskOneParams, TaskTwoParams};
