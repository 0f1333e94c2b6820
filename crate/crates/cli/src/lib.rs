//! Library side of the `tfphase` command: experiment presets, configuration,
//! output formats and the run/sweep/coeffs/verify commands.

pub mod commands;
pub mod config;
pub mod experiment;
pub mod output;
pub mod presets;

pub use config::{ResolvedRun, RunOptions};
pub use experiment::{monotonicity, run_experiment, run_sweep, Monotonicity, RunSummary};
pub use presets::Preset;
