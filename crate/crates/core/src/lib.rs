//! Discrete-time quantum walks on a line with random phase disorder.
//!
//! The crate simulates a two-component walker under the step `S · C(θ) · D`,
//! averages its centroid over disorder realizations and extracts the
//! observables of the quantum boomerang effect: the maximum mean
//! displacement, the late-time plateau and power-law scalings of the maximum
//! with the coin angle and the disorder width.

pub mod analysis;
pub mod config;
pub mod disorder;
pub mod ensemble;
pub mod error;
pub mod evolve;
pub mod experiment;
pub mod output;
pub mod walk;

pub use analysis::{
    extract_x_max, fit_power_law, log_spaced, plateau_level, sweep_disorder, sweep_disorder_with,
    sweep_theta, sweep_theta_with, Direction, MaxDisplacement, Plateau, PowerLawFit, SweepOptions,
    SweepParameter, SweepRow, SweepTable,
};
pub use config::{parse_config, ExperimentSpec, OutputFormat, Overrides, Preset};
pub use disorder::{sample_field, DisorderField, DisorderMode, RandomStream};
pub use ensemble::{
    centroid, component_centroid, run_ensemble, run_ensemble_oriented, run_realization,
    run_realization_oriented, CentroidSeries, FieldOrientation, SimConfig,
};
pub use error::{Error, Result};
pub use evolve::{Evolver, SublatticePhases};
pub use experiment::{fit_csv, run_experiment};
pub use output::{
    read_csv, read_series_csv, write_series_csv, write_summary_json, write_sweep_csv, CsvTable,
    FitRecord, RunManifest, SeriesRecord,
};
pub use walk::{
    apply_coin, apply_phase, apply_shift, initial_state, lattice_size, phase_factor, probabilities,
    step, CoinAngle, InitialStateAngles, WalkState,
};
