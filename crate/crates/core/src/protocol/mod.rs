//! End-to-end experiment: configuration, erasure, sweeps, and readout.

mod config;
mod run;
mod table;

pub use config::{ExperimentConfig, Imperfections, ReadoutModel, KEYS};
pub use run::{
    erasure_row, find_entropy_zero_crossings, run_erasure, simulated_readout_run,
    sweep_temperature, sweep_theta, Crossings, ErasureRun, ReadoutRun, ReadoutSide, SweepRow,
    CROSSING_TOL,
};
pub use table::{
    provenance, read_sweep_table, structured, write_sweep_table, SWEEP_HEADER, TOOL, VERSION,
};
