//! Configured experiments: calibration, field emergence and the oracle suite.

pub mod config;
pub mod fit;
pub mod output;
pub mod pipeline;

pub use config::{
    CalibrationConfig, CombConfig, ExperimentConfig, ForcedCounts, InterferometerConfig, LaserConfig, LaserInput,
    OutputConfig, OutputFormat, RunConfig,
};
pub use fit::{fit_fringe, CosineFit, FringeSample};
pub use output::{output_dir, read_pulses, write_run, write_summary, PulseRow, TraceRow, OUTPUT_ROOT_ENV};
pub use pipeline::{
    calibrate_records, calibration_scan, field_emergence_report, fit_trajectory, oracle_suite, run_ensemble,
    summarize_emergence, visibility_sweep, CalibrationReport, EmergenceSummary, EnsembleTrace, OracleCase,
    TrajectoryFit, VisibilityPoint,
};
