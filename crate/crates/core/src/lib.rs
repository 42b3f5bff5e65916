//! Quantum-trajectory simulation of how repeated f:2f detections pull a
//! definite optical phase out of a laser cavity that starts in a number state.
//!
//! The state of the cavity mode is a [`FockVector`]. Each click of the
//! interferometer applies a [`JumpOperator`]; [`meas`] samples the clicks and
//! [`expt`] strings pulses into configured runs.

pub mod comb;
pub mod error;
pub mod expt;
pub mod fock;
pub mod gamma;
pub mod meas;
pub mod stats;

pub use comb::{CombLine, CombMode};
pub use error::{Error, Result};
pub use expt::{ExperimentConfig, OutputFormat};
pub use fock::{fidelity, BranchWeights, Detector, FockVector, JumpOperator};
pub use gamma::{appendix_expansion, exact_post_state, gamma_state, Expansion, GammaSpec};
pub use meas::{
    BalanceRef, CountModel, FieldTrace, InterferometerParams, PulseRecord, StateSummary, TrajectoryRecord,
};

/// Crate version written into every output row.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
