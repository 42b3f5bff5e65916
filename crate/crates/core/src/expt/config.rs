//! Experiment configuration, read from TOML.
//!
//! Every section and field has a default, so a config file only needs to
//! name what it changes. Unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::comb::CombMode;
use crate::error::{Error, Result};
use crate::meas::{BalanceRef, CountModel, InterferometerParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CombConfig {
    /// Index `j₀` of the central line; also fixes `f₀ = j₀·f_rep`.
    pub center: u32,
    /// Envelope width in comb lines.
    pub width: f64,
    pub lines: u32,
    /// Offset frequency in units of `f_rep`, in `[0, 1)`.
    pub delta: f64,
    pub field_scale: f64,
}

impl Default for CombConfig {
    fn default() -> Self {
        CombConfig {
            center: 40,
            width: 6.0,
            lines: 49,
            delta: 0.25,
            field_scale: 1.0,
        }
    }
}

impl CombConfig {
    pub fn build(&self) -> Result<CombMode> {
        let comb = CombMode::gaussian(self.center, self.width, self.lines, self.delta)
            .map_err(|e| Error::Config(e.to_string()))?;
        if !(self.field_scale > 0.0 && self.field_scale.is_finite()) {
            return Err(Error::Config("field_scale must be positive".into()));
        }
        Ok(comb.with_field_scale(self.field_scale))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterferometerConfig {
    pub balance: BalanceRef,
    /// Multiplies the balanced `ξ₁`; 1 is a balanced interferometer.
    pub detune: f64,
    pub xi2: f64,
    /// Arm phase at pulse 1, radians.
    pub phi: f64,
    /// Phase added per pulse once the ramp is active.
    pub phi_step: f64,
    /// First pulse that gets `phi_step` added.
    pub phi_step_from: u64,
    /// Draw the starting arm phase uniformly per trajectory instead of using `phi`.
    pub phi_random: bool,
    pub n_min: u64,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        InterferometerConfig {
            balance: BalanceRef::MeanN,
            detune: 1.0,
            xi2: 1.0,
            phi: 0.0,
            phi_step: 0.0,
            phi_step_from: 1,
            phi_random: false,
            n_min: 0,
        }
    }
}

impl InterferometerConfig {
    /// `φ_N = φ₀ + phi_step·(N − phi_step_from + 1)` once the ramp has
    /// started, `φ₀` before.
    pub fn phi_at(&self, phi0: f64, pulse: u64) -> f64 {
        if self.phi_step == 0.0 || pulse < self.phi_step_from {
            return phi0;
        }
        phi0 + self.phi_step * (pulse - self.phi_step_from + 1) as f64
    }

    /// Jump coefficients for a trajectory starting in `|m⟩` from a laser of
    /// mean photon number `mean_n`.
    pub fn params(&self, m: u64, mean_n: f64, phi0: f64) -> Result<InterferometerParams> {
        let reference = match self.balance {
            BalanceRef::ExactN => m as f64,
            BalanceRef::MeanN => mean_n,
        };
        let mut p = InterferometerParams::new(
            self.detune * reference.max(1.0).sqrt() * self.xi2,
            self.xi2,
            phi0,
            self.n_min,
        )?;
        p.balance_ref = self.balance;
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LaserInput {
    /// Start every trajectory in `|round(mean_n)⟩`.
    #[default]
    FixedM,
    /// Draw `m` from a Poisson distribution of mean `mean_n`.
    Poissonian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaserConfig {
    pub input: LaserInput,
    pub mean_n: f64,
}

impl Default for LaserConfig {
    fn default() -> Self {
        LaserConfig {
            input: LaserInput::FixedM,
            mean_n: 10_000.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcedCounts {
    pub n1: u64,
    pub n2: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pulses: u64,
    pub trajectories: u64,
    pub seed: u64,
    /// Pulses after which `⟨E(t)⟩` is sampled; 0 is the initial state.
    pub trace_pulses: Vec<u64>,
    pub trace_points: usize,
    /// Best-Γ-branch fidelity is tracked for pulses up to this index.
    pub branch_fidelity_pulses: u64,
    /// Replaces the sampled counts of pulse 1.
    pub forced_first_pulse: Option<ForcedCounts>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pulses: 20,
            trajectories: 1,
            seed: 0,
            trace_pulses: vec![0, 20],
            trace_points: 256,
            branch_fidelity_pulses: 10,
            forced_first_pulse: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    /// Pulses dropped from the start of the fringe before fitting.
    pub discard: u64,
    /// Coarse grid size over `δ̂ ∈ [0, 1)`.
    pub grid_points: usize,
    pub min_visibility: f64,
    /// Keep only pulses with `(N − 1) mod select_every = 0`.
    pub select_every: u64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            discard: 10,
            grid_points: 1024,
            min_visibility: 0.05,
            select_every: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
    pub format: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub comb: CombConfig,
    pub interferometer: InterferometerConfig,
    pub laser: LaserConfig,
    pub counts: CountModel,
    pub run: RunConfig,
    pub calibration: CalibrationConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        self.comb.build()?;
        let i = &self.interferometer;
        if !(i.detune > 0.0 && i.detune.is_finite()) {
            return cfg(format!("detune must be positive, got {}", i.detune));
        }
        if !(i.xi2 > 0.0 && i.xi2.is_finite()) {
            return cfg(format!("xi2 must be positive, got {}", i.xi2));
        }
        if !i.phi.is_finite() || !i.phi_step.is_finite() {
            return cfg("arm phase and phase step must be finite".into());
        }
        if i.phi_step_from == 0 {
            return cfg("phi_step_from counts pulses from 1".into());
        }
        if !(self.laser.mean_n >= 1.0 && self.laser.mean_n.is_finite()) {
            return cfg(format!("laser mean_n must be at least 1, got {}", self.laser.mean_n));
        }
        self.counts.validate()?;
        if self.run.trajectories == 0 {
            return cfg("at least one trajectory is required".into());
        }
        if self.run.trace_points == 0 {
            return cfg("trace_points must be positive".into());
        }
        if self.calibration.grid_points < 2 {
            return cfg("calibration grid needs at least two points".into());
        }
        if !(self.calibration.min_visibility >= 0.0) {
            return cfg("min_visibility must be nonnegative".into());
        }
        if self.calibration.select_every == 0 {
            return cfg("select_every must be positive".into());
        }
        Ok(())
    }

    /// First 16 hex digits of SHA-256 over the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// The default configuration with `phi_step` turned on for the second
    /// half of the pulse train, which makes `δ` and `1 − δ` distinguishable.
    pub fn calibration_default() -> Self {
        let mut c = ExperimentConfig::default();
        c.laser.mean_n = 1.0e6;
        c.counts = CountModel::Poisson { mu: 200.0 };
        c.run.pulses = 256;
        c.run.trace_pulses = vec![];
        c.run.branch_fidelity_pulses = 0;
        c.interferometer.phi_step = PI / 2.0;
        c.interferometer.phi_step_from = 129;
        c
    }
}
