//! Frequency-comb laser mode and electric-field expectation values.
//!
//! Time is measured in units of `1/f_rep` and field values in units of
//! `field_scale`; the physical prefactor `√(h/2ε₀V)` is folded into the
//! latter. Each comb line `j` sits at `f_j = j·f_rep + δ` and contributes
//! `√(f_j/f₀)·γ_j` to the mode function, with `f₀ = j₀·f_rep`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::gamma::GammaSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombLine {
    pub j: u32,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombMode {
    pub f_rep: f64,
    pub delta: f64,
    pub center: u32,
    pub lines: Vec<CombLine>,
    pub field_scale: f64,
}

impl CombMode {
    /// Gaussian envelope `γ_j ∝ exp[−(j−j₀)²/(2·width²)]` over `n_lines`
    /// consecutive lines centred on `j₀`, normalized to `Σγ_j² = 1`.
    pub fn gaussian(center: u32, width: f64, n_lines: u32, delta: f64) -> Result<Self> {
        if n_lines == 0 {
            return Err(Error::InvalidParameter("comb needs at least one line".into()));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!("comb width must be positive, got {width}")));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!(
                "offset frequency must lie in [0, 1) f_rep, got {delta}"
            )));
        }
        let half = n_lines / 2;
        if center < half + 1 {
            return Err(Error::InvalidParameter(format!(
                "comb centred at line {center} with {n_lines} lines reaches nonpositive frequencies"
            )));
        }
        let first = center - half;
        let mut lines: Vec<CombLine> = (first..first + n_lines)
            .map(|j| {
                let d = j as f64 - center as f64;
                CombLine {
                    j,
                    gamma: (-d * d / (2.0 * width * width)).exp(),
                }
            })
            .collect();
        let norm = lines.iter().map(|l| l.gamma * l.gamma).sum::<f64>().sqrt();
        for l in &mut lines {
            l.gamma /= norm;
        }
        Ok(CombMode {
            f_rep: 1.0,
            delta,
            center,
            lines,
            field_scale: 1.0,
        })
    }

    pub fn with_field_scale(mut self, field_scale: f64) -> Self {
        self.field_scale = field_scale;
        self
    }

    pub fn frequency(&self, j: u32) -> f64 {
        j as f64 * self.f_rep + self.delta
    }

    pub fn reference_frequency(&self) -> f64 {
        self.center as f64 * self.f_rep
    }

    /// Time of the `pulse`-th pulse (1-based): `(N−1)/f_rep`.
    pub fn pulse_time(&self, pulse: u64) -> f64 {
        pulse.saturating_sub(1) as f64 / self.f_rep
    }

    /// Carrier-envelope phase slip per pulse, `2πδ/f_rep`.
    pub fn phase_slip(&self) -> f64 {
        2.0 * PI * self.delta / self.f_rep
    }

    /// Per-line amplitude `field_scale·√(f_j/f₀)·γ_j`.
    fn line_weights(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let f0 = self.reference_frequency();
        self.lines.iter().map(move |l| {
            let f = self.frequency(l.j);
            (f, self.field_scale * (f / f0).sqrt() * l.gamma)
        })
    }

    /// `v_c(t) = field_scale·Σ_j √(f_j/f₀)·γ_j·e^{−i2πf_j t}`.
    pub fn mode_function(&self, t: f64) -> Complex64 {
        self.line_weights()
            .map(|(f, w)| Complex64::from_polar(w, -2.0 * PI * f * t))
            .sum()
    }

    /// `Σ_j field_scale·√(f_j/f₀)·γ_j·cos(2πf_j t + Φ)`.
    fn carrier(&self, t: f64, phase: f64) -> f64 {
        self.line_weights()
            .map(|(f, w)| w * (2.0 * PI * f * t + phase).cos())
            .sum()
    }

    /// Validates the structural invariants of a comb read from disk.
    pub fn validate(&self) -> Result<()> {
        if !(self.f_rep > 0.0) {
            return Err(Error::InvalidParameter("f_rep must be positive".into()));
        }
        if self.lines.is_empty() {
            return Err(Error::InvalidParameter("comb has no lines".into()));
        }
        let s: f64 = self.lines.iter().map(|l| l.gamma * l.gamma).sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("comb weights sum to {s}, not 1")));
        }
        if self.lines.iter().any(|l| self.frequency(l.j) <= 0.0) {
            return Err(Error::InvalidParameter("comb line with nonpositive frequency".into()));
        }
        Ok(())
    }
}

/// `⟨E(t)⟩ = 2·Re[v_c(t)·⟨b⟩]`, exact for any single-mode state.
pub fn field_expectation(state: &FockVector, comb: &CombMode, t: f64) -> f64 {
    2.0 * (comb.mode_function(t) * state.expect_b()).re
}

/// Field of a coherent state `|α⟩`: `2·Re[v_c(t)·α]`.
pub fn coherent_field(alpha: Complex64, comb: &CombMode, t: f64) -> f64 {
    2.0 * (comb.mode_function(t) * alpha).re
}

/// Closed-form field of the Gaussian-weighted state `Γ(m, n, Φ)`:
/// `Σ_k B(n,k−1)·B(n,k)·Σ_j 2·√(f_j/f₀)·√(m−n−k)·γ_j·cos(2πf_j t + Φ)`.
pub fn gamma_field_closed_form(m: u64, n: u64, phase: f64, comb: &CombMode, t: f64) -> Result<f64> {
    let spec = GammaSpec::new(m, n, phase)?;
    Ok(2.0 * gamma_field_amplitude(&spec) * comb.carrier(t, phase))
}

/// The `Σ_k B(n,k−1)·B(n,k)·√(m−n−k)` factor of the closed-form field.
pub fn gamma_field_amplitude(spec: &GammaSpec) -> f64 {
    let (k_min, weights) = spec.weights();
    let photons = (spec.m - spec.n) as f64;
    weights
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, b)| {
            let k = (k_min + i as u64) as f64;
            weights[i - 1] * b * (photons - k).sqrt()
        })
        .sum()
}

/// Uniform grid over one pulse window `[t_c − 1/(2f_rep), t_c + 1/(2f_rep))`.
pub fn pulse_grid(comb: &CombMode, center: f64, points: usize) -> Vec<f64> {
    let period = 1.0 / comb.f_rep;
    (0..points)
        .map(|i| center - 0.5 * period + period * i as f64 / points as f64)
        .collect()
}

/// `‖a − b‖₂ / ‖b‖₂` over matching samples.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}
