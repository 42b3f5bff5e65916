//! Single-mode states in a truncated photon-number window.
//!
//! A [`FockVector`] stores a contiguous run of amplitudes starting at photon
//! number `offset`. Every constructor trims negligible amplitudes at both
//! edges, so a state built from `|m⟩` by `n` detections occupies a window a
//! few standard deviations wide rather than `m + 1` entries.
//!
//! Phase convention: the closed-form states place `e^{+ikΦ}` on
//! `|m−n−k⟩`, which makes `arg⟨b⟩ = −Φ`. Every routine that reads a phase
//! back out of a state uses that sign.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Edge amplitudes smaller than this fraction of the largest magnitude are
/// dropped after every operation.
pub const TRIM_CUTOFF: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    offset: u64,
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    /// The zero vector: offset 0 and a single vanishing amplitude.
    pub fn zero() -> Self {
        FockVector {
            offset: 0,
            amplitudes: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn number_state(m: u64) -> Self {
        FockVector {
            offset: m,
            amplitudes: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Builds a vector from raw amplitudes, trimming negligible edges.
    /// An empty or all-zero input yields [`FockVector::zero`].
    pub fn from_amplitudes(offset: u64, amplitudes: Vec<Complex64>) -> Self {
        let mut v = FockVector { offset, amplitudes };
        v.trim();
        v
    }

    fn trim(&mut self) {
        let max = self
            .amplitudes
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
        if max == 0.0 || !max.is_finite() {
            if max == 0.0 {
                *self = FockVector::zero();
            }
            return;
        }
        let cut = TRIM_CUTOFF * max;
        let first = self
            .amplitudes
            .iter()
            .position(|c| c.norm() >= cut)
            .unwrap_or(0);
        let last = self
            .amplitudes
            .iter()
            .rposition(|c| c.norm() >= cut)
            .unwrap_or(0);
        if first > 0 || last + 1 < self.amplitudes.len() {
            self.amplitudes.truncate(last + 1);
            self.amplitudes.drain(..first);
            self.offset += first as u64;
        }
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    /// Always false: a vector stores at least one amplitude.
    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Highest stored photon number.
    pub fn max_photon(&self) -> u64 {
        self.offset + self.amplitudes.len() as u64 - 1
    }

    /// Amplitude of `|n⟩`, zero outside the stored window.
    pub fn amplitude(&self, n: u64) -> Complex64 {
        if n < self.offset {
            return Complex64::new(0.0, 0.0);
        }
        self.amplitudes
            .get((n - self.offset) as usize)
            .copied()
            .unwrap_or_default()
    }

    /// `(photon number, amplitude)` pairs over the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.offset + i as u64, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|c| c.norm_sqr() == 0.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Returns the unit vector along `self` together with the squared norm
    /// it had before scaling.
    pub fn normalize(&self) -> Result<(FockVector, f64)> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::ZeroVector);
        }
        let s = 1.0 / n2.sqrt();
        Ok((
            FockVector {
                offset: self.offset,
                amplitudes: self.amplitudes.iter().map(|c| c * s).collect(),
            },
            n2,
        ))
    }

    pub fn scale(&self, factor: Complex64) -> FockVector {
        FockVector::from_amplitudes(
            self.offset,
            self.amplitudes.iter().map(|c| c * factor).collect(),
        )
    }

    /// `self + factor·other` on the union of both windows.
    pub fn add_scaled(&self, factor: Complex64, other: &FockVector) -> FockVector {
        let lo = self.offset.min(other.offset);
        let hi = self.max_photon().max(other.max_photon());
        let amps = (lo..=hi)
            .map(|n| self.amplitude(n) + factor * other.amplitude(n))
            .collect();
        FockVector::from_amplitudes(lo, amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &FockVector) -> Complex64 {
        let lo = self.offset.max(other.offset);
        let hi = self.max_photon().min(other.max_photon());
        if lo > hi {
            return Complex64::new(0.0, 0.0);
        }
        (lo..=hi)
            .map(|n| self.amplitude(n).conj() * other.amplitude(n))
            .sum()
    }

    /// `⟨b⟩`, built from the `⟨k−1|b|k⟩ = √k` couplings between neighbours.
    pub fn expect_b(&self) -> Complex64 {
        self.amplitudes
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let n = (self.offset + i as u64 + 1) as f64;
                w[0].conj() * w[1] * n.sqrt()
            })
            .sum()
    }

    pub fn expect_n(&self) -> f64 {
        self.iter().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
    }

    /// `b|ψ⟩`, not renormalized. Annihilating the vacuum gives the zero vector.
    pub fn annihilate(&self) -> FockVector {
        if self.max_photon() == 0 {
            return FockVector::zero();
        }
        let lo = self.offset.saturating_sub(1);
        let amps = (lo..self.max_photon())
            .map(|n| self.amplitude(n + 1) * ((n + 1) as f64).sqrt())
            .collect();
        FockVector::from_amplitudes(lo, amps)
    }
}

/// `|⟨a|b⟩|²/(‖a‖²‖b‖²)`, clamped to `[0, 1]`. Zero if either input is zero.
pub fn fidelity(a: &FockVector, b: &FockVector) -> f64 {
    let den = a.norm_sqr() * b.norm_sqr();
    if den == 0.0 {
        return 0.0;
    }
    (a.inner_product(b).norm_sqr() / den).clamp(0.0, 1.0)
}

/// Which interferometer output registered the photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Detector {
    D1,
    D2,
}

impl Detector {
    /// `+1` for D₁, `−1` for D₂: the sign in front of the two-photon term.
    pub fn sign(self) -> f64 {
        match self {
            Detector::D1 => 1.0,
            Detector::D2 => -1.0,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Detector::D1 => 1,
            Detector::D2 => 2,
        }
    }
}

/// The conditional operator `ξ₁b ± ξ₂e^{iθ}b²` applied on a detection.
///
/// `theta` already contains the arm phase and the offset-frequency slip,
/// `θ = φ − 2πδt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpOperator {
    pub xi1: f64,
    pub xi2: f64,
    pub theta: f64,
}

/// Squared norms of the one- and two-photon parts of a jump, plus their
/// overlap. Both detector branches follow from these three numbers.
#[derive(Clone, Copy, Debug)]
pub struct BranchWeights {
    pub one_photon: f64,
    pub two_photon: f64,
    /// `⟨ξ₁bψ | ξ₂e^{iθ}b²ψ⟩`.
    pub cross: Complex64,
}

impl BranchWeights {
    pub fn norm_sqr(&self, detector: Detector) -> f64 {
        (self.one_photon + self.two_photon + 2.0 * detector.sign() * self.cross.re).max(0.0)
    }

    /// Probability that D₁ fires, or `None` when neither branch can.
    pub fn p1(&self) -> Option<f64> {
        let total = self.one_photon + self.two_photon;
        if total <= 0.0 || !total.is_finite() {
            return None;
        }
        Some((0.5 + self.cross.re / total).clamp(0.0, 1.0))
    }
}

impl JumpOperator {
    pub fn new(xi1: f64, xi2: f64, theta: f64) -> Self {
        JumpOperator { xi1, xi2, theta }
    }

    fn two_photon_factor(&self) -> Complex64 {
        Complex64::from_polar(self.xi2, self.theta)
    }

    /// Applies the operator for `detector`. The result is not renormalized;
    /// its squared norm is proportional to that detector's firing probability.
    pub fn apply(&self, state: &FockVector, detector: Detector) -> FockVector {
        let top = state.max_photon();
        if top == 0 {
            return FockVector::zero();
        }
        let e = self.two_photon_factor() * detector.sign();
        let lo = state.offset().saturating_sub(2);
        let amps = (lo..top)
            .map(|n| {
                let n1 = (n + 1) as f64;
                let one = state.amplitude(n + 1) * (self.xi1 * n1.sqrt());
                let two = state.amplitude(n + 2) * (n1 * (n1 + 1.0)).sqrt();
                one + e * two
            })
            .collect();
        FockVector::from_amplitudes(lo, amps)
    }

    /// One pass over the state computing both branch norms at once.
    pub fn branch_weights(&self, state: &FockVector) -> BranchWeights {
        let e = self.two_photon_factor();
        let mut one_photon = 0.0;
        let mut two_photon = 0.0;
        let mut cross = Complex64::new(0.0, 0.0);
        let top = state.max_photon();
        let lo = state.offset().saturating_sub(2);
        for n in lo..top {
            let n1 = (n + 1) as f64;
            let u = state.amplitude(n + 1) * (self.xi1 * n1.sqrt());
            let w = state.amplitude(n + 2) * (n1 * (n1 + 1.0)).sqrt() * e;
            one_photon += u.norm_sqr();
            two_photon += w.norm_sqr();
            cross += u.conj() * w;
        }
        BranchWeights {
            one_photon,
            two_photon,
            cross,
        }
    }
}
