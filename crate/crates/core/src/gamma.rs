//! Gaussian-weighted number-state superpositions and the exact post-detection
//! states they approximate.
//!
//! Three routes lead to the state left behind by `n₁` D₁ and `n₂` D₂
//! detections on `|m⟩`:
//!
//! * [`exact_post_state`] applies the jump operators one at a time;
//! * [`appendix_expansion`] evaluates the binomial double sum directly;
//! * [`approx_post_state`] uses the two-branch Gaussian form.
//!
//! The first two are algebraically identical and serve as oracles for each
//! other; the third is what the other two are compared against.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Detector, FockVector, JumpOperator};

/// `B(n,k)` values below this fraction of the peak are left out of the window.
pub const WEIGHT_CUTOFF: f64 = 1e-8;

/// Unnormalized `B(n,k) = exp[−2(k−n/2)²/n]`.
pub fn b_weight(n: u64, k: i64) -> f64 {
    if n == 0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let d = k as f64 - n as f64 / 2.0;
    (-2.0 * d * d / n as f64).exp()
}

/// Inclusive range of `k` kept for a given `n`, clipped to `[0, n]`.
pub fn k_window(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 0);
    }
    let half_width = (n as f64 * (1.0 / WEIGHT_CUTOFF).ln() / 2.0).sqrt();
    let centre = n as f64 / 2.0;
    let lo = (centre - half_width).ceil().max(0.0) as u64;
    let hi = ((centre + half_width).floor() as u64).min(n);
    (lo, hi)
}

/// Parameters of `|Γ(m,n,Φ)⟩ = Σ_k B(n,k)·e^{ikΦ}·|m−n−k⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSpec {
    pub m: u64,
    pub n: u64,
    pub phase: f64,
    pub k_min: u64,
    pub k_max: u64,
}

impl GammaSpec {
    pub fn new(m: u64, n: u64, phase: f64) -> Result<Self> {
        let (k_min, k_max) = k_window(n);
        if m < n + k_max {
            return Err(Error::PhotonExhaustion {
                needed: n + k_max,
                available: m,
            });
        }
        Ok(GammaSpec {
            m,
            n,
            phase,
            k_min,
            k_max,
        })
    }

    /// `(k_min, [B(n,k_min), …, B(n,k_max)])` with `Σ B² = 1`.
    pub fn weights(&self) -> (u64, Vec<f64>) {
        let mut w: Vec<f64> = (self.k_min..=self.k_max)
            .map(|k| b_weight(self.n, k as i64))
            .collect();
        let norm = w.iter().map(|b| b * b).sum::<f64>().sqrt();
        for b in &mut w {
            *b /= norm;
        }
        (self.k_min, w)
    }

    /// Photon number carrying the `k`-th weight.
    pub fn photon_number(&self, k: u64) -> u64 {
        self.m - self.n - k
    }

    pub fn state(&self) -> FockVector {
        let (k_min, w) = self.weights();
        let lowest = self.photon_number(self.k_max);
        // stored in ascending photon number, i.e. descending k
        let amps = w
            .iter()
            .enumerate()
            .rev()
            .map(|(i, b)| Complex64::from_polar(*b, (k_min + i as u64) as f64 * self.phase))
            .collect();
        FockVector::from_amplitudes(lowest, amps)
    }
}

pub fn gamma_state(spec: &GammaSpec) -> FockVector {
    spec.state()
}

fn check_photons(m: u64, n1: u64, n2: u64) -> Result<()> {
    let n = n1 + n2;
    if n > 0 && m <= 2 * n {
        return Err(Error::PhotonExhaustion {
            needed: 2 * n + 1,
            available: m,
        });
    }
    Ok(())
}

/// `[ξ₁b + ξ₂e^{iθ}b²]^{n₁}[ξ₁b − ξ₂e^{iθ}b²]^{n₂}|m⟩`, normalized.
///
/// D₁ and D₂ factors are interleaved so that intermediate states never carry
/// the large cancelling amplitudes that a block ordering produces.
pub fn exact_post_state(m: u64, n1: u64, n2: u64, jump: &JumpOperator) -> Result<FockVector> {
    check_photons(m, n1, n2)?;
    let mut state = FockVector::number_state(m);
    let (mut left1, mut left2) = (n1, n2);
    while left1 + left2 > 0 {
        let det = if left1 * (n2 + 1) >= left2 * (n1 + 1) && left1 > 0 {
            left1 -= 1;
            Detector::D1
        } else {
            left2 -= 1;
            Detector::D2
        };
        state = jump.apply(&state, det).normalize()?.0;
    }
    Ok(state)
}

/// Which factors of the binomial double sum to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    /// Full expression including `√(m(m−1)…(m−n−k+1))` and `ξ₁^{n−k}ξ₂^k`.
    Exact,
    /// Large-`m`, balanced limit: the falling factorial becomes `m^{k/2}` and
    /// `(ξ₂√m/ξ₁)^k → 1`, leaving `Σ C(n₁,p)C(n₂,q)(−1)^q e^{ikθ}`.
    LargeM,
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

fn ln_pow(x: f64, e: u64) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * x.ln()
    }
}

/// Builds the post-detection state from the explicit polynomial expansion
/// `Σ_p Σ_q C(n₁,p)·C(n₂,q)·√(m…(m−n−k+1))·ξ₁^{n−k}·ξ₂^k·e^{ikθ}·(−1)^q·|m−n−k⟩`
/// with `k = p + q`. All magnitudes are accumulated in log space.
///
/// The alternating `q`-sum cancels to roughly `2^{−min(n₁,n₂)}` of its largest
/// term, so double precision limits this route to modest `n`.
pub fn appendix_expansion(
    m: u64,
    n1: u64,
    n2: u64,
    jump: &JumpOperator,
    mode: Expansion,
) -> Result<FockVector> {
    check_photons(m, n1, n2)?;
    let n = n1 + n2;
    // ln of the falling factorial m(m−1)…(m−j+1)
    let mut ln_falling = vec![0.0; (2 * n + 1) as usize];
    for j in 1..=(2 * n) as usize {
        ln_falling[j] = ln_falling[j - 1] + ((m - j as u64 + 1) as f64).ln();
    }
    let ln_c1: Vec<f64> = (0..=n1).map(|p| ln_binomial(n1, p)).collect();
    let ln_c2: Vec<f64> = (0..=n2).map(|q| ln_binomial(n2, q)).collect();

    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let p_lo = k.saturating_sub(n2);
        let p_hi = k.min(n1);
        let logs: Vec<(f64, f64)> = (p_lo..=p_hi)
            .map(|p| {
                let q = k - p;
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                (ln_c1[p as usize] + ln_c2[q as usize], sign)
            })
            .collect();
        let peak = logs.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = logs.iter().map(|(l, sign)| sign * (l - peak).exp()).sum();
        let extra = match mode {
            Expansion::Exact => {
                0.5 * ln_falling[(n + k) as usize] + ln_pow(jump.xi1, n - k) + ln_pow(jump.xi2, k)
            }
            Expansion::LargeM => 0.0,
        };
        if s == 0.0 || extra == f64::NEG_INFINITY {
            terms.push((f64::NEG_INFINITY, 0.0));
        } else {
            terms.push((s.abs().ln() + peak + extra, s.signum()));
        }
    }
    let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(Error::ZeroVector);
    }
    let lowest = m - 2 * n;
    // ascending photon number: k runs from n down to 0
    let amps = (0..=n)
        .rev()
        .map(|k| {
            let (l, sign) = terms[k as usize];
            let mag = if l == f64::NEG_INFINITY { 0.0 } else { (l - top).exp() };
            Complex64::from_polar(mag * sign, k as f64 * jump.theta)
        })
        .collect();
    Ok(FockVector::from_amplitudes(lowest, amps).normalize()?.0)
}

/// `Σ_k B(n,k)·cos(kπn₂/n)·e^{ikφ}·|m−n−k⟩`, the equal-weight superposition
/// of `Γ(m,n,φ+πn₂/n)` and `Γ(m,n,φ−πn₂/n)`, normalized.
pub fn approx_post_state(m: u64, n1: u64, n2: u64, phase: f64) -> Result<FockVector> {
    let n = n1 + n2;
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "two-branch form needs at least two detections, got {n}"
        )));
    }
    let spec = GammaSpec::new(m, n, phase)?;
    let (k_min, w) = spec.weights();
    let split = PI * n2 as f64 / n as f64;
    let amps = w
        .iter()
        .enumerate()
        .rev()
        .map(|(i, b)| {
            let k = (k_min + i as u64) as f64;
            Complex64::from_polar(b * (k * split).cos(), k * phase)
        })
        .collect();
    Ok(FockVector::from_amplitudes(spec.photon_number(spec.k_max), amps)
        .normalize()?
        .0)
}

/// Best match of `state` against `Γ(m, n, Φ)` over all `Φ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchMatch {
    pub phase: f64,
    pub fidelity: f64,
}

/// Maximizes `|⟨Γ(m,n,Φ)|ψ⟩|²` over `Φ` by a 256-point scan followed by
/// golden-section refinement.
pub fn best_branch(state: &FockVector, m: u64, n: u64) -> Result<BranchMatch> {
    let spec = GammaSpec::new(m, n, 0.0)?;
    let (k_min, w) = spec.weights();
    let norm = state.norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let coeffs: Vec<(f64, Complex64)> = w
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let k = k_min + i as u64;
            (k as f64, state.amplitude(spec.photon_number(k)) * *b)
        })
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .collect();
    let overlap = |phase: f64| -> f64 {
        let s: Complex64 = coeffs
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, -k * phase))
            .sum();
        s.norm_sqr() / norm
    };
    let grid = 256;
    let step = 2.0 * PI / grid as f64;
    let (best_i, _) = (0..grid)
        .map(|i| (i, overlap(i as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let centre = best_i as f64 * step;
    let phase = crate::stats::golden_max(&overlap, centre - step, centre + step, 1e-10);
    Ok(BranchMatch {
        phase: crate::stats::wrap_angle(phase),
        fidelity: overlap(phase).clamp(0.0, 1.0),
    })
}

/// One Fourier coefficient of `exp(−σ²x²/2)·cos(μx)` on `[−π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosineCoefficient {
    pub q: i64,
    /// `(1/4π)∫_{−π}^{π} e^{−σ²x²/2}[e^{i(q−μ)x} + e^{i(q+μ)x}] dx` by
    /// trapezoid rule on 2048 intervals.
    pub quadrature: f64,
    /// `[e^{−(q−μ)²/2σ²} + e^{−(q+μ)²/2σ²}] / (2√(2π)σ)`.
    pub closed_form: f64,
}

pub const QUADRATURE_INTERVALS: usize = 2048;

pub fn gaussian_cosine_series(
    sigma: f64,
    mu: f64,
    q_range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<CosineCoefficient>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let h = 2.0 * PI / QUADRATURE_INTERVALS as f64;
    Ok(q_range
        .map(|q| {
            let integrand = |x: f64| {
                (-sigma * sigma * x * x / 2.0).exp()
                    * (((q as f64 - mu) * x).cos() + ((q as f64 + mu) * x).cos())
            };
            let inner: f64 = (1..QUADRATURE_INTERVALS)
                .map(|i| integrand(-PI + i as f64 * h))
                .sum();
            let ends = 0.5 * (integrand(-PI) + integrand(PI));
            let quadrature = (inner + ends) * h / (4.0 * PI);
            let g = |d: f64| (-d * d / (2.0 * sigma * sigma)).exp();
            let closed_form =
                (g(q as f64 - mu) + g(q as f64 + mu)) / (2.0 * (2.0 * PI).sqrt() * sigma);
            CosineCoefficient {
                q,
                quadrature,
                closed_form,
            }
        })
        .collect())
}

/// `Σ_q exp[−(q−μ)²/2σ²]·e^{iπq}` summed directly, and its Fourier
/// resummation `2√(2π)σ·e^{−σ²π²/2}·cos(πμ)`.
pub fn alternating_gaussian_sum(mu: f64, sigma: f64) -> (f64, f64) {
    let reach = (40.0 * sigma).ceil() as i64 + 1;
    let centre = mu.round() as i64;
    let direct = (centre - reach..=centre + reach)
        .map(|q| {
            let d = q as f64 - mu;
            let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign * (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .sum();
    let resummed = 2.0 * (2.0 * PI).sqrt() * sigma * (-sigma * sigma * PI * PI / 2.0).exp() * (PI * mu).cos();
    (direct, resummed)
}
