//! Fit of the D₁ fringe `I₁(N) = A + B·cos(θ₀ + φ_N − 2πδ̂(N−1)/f_rep)`.
//!
//! For a fixed `δ̂` the model is linear in `(A, B cos θ₀, B sin θ₀)`, so the
//! search is one-dimensional: a coarse scan of `δ̂` over `[0, 1)` followed by
//! golden-section refinement around the best grid point.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{golden_min, wrap_angle};

/// One point of the fringe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeSample {
    pub pulse: u64,
    pub phi: f64,
    pub counts: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosineFit {
    /// Offset frequency in units of `f_rep`, in `[0, 1)`.
    pub delta: f64,
    pub theta0: f64,
    pub offset: f64,
    pub amplitude: f64,
    /// `B/A`.
    pub visibility: f64,
    pub rms_residual: f64,
    pub points: usize,
}

struct LinearFit {
    rss: f64,
    coef: [f64; 3],
}

/// Least squares on columns `[1, cos ψ, sin ψ]` by modified Gram–Schmidt.
/// Columns that collapse onto earlier ones are dropped.
fn linear_fit(samples: &[FringeSample], delta: f64, f_rep: f64) -> LinearFit {
    let n = samples.len();
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; n], Vec::with_capacity(n), Vec::with_capacity(n)];
    for s in samples {
        let psi = s.phi - 2.0 * PI * delta * (s.pulse - 1) as f64 / f_rep;
        cols[1].push(psi.cos());
        cols[2].push(psi.sin());
    }
    let y: Vec<f64> = samples.iter().map(|s| s.counts).collect();
    let original = cols.clone();
    // q columns and r matrix
    let mut r = [[0.0f64; 3]; 3];
    let mut keep = [false; 3];
    for j in 0..3 {
        let scale = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..j {
            if !keep[i] {
                continue;
            }
            let d: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            r[i][j] = d;
            let qi = cols[i].clone();
            for (v, q) in cols[j].iter_mut().zip(&qi) {
                *v -= d * q;
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-9 * scale.max(1e-300) && norm > 0.0 {
            keep[j] = true;
            r[j][j] = norm;
            for v in &mut cols[j] {
                *v /= norm;
            }
        }
    }
    let mut qty = [0.0f64; 3];
    for j in 0..3 {
        if keep[j] {
            qty[j] = cols[j].iter().zip(&y).map(|(q, v)| q * v).sum();
        }
    }
    let mut coef = [0.0f64; 3];
    for j in (0..3).rev() {
        if !keep[j] {
            continue;
        }
        let mut s = qty[j];
        for k in j + 1..3 {
            if keep[k] {
                s -= r[j][k] * coef[k];
            }
        }
        coef[j] = s / r[j][j];
    }
    let rss = (0..n)
        .map(|i| {
            let model: f64 = (0..3).map(|j| coef[j] * original[j][i]).sum();
            (y[i] - model).powi(2)
        })
        .sum();
    LinearFit { rss, coef }
}

/// Fits the fringe. Errors if fewer than four samples are supplied.
pub fn fit_fringe(samples: &[FringeSample], f_rep: f64, grid_points: usize) -> Result<CosineFit> {
    if samples.len() < 4 {
        return Err(Error::FitRejected(format!(
            "need at least 4 fringe samples, got {}",
            samples.len()
        )));
    }
    let grid = grid_points.max(2);
    let rss = |d: f64| linear_fit(samples, d, f_rep).rss;
    let (best, _) = (0..grid)
        .map(|i| {
            let d = i as f64 / grid as f64;
            (d, rss(d))
        })
        .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let step = 1.0 / grid as f64;
    let refined = golden_min(&rss, best - step, best + step, 1e-13);
    let delta = refined.rem_euclid(1.0);
    let fit = linear_fit(samples, delta, f_rep);
    let [a, c, s] = fit.coef;
    let amplitude = (c * c + s * s).sqrt();
    Ok(CosineFit {
        delta,
        theta0: wrap_angle((-s).atan2(c)),
        offset: a,
        amplitude,
        visibility: if a > 0.0 { amplitude / a } else { 0.0 },
        rms_residual: (fit.rss / samples.len() as f64).sqrt(),
        points: samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(delta: f64, theta0: f64, a: f64, b: f64, phis: impl Fn(u64) -> f64) -> Vec<FringeSample> {
        (11..=256)
            .map(|n| {
                let phi = phis(n);
                FringeSample {
                    pulse: n,
                    phi,
                    counts: a + b * (theta0 + phi - 2.0 * PI * delta * (n - 1) as f64).cos(),
                }
            })
            .collect()
    }

    #[test]
    fn noiseless_recovery_is_exact() {
        let ramp = |n: u64| if n >= 129 { PI / 2.0 * (n - 128) as f64 } else { 0.3 };
        for &delta in &[0.0, 0.13, 0.3712345, 0.5, 0.87, 0.999] {
            let fit = fit_fringe(&synth(delta, 1.1, 100.0, 60.0, ramp), 1.0, 1024).unwrap();
            let err = (fit.delta - delta).abs().min(1.0 - (fit.delta - delta).abs());
            assert!(err <= 1e-9, "delta={delta} got {}", fit.delta);
            assert!((fit.visibility - 0.6).abs() < 1e-6);
            assert!(wrap_angle(fit.theta0 - 1.1).abs() < 1e-5);
        }
    }

    #[test]
    fn constant_phase_aliases_mirror_offset() {
        let a = fit_fringe(&synth(0.13, 0.4, 100.0, 50.0, |_| 0.0), 1.0, 1024).unwrap();
        let b = fit_fringe(&synth(0.87, -0.4, 100.0, 50.0, |_| 0.0), 1.0, 1024).unwrap();
        // both fit equally well; the constant-φ fringe cannot tell them apart
        assert!(a.rms_residual < 1e-8 && b.rms_residual < 1e-8);
        let d = |x: f64, y: f64| (x - y).abs().min(1.0 - (x - y).abs());
        assert!(d(a.delta, 0.13) < 1e-9 || d(a.delta, 0.87) < 1e-9);
    }

    #[test]
    fn flat_fringe_has_no_visibility() {
        let flat: Vec<FringeSample> = (1..50)
            .map(|n| FringeSample { pulse: n, phi: 0.0, counts: 20.0 })
            .collect();
        let fit = fit_fringe(&flat, 1.0, 64).unwrap();
        assert!(fit.visibility < 1e-9);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_fringe(&[], 1.0, 16).is_err());
    }
}
