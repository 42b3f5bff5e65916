//! Circular statistics and small numerical helpers shared by the pipelines
//! and the acceptance checks.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Maps an angle onto `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Smallest signed difference `a − b` on the circle.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of a unimodal function on `[a, b]`.
pub fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

pub fn golden_max(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    golden_min(&|x| -f(x), a, b, tol)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (`n − 1` denominator).
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    (ss / (xs.len() as f64 - 1.0)).sqrt()
}

fn resultant(angles: &[f64]) -> Complex64 {
    angles
        .iter()
        .map(|&a| Complex64::from_polar(1.0, a))
        .sum::<Complex64>()
        / angles.len() as f64
}

pub fn circular_mean(angles: &[f64]) -> f64 {
    resultant(angles).arg()
}

/// Mean resultant length `R̄ ∈ [0, 1]`.
pub fn mean_resultant_length(angles: &[f64]) -> f64 {
    resultant(angles).norm()
}

/// `√(−2 ln R̄)`.
pub fn circular_std(angles: &[f64]) -> f64 {
    let r = mean_resultant_length(angles).min(1.0);
    if r <= 0.0 {
        return f64::INFINITY;
    }
    (-2.0 * r.ln()).max(0.0).sqrt()
}

/// Rayleigh test of circular uniformity; returns the p-value.
pub fn rayleigh_test(angles: &[f64]) -> f64 {
    let n = angles.len() as f64;
    let rn = n * mean_resultant_length(angles);
    let p = ((1.0 + 4.0 * n + 4.0 * (n * n - rn * rn)).sqrt() - (1.0 + 2.0 * n)).exp();
    p.clamp(0.0, 1.0)
}

fn kuiper_q(lambda: f64) -> f64 {
    if lambda < 0.4 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j2 = (j * j) as f64;
        let term = (4.0 * j2 * lambda * lambda - 1.0) * (-2.0 * j2 * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kuiper test on the circle. Returns `(V, p-value)`; the
/// statistic does not depend on where the circle is cut.
pub fn kuiper_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let norm = |xs: &[f64]| {
        let mut v: Vec<f64> = xs.iter().map(|x| x.rem_euclid(2.0 * PI)).collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v
    };
    let (a, b) = (norm(a), norm(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let (mut d_plus, mut d_minus) = (0.0_f64, 0.0_f64);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        let d = i as f64 / na - j as f64 / nb;
        d_plus = d_plus.max(d);
        d_minus = d_minus.max(-d);
    }
    let v = d_plus + d_minus;
    let ne = (na * nb / (na + nb)).sqrt();
    (v, kuiper_q((ne + 0.155 + 0.24 / ne) * v))
}

/// `ln I₀(κ)`, series below 30 and the asymptotic expansion above.
pub fn ln_bessel_i0(kappa: f64) -> f64 {
    if kappa < 30.0 {
        let x = kappa * kappa / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= x / (k * k) as f64;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum.ln()
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..8 {
            let odd = (2 * k - 1) as f64;
            term *= odd * odd / (k as f64 * 8.0 * kappa);
            sum += term;
        }
        kappa - 0.5 * (2.0 * PI * kappa).ln() + sum.ln()
    }
}

/// Inverse of `A₁(κ) = I₁(κ)/I₀(κ)` (Best–Fisher approximation).
fn a1_inverse(r: f64) -> f64 {
    let r = r.clamp(1e-9, 1.0 - 1e-9);
    if r < 0.53 {
        2.0 * r + r.powi(3) + 5.0 * r.powi(5) / 6.0
    } else if r < 0.85 {
        -0.4 + 1.39 * r + 0.43 / (1.0 - r)
    } else {
        1.0 / (r.powi(3) - 4.0 * r * r + 3.0 * r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VonMisesComponent {
    pub weight: f64,
    pub mean: f64,
    pub kappa: f64,
}

/// Two-component von Mises mixture fitted by expectation maximisation.
///
/// Initial means sit on the principal axis of the doubled angles, which is
/// where a bimodal sample with opposite modes concentrates.
pub fn von_mises_mixture2(angles: &[f64], iterations: usize) -> [VonMisesComponent; 2] {
    let doubled: Vec<f64> = angles.iter().map(|a| 2.0 * a).collect();
    let axis = circular_mean(&doubled) / 2.0;
    let mut comps = [
        VonMisesComponent { weight: 0.5, mean: axis, kappa: 1.0 },
        VonMisesComponent { weight: 0.5, mean: axis + PI, kappa: 1.0 },
    ];
    let mut resp = vec![[0.5, 0.5]; angles.len()];
    for _ in 0..iterations {
        for (r, &x) in resp.iter_mut().zip(angles) {
            let l: Vec<f64> = comps
                .iter()
                .map(|c| c.weight.ln() + c.kappa * (x - c.mean).cos() - ln_bessel_i0(c.kappa))
                .collect();
            let top = l[0].max(l[1]);
            let e0 = (l[0] - top).exp();
            let e1 = (l[1] - top).exp();
            *r = [e0 / (e0 + e1), e1 / (e0 + e1)];
        }
        for (j, c) in comps.iter_mut().enumerate() {
            let w: f64 = resp.iter().map(|r| r[j]).sum();
            if w <= 1e-12 {
                continue;
            }
            let s: Complex64 = resp
                .iter()
                .zip(angles)
                .map(|(r, &x)| Complex64::from_polar(r[j], x))
                .sum();
            c.weight = w / angles.len() as f64;
            c.mean = s.arg();
            c.kappa = a1_inverse(s.norm() / w).min(1e6);
        }
    }
    comps
}
