//! Stochastic detection engine: per-pulse sampling of D₁/D₂ clicks and the
//! resulting collapse of the cavity state.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::comb::{field_expectation, pulse_grid, CombMode};
use crate::error::{Error, Result};
use crate::expt::config::{ExperimentConfig, LaserInput};
use crate::fock::{Detector, FockVector, JumpOperator};
use crate::gamma::best_branch;
use crate::stats::wrap_angle;

/// How the one/two-photon balance `ξ₁ ≈ √m·ξ₂` is enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BalanceRef {
    /// `ξ₁ = √(mean photon number)·ξ₂`, fixed before the run.
    #[default]
    MeanN,
    /// `ξ₁ = √m·ξ₂` using each trajectory's own initial `m`.
    ExactN,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerParams {
    pub xi1: f64,
    pub xi2: f64,
    /// Arm phase in radians, reduced mod 2π.
    pub phi: f64,
    /// Background counts added to each detector in every pulse.
    pub n_min: u64,
    pub balance_ref: BalanceRef,
}

impl InterferometerParams {
    pub fn new(xi1: f64, xi2: f64, phi: f64, n_min: u64) -> Result<Self> {
        let p = InterferometerParams {
            xi1,
            xi2,
            phi: phi.rem_euclid(2.0 * PI),
            n_min,
            balance_ref: BalanceRef::MeanN,
        };
        p.validate()?;
        Ok(p)
    }

    /// `ξ₂ = 1`, `ξ₁ = √photons`.
    pub fn balanced(photons: f64, phi: f64, n_min: u64) -> Result<Self> {
        if !(photons > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "balance reference must be positive, got {photons}"
            )));
        }
        Self::new(photons.sqrt(), 1.0, phi, n_min)
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi.rem_euclid(2.0 * PI);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi1 >= 0.0 && self.xi2 >= 0.0) || self.xi1 * self.xi1 + self.xi2 * self.xi2 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "jump coefficients must be nonnegative and not both zero (xi1={}, xi2={})",
                self.xi1, self.xi2
            )));
        }
        if !self.phi.is_finite() {
            return Err(Error::InvalidParameter("arm phase must be finite".into()));
        }
        Ok(())
    }

    /// Jump operator for a detection at time `t`: `θ = φ − 2πδt`.
    pub fn jump_at(&self, comb: &CombMode, t: f64) -> JumpOperator {
        JumpOperator::new(self.xi1, self.xi2, self.phi - 2.0 * PI * comb.delta * t)
    }
}

/// `[ξ₁b + sign·ξ₂e^{i(φ−2πδt)}b²]|ψ⟩`, unnormalized.
pub fn apply_jump(
    state: &FockVector,
    params: &InterferometerParams,
    comb: &CombMode,
    t: f64,
    detector: Detector,
) -> FockVector {
    params.jump_at(comb, t).apply(state, detector)
}

/// `(p₁, p₂)` for the next click, with `p₂ = 1 − p₁`.
pub fn detection_probabilities(
    state: &FockVector,
    params: &InterferometerParams,
    comb: &CombMode,
    t: f64,
) -> Result<(f64, f64)> {
    probabilities(state, &params.jump_at(comb, t))
}

pub(crate) fn probabilities(state: &FockVector, jump: &JumpOperator) -> Result<(f64, f64)> {
    let p1 = jump
        .branch_weights(state)
        .p1()
        .ok_or(Error::NoDetectionPossible)?;
    Ok((p1, 1.0 - p1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub detector: Detector,
    pub state: FockVector,
    /// Probability that D₁ would fire, evaluated before the click.
    pub p1: f64,
}

/// Samples one click, applies the matching jump and renormalizes.
pub fn detect_one<R: Rng + ?Sized>(
    state: &FockVector,
    params: &InterferometerParams,
    comb: &CombMode,
    t: f64,
    rng: &mut R,
) -> Result<Detection> {
    detect_with(state, &params.jump_at(comb, t), rng)
}

fn detect_with<R: Rng + ?Sized>(state: &FockVector, jump: &JumpOperator, rng: &mut R) -> Result<Detection> {
    let (p1, _) = probabilities(state, jump)?;
    let detector = if rng.random::<f64>() < p1 {
        Detector::D1
    } else {
        Detector::D2
    };
    let next = jump.apply(state, detector).normalize()?.0;
    Ok(Detection {
        detector,
        state: next,
        p1,
    })
}

/// Distribution of the number of state-changing detections per pulse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CountModel {
    Fixed { n: u64 },
    Poisson { mu: f64 },
}

impl Default for CountModel {
    fn default() -> Self {
        CountModel::Poisson { mu: 40.0 }
    }
}

impl CountModel {
    pub fn mean(&self) -> f64 {
        match *self {
            CountModel::Fixed { n } => n as f64,
            CountModel::Poisson { mu } => mu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let CountModel::Poisson { mu } = *self {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(Error::Config(format!("poisson count mean must be positive, got {mu}")));
            }
        }
        Ok(())
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            CountModel::Fixed { n } => n,
            CountModel::Poisson { mu } => Poisson::new(mu).map(|d| d.sample(rng) as u64).unwrap_or(0),
        }
    }
}

/// `(⟨n⟩, |⟨b⟩|, arg⟨b⟩)` of a state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub mean_n: f64,
    pub abs_b: f64,
    pub arg_b: f64,
}

impl StateSummary {
    pub fn of(state: &FockVector) -> Self {
        let b = state.expect_b();
        StateSummary {
            mean_n: state.expect_n(),
            abs_b: b.norm(),
            arg_b: b.arg(),
        }
    }

    /// The Γ-state phase `Φ` consistent with this `⟨b⟩`, i.e. `−arg⟨b⟩`.
    pub fn localized_phase(&self) -> f64 {
        wrap_angle(-self.arg_b)
    }

    /// `|⟨b⟩|/√⟨n⟩`, 1 for a coherent state.
    pub fn coherence(&self) -> f64 {
        if self.mean_n > 0.0 {
            self.abs_b / self.mean_n.sqrt()
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseRecord {
    /// 1-based pulse index `N`.
    pub pulse: u64,
    /// Arm phase during this pulse.
    pub phi: f64,
    /// State-changing detections actually applied.
    pub detections: u64,
    /// Reported D₁ counts, including the `n_min` floor.
    pub n1: u64,
    pub n2: u64,
    /// D₁ probability for the first click of the pulse.
    pub p1_first: Option<f64>,
    pub summary: StateSummary,
    /// Fidelity of the post-pulse state with its best-matching Γ state.
    pub branch_fidelity: Option<f64>,
    /// The pulse ran out of photons before all requested clicks.
    pub truncated: bool,
}

impl PulseRecord {
    /// Clicks that changed the state: `(n₁ − n_min, n₂ − n_min)`.
    pub fn jump_counts(&self, n_min: u64) -> (u64, u64) {
        (self.n1 - n_min, self.n2 - n_min)
    }
}

/// Per-pulse detection budget: drawn from a model, or fixed per detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PulseCounts {
    Model(CountModel),
    Forced { n1: u64, n2: u64 },
}

/// Runs every click of pulse `N` at `t_N = (N−1)/f_rep`.
///
/// The `n_min` background counts are added to the reported totals without
/// acting on the state. Running out of photons stops the pulse early and
/// sets `truncated`.
pub fn simulate_pulse<R: Rng + ?Sized>(
    state: &FockVector,
    params: &InterferometerParams,
    comb: &CombMode,
    pulse: u64,
    counts: PulseCounts,
    rng: &mut R,
) -> Result<(PulseRecord, FockVector)> {
    if pulse == 0 {
        return Err(Error::InvalidParameter("pulse index starts at 1".into()));
    }
    let jump = params.jump_at(comb, comb.pulse_time(pulse));
    let p1_first = probabilities(state, &jump).ok().map(|p| p.0);
    let mut current = state.clone();
    let (mut n1, mut n2) = (0u64, 0u64);
    let mut truncated = false;
    match counts {
        PulseCounts::Model(model) => {
            let total = model.draw(rng);
            for _ in 0..total {
                match detect_with(&current, &jump, rng) {
                    Ok(d) => {
                        match d.detector {
                            Detector::D1 => n1 += 1,
                            Detector::D2 => n2 += 1,
                        }
                        current = d.state;
                    }
                    Err(Error::NoDetectionPossible) | Err(Error::ZeroVector) => {
                        truncated = true;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        PulseCounts::Forced { n1: f1, n2: f2 } => {
            let (mut left1, mut left2) = (f1, f2);
            while left1 + left2 > 0 {
                let det = if left1 * (f2 + 1) >= left2 * (f1 + 1) && left1 > 0 {
                    Detector::D1
                } else {
                    Detector::D2
                };
                match jump.apply(&current, det).normalize() {
                    Ok((s, _)) => current = s,
                    Err(_) => {
                        truncated = true;
                        break;
                    }
                }
                match det {
                    Detector::D1 => {
                        left1 -= 1;
                        n1 += 1
                    }
                    Detector::D2 => {
                        left2 -= 1;
                        n2 += 1
                    }
                }
            }
        }
    }
    let record = PulseRecord {
        pulse,
        phi: params.phi,
        detections: n1 + n2,
        n1: n1 + params.n_min,
        n2: n2 + params.n_min,
        p1_first,
        summary: StateSummary::of(&current),
        branch_fidelity: None,
        truncated,
    };
    Ok((record, current))
}

/// `⟨E(t)⟩` sampled over one pulse window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldTrace {
    /// Number of pulses already measured when the trace was taken; 0 is the
    /// initial state.
    pub pulse: u64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl FieldTrace {
    /// Samples the field of `state` on the window of the pulse leaving after
    /// `pulse` measured pulses, centred at `t = pulse/f_rep`.
    pub fn sample(state: &FockVector, comb: &CombMode, pulse: u64, points: usize) -> Self {
        let times = pulse_grid(comb, pulse as f64 / comb.f_rep, points);
        let values = times.iter().map(|&t| field_expectation(state, comb, t)).collect();
        FieldTrace { pulse, times, values }
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Everything recorded for one Monte Carlo realisation.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub fingerprint: String,
    pub seed: u64,
    pub trajectory: u64,
    pub initial_m: u64,
    pub params: InterferometerParams,
    pub initial: StateSummary,
    pub pulses: Vec<PulseRecord>,
    pub traces: Vec<FieldTrace>,
    pub final_state: FockVector,
}

impl TrajectoryRecord {
    pub fn localized_phase(&self) -> f64 {
        self.pulses
            .last()
            .map(|p| p.summary)
            .unwrap_or(self.initial)
            .localized_phase()
    }

    pub fn truncated(&self) -> bool {
        self.pulses.iter().any(|p| p.truncated)
    }

    /// `(N, n₁)` pairs, the raw D₁ fringe.
    pub fn d1_counts(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.pulses.iter().map(|p| (p.pulse, p.n1))
    }
}

/// Independent stream `index` of the run seeded by `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs one trajectory of `config` using stream `index` of its seed.
pub fn run_trajectory(config: &ExperimentConfig, index: u64) -> Result<TrajectoryRecord> {
    let mut rng = trajectory_rng(config.run.seed, index);
    run_trajectory_with(config, index, &mut rng)
}

pub fn run_trajectory_with<R: Rng + ?Sized>(
    config: &ExperimentConfig,
    index: u64,
    rng: &mut R,
) -> Result<TrajectoryRecord> {
    config.validate()?;
    let comb = config.comb.build()?;
    let mean_n = config.laser.mean_n;
    let m = match config.laser.input {
        LaserInput::FixedM => mean_n.round() as u64,
        LaserInput::Poissonian => Poisson::new(mean_n)
            .map_err(|e| Error::Config(format!("laser mean photon number: {e}")))?
            .sample(rng) as u64,
    };
    let phi0 = if config.interferometer.phi_random {
        rng.random::<f64>() * 2.0 * PI
    } else {
        config.interferometer.phi
    };
    let base = config.interferometer.params(m, mean_n, phi0)?;

    let mut state = FockVector::number_state(m);
    let initial = StateSummary::of(&state);
    let mut traces = Vec::new();
    let points = config.run.trace_points;
    if config.run.trace_pulses.contains(&0) {
        traces.push(FieldTrace::sample(&state, &comb, 0, points));
    }
    let mut pulses = Vec::with_capacity(config.run.pulses as usize);
    let mut jumps_so_far = 0u64;
    for pulse in 1..=config.run.pulses {
        let params = base.with_phi(config.interferometer.phi_at(phi0, pulse));
        let counts = match (pulse, config.run.forced_first_pulse) {
            (1, Some(f)) => PulseCounts::Forced { n1: f.n1, n2: f.n2 },
            _ => PulseCounts::Model(config.counts),
        };
        let (mut record, next) = simulate_pulse(&state, &params, &comb, pulse, counts, rng)?;
        state = next;
        jumps_so_far += record.detections;
        if pulse <= config.run.branch_fidelity_pulses && jumps_so_far >= 2 {
            record.branch_fidelity = best_branch(&state, m, jumps_so_far).ok().map(|b| b.fidelity);
        }
        if config.run.trace_pulses.contains(&pulse) {
            traces.push(FieldTrace::sample(&state, &comb, pulse, points));
        }
        pulses.push(record);
    }
    Ok(TrajectoryRecord {
        fingerprint: config.fingerprint(),
        seed: config.run.seed,
        trajectory: index,
        initial_m: m,
        params: base,
        initial,
        pulses,
        traces,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fidelity;
    use crate::gamma::GammaSpec;
    use num_complex::Complex64;
    use rand::SeedableRng;

    fn comb(delta: f64) -> CombMode {
        CombMode::gaussian(40, 6.0, 49, delta).unwrap()
    }

    #[test]
    fn number_state_probabilities_are_flat() {
        let c = comb(0.3);
        let s = FockVector::number_state(500);
        let base = InterferometerParams::balanced(500.0, 0.0, 0).unwrap();
        let mut p = Vec::new();
        for i in 0..32 {
            let phi = 2.0 * PI * i as f64 / 32.0;
            let (p1, p2) = detection_probabilities(&s, &base.with_phi(phi), &c, 0.7).unwrap();
            assert_eq!(p1 + p2, 1.0);
            p.push(p1);
        }
        let spread = p.iter().cloned().fold(f64::MIN, f64::max) - p.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-10);
        assert!((p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn vacuum_cannot_fire() {
        let params = InterferometerParams::balanced(10.0, 0.0, 0).unwrap();
        let err = detection_probabilities(&FockVector::number_state(0), &params, &comb(0.0), 0.0);
        assert_eq!(err.unwrap_err(), Error::NoDetectionPossible);
    }

    #[test]
    fn adjacent_superposition_follows_cos_phi() {
        // (|m⟩ + |m−1⟩)/√2, δ = 0, t = 0: p₁ − p₂ ∝ cos φ
        let m = 50u64;
        let s = FockVector::from_amplitudes(m - 1, vec![Complex64::new(1.0, 0.0); 2])
            .normalize()
            .unwrap()
            .0;
        let (xi1, xi2) = (3.0, 0.8);
        let c = comb(0.0);
        // brute-force two-amplitude oracle
        let oracle = |phi: f64| {
            let mf = m as f64;
            let a = xi1 * mf.sqrt();
            let b = xi1 * (mf - 1.0).sqrt();
            let e = Complex64::from_polar(xi2 * (mf * (mf - 1.0)).sqrt(), phi);
            // |m−1⟩: a/√2 ; |m−2⟩: (b ± e)/√2 ; |m−3⟩: ±ξ₂√((m−1)(m−2)) e^{iφ}/√2
            let f = xi2 * ((mf - 1.0) * (mf - 2.0)).sqrt();
            let w = |s: f64| (a * a + (Complex64::new(b, 0.0) + s * e).norm_sqr() + f * f) / 2.0;
            w(1.0) / (w(1.0) + w(-1.0))
        };
        let mut diffs = Vec::new();
        for i in 0..64 {
            let phi = 2.0 * PI * i as f64 / 64.0;
            let params = InterferometerParams::new(xi1, xi2, phi, 0).unwrap();
            let (p1, p2) = detection_probabilities(&s, &params, &c, 0.0).unwrap();
            assert!((p1 - oracle(phi)).abs() < 1e-12);
            diffs.push((phi, p1 - p2));
        }
        let max = diffs.iter().max_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
        let min = diffs.iter().min_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
        assert!(max.0.abs() < 1e-12);
        assert!((min.0 - PI).abs() < 1e-12);
        let amp = max.1;
        for (phi, d) in diffs {
            assert!((d - amp * phi.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn single_photon_path_only() {
        let params = InterferometerParams::new(1.0, 0.0, 0.4, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let d = detect_one(&FockVector::number_state(2), &params, &comb(0.0), 0.0, &mut rng).unwrap();
            assert_eq!(d.p1, 0.5);
            assert_eq!(d.state, FockVector::number_state(1));
        }
    }

    #[test]
    fn detect_one_is_deterministic() {
        let params = InterferometerParams::balanced(300.0, 1.0, 0).unwrap();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let mut s = FockVector::number_state(300);
            let mut dets = Vec::new();
            for _ in 0..20 {
                let d = detect_one(&s, &params, &comb(0.2), 0.0, &mut rng).unwrap();
                dets.push(d.detector);
                s = d.state;
            }
            (dets, s)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn second_click_depends_on_phase() {
        let m = 10_000u64;
        let params = InterferometerParams::balanced(m as f64, 0.3, 0).unwrap();
        for seed in 0..8 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = comb(0.0);
            let first = detect_one(&FockVector::number_state(m), &params, &c, 0.0, &mut rng).unwrap();
            assert!((first.p1 - 0.5).abs() < 1e-12);
            let (p1, _) = detection_probabilities(&first.state, &params, &c, 0.0).unwrap();
            assert!((p1 - 0.5).abs() > 1e-3, "seed {seed}: {p1}");
        }
    }

    #[test]
    fn phase_average_is_half() {
        let s = GammaSpec::new(3_000, 60, 0.8).unwrap().state();
        let base = InterferometerParams::new(40.0, 0.9, 0.0, 0).unwrap();
        let c = comb(0.1);
        let avg: f64 = (0..64)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / 64.0;
                detection_probabilities(&s, &base.with_phi(phi), &c, 3.0).unwrap().0
            })
            .sum::<f64>()
            / 64.0;
        assert!((avg - 0.5).abs() < 1e-10);
    }

    #[test]
    fn zero_click_pulse_leaves_state() {
        let params = InterferometerParams::balanced(1000.0, 0.0, 7).unwrap();
        let s = FockVector::number_state(1000);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (rec, out) = simulate_pulse(&s, &params, &comb(0.0), 1, PulseCounts::Model(CountModel::Fixed { n: 0 }), &mut rng).unwrap();
        assert_eq!(out, s);
        assert_eq!((rec.n1, rec.n2), (7, 7));
        assert_eq!(rec.detections, 0);
    }

    #[test]
    fn pulse_creates_coherence() {
        let m = 10_000u64;
        let params = InterferometerParams::balanced(m as f64, 0.0, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (rec, out) = simulate_pulse(
            &FockVector::number_state(m),
            &params,
            &comb(0.0),
            1,
            PulseCounts::Model(CountModel::Fixed { n: 100 }),
            &mut rng,
        )
        .unwrap();
        assert_eq!(rec.detections, 100);
        assert!(out.expect_b().norm() > 0.0);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exhaustion_truncates_pulse() {
        let params = InterferometerParams::balanced(3.0, 0.0, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (rec, out) = simulate_pulse(
            &FockVector::number_state(3),
            &params,
            &comb(0.0),
            1,
            PulseCounts::Model(CountModel::Fixed { n: 10 }),
            &mut rng,
        )
        .unwrap();
        assert!(rec.truncated);
        assert!(rec.detections <= 3);
        assert_eq!(out.max_photon(), 0);
    }

    #[test]
    fn detection_order_is_irrelevant() {
        let m = 2_000u64;
        let params = InterferometerParams::balanced(m as f64, 0.7, 0).unwrap();
        let c = comb(0.0);
        let seq = [Detector::D1, Detector::D1, Detector::D2, Detector::D1, Detector::D2, Detector::D2, Detector::D1];
        let apply = |order: &[Detector]| {
            order.iter().fold(FockVector::number_state(m), |s, &d| {
                apply_jump(&s, &params, &c, 0.0, d).normalize().unwrap().0
            })
        };
        let a = apply(&seq);
        let mut rev = seq;
        rev.reverse();
        let b = apply(&rev);
        assert!((fidelity(&a, &b) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn branch_after_second_pulse() {
        // after pulse 2 the state is closer to one Γ branch than to its mirror
        let m = 10_000u64;
        let c = comb(0.25);
        let params = InterferometerParams::balanced(m as f64, 0.0, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let forced = PulseCounts::Forced { n1: 50, n2: 50 };
        let (r1, s1) = simulate_pulse(&FockVector::number_state(m), &params, &c, 1, forced, &mut rng).unwrap();
        let (r2, s2) = simulate_pulse(&s1, &params, &c, 2, PulseCounts::Model(CountModel::Fixed { n: 100 }), &mut rng).unwrap();
        let n = r1.detections + r2.detections;
        let plus = GammaSpec::new(m, n, PI / 2.0).unwrap().state();
        let minus = GammaSpec::new(m, n, -PI / 2.0).unwrap().state();
        let (fp, fm) = (fidelity(&s2, &plus), fidelity(&s2, &minus));
        assert!(fp.max(fm) > 0.8, "{fp} {fm}");
        assert!(fp.max(fm) > 100.0 * fp.min(fm));
    }
}
