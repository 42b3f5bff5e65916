//! End-to-end experiments built on the trajectory engine.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expt::config::ExperimentConfig;
use crate::expt::fit::{fit_fringe, CosineFit, FringeSample};
use crate::fock::{fidelity, JumpOperator};
use crate::gamma::{appendix_expansion, exact_post_state, Expansion};
use crate::meas::{run_trajectory, TrajectoryRecord};
use crate::stats::{circular_std, mean, rayleigh_test, std_dev};

/// Runs `config.run.trajectories` independent trajectories in parallel.
/// Results are ordered by trajectory index.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<Vec<TrajectoryRecord>> {
    config.validate()?;
    (0..config.run.trajectories)
        .into_par_iter()
        .map(|i| run_trajectory(config, i))
        .collect()
}

/// Fringe samples of one trajectory after the transient and pulse selection.
pub fn fringe(record: &TrajectoryRecord, config: &ExperimentConfig) -> Vec<FringeSample> {
    let cal = &config.calibration;
    record
        .pulses
        .iter()
        .filter(|p| p.pulse > cal.discard && (p.pulse - 1) % cal.select_every == 0)
        .map(|p| FringeSample {
            pulse: p.pulse,
            phi: p.phi,
            counts: p.n1 as f64,
        })
        .collect()
}

/// Fits the D₁ fringe of one trajectory, rejecting low-visibility fits.
pub fn fit_trajectory(record: &TrajectoryRecord, config: &ExperimentConfig) -> Result<CosineFit> {
    let comb = config.comb.build()?;
    let fit = fit_fringe(&fringe(record, config), comb.f_rep, config.calibration.grid_points)?;
    if fit.visibility < config.calibration.min_visibility {
        return Err(Error::FitRejected(format!(
            "visibility {:.4} below threshold {}",
            fit.visibility, config.calibration.min_visibility
        )));
    }
    Ok(fit)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFit {
    pub trajectory: u64,
    pub fit: Option<CosineFit>,
    pub rejected: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    /// Pulses discarded before fitting.
    pub discarded: u64,
    /// Fits recover `δ̂` under the convention `I₁ ∝ 1 + cos(θ₀ + φ_N − 2πδ̂(N−1))`.
    pub sign_convention: String,
    pub fits: Vec<TrajectoryFit>,
    pub median_delta: Option<f64>,
    pub mean_visibility: Option<f64>,
}

impl CalibrationReport {
    pub fn rejected(&self) -> usize {
        self.fits.iter().filter(|f| f.rejected.is_some()).count()
    }
}

pub fn calibrate_records(records: &[TrajectoryRecord], config: &ExperimentConfig) -> Result<CalibrationReport> {
    if config.run.pulses < 32 {
        return Err(Error::Config(format!(
            "calibration needs at least 32 pulses, got {}",
            config.run.pulses
        )));
    }
    if config.calibration.discard + 4 > config.run.pulses {
        return Err(Error::Config("transient discard leaves too few pulses to fit".into()));
    }
    let mut fits = Vec::with_capacity(records.len());
    for r in records {
        match fit_trajectory(r, config) {
            Ok(fit) => fits.push(TrajectoryFit { trajectory: r.trajectory, fit: Some(fit), rejected: None }),
            Err(Error::FitRejected(why)) => fits.push(TrajectoryFit { trajectory: r.trajectory, fit: None, rejected: Some(why) }),
            Err(e) => return Err(e),
        }
    }
    let mut deltas: Vec<f64> = fits.iter().filter_map(|f| f.fit.map(|x| x.delta)).collect();
    deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let vis: Vec<f64> = fits.iter().filter_map(|f| f.fit.map(|x| x.visibility)).collect();
    Ok(CalibrationReport {
        discarded: config.calibration.discard,
        sign_convention: "I1(N) = A + B cos(theta0 + phi_N - 2 pi delta (N-1)/f_rep)".into(),
        median_delta: (!deltas.is_empty()).then(|| deltas[deltas.len() / 2]),
        mean_visibility: (!vis.is_empty()).then(|| mean(&vis)),
        fits,
    })
}

/// Simulates the pulse train and fits `δ̂` and the fringe visibility for
/// every trajectory.
pub fn calibration_scan(config: &ExperimentConfig) -> Result<(CalibrationReport, Vec<TrajectoryRecord>)> {
    let records = run_ensemble(config)?;
    let report = calibrate_records(&records, config)?;
    Ok((report, records))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityPoint {
    pub n_min: u64,
    /// Mean fitted visibility over trajectories.
    pub fitted: f64,
    /// `μ/(μ + 2·n_min)`.
    pub expected: f64,
    pub relative_error: f64,
}

/// Reruns the calibration ensemble with the background floor set to each
/// `n_min` and compares the mean fitted visibility with `μ/(μ + 2·n_min)`.
pub fn visibility_sweep(config: &ExperimentConfig, n_mins: &[u64]) -> Result<Vec<VisibilityPoint>> {
    let mu = config.counts.mean();
    let f_rep = config.comb.build()?.f_rep;
    let mut out = Vec::new();
    for &n_min in n_mins {
        let mut cfg = config.clone();
        cfg.interferometer.n_min = n_min;
        let records = run_ensemble(&cfg)?;
        let vis: Vec<f64> = records
            .iter()
            .map(|r| fit_fringe(&fringe(r, &cfg), f_rep, cfg.calibration.grid_points).map(|f| f.visibility))
            .collect::<Result<_>>()?;
        let fitted = mean(&vis);
        let expected = mu / (mu + 2.0 * n_min as f64);
        out.push(VisibilityPoint {
            n_min,
            fitted,
            expected,
            relative_error: (fitted - expected).abs() / expected,
        });
    }
    Ok(out)
}

/// Ensemble mean and Monte Carlo standard error of `⟨E(t)⟩` on one grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleTrace {
    pub pulse: u64,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmergenceSummary {
    pub trajectories: usize,
    /// `−arg⟨b⟩` after the last pulse, per trajectory.
    pub localized_phases: Vec<f64>,
    /// Rayleigh-test p-value for uniformity of the localized phases.
    pub phase_uniformity_p: f64,
    /// Circular spread of `arg⟨b⟩` over the last `min(50, pulses)` pulses,
    /// averaged over trajectories.
    pub settling_std: f64,
    pub ensemble: Vec<EnsembleTrace>,
}

pub fn ensemble_traces(records: &[TrajectoryRecord]) -> Vec<EnsembleTrace> {
    let Some(first) = records.first() else {
        return Vec::new();
    };
    first
        .traces
        .iter()
        .enumerate()
        .map(|(ti, tr)| {
            let n = records.len();
            let columns: Vec<Vec<f64>> = (0..tr.times.len())
                .map(|k| records.iter().map(|r| r.traces[ti].values[k]).collect())
                .collect();
            EnsembleTrace {
                pulse: tr.pulse,
                times: tr.times.clone(),
                mean: columns.iter().map(|c| mean(c)).collect(),
                std_error: columns
                    .iter()
                    .map(|c| if n > 1 { std_dev(c) / (n as f64).sqrt() } else { 0.0 })
                    .collect(),
            }
        })
        .collect()
}

/// Summary statistics for the emergence of a definite field.
pub fn summarize_emergence(records: &[TrajectoryRecord]) -> EmergenceSummary {
    let phases: Vec<f64> = records.iter().map(|r| r.localized_phase()).collect();
    let settling: Vec<f64> = records
        .iter()
        .filter(|r| !r.pulses.is_empty())
        .map(|r| {
            let tail = r.pulses.len().min(50);
            let args: Vec<f64> = r.pulses[r.pulses.len() - tail..].iter().map(|p| p.summary.arg_b).collect();
            circular_std(&args)
        })
        .collect();
    EmergenceSummary {
        trajectories: records.len(),
        phase_uniformity_p: if phases.len() > 1 { rayleigh_test(&phases) } else { 1.0 },
        localized_phases: phases,
        settling_std: if settling.is_empty() { 0.0 } else { mean(&settling) },
        ensemble: ensemble_traces(records),
    }
}

/// Runs the ensemble and collects field traces, phase convergence and
/// branch fidelities.
pub fn field_emergence_report(config: &ExperimentConfig) -> Result<(EmergenceSummary, Vec<TrajectoryRecord>)> {
    let records = run_ensemble(config)?;
    Ok((summarize_emergence(&records), records))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub m: u64,
    pub n1: u64,
    pub n2: u64,
    pub theta: f64,
    pub infidelity: f64,
}

/// Equivalence of the binomial expansion and direct operator application on
/// a fixed set of balanced cases.
pub fn oracle_suite() -> Result<Vec<OracleCase>> {
    let cases = [
        (200u64, 4u64, 4u64, 0.0),
        (200, 4, 4, 1.3),
        (2000, 6, 2, 0.0),
        (2000, 6, 2, -2.1),
        (500, 3, 7, 0.4),
        (10_000, 8, 8, 2.9),
    ];
    cases
        .iter()
        .map(|&(m, n1, n2, theta)| {
            let jump = JumpOperator::new((m as f64).sqrt(), 1.0, theta);
            let a = exact_post_state(m, n1, n2, &jump)?;
            let b = appendix_expansion(m, n1, n2, &jump, Expansion::Exact)?;
            Ok(OracleCase {
                m,
                n1,
                n2,
                theta,
                infidelity: 1.0 - fidelity(&a, &b),
            })
        })
        .collect()
}
