use f2f_core::comb::pulse_grid;
use f2f_core::expt::{calibration_scan, field_emergence_report, run_ensemble, LaserInput};
use f2f_core::meas::run_trajectory;
use f2f_core::stats::{circular_std, kuiper_two_sample, std_dev};
use f2f_core::{CountModel, ExperimentConfig};

fn emergence(trajectories: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.run.trajectories = trajectories;
    cfg.run.trace_pulses = vec![0, 20];
    cfg
}

#[test]
fn zero_pulses_gives_initial_summary_only() {
    let mut cfg = ExperimentConfig::default();
    cfg.run.pulses = 0;
    cfg.run.trace_pulses = vec![0];
    let r = run_trajectory(&cfg, 0).unwrap();
    assert!(r.pulses.is_empty());
    assert_eq!(r.initial.mean_n, 10_000.0);
    assert_eq!(r.initial.abs_b, 0.0);
    assert_eq!(r.traces.len(), 1);
}

#[test]
fn pulse_zero_trace_vanishes() {
    let (summary, records) = field_emergence_report(&emergence(4)).unwrap();
    for r in &records {
        assert_eq!(r.traces[0].pulse, 0);
        assert!(r.traces[0].values.iter().all(|v| v.abs() <= 1e-12));
    }
    assert!(summary.ensemble[0].mean.iter().all(|v| v.abs() <= 1e-12));
}

#[test]
fn pulse_twenty_reaches_coherent_envelope() {
    let cfg = emergence(8);
    let comb = cfg.comb.build().unwrap();
    let (_, records) = field_emergence_report(&cfg).unwrap();
    for r in &records {
        let trace = &r.traces[1];
        assert_eq!(trace.pulse, 20);
        let n = r.pulses.last().unwrap().summary.mean_n;
        let envelope = pulse_grid(&comb, trace.pulse as f64, cfg.run.trace_points)
            .iter()
            .map(|&t| 2.0 * comb.mode_function(t).norm() * n.sqrt())
            .fold(0.0, f64::max);
        assert!(trace.peak() >= 0.8 * envelope, "peak {} envelope {envelope}", trace.peak());
    }
}

#[test]
fn two_seeds_share_envelope_not_phase() {
    let mut cfg = emergence(1);
    cfg.interferometer.phi_random = true;
    let a = run_trajectory(&cfg, 0).unwrap();
    let b = run_trajectory(&cfg, 1).unwrap();
    let (pa, pb) = (a.pulses.last().unwrap().summary, b.pulses.last().unwrap().summary);
    assert!((pa.abs_b - pb.abs_b).abs() / pa.abs_b < 0.05);
    assert!((pa.arg_b - pb.arg_b).abs() > 1e-3);
}

#[test]
fn localized_phase_is_uniform_over_seeds() {
    let mut cfg = emergence(500);
    cfg.interferometer.phi_random = true;
    cfg.run.trace_pulses = vec![];
    cfg.run.branch_fidelity_pulses = 0;
    cfg.run.seed = 21;
    let (summary, _) = field_emergence_report(&cfg).unwrap();
    assert!(summary.phase_uniformity_p > 0.01, "p = {}", summary.phase_uniformity_p);
}

#[test]
fn phase_settles_over_long_train() {
    let mut cfg = ExperimentConfig::default();
    cfg.comb.delta = 0.0;
    cfg.run.pulses = 200;
    cfg.run.trajectories = 4;
    cfg.run.trace_pulses = vec![];
    cfg.run.branch_fidelity_pulses = 0;
    for r in run_ensemble(&cfg).unwrap() {
        let args: Vec<f64> = r.pulses[150..].iter().map(|p| p.summary.arg_b).collect();
        let s = circular_std(&args);
        assert!(s < 0.1, "trajectory {} spread {s}", r.trajectory);
    }
}

#[test]
fn poissonian_input_only_widens_amplitude() {
    let mut fixed = ExperimentConfig::default();
    fixed.comb.delta = 0.25;
    fixed.run.pulses = 10;
    fixed.run.trajectories = 300;
    fixed.run.trace_pulses = vec![];
    fixed.run.branch_fidelity_pulses = 0;
    let mut poisson = fixed.clone();
    poisson.laser.input = LaserInput::Poissonian;
    poisson.run.seed = 1;
    let a = run_ensemble(&fixed).unwrap();
    let b = run_ensemble(&poisson).unwrap();
    let phases = |rs: &[f2f_core::TrajectoryRecord]| rs.iter().map(|r| r.localized_phase()).collect::<Vec<_>>();
    let (_, p) = kuiper_two_sample(&phases(&a), &phases(&b));
    assert!(p > 0.01, "Kuiper p = {p}");
    let amp = |rs: &[f2f_core::TrajectoryRecord]| {
        rs.iter().map(|r| r.pulses.last().unwrap().summary.abs_b).collect::<Vec<_>>()
    };
    let (sa, sb) = (std_dev(&amp(&a)), std_dev(&amp(&b)));
    assert!(sb > sa, "fixed spread {sa}, poissonian spread {sb}");
}

#[test]
fn calibration_without_offset_is_stationary() {
    let mut cfg = ExperimentConfig::calibration_default();
    cfg.comb.delta = 0.0;
    cfg.laser.mean_n = 2.0e5;
    cfg.counts = CountModel::Poisson { mu: 100.0 };
    cfg.run.pulses = 128;
    cfg.interferometer.phi_step_from = 65;
    cfg.run.trajectories = 2;
    let (report, _) = calibration_scan(&cfg).unwrap();
    for f in &report.fits {
        let d = f.fit.unwrap().delta;
        assert!(d.min(1.0 - d) < 1e-3, "delta {d}");
    }
}

#[test]
fn calibration_needs_enough_pulses() {
    let mut cfg = ExperimentConfig::calibration_default();
    cfg.run.pulses = 31;
    assert!(calibration_scan(&cfg).unwrap_err().is_config());
}
