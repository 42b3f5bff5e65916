//! Command line front end.
//!
//! Exit status: 0 on success, 1 for configuration or usage errors, 2 for
//! numerical failures such as a rejected fit or an exhausted state.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use f2f_core::expt::{
    calibration_scan, field_emergence_report, oracle_suite, output_dir, visibility_sweep, write_run, write_summary,
};
use f2f_core::{Error, ExperimentConfig, OutputFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Largest expansion-vs-direct infidelity `oracle` accepts.
const ORACLE_TOLERANCE: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "f2f", version, about = "Simulate f:2f detection back-action on a laser cavity field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the offset frequency and fringe visibility of every trajectory.
    Calibrate(Common),
    /// Record field traces and phase localization.
    Emerge(Common),
    /// Fit visibility at n_min = 0, mu/4 and mu/2.
    Visibility(Common),
    /// Check the binomial expansion against direct operator application.
    Oracle(Common),
    /// Parse and validate a config file.
    ValidateConfig(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML config file.
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Run directory; defaults to the config's output.dir or runs/<fingerprint>.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    trajectories: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.run.seed = seed;
        }
        if let Some(n) = self.trajectories {
            cfg.run.trajectories = n;
        }
        if let Some(f) = self.format {
            cfg.output.format = match f {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> Result<i32, Error> {
    match command {
        Command::Calibrate(c) => calibrate(&c),
        Command::Emerge(c) => emerge(&c),
        Command::Visibility(c) => visibility(&c),
        Command::Oracle(c) => oracle(&c),
        Command::ValidateConfig(c) => {
            let cfg = c.load()?;
            c.say(format!("ok {} fingerprint {}", c.config.display(), cfg.fingerprint()));
            Ok(EXIT_OK)
        }
    }
}

fn run_dir(c: &Common, cfg: &ExperimentConfig) -> PathBuf {
    output_dir(cfg, c.out.as_deref())
}

fn calibrate(c: &Common) -> Result<i32, Error> {
    let cfg = c.load()?;
    let (report, records) = calibration_scan(&cfg)?;
    let dir = write_run(&run_dir(c, &cfg), &cfg, &records, &report, cfg.output.format)?;
    for f in &report.fits {
        match (&f.fit, &f.rejected) {
            (Some(fit), _) => c.say(format!(
                "trajectory {}: delta {:.6} visibility {:.4} rms {:.3}",
                f.trajectory, fit.delta, fit.visibility, fit.rms_residual
            )),
            (None, Some(why)) => eprintln!("trajectory {}: fit rejected: {why}", f.trajectory),
            (None, None) => {}
        }
    }
    c.say(format!("wrote {}", dir.display()));
    let truncated = records.iter().filter(|r| r.truncated()).count();
    if truncated > 0 {
        eprintln!("{truncated} trajectories ran out of photons");
    }
    Ok(if report.rejected() > 0 || truncated > 0 { EXIT_NUMERICAL } else { EXIT_OK })
}

fn emerge(c: &Common) -> Result<i32, Error> {
    let cfg = c.load()?;
    let (summary, records) = field_emergence_report(&cfg)?;
    let dir = write_run(&run_dir(c, &cfg), &cfg, &records, &summary, cfg.output.format)?;
    c.say(format!(
        "{} trajectories, phase uniformity p = {:.3}, settling spread {:.4} rad",
        summary.trajectories, summary.phase_uniformity_p, summary.settling_std
    ));
    c.say(format!("wrote {}", dir.display()));
    let truncated = records.iter().filter(|r| r.truncated()).count();
    if truncated > 0 {
        eprintln!("{truncated} trajectories ran out of photons");
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

fn visibility(c: &Common) -> Result<i32, Error> {
    let cfg = c.load()?;
    let mu = cfg.counts.mean().round() as u64;
    let points = visibility_sweep(&cfg, &[0, mu / 4, mu / 2])?;
    for p in &points {
        c.say(format!(
            "n_min {:>5}: visibility {:.4} expected {:.4} ({:+.1}%)",
            p.n_min,
            p.fitted,
            p.expected,
            100.0 * (p.fitted - p.expected) / p.expected
        ));
    }
    let dir = write_summary(&run_dir(c, &cfg), &cfg, cfg.run.trajectories as usize, &points)?;
    c.say(format!("wrote {}", dir.display()));
    Ok(EXIT_OK)
}

fn oracle(c: &Common) -> Result<i32, Error> {
    let cfg = c.load()?;
    let cases = oracle_suite()?;
    let worst = cases.iter().map(|k| k.infidelity).fold(0.0, f64::max);
    for k in &cases {
        c.say(format!(
            "m {:>6} n1 {:>2} n2 {:>2} theta {:+.2}: infidelity {:.2e}",
            k.m, k.n1, k.n2, k.theta, k.infidelity
        ));
    }
    if let Some(out) = &c.out {
        write_summary(&output_dir(&cfg, Some(out)), &cfg, 0, &cases)?;
    }
    c.say(format!("max infidelity {worst:.2e}"));
    Ok(if worst <= ORACLE_TOLERANCE { EXIT_OK } else { EXIT_NUMERICAL })
}

