//! Scenario runner behind the `betti-index` binary.

pub mod config;
pub mod runner;

pub use config::{Overrides, Scenario, Task};
pub use runner::{run_scenario, write_summary, ScenarioReport};

use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "betti-index", version, about = "Index versus first Betti number: checks, spectra and certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file(s); repeat for several scenarios.
    #[arg(long, global = true, required = false)]
    pub config: Vec<PathBuf>,
    /// Output directory (overrides the scenarios' `out_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Multiplies every configured resolution.
    #[arg(long, global = true)]
    pub resolution_scale: Option<f64>,
    /// Replaces the scenarios' sampling seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Multiplies every tolerance.
    #[arg(long, global = true)]
    pub tol_scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Ambient model identities and hypersurface geometry residuals.
    Identities,
    /// Jacobi spectrum and Morse index.
    Spectrum,
    /// Both sides of the test-function identities.
    VerifyIdentity,
    /// Concentration certificate.
    Certify,
    /// Pointwise margins of the applications.
    Margins,
    /// Borderline checks in complex projective space.
    Borderline,
    /// Theorem constants and the index bound.
    Bounds,
    /// Every task listed in the scenario (or every compatible task).
    All,
}

impl Command {
    fn task(self) -> Option<Task> {
        match self {
            Command::Identities => Some(Task::Identities),
            Command::Spectrum => Some(Task::Spectrum),
            Command::VerifyIdentity => Some(Task::QIdentity),
            Command::Certify => Some(Task::Certificate),
            Command::Margins => Some(Task::Margins),
            Command::Borderline => Some(Task::Borderline),
            Command::Bounds => Some(Task::BoundTable),
            Command::All => None,
        }
    }
}

/// Parses arguments, runs every scenario, and returns the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    if cli.config.is_empty() {
        eprintln!("error: at least one --config is required");
        return EXIT_CONFIG;
    }
    let overrides = Overrides { seed: cli.seed, resolution_scale: cli.resolution_scale, tol_scale: cli.tol_scale };
    let requested = cli.command.task();

    // everything is parsed and validated before any file is written
    let mut prepared = Vec::new();
    for path in &cli.config {
        let prepared_one = Scenario::load(path).and_then(|mut sc| {
            sc.apply(&overrides);
            let ambient = sc.validate(requested)?;
            Ok((sc, ambient))
        });
        match prepared_one {
            Ok(p) => prepared.push(p),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        }
    }

    let default_out = PathBuf::from("reports");
    let summary_dir = cli
        .out
        .clone()
        .or_else(|| prepared[0].0.scenario.out_dir.clone())
        .unwrap_or_else(|| default_out.clone());
    let mut reports = Vec::new();
    for (sc, ambient) in &prepared {
        let out = cli.out.clone().or_else(|| sc.scenario.out_dir.clone()).unwrap_or_else(|| default_out.clone());
        let tasks = requested.map(|t| vec![t]).unwrap_or_else(|| sc.tasks(ambient));
        match run_scenario(sc, ambient, &tasks, &out) {
            Ok((report, artifacts)) => {
                let verdict = if report.pass { "pass" } else { "FAIL" };
                println!("{}: {verdict} ({})", report.scenario, artifacts.report.display());
                for e in &report.errors {
                    eprintln!("  {e}");
                }
                reports.push(report);
            }
            Err(e) => {
                eprintln!("{}: error: {e}", sc.scenario.id);
                return EXIT_FAIL;
            }
        }
    }
    if let Err(e) = write_summary(&summary_dir.join("summary.csv"), &reports) {
        eprintln!("error: {e}");
        return EXIT_FAIL;
    }
    if reports.iter().all(|r| r.pass) {
        0
    } else {
        EXIT_FAIL
    }
}
