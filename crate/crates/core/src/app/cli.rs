use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::diagnostics::{ellipse_sweep, infsup_test, terzaghi_pressure};
use crate::error::Result;

use super::config::parse_config;
use super::output::{write_infsup_csv, write_sweep_csv};
use super::run::run_config;
use super::scenario::sweep_config;

#[derive(Debug, Parser)]
#[command(name = "ghostmpm", version, about = "Implicit u-p material point solver with ghost stabilisation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a time-dependent simulation.
    Run {
        config: PathBuf,
        /// Output directory (overrides the configuration).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Condition numbers of the A and C blocks over body translations.
    Conditioning {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the analytical consolidation pressure P(Z, T).
    Oracle {
        #[arg(long = "Z", allow_negative_numbers = true)]
        z: f64,
        #[arg(long = "T", allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Minimum inf-sup eigenvalues over a sequence of refinements.
    Infsup {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config, out } => {
            let mut cfg = parse_config(&config)?;
            if let Some(dir) = out {
                cfg.output.directory = dir;
            }
            let summary = run_config(&cfg, true)?;
            let iters: usize = summary.steps.iter().map(|s| s.iterations).sum();
            println!(
                "{} steps, {} Newton iterations, output in {}",
                summary.steps.len(),
                iters,
                cfg.output.directory.display()
            );
        }
        Command::Conditioning { config, out } => {
            let cfg = parse_config(&config)?;
            let dir = out.unwrap_or(cfg.output.directory.clone());
            let rows = ellipse_sweep(&sweep_config(&cfg))?;
            let path = dir.join("conditioning.csv");
            write_sweep_csv(&path, &rows)?;
            println!("{} sweep rows written to {}", rows.len(), path.display());
        }
        Command::Oracle { z, t, tol } => {
            if !(0.0..=1.0).contains(&z) || !(t >= 0.0) {
                return Err(crate::Error::Parse("need 0 <= Z <= 1 and T >= 0".into()));
            }
            println!("{}", terzaghi_pressure(z, t, tol));
        }
        Command::Infsup { config, out } => {
            let cfg = parse_config(&config)?;
            let dir = out.unwrap_or(cfg.output.directory.clone());
            let levels = cfg.infsup.clone().unwrap_or_default().levels;
            let rows = infsup_test(&levels)?;
            for r in &rows {
                println!(
                    "{:?} n={} min_eigenvalue={:.6e} zero_modes={}",
                    r.pairing, r.level, r.min_eigenvalue, r.zero_modes
                );
            }
            write_infsup_csv(dir.join("infsup.csv"), &rows)?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
///
/// Returns 0 on success, 2 on usage errors and 1 on runtime errors.
pub fn cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(parsed.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
