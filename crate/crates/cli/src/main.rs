//! `nhreduce` command-line front end.

mod compare;
mod config;
mod csvio;
mod report;
mod run;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use compare::{full_level, Mode};
use config::RunConfig;
use report::ReportDoc;
use run::{CmdResult, Failure};

#[derive(Parser)]
#[command(name = "nhreduce", version, about = "Discrete nonholonomic systems: simulation, verification and reduction checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured system, verify the result and write it as CSV.
    Simulate {
        /// Run configuration (JSON). Repeat with --sweep for a batch.
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
        /// Output CSV, or an output directory with --sweep.
        #[arg(long)]
        out: PathBuf,
        /// Verification tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Run every config in parallel, writing `<out>/<config stem>.csv`.
        #[arg(long)]
        sweep: bool,
    },
    /// Verify a trajectory CSV against the equations of its level.
    Check {
        #[arg(long)]
        config: PathBuf,
        csv: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Compare a full-level CSV with a reduced-level CSV.
    Compare {
        /// Configuration of the reduced level.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        full: PathBuf,
        reduced: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn load(path: &Path) -> CmdResult<RunConfig> {
    RunConfig::load(path).map_err(Failure::config)
}

fn read_csv(path: &Path, level: config::Level) -> CmdResult<nhreduce::DiscretePath> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display())).map_err(Failure::config)?;
    csvio::read_path(file, level)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::config)
}

fn report_path(out: &Path) -> PathBuf {
    out.with_extension("report.json")
}

fn simulate_one(config: &Path, out: &Path, tol: f64) -> CmdResult<()> {
    let cfg = load(config)?;
    let level = cfg.level().map_err(Failure::config)?;
    let (path, report) = run::simulate(&cfg, tol)?;
    let write = || -> anyhow::Result<()> {
        let file = File::create(out).with_context(|| format!("creating {}", out.display()))?;
        csvio::write_path(BufWriter::new(file), level, &path)?;
        let doc = ReportDoc::new(level.name(), &report);
        std::fs::write(report_path(out), doc.to_json() + "\n")?;
        log::info!("{}: {} rows written to {}", level.name(), path.len(), out.display());
        Ok(())
    };
    write().map_err(Failure::config)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::new(
            Failure::VERIFY,
            anyhow!(
                "verification failed at pair {} (tol {:.1e})",
                report.first_failure.unwrap_or(0),
                report.tol
            ),
        ))
    }
}

fn simulate(configs: &[PathBuf], out: &Path, tol: f64, sweep: bool) -> CmdResult<()> {
    if !sweep {
        if configs.len() != 1 {
            return Err(Failure::config(anyhow!("pass --sweep to run more than one config")));
        }
        return simulate_one(&configs[0], out, tol);
    }
    std::fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(Failure::config)?;
    let results: Vec<(PathBuf, CmdResult<()>)> = configs
        .par_iter()
        .map(|c| {
            let stem = c.file_stem().map(|s| s.to_os_string()).unwrap_or_else(|| "run".into());
            let target = out.join(stem).with_extension("csv");
            (c.clone(), simulate_one(c, &target, tol))
        })
        .collect();
    let mut worst: Option<Failure> = None;
    for (c, r) in results {
        match r {
            Ok(()) => println!("{}: ok", c.display()),
            Err(f) => {
                println!("{}: exit {} ({f})", c.display(), f.code);
                if worst.as_ref().is_none_or(|w| f.code > w.code) {
                    worst = Some(f);
                }
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn check(config: &Path, csv: &Path, tol: f64) -> CmdResult<()> {
    let cfg = load(config)?;
    let level = cfg.level().map_err(Failure::config)?;
    let path = read_csv(csv, level)?;
    let sys = run::system_for(&cfg, level)?;
    let report = nhreduce::verify_trajectory(&sys, &path, tol);
    println!("{}", ReportDoc::new(level.name(), &report));
    if report.passed {
        Ok(())
    } else {
        Err(Failure::new(Failure::VERIFY, anyhow!("trajectory does not satisfy the equations of motion")))
    }
}

fn compare_files(config: &Path, mode: Mode, full: &Path, reduced: &Path, tol: f64) -> CmdResult<()> {
    let cfg = load(config)?;
    let level = cfg.level().map_err(Failure::config)?;
    let full_path = read_csv(full, full_level(level))?;
    let reduced_path = read_csv(reduced, level)?;
    let c = compare::compare(&cfg, mode, &full_path, &reduced_path, tol)?;
    for note in &c.notes {
        println!("{note}");
    }
    println!("max deviation {:.3e} (tol {tol:.1e})", c.deviation);
    if c.deviation <= tol && c.checks_passed {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL");
        Err(Failure::new(Failure::DEVIATION, anyhow!("{mode:?} comparison exceeds tolerance")))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NHREDUCE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config, out, tol, sweep } => simulate(config, out, *tol, *sweep),
        Command::Check { config, csv, tol } => check(config, csv, *tol),
        Command::Compare { config, mode, full, reduced, tol } => compare_files(config, *mode, full, reduced, *tol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
