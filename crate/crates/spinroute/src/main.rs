use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinroute::config::{Overrides, RunConfig};
use spinroute::core::metrics::TourConvention;
use spinroute::run::{self, Compiled};
use spinroute::schedule_io::ScheduleFile;
use spinroute::{Error, Result};

/// Shuttling schedules for spin-qubit syndrome extraction.
///
/// Exit status: 0 success, 1 verification failure, 2 no schedule exists for
/// the instance, 3 invalid input.
#[derive(Parser)]
#[command(name = "spinroute", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a syndrome-extraction schedule.
    Schedule {
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        out: Output,
        /// Write JSON instead of the line format.
        #[arg(long)]
        json: bool,
    },
    /// Emit a noisy memory-experiment circuit.
    Emit {
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        input: ScheduleInput,
        #[command(flatten)]
        out: Output,
        /// TICK at every time-slice boundary.
        #[arg(long)]
        debug_ticks: bool,
    },
    /// Check a schedule: structure, noiseless determinism and shuttle phase flips.
    Verify {
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        input: ScheduleInput,
        #[command(flatten)]
        out: Output,
    },
    /// Shuttle counts and overhead against the collision-free bound.
    Stats {
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        input: ScheduleInput,
        #[command(flatten)]
        out: Output,
        /// Compile every `*.code` file in this directory instead.
        #[arg(long, conflicts_with = "schedule")]
        corpus: Option<PathBuf>,
        #[arg(long)]
        csv: bool,
        #[arg(long, value_enum, default_value_t = Convention::Closed)]
        convention: Convention,
    },
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScheduleInput {
    /// Use this schedule file instead of compiling one.
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Closed,
    Open,
}

impl From<Convention> for TourConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Closed => TourConvention::Closed,
            Convention::Open => TourConvention::Open,
        }
    }
}

fn write(out: &Output, text: &str) -> Result<()> {
    match &out.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// The schedule to work on: loaded from `input` or freshly compiled. A loaded
/// file's embedded config is the base that flags override.
fn prepare(overrides: &Overrides, input: &ScheduleInput) -> Result<(Compiled, ScheduleFile)> {
    match &input.schedule {
        Some(path) => {
            let file = run::load_schedule(path)?;
            let base = file.config.clone().unwrap_or_default();
            let config = RunConfig::resolve_over(base, overrides)?;
            let instance = config.instance()?;
            let compiled = Compiled { config, instance, schedule: file.schedule.clone() };
            Ok((compiled, file))
        }
        None => {
            let compiled = run::compile(&RunConfig::resolve(overrides)?)?;
            let file = compiled.file();
            Ok((compiled, file))
        }
    }
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Schedule { overrides, out, json } => {
            let compiled = run::compile(&RunConfig::resolve(&overrides)?)?;
            write(&out, &run::schedule_output(&compiled.file(), json)?)?;
        }
        Command::Emit { overrides, input, out, debug_ticks } => {
            let (c, file) = prepare(&overrides, &input)?;
            write(&out, &run::emit_output(&c.config, &c.instance.code, &file, debug_ticks)?)?;
        }
        Command::Verify { overrides, input, out } => {
            let (c, file) = prepare(&overrides, &input)?;
            let report = run::verify(&c.config, &c.instance.code, &file)?;
            write(&out, &report.text)?;
            if !report.passed {
                return Ok(1);
            }
        }
        Command::Stats { overrides, input, out, corpus, csv, convention } => {
            let (config, runs) = match corpus {
                Some(dir) => {
                    let config = RunConfig::resolve(&overrides)?;
                    let runs = run::compile_corpus(&config, Path::new(&dir))?;
                    (config, runs)
                }
                None => {
                    let (c, _) = prepare(&overrides, &input)?;
                    (c.config.clone(), vec![c])
                }
            };
            let table = run::stats_table(&runs, convention.into())?;
            write(&out, &run::stats_output(&config, &table, csv)?)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("spinroute: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
