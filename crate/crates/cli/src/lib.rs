//! `topo` command-line driver: run a case, list the catalog, self-check.

mod checks;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use topo_core::io::{parse_entries, write_density_pgm, write_history_csv, Entry};
use topo_core::{
    build_structure, case_catalog, checkerboard_score, optimize, Error, RunConfig, RunManifest,
};

pub use checks::{run_checks, CheckOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;

pub const DENSITY_FILE: &str = "density.pgm";
pub const HISTORY_FILE: &str = "history.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(
    name = "topo",
    version,
    about = "2D minimum-compliance topology optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize one case and write density.pgm, history.csv and manifest.json.
    Run(RunArgs),
    /// List the benchmark cases.
    Cases,
    /// Run the numerical self-checks.
    Check {
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// `key = value` configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    nelx: Option<String>,
    #[arg(long)]
    nely: Option<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<String>,
}

/// Parse `args` (including the program name) and execute, returning the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(args, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`main_with_args`] with explicit output streams.
pub fn run_with_io<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match cli.command {
        Command::Cases => {
            for spec in case_catalog() {
                let _ = writeln!(
                    out,
                    "{}\t{} x {} m\t{}x{} elements\t{}",
                    spec.name,
                    spec.width,
                    spec.height,
                    spec.nelx,
                    spec.nely,
                    spec.support.describe()
                );
            }
            EXIT_OK
        }
        Command::Check { seed } => {
            let outcomes = run_checks(seed.unwrap_or(0));
            let mut failed = false;
            for c in &outcomes {
                let tag = if c.passed { "ok" } else { "FAIL" };
                failed |= !c.passed;
                let _ = writeln!(out, "{tag:<4} {:<24} {}", c.name, c.detail);
            }
            if failed {
                EXIT_SOLVER
            } else {
                EXIT_OK
            }
        }
        Command::Run(args) => match execute_run(&args) {
            Ok(summary) => {
                let _ = writeln!(out, "{summary}");
                EXIT_OK
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                exit_code(&e)
            }
        },
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SolverFailure { .. }
        | Error::Infeasible { .. }
        | Error::MultiplierNotFound { .. }
        | Error::UndefinedMetric(_) => EXIT_SOLVER,
        Error::Io { .. } => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

/// Config file entries with command-line flags replacing same-named keys.
fn resolve_config(args: &RunArgs) -> Result<RunConfig, Error> {
    let mut entries = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            parse_entries(&text)?
        }
        None => Vec::new(),
    };
    let flags = [
        ("case", &args.case),
        ("optimizer", &args.optimizer),
        ("nelx", &args.nelx),
        ("nely", &args.nely),
        ("seed", &args.seed),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            entries.retain(|e| e.key != key);
            entries.push(Entry {
                key: key.to_string(),
                value: v.clone(),
                line: 0,
            });
        }
    }
    RunConfig::resolve(&entries)
}

fn execute_run(args: &RunArgs) -> Result<String, Error> {
    let cfg = match resolve_config(args) {
        Ok(cfg) => cfg,
        // A missing config file is a usage problem, not a solver one.
        Err(Error::Io { path, source }) => {
            return Err(Error::Config {
                line: 0,
                message: format!("cannot read {}: {source}", path.display()),
            })
        }
        Err(e) => return Err(e),
    };
    let start = Instant::now();
    let structure = build_structure(&cfg)?;
    let run = optimize(&structure, &cfg).map_err(|f| f.source)?;
    let duration = start.elapsed().as_secs_f64();

    create_dir(&args.out)?;
    write_density_pgm(&run.density, structure.mesh(), &args.out.join(DENSITY_FILE))?;
    write_history_csv(&run, &args.out.join(HISTORY_FILE))?;
    let manifest = RunManifest {
        case: cfg.case.to_string(),
        config: cfg.to_map(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: duration,
        final_objective: run.final_objective(),
        final_volume_fraction: run.final_fraction(),
        iterations: run.iterations(),
        checkerboard_score: checkerboard_score(&run.density, structure.mesh()).ok(),
    };
    manifest.write(&args.out.join(MANIFEST_FILE))?;
    Ok(format!(
        "{} {}: objective {:.6e} J, volume fraction {:.6}, {} iterations, {:.2} s",
        cfg.case,
        cfg.optimizer.as_str(),
        manifest.final_objective,
        manifest.final_volume_fraction,
        manifest.iterations,
        duration
    ))
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}
