//! `plrmat`: validate setups, sample reduced r-matrices and run the residual
//! suites from the command line.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plrmat_core::catalog;
use plrmat_core::specfile::SpecFile;
use plrmat_core::suite::{self, Suite, SuiteConfig};
use plrmat_core::Error;

const EXIT_CODES: &str = "\
Exit codes:
  0  success (for verify: every selected check passed)
  1  verify ran but at least one check failed
  2  invalid command line
  3  file could not be read or written
  4  input could not be parsed
  5  setup failed validation
  6  no second-class sample point found
  7  constraint matrix degenerate at an evaluation point
  8  unknown catalog entry";

#[derive(Parser)]
#[command(name = "plrmat", version, about = "Poisson-Lie dynamical r-matrices by Dirac reduction", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a setup satisfies every structural hypothesis.
    #[command(after_help = EXIT_CODES)]
    Validate {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Sample points and dump C, rho and r* at each.
    #[command(after_help = EXIT_CODES)]
    Reduce {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        knobs: Knobs,
        #[command(flatten)]
        out: Output,
    },
    /// Run residual suites on the reduced r-matrix.
    #[command(after_help = EXIT_CODES)]
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[command(flatten)]
        knobs: Knobs,
        #[command(flatten)]
        out: Output,
    },
    /// List built-in setups or export one as a spec file.
    #[command(after_help = EXIT_CODES)]
    Catalog {
        #[arg(long, conflicts_with = "export")]
        list: bool,
        #[arg(long, value_name = "NAME")]
        export: Option<String>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Spec file (JSON).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Name of a built-in setup.
    #[arg(long)]
    catalog: Option<String>,
}

#[derive(Args)]
struct Knobs {
    /// Number of sample points.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Step for the dynamical derivatives.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Residual tolerance for PL-CDYBE, triangularity and equivariance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    cond_threshold: Option<f64>,
}

#[derive(Args)]
struct Output {
    /// Write the result here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Cdybe,
    Equivariance,
    Dirac,
    Jacobi,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Cdybe => Suite::Cdybe,
            SuiteArg::Equivariance => Suite::Equivariance,
            SuiteArg::Dirac => Suite::Dirac,
            SuiteArg::Jacobi => Suite::Jacobi,
            SuiteArg::All => Suite::All,
        }
    }
}

enum Failure {
    Io(String),
    Core(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InputShape(_) => 4,
        Error::SamplingExhausted { .. } => 6,
        Error::CDegenerate { .. } => 7,
        Error::UnknownEntry(_) => 8,
        _ => 5,
    }
}

fn load(source: &Source) -> Result<SpecFile, Failure> {
    match (&source.input, &source.catalog) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Ok(SpecFile::from_json(&text)?)
        }
        (None, Some(name)) => Ok(catalog::entry(name)?.spec),
        (None, None) => unreachable!("clap requires one source"),
    }
}

fn config(spec: &SpecFile, k: &Knobs) -> SuiteConfig {
    let mut cfg = SuiteConfig::from_spec(spec);
    if let Some(n) = k.samples {
        cfg.num_points = n;
    }
    if let Some(s) = k.seed {
        cfg.seed = s;
    }
    if let Some(h) = k.fd_step {
        cfg.fd_step = h;
    }
    if let Some(t) = k.tol {
        cfg.tolerance = t;
    }
    if let Some(c) = k.cond_threshold {
        cfg.cond_threshold = c;
    }
    cfg
}

fn emit(out: &Output, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { source, out } => {
            let spec = load(&source)?;
            let setup = spec.to_setup()?;
            emit(&out, &suite::to_canonical_json(&setup.diagnostics))
        }
        Command::Reduce { source, knobs, out } => {
            let spec = load(&source)?;
            let report = suite::run_reduce(&spec, &config(&spec, &knobs))?;
            emit(&out, &report.to_json())
        }
        Command::Verify { source, suite, knobs, out } => {
            let spec = load(&source)?;
            let report = suite::run_verify(&spec, &config(&spec, &knobs), suite.into())?;
            emit(&out, &report.to_json())?;
            for r in &report.reports {
                eprintln!(
                    "{:<24} max {:.3e}  tol {:.1e}  {}",
                    format!("{:?}", r.equation_id),
                    r.max_residual,
                    r.tolerance,
                    if r.pass { "pass" } else { "FAIL" }
                );
            }
            for c in &report.controls {
                let verdict = if !c.applicable {
                    "n/a"
                } else if c.pass {
                    "pass"
                } else {
                    "FAIL"
                };
                eprintln!("{:<24} {verdict}", c.name);
            }
            if report.summary.pass {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Command::Catalog { list, export, out } => {
            if let Some(name) = export {
                emit(&out, &catalog::entry(&name)?.spec.to_json())
            } else {
                let _ = list;
                let lines: Vec<String> = catalog::list_entries()
                    .iter()
                    .map(|n| format!("{n}\t{}", catalog::entry(n).map(|e| e.notes).unwrap_or_default()))
                    .collect();
                emit(&out, &lines.join("\n"))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
