use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use morseflow::cli::{self, format::render, Fault, Options, Scenario, VerifyOptions};
use morseflow::complex::Coefficients;
use morseflow::{Error, Result};

#[derive(Parser)]
#[command(name = "morseflow", version, about = "Morse homology of functions on implicit surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Coefficient ring, overriding the scenario.
    #[arg(long, global = true, value_parser = ["z", "z2"])]
    coeff: Option<String>,
    /// Seed for perturbation suggestions and random tilts.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Multiply the integrator and bisection tolerances.
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
    #[arg(long, global = true, hide = true)]
    fault: Option<Fault>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a scenario file.
    Run { file: PathBuf },
    /// Run the acceptance scenarios over the catalog.
    VerifyAll {
        /// Directory holding tetrahedron.json and csaszar.json.
        #[arg(long)]
        triangulations: Option<PathBuf>,
    },
    /// Write trajectory, stable-curve and glued-cycle polylines as JSON.
    DumpTrajectories { file: PathBuf },
}

fn set_threads() -> Result<()> {
    let Ok(v) = std::env::var("MORSEFLOW_THREADS") else { return Ok(()) };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| Error::Invalid(format!("MORSEFLOW_THREADS={v}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Invalid(e.to_string()))
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn options(cli: &Cli, file: &Path) -> Result<Options> {
    let coeff = cli.coeff.as_deref().map(str::parse::<Coefficients>).transpose()?;
    Ok(Options {
        coeff,
        seed: cli.seed,
        tol_scale: cli.tol_scale,
        fault: cli.fault,
        base_dir: file.parent().map(Path::to_path_buf),
    })
}

fn main_inner(cli: &Cli) -> Result<i32> {
    set_threads()?;
    match &cli.command {
        Command::Run { file } => {
            let opts = options(cli, file)?;
            let outcome = match Scenario::load(file) {
                Ok(s) => cli::run(s, opts),
                Err(e) => {
                    eprintln!("morseflow: {e}");
                    return Ok(e.exit_code());
                }
            };
            emit(&render(&outcome.report)?, cli.report.as_deref())?;
            if let Some(msg) = outcome.report["error"]["message"].as_str() {
                eprintln!("morseflow: {msg}");
            }
            Ok(outcome.exit_code)
        }
        Command::DumpTrajectories { file } => {
            let v = cli::dump::dump(Scenario::load(file)?, options(cli, file)?)?;
            emit(&render(&v)?, cli.report.as_deref())?;
            Ok(0)
        }
        Command::VerifyAll { triangulations } => {
            let opts = VerifyOptions { triangulations: triangulations.clone(), seed: cli.seed, fault: cli.fault };
            let summary = cli::verify_all(&opts)?;
            print!("{}", summary.table());
            if let Some(p) = &cli.report {
                emit(&render(&cli::format::to_value(&summary))?, Some(p))?;
            }
            Ok(summary.exit_code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = main_inner(&cli).unwrap_or_else(|e| {
        eprintln!("morseflow: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
