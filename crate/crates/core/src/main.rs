use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mhq::appshell::{self, AppError, Figure, Overrides};
use mhq::schemes::ReconstructionWeights;

/// Margenau-Hill work quasiprobabilities of a driven qutrit.
///
/// Thread count follows the MHQ_THREADS environment variable.
#[derive(Parser)]
#[command(name = "mhq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measured distributions p_END, p(f|i), p(f|not i) and the state tomography.
    ReproduceFig2(RunArgs),
    /// Quasiprobabilities z_if and the negativity.
    ReproduceFig3(RunArgs),
    /// Average work from the MHQ and TPM tables.
    ReproduceFig4(RunArgs),
    /// Random-parameter survey with equal-phase twins.
    Sweep(RunArgs),
    /// Invariant checks of every module; exit code 2 on failure.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration (defaults to the NV-centre reference run).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Repetitions per measured distribution.
    #[arg(long)]
    shots: Option<u64>,
    /// Midpoint steps for the stepped-propagator cross-check.
    #[arg(long)]
    steps: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides { out: self.out.clone(), seed: self.seed, shots: self.shots, steps: self.steps }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    appshell::init_threads()?;
    let (args, figure) = match &cli.command {
        Command::Selftest => {
            let report = appshell::run_selftest(ReconstructionWeights::default());
            print!("{}", report.render());
            return if report.passed() { Ok(()) } else { Err(AppError::Selftest) };
        }
        Command::ReproduceFig2(a) => (a, Some(Figure::Fig2)),
        Command::ReproduceFig3(a) => (a, Some(Figure::Fig3)),
        Command::ReproduceFig4(a) => (a, Some(Figure::Fig4)),
        Command::Sweep(a) => (a, None),
    };
    let cfg = appshell::load_config(args.config.as_deref(), &args.overrides())?;
    let written = match figure {
        Some(f) => appshell::cmd_reproduce(&cfg, f)?,
        None => appshell::cmd_sweep(&cfg)?,
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { appshell::EXIT_CONFIG } else { appshell::EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, AppError::Selftest) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
