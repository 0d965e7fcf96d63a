//! `deltanls`: scenario-driven runs of the point-interaction NLS solvers.
//!
//! Exit status: 0 success, 2 configuration error, 3 numerical failure,
//! 4 verification failure, 1 i/o error.

mod run;
mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use deltanls::verify::Profile;

use run::{Failure, Report};
use scenario::{ConfigError, Mode, Scenario};

#[derive(Parser, Debug)]
#[command(name = "deltanls", version, about = "NLS with a point-concentrated nonlinearity in d = 1, 2, 3")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (strict JSON)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for CSV/JSON artifacts
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = ToleranceProfile::Default)]
    tolerance_profile: ToleranceProfile,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Solve for the charge and reconstruct observables and snapshots
    Evolve,
    /// Eigenvalue of the linear point interaction over an α sweep
    Spectrum,
    /// Mass and energy along the standing-wave family
    StandingWave,
    /// Graded-mesh run toward a blow-up time with a rate fit
    Blowup,
    /// Shrinking-potential NLS against the point limit
    Approx,
    /// Acceptance criteria, one PASS/FAIL line each
    Verify,
}

impl Command {
    fn mode(self) -> Mode {
        match self {
            Command::Evolve => Mode::Evolve,
            Command::Spectrum => Mode::Spectrum,
            Command::StandingWave => Mode::StandingWave,
            Command::Blowup => Mode::Blowup,
            Command::Approx => Mode::Approx,
            Command::Verify => Mode::Verify,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ToleranceProfile {
    Default,
    Strict,
}

fn load(cli: &Cli, mode: Mode) -> Result<Scenario, Failure> {
    let Some(path) = &cli.config else {
        if mode == Mode::Verify {
            return scenario::parse(r#"{"name": "verify"}"#, mode).map_err(Failure::Config);
        }
        return Err(Failure::Config(ConfigError::constraint("--config", format!("`{mode}` needs a scenario file"))));
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    scenario::parse(&text, mode).map_err(Failure::Config)
}

fn write(out: &Path, rep: &Report) -> Result<(), Failure> {
    fs::create_dir_all(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    for a in &rep.artifacts {
        let p = out.join(&a.name);
        fs::write(&p, &a.contents).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config(ConfigError::constraint("--threads", "must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
    }
    let profile = match cli.tolerance_profile {
        ToleranceProfile::Default => Profile::Default,
        ToleranceProfile::Strict => Profile::Strict,
    };
    let sc = load(cli, cli.command.mode())?;
    let rep = run::run(&sc, profile)?;
    for l in &rep.lines {
        println!("{l}");
    }
    write(&cli.out, &rep)?;
    for a in &rep.artifacts {
        println!("wrote {}", cli.out.join(&a.name).display());
    }
    match rep.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("deltanls: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
