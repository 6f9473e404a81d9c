//! `nongauss`: configuration-driven runner for the kernel, Osgood, regime and
//! solver studies.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid input, 3 the study
//! ran but its verdict is negative or inconclusive.

mod artifacts;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nongauss_core::config::RunConfig;
use nongauss_core::Error;

use artifacts::Artifacts;

/// Environment variable overriding `output.dir`.
pub const OUT_DIR_ENV: &str = "NONGAUSS_OUT_DIR";

#[derive(Parser)]
#[command(name = "nongauss", version, about = "Kernels, Osgood nonlinearities and mild solutions for time-fractional non-Gaussian equations")]
#[command(after_help = "Exit codes: 0 success, 1 runtime failure, 2 invalid input, 3 negative or inconclusive verdict.\n\
Output directory precedence: --out, then $NONGAUSS_OUT_DIR, then output.dir, then ./nongauss-out.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Run config with `section.key = value` lines
    #[arg(short, long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set grid.n=4096` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory
    #[arg(short, long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Mass, scaling and L_p slope checks for Z and Y
    KernelValidate(Common),
    /// Tabulate f^[k] and its lower comparison function, with junction and block checks
    OsgoodTable(Common),
    /// Critical exponent, blow-up condition and global window per parameter tuple
    RegimeClassify(Common),
    /// Picard iteration for the mild solution
    Simulate(Common),
    /// Refinement ladder for the first-iterate lower bound, with the f = 0 control
    BlowupStudy(Common),
    /// Small-data Picard contraction, decay slope and super-solution check
    GlobalStudy(Common),
    /// Lower bound of S(t)u0 on the shrinking annulus for several phi
    AnnulusCheck(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::KernelValidate(_) => "kernel-validate",
            Command::OsgoodTable(_) => "osgood-table",
            Command::RegimeClassify(_) => "regime-classify",
            Command::Simulate(_) => "simulate",
            Command::BlowupStudy(_) => "blowup-study",
            Command::GlobalStudy(_) => "global-study",
            Command::AnnulusCheck(_) => "annulus-check",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::KernelValidate(c)
            | Command::OsgoodTable(c)
            | Command::RegimeClassify(c)
            | Command::Simulate(c)
            | Command::BlowupStudy(c)
            | Command::GlobalStudy(c)
            | Command::AnnulusCheck(c) => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Inconclusive,
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Domain(_) | Error::Precondition(_) | Error::Resolution(_) => {
                Failure::Validation(e.to_string())
            }
            Error::Evaluation { .. } | Error::Consistency(_) | Error::Io(_) => Failure::Runtime(e.to_string()),
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    for o in &common.overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

fn out_dir(common: &Common, cfg: &RunConfig) -> PathBuf {
    if let Some(dir) = &common.out {
        return dir.clone();
    }
    if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    PathBuf::from(cfg.get("output.dir").unwrap_or("nongauss-out"))
}

fn run(cmd: &Command) -> Result<Outcome, Failure> {
    let common = cmd.common();
    let cfg = load_config(common)?;
    let mut out = Artifacts::open(out_dir(common, &cfg), &cfg)?;
    let result = match cmd {
        Command::KernelValidate(_) => commands::kernel_validate(&cfg, &mut out),
        Command::OsgoodTable(_) => commands::osgood_table(&cfg, &mut out),
        Command::RegimeClassify(_) => commands::regime_classify(&cfg, &mut out),
        Command::Simulate(_) => commands::simulate(&cfg, &mut out),
        Command::BlowupStudy(_) => commands::blowup_study(&cfg, &mut out),
        Command::GlobalStudy(_) => commands::global_study_cmd(&cfg, &mut out),
        Command::AnnulusCheck(_) => commands::annulus_check(&cfg, &mut out),
    }?;
    let dir = out.dir().to_path_buf();
    out.finish(cmd.name(), &cfg, exit_code(result))?;
    println!("{}: {} ({})", cmd.name(), match result {
        Outcome::Pass => "ok",
        Outcome::Inconclusive => "verdict negative or inconclusive",
    }, dir.display());
    Ok(result)
}

fn exit_code(o: Outcome) -> i32 {
    match o {
        Outcome::Pass => 0,
        Outcome::Inconclusive => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(o) => ExitCode::from(exit_code(o) as u8),
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
