use std::path::PathBuf;
use std::process::ExitCode;

use aho_cli::commands;
use aho_cli::config::SweepConfig;
use aho_cli::error::CliError;
use aho_cli::table::Table;
use aho_verify as verify;
use clap::{Args, Parser, Subcommand};

/// Generalized anharmonic oscillator: closed forms and their oracles.
#[derive(Parser)]
#[command(name = "aho", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Expansion of (a† + a)^m over naively ordered powers.
    Order(GridArgs),
    /// Level spacings: first order, second order (m = 4), diagonalization.
    Spectra(GridArgs),
    /// ⟨α|a(t)|α⟩ from the perturbative operators and the exact propagator.
    Evolve(GridArgs),
    /// Pegg–Barnett phase-fluctuation parameters U, S, Q.
    Phase(GridArgs),
    /// Quadrature variance (ΔX)².
    Squeeze(GridArgs),
    /// Photon-number statistics.
    Stats(GridArgs),
    /// Aharonov–Anandan geometric phase.
    Geometric(GridArgs),
    /// Classical trajectories against RK4.
    Classical(GridArgs),
    /// Run the oracle-comparison suites.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Every grid flag takes a comma-separated list. Flags override `--config`.
#[derive(Args)]
struct GridArgs {
    /// Flat `key = v1, v2` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Radians.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Fock truncation; 0 picks one from the input amplitude.
    #[arg(long)]
    dim: Option<String>,
    #[arg(long = "N0")]
    n0: Option<String>,
    #[arg(long = "A")]
    amp: Option<String>,
    #[arg(long)]
    v0: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    stride: Option<String>,
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    lambda_prime: Option<String>,
    /// poisson, binomial or negbinomial.
    #[arg(long)]
    family: Option<String>,
    #[arg(long = "N")]
    big_n: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long = "W")]
    big_w: Option<String>,
    #[arg(long)]
    q: Option<String>,
}

impl GridArgs {
    fn into_config(self) -> Result<SweepConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                SweepConfig::from_text(&text)?
            }
            None => SweepConfig::default(),
        };
        let pairs = [
            ("format", self.format),
            ("out", self.out),
            ("m", self.m),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("theta", self.theta),
            ("t", self.t),
            ("n", self.n),
            ("dim", self.dim),
            ("N0", self.n0),
            ("A", self.amp),
            ("v0", self.v0),
            ("t_end", self.t_end),
            ("dt", self.dt),
            ("stride", self.stride),
            ("order", self.order),
            ("lambda_prime", self.lambda_prime),
            ("family", self.family),
            ("N", self.big_n),
            ("p", self.p),
            ("W", self.big_w),
            ("q", self.q),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        Ok(cfg)
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sweep(
    args: GridArgs,
    build: fn(&SweepConfig) -> Result<Table, CliError>,
) -> Result<bool, CliError> {
    let cfg = args.into_config()?;
    let table = build(&cfg)?;
    emit(&table.render(cfg.format, &cfg.echo())?, cfg.out.as_ref())?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Cmd::Order(a) => sweep(a, commands::order),
        Cmd::Spectra(a) => sweep(a, commands::spectra),
        Cmd::Evolve(a) => sweep(a, commands::evolve),
        Cmd::Phase(a) => sweep(a, commands::phase),
        Cmd::Squeeze(a) => sweep(a, commands::squeeze),
        Cmd::Stats(a) => sweep(a, commands::stats),
        Cmd::Geometric(a) => sweep(a, commands::geometric),
        Cmd::Classical(a) => sweep(a, commands::classical),
        Cmd::Verify { out } => {
            let (report, ok) = verify::run_report();
            emit(&report, out.as_ref())?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
