use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};

use drovar::{run, Command, EtaSpec, RunConfig};
use drovar_core::{FDivergenceFamily, SolverConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Subcommand {
    BoundMean,
    BoundVariance,
    Sweep,
    OracleCheck,
    Robust,
}

impl From<Subcommand> for Command {
    fn from(s: Subcommand) -> Self {
        match s {
            Subcommand::BoundMean => Command::BoundMean,
            Subcommand::BoundVariance => Command::BoundVariance,
            Subcommand::Sweep => Command::Sweep,
            Subcommand::OracleCheck => Command::OracleCheck,
            Subcommand::Robust => Command::Robust,
        }
    }
}

/// Worst-case mean and variance-penalized bounds over f-divergence balls.
#[derive(Debug, Parser)]
#[command(name = "drovar", version)]
#[command(group(ArgGroup::new("radius").required(true).args(["eta", "eta_min"])))]
struct Cli {
    #[arg(value_enum)]
    command: Subcommand,

    /// CSV with `rho`, `phi` (or `r1..rd` for robust) and optional `weight`
    #[arg(long)]
    input: PathBuf,

    /// `kl` or `alpha:<value>`
    #[arg(long)]
    divergence: FDivergenceFamily,

    /// Divergence radius
    #[arg(long)]
    eta: Option<f64>,

    #[arg(long, requires_all = ["eta_max", "steps"])]
    eta_min: Option<f64>,

    #[arg(long)]
    eta_max: Option<f64>,

    #[arg(long)]
    steps: Option<usize>,

    /// Write the (eta, bound) curve of a sweep to this CSV file
    #[arg(long)]
    curve_out: Option<PathBuf>,

    /// Oracle grid points per axis
    #[arg(long)]
    grid: Option<usize>,

    /// Box constraint on every decision coordinate (robust)
    #[arg(long = "box", num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, conflicts_with = "simplex")]
    box_bounds: Option<Vec<f64>>,

    /// Probability-simplex constraint (robust; the default)
    #[arg(long)]
    simplex: bool,

    /// Largest accepted oracle gap
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,

    #[arg(long)]
    grad_tol: Option<f64>,

    #[arg(long)]
    max_iters: Option<usize>,
}

impl Cli {
    fn into_config(self) -> RunConfig {
        let eta = match (self.eta, self.eta_min, self.eta_max, self.steps) {
            (Some(eta), ..) => EtaSpec::Single(eta),
            (None, Some(min), Some(max), Some(steps)) => EtaSpec::Sweep { min, max, steps },
            _ => unreachable!("clap enforces the radius group"),
        };
        let mut solver = SolverConfig::default();
        if let Some(t) = self.grad_tol {
            solver.grad_tol = t;
        }
        if let Some(m) = self.max_iters {
            solver.max_iters = m;
        }
        RunConfig {
            command: self.command.into(),
            input: self.input,
            divergence: self.divergence,
            eta,
            solver,
            curve_out: self.curve_out,
            grid: self.grid,
            constraint: self.box_bounds.map(|b| (b[0], b[1])),
            tol: self.tol,
        }
    }
}

fn main() -> ExitCode {
    let config = Cli::parse().into_config();
    match run(&config) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("drovar: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
