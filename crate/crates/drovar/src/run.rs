use std::fmt;
use std::path::PathBuf;

use drovar_core::oracle::primal_sup_grid;
use drovar_core::robust::{self, RobustConfig};
use drovar_core::solver::{mean_bound, variance_bound};
use drovar_core::{DecisionConstraint, FDivergenceFamily, OracleConfig, SolverConfig};

use crate::error::{CliError, Result, EXIT_GAP};
use crate::ingest::{ingest_bound_csv, ingest_scenario_csv};
use crate::report::{round12, to_json, Num, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    BoundMean,
    BoundVariance,
    Sweep,
    OracleCheck,
    Robust,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::BoundMean => "bound-mean",
            Command::BoundVariance => "bound-variance",
            Command::Sweep => "sweep",
            Command::OracleCheck => "oracle-check",
            Command::Robust => "robust",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaSpec {
    Single(f64),
    Sweep { min: f64, max: f64, steps: usize },
}

impl EtaSpec {
    /// Linearly spaced radii, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        match *self {
            EtaSpec::Single(eta) => vec![eta],
            EtaSpec::Sweep { min, max, steps } => (0..steps)
                .map(|k| min + (max - min) * k as f64 / (steps - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub divergence: FDivergenceFamily,
    pub eta: EtaSpec,
    pub solver: SolverConfig,
    pub curve_out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub constraint: Option<(f64, f64)>,
    pub tol: f64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        match (self.command, self.eta) {
            (Command::Sweep, EtaSpec::Sweep { min, max, steps }) => {
                if !(min < max) || steps < 2 {
                    return Err(CliError::Config("sweep needs eta-min < eta-max and steps >= 2".into()));
                }
            }
            (Command::Sweep, EtaSpec::Single(_)) => {
                return Err(CliError::Config("sweep needs --eta-min, --eta-max and --steps".into()));
            }
            (cmd, EtaSpec::Sweep { .. }) => {
                return Err(CliError::Config(format!("{cmd} takes a single --eta")));
            }
            _ => {}
        }
        for eta in self.eta.values() {
            self.divergence.check_eta(eta)?;
        }
        if self.curve_out.is_some() && self.command != Command::Sweep {
            return Err(CliError::Config("--curve-out is only used by sweep".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(CliError::Config("--tol must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Standard output text and process exit code of a successful run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, exit_code: 0 }
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let family = &config.divergence;
    match config.command {
        Command::BoundMean => {
            let (p, data) = ingest_bound_csv(&config.input)?;
            let eta = single(config);
            let r = mean_bound(data.rho(), &p, family, eta, &config.solver)?;
            Ok(Outcome::ok(to_json(&Record::new(&r, eta, family))))
        }
        Command::BoundVariance => {
            let (p, data) = ingest_bound_csv(&config.input)?;
            let eta = single(config);
            let r = variance_bound(&data, &p, family, eta, &config.solver)?;
            Ok(Outcome::ok(to_json(&Record::new(&r, eta, family))))
        }
        Command::Sweep => {
            let (p, data) = ingest_bound_csv(&config.input)?;
            let mut records = Vec::new();
            for eta in config.eta.values() {
                let r = variance_bound(&data, &p, family, eta, &config.solver)?;
                records.push(Record::new(&r, eta, family));
            }
            if let Some(path) = &config.curve_out {
                write_curve(path, &records)?;
            }
            Ok(Outcome::ok(to_json(&records)))
        }
        Command::OracleCheck => {
            let (p, data) = ingest_bound_csv(&config.input)?;
            let eta = single(config);
            let mut oracle_config = OracleConfig::for_atoms(p.len());
            if let Some(grid) = config.grid {
                oracle_config.grid_per_dim = grid;
            }
            let oracle = primal_sup_grid(&data, &p, family, eta, &oracle_config)?;
            let r = variance_bound(&data, &p, family, eta, &config.solver)?;
            let gap = (r.value - oracle.value).abs();
            let mut record = Record::new(&r, eta, family);
            record.oracle_value = Some(Num(oracle.value));
            record.gap = Some(Num(gap));
            Ok(Outcome {
                stdout: to_json(&record),
                exit_code: if gap > config.tol { EXIT_GAP } else { 0 },
            })
        }
        Command::Robust => {
            let scenarios = ingest_scenario_csv(&config.input)?;
            let eta = single(config);
            let d = scenarios.dim();
            let constraint = match config.constraint {
                Some((lo, hi)) => DecisionConstraint::uniform_box(lo, hi, d),
                None => DecisionConstraint::Simplex,
            };
            let robust_config = RobustConfig {
                solver: config.solver,
                ..RobustConfig::default()
            };
            let sol = robust::robust_minimize_with(&scenarios, &constraint, family, eta, &robust_config)?;
            let r = robust::robust_bound(&sol.x, &scenarios, family, eta, &config.solver)?;
            let mut record = Record::new(&r, eta, family);
            record.x = Some(sol.x.iter().map(|&v| Num(v)).collect());
            Ok(Outcome::ok(to_json(&record)))
        }
    }
}

fn single(config: &RunConfig) -> f64 {
    match config.eta {
        EtaSpec::Single(eta) => eta,
        EtaSpec::Sweep { min, .. } => min,
    }
}

fn write_curve(path: &std::path::Path, records: &[Record]) -> Result<()> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["eta", "bound"]).map_err(csv_err)?;
    for r in records {
        w.write_record([fmt_num(r.eta.0), fmt_num(r.bound.0)]).map_err(csv_err)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        round12(x).to_string()
    } else {
        String::new()
    }
}
