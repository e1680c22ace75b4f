//! Outer minimization `min_x sup_Q { E_Q[rho_x] + Var_Q[phi_x] }` for a small
//! decision vector `x`, with `rho_x = -<x, row>` and `phi_x = <x, row>` per
//! scenario row (a mean-variance portfolio with scenario returns).
//!
//! The inner supremum is the dual bound from [`crate::solver`]. Its dependence
//! on `x` is continuous but not known to be differentiable, so the outer
//! search is Nelder-Mead with every trial point projected onto the feasible
//! set. No global optimality is claimed.

use alloc::vec;
use alloc::vec::Vec;

use crate::divergences::FDivergenceFamily;
use crate::error::{Error, Result};
use crate::math;
use crate::measures::{check_len, EmpiricalMeasure, ProblemData};
use crate::solver::{self, BoundResult, SolverConfig};

pub const MAX_DIM: usize = 8;

/// `n` scenario rows of `d` columns with a baseline measure over the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioMatrix {
    values: Vec<f64>,
    dim: usize,
    weights: EmpiricalMeasure,
}

impl ScenarioMatrix {
    pub fn new(rows: Vec<Vec<f64>>, weights: EmpiricalMeasure) -> Result<Self> {
        check_len(rows.len(), weights.len())?;
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::Empty);
        }
        if dim > MAX_DIM {
            return Err(Error::InvalidConfig("at most 8 decision columns are supported"));
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            check_len(row.len(), dim)?;
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::NonFinite { index: i, value: v });
                }
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            values,
            dim,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.weights.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &EmpiricalMeasure {
        &self.weights
    }

    /// `rho_i = -<x, row_i>`, `phi_i = <x, row_i>`.
    pub fn problem_data(&self, x: &[f64]) -> Result<ProblemData> {
        check_len(x.len(), self.dim)?;
        let phi: Vec<f64> = (0..self.rows())
            .map(|i| math::sum(self.row(i).iter().zip(x).map(|(r, w)| r * w)))
            .collect();
        let rho = phi.iter().map(|v| -v).collect();
        ProblemData::new(rho, phi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecisionConstraint {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Simplex,
}

impl DecisionConstraint {
    /// The same interval on every coordinate.
    pub fn uniform_box(lo: f64, hi: f64, dim: usize) -> Self {
        DecisionConstraint::Box {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            DecisionConstraint::Box { lo, hi } => {
                check_len(lo.len(), dim)?;
                check_len(hi.len(), dim)?;
                if lo.iter().zip(hi).any(|(l, h)| !(l <= h) || !l.is_finite() || !h.is_finite()) {
                    return Err(Error::InfeasibleConstraint("box needs finite lo <= hi"));
                }
                Ok(())
            }
            DecisionConstraint::Simplex => Ok(()),
        }
    }

    /// Box centre or simplex barycentre.
    pub fn start(&self, dim: usize) -> Vec<f64> {
        match self {
            DecisionConstraint::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
            DecisionConstraint::Simplex => vec![1.0 / dim as f64; dim],
        }
    }

    /// Euclidean projection onto the feasible set.
    pub fn project(&self, x: &mut [f64]) {
        match self {
            DecisionConstraint::Box { lo, hi } => {
                for ((v, l), h) in x.iter_mut().zip(lo).zip(hi) {
                    *v = v.clamp(*l, *h);
                }
            }
            DecisionConstraint::Simplex => project_simplex(x),
        }
    }

    fn initial_step(&self, dim: usize, coord: usize) -> f64 {
        match self {
            DecisionConstraint::Box { lo, hi } => 0.25 * (hi[coord] - lo[coord]),
            DecisionConstraint::Simplex => 0.5 / dim as f64,
        }
    }
}

/// Sorted-threshold projection onto `{x >= 0, sum x = 1}`.
pub fn project_simplex(x: &mut [f64]) {
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let t = (cumulative - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Inner worst-case bound at decision `x`.
pub fn robust_bound(
    x: &[f64],
    scenarios: &ScenarioMatrix,
    family: &FDivergenceFamily,
    eta: f64,
    config: &SolverConfig,
) -> Result<BoundResult> {
    let data = scenarios.problem_data(x)?;
    solver::variance_bound(&data, scenarios.weights(), family, eta, config)
}

pub fn robust_objective(
    x: &[f64],
    scenarios: &ScenarioMatrix,
    family: &FDivergenceFamily,
    eta: f64,
) -> Result<f64> {
    Ok(robust_bound(x, scenarios, family, eta, &SolverConfig::default())?.value)
}

/// `E_P[rho_x] + Var_P[phi_x]` under the baseline.
pub fn nominal_objective(x: &[f64], scenarios: &ScenarioMatrix) -> Result<f64> {
    let data = scenarios.problem_data(x)?;
    let p = scenarios.weights();
    Ok(p.expect(data.rho())? + p.mean_var(data.phi())?.1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustConfig {
    pub solver: SolverConfig,
    pub max_iters: usize,
    pub diameter_tol: f64,
}

impl Default for RobustConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            max_iters: 500,
            diameter_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub start_value: f64,
    pub iterations: usize,
}

pub fn robust_minimize(
    scenarios: &ScenarioMatrix,
    constraint: &DecisionConstraint,
    family: &FDivergenceFamily,
    eta: f64,
) -> Result<RobustSolution> {
    robust_minimize_with(scenarios, constraint, family, eta, &RobustConfig::default())
}

/// Projected Nelder-Mead from the deterministic start of `constraint`.
pub fn robust_minimize_with(
    scenarios: &ScenarioMatrix,
    constraint: &DecisionConstraint,
    family: &FDivergenceFamily,
    eta: f64,
    config: &RobustConfig,
) -> Result<RobustSolution> {
    let d = scenarios.dim();
    constraint.validate(d)?;
    family.check_eta(eta)?;
    let eval = |x: &[f64]| -> Result<f64> {
        Ok(robust_bound(x, scenarios, family, eta, &config.solver)?.value)
    };

    let mut start = constraint.start(d);
    constraint.project(&mut start);
    let start_value = eval(&start)?;
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.clone(), start_value)];
    for c in 0..d {
        let mut v = start.clone();
        v[c] += constraint.initial_step(d, c);
        constraint.project(&mut v);
        let f = eval(&v)?;
        simplex.push((v, f));
    }

    let mut iterations = 0;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if iterations >= config.max_iters || diameter(&simplex) < config.diameter_tol {
            break;
        }
        iterations += 1;
        let worst = simplex.len() - 1;
        let centroid: Vec<f64> = (0..d)
            .map(|k| simplex[..worst].iter().map(|v| v.0[k]).sum::<f64>() / worst as f64)
            .collect();
        let toward = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst].0)
                .map(|(c, w)| c + t * (c - w))
                .collect();
            constraint.project(&mut x);
            x
        };
        let xr = toward(1.0);
        let fr = eval(&xr)?;
        if fr < simplex[0].1 {
            let xe = toward(2.0);
            let fe = eval(&xe)?;
            simplex[worst] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[worst - 1].1 {
            simplex[worst] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[worst].1 {
                let xc = toward(0.5);
                let fc = eval(&xc)?;
                (xc, fc)
            } else {
                let xc = toward(-0.5);
                let fc = eval(&xc)?;
                (xc, fc)
            };
            if fc < fr.min(simplex[worst].1) {
                simplex[worst] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = best.iter().zip(&v.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    constraint.project(&mut x);
                    v.1 = eval(&x)?;
                    v.0 = x;
                }
            }
        }
    }
    let (x, value) = simplex.swap_remove(0);
    Ok(RobustSolution {
        x,
        value,
        start_value,
        iterations,
    })
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|v| {
            math::sqrt(v.0.iter().zip(best).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        })
        .fold(0.0, f64::max)
}
