//! Deterministic minimization of the dual objectives.
//!
//! The search runs in coordinates `(s, beta, nu)` with `lambda = e^s`, so the
//! positivity constraint disappears and `s` is only clamped at
//! `ln(lambda_floor)`. Each step takes a quasi-Newton (BFGS) direction with
//! Armijo backtracking, falling back to steepest descent whenever the
//! curvature estimate stops producing descent. When the line search stalls,
//! a cyclic coordinate search with shrinking steps finishes the job, which
//! also covers objectives that are only C1 or have `+inf` regions.
//!
//! The dual infimum need not be attained: as `lambda -> 0` (after optimizing
//! `beta`) the objective tends to `g*(nu) + max_i (psi_i - nu*phi_i)`, the
//! unconstrained worst case. Bound solvers compare against that limit and
//! report [`Status::BoundaryLambda`] with the objective evaluated at
//! `lambda_floor` when it is not beaten.

use alloc::vec::Vec;

use crate::divergences::FDivergenceFamily;
use crate::dual::{ConjugatePair, Diagnostics, DualPoint, DualProblem, SquarePair, TiltResult};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::math::{self, exp, ln};
use crate::measures::{EmpiricalMeasure, ProblemData};

const ARMIJO_C1: f64 = 1e-4;
const SHRINK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 80;
const COORD_STEP_INIT: f64 = 0.1;
const COORD_STEP_MIN: f64 = 1e-10;
const MAX_POLISH_ROUNDS: usize = 8;
const STALL_STEPS: usize = 10;
const START_FACTORS: [f64; 7] = [0.1, 1.0, 10.0, 0.01, 100.0, 0.001, 1000.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub grad_tol: f64,
    pub rel_tol: f64,
    pub max_iters: usize,
    pub lambda_floor: f64,
    pub multistart_count: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-9,
            rel_tol: 1e-12,
            max_iters: 10_000,
            lambda_floor: 1e-12,
            multistart_count: 5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0 && self.grad_tol < 1e-3) {
            return Err(Error::InvalidConfig("grad_tol must lie in (0, 1e-3)"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig("rel_tol must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive"));
        }
        if !(self.lambda_floor > 0.0 && self.lambda_floor < 1e-6) {
            return Err(Error::InvalidConfig("lambda_floor must lie in (0, 1e-6)"));
        }
        if self.multistart_count == 0 || self.multistart_count > START_FACTORS.len() {
            return Err(Error::InvalidConfig("multistart_count must lie in 1..=7"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    BoundaryLambda,
    MaxIters,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::BoundaryLambda => "BoundaryLambda",
            Status::MaxIters => "MaxIters",
        }
    }
}

/// An objective over `(lambda, beta, nu)`, some of which may be held fixed.
pub trait DualObjective {
    /// Which of `(lambda, beta, nu)` the solver may move.
    fn free(&self) -> [bool; 3];
    fn value(&self, dp: &DualPoint) -> ExtReal;
    /// Gradient in `(lambda, beta, nu)`, or `None` where it does not exist.
    fn gradient(&self, dp: &DualPoint) -> Option<[f64; 3]>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub point: DualPoint,
    pub value: f64,
    pub status: Status,
    pub iterations: usize,
}

struct Search<'a, O: ?Sized> {
    obj: &'a O,
    free: [bool; 3],
    fixed_lambda: f64,
    s_floor: f64,
    evals: usize,
}

impl<O: DualObjective + ?Sized> Search<'_, O> {
    fn point(&self, x: &[f64; 3]) -> DualPoint {
        let lambda = if self.free[0] { exp(x[0]) } else { self.fixed_lambda };
        DualPoint::new(lambda, x[1], x[2])
    }

    fn project(&self, x: &mut [f64; 3]) {
        if self.free[0] && x[0] < self.s_floor {
            x[0] = self.s_floor;
        }
    }

    fn at_floor(&self, x: &[f64; 3]) -> bool {
        self.free[0] && x[0] <= self.s_floor
    }

    fn value(&mut self, x: &[f64; 3]) -> f64 {
        self.evals += 1;
        let dp = self.point(x);
        if !(dp.lambda.is_finite() && dp.beta.is_finite() && dp.nu.is_finite()) {
            return f64::INFINITY;
        }
        self.obj.value(&dp).to_f64()
    }

    /// Gradient in search coordinates, zero on fixed coordinates.
    fn grad(&self, x: &[f64; 3]) -> Option<[f64; 3]> {
        let dp = self.point(x);
        let g = self.obj.gradient(&dp)?;
        let mut out = [g[0] * dp.lambda, g[1], g[2]];
        for (o, free) in out.iter_mut().zip(self.free) {
            if !free {
                *o = 0.0;
            }
        }
        out.iter().all(|v| v.is_finite()).then_some(out)
    }

    /// Gradient with the active floor bound removed.
    fn projected(&self, x: &[f64; 3], g: &[f64; 3]) -> [f64; 3] {
        let mut gp = *g;
        if self.at_floor(x) && gp[0] > 0.0 {
            gp[0] = 0.0;
        }
        gp
    }

    fn identity(&self) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        for (i, row) in h.iter_mut().enumerate() {
            if self.free[i] {
                row[i] = 1.0;
            }
        }
        h
    }

    /// Armijo backtracking along `d`; returns the accepted point and value.
    fn line_search(
        &mut self,
        x: &[f64; 3],
        f: f64,
        g: &[f64; 3],
        d: &[f64; 3],
        t0: f64,
    ) -> Option<([f64; 3], f64)> {
        let mut t = t0;
        for _ in 0..MAX_BACKTRACKS {
            let mut xn = [x[0] + t * d[0], x[1] + t * d[1], x[2] + t * d[2]];
            self.project(&mut xn);
            let step = [xn[0] - x[0], xn[1] - x[1], xn[2] - x[2]];
            let slope = dot(g, &step);
            if slope < 0.0 {
                let fnew = self.value(&xn);
                if fnew.is_finite() && fnew <= f + ARMIJO_C1 * slope {
                    return Some((xn, fnew));
                }
            }
            t *= SHRINK;
        }
        None
    }

    /// Cyclic coordinate search with steps `0.1, 0.05, ...` down to `1e-10`.
    fn coordinate_polish(&mut self, x: &mut [f64; 3], f: &mut f64) {
        let mut h = COORD_STEP_INIT;
        let budget = self.evals + 200_000;
        while h >= COORD_STEP_MIN && self.evals < budget {
            let mut improved = false;
            for c in 0..3 {
                if !self.free[c] {
                    continue;
                }
                for dir in [1.0, -1.0] {
                    let mut xn = *x;
                    xn[c] += dir * h;
                    self.project(&mut xn);
                    if xn == *x {
                        continue;
                    }
                    let fnew = self.value(&xn);
                    if fnew < *f {
                        *x = xn;
                        *f = fnew;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                h *= SHRINK;
            }
        }
    }

    fn run(&mut self, start: &DualPoint, config: &SolverConfig) -> Option<Minimum> {
        let mut x = [
            if self.free[0] { ln(start.lambda) } else { 0.0 },
            start.beta,
            start.nu,
        ];
        self.project(&mut x);
        let mut f = self.value(&x);
        if !f.is_finite() {
            return None;
        }
        let mut h = self.identity();
        let mut iterations = 0;
        let mut polish_rounds = 0;
        let mut small_steps = 0;
        let status = loop {
            let grad = self.grad(&x);
            let stalled = match grad {
                None => true,
                Some(g) => {
                    let gp = self.projected(&x, &g);
                    if sup_norm(&gp) <= config.grad_tol {
                        break self.final_status(&x, &g);
                    }
                    if iterations >= config.max_iters {
                        break Status::MaxIters;
                    }
                    iterations += 1;
                    match self.quasi_newton_step(&x, f, &g, &gp, &mut h) {
                        Some((xn, fnew)) => {
                            if f - fnew <= config.rel_tol * f.abs().max(1.0) {
                                small_steps += 1;
                            } else {
                                small_steps = 0;
                            }
                            x = xn;
                            f = fnew;
                            small_steps >= STALL_STEPS
                        }
                        None => true,
                    }
                }
            };
            if stalled {
                let before = f;
                self.coordinate_polish(&mut x, &mut f);
                polish_rounds += 1;
                small_steps = 0;
                h = self.identity();
                let gained = before - f > config.rel_tol * before.abs().max(1.0);
                if !gained || polish_rounds >= MAX_POLISH_ROUNDS {
                    let g = self.grad(&x).unwrap_or([0.0; 3]);
                    break self.final_status(&x, &g);
                }
            }
        };
        Some(Minimum {
            point: self.point(&x),
            value: f,
            status,
            iterations,
        })
    }

    fn final_status(&self, x: &[f64; 3], g: &[f64; 3]) -> Status {
        if self.at_floor(x) && g[0] >= 0.0 {
            Status::BoundaryLambda
        } else {
            Status::Converged
        }
    }

    fn quasi_newton_step(
        &mut self,
        x: &[f64; 3],
        f: f64,
        g: &[f64; 3],
        gp: &[f64; 3],
        h: &mut [[f64; 3]; 3],
    ) -> Option<([f64; 3], f64)> {
        let mut d = mat_vec(h, gp).map(|v| -v);
        if self.at_floor(x) && d[0] < 0.0 {
            d[0] = 0.0;
        }
        let mut accepted = None;
        if dot(gp, &d) < 0.0 {
            accepted = self.line_search(x, f, g, &d, 1.0);
        }
        if accepted.is_none() {
            *h = self.identity();
            let d = gp.map(|v| -v);
            accepted = self.line_search(x, f, g, &d, 1.0);
        }
        let (xn, fnew) = accepted?;
        if let Some(gn) = self.grad(&xn) {
            let s = [xn[0] - x[0], xn[1] - x[1], xn[2] - x[2]];
            let y = [gn[0] - g[0], gn[1] - g[1], gn[2] - g[2]];
            bfgs_update(h, &s, &y);
        } else {
            *h = self.identity();
        }
        Some((xn, fnew))
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sup_norm(a: &[f64; 3]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn mat_vec(h: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    [dot(&h[0], v), dot(&h[1], v), dot(&h[2], v)]
}

/// Inverse-Hessian BFGS update; skipped when the curvature condition fails.
fn bfgs_update(h: &mut [[f64; 3]; 3], s: &[f64; 3], y: &[f64; 3]) {
    let sy = dot(s, y);
    if !(sy > 1e-14 * math::sqrt(dot(s, s) * dot(y, y))) || !sy.is_finite() {
        return;
    }
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = h[i][j] - rho * (hy[i] * s[j] + s[i] * hy[j])
                + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
    *h = out;
}

/// Minimizes a convex dual objective from several starts; the best result
/// wins, ties going to the earliest start.
pub fn minimize_dual<O: DualObjective + ?Sized>(
    objective: &O,
    starts: &[DualPoint],
    config: &SolverConfig,
) -> Result<Minimum> {
    config.validate()?;
    let mut best: Option<Minimum> = None;
    for start in starts {
        let mut search = Search {
            obj: objective,
            free: objective.free(),
            fixed_lambda: start.lambda,
            s_floor: ln(config.lambda_floor),
            evals: 0,
        };
        if let Some(m) = search.run(start, config) {
            if best.as_ref().is_none_or(|b| m.value < b.value) {
                best = Some(m);
            }
        }
    }
    best.ok_or(Error::InfeasibleStart)
}

/// How the variance bound is parameterized for the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parameterization {
    /// KL: reduced over `(lambda, nu)`; α in (0,1): reduced over `(beta, nu)`;
    /// otherwise the full three-variable objective.
    #[default]
    Auto,
    Generic,
    KlReduced,
    AlphaReduced,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    pub dual_point: DualPoint,
    pub tilt: TiltResult,
    pub diagnostics: Diagnostics,
    pub status: Status,
    pub iterations: usize,
}

struct GenericObjective<'a> {
    prob: &'a DualProblem,
    pair: Option<&'a dyn ConjugatePair>,
}

impl DualObjective for GenericObjective<'_> {
    fn free(&self) -> [bool; 3] {
        [true, true, self.pair.is_some()]
    }
    fn value(&self, dp: &DualPoint) -> ExtReal {
        self.prob.objective_with(dp, g_conj(self.pair, dp.nu))
    }
    fn gradient(&self, dp: &DualPoint) -> Option<[f64; 3]> {
        let g = self.prob.gradient_with(dp, g_conj_deriv(self.pair, dp.nu)).ok()?;
        Some([g.d_lambda, g.d_beta, g.d_nu])
    }
}

struct KlReducedObjective<'a> {
    prob: &'a DualProblem,
    pair: Option<&'a dyn ConjugatePair>,
}

impl DualObjective for KlReducedObjective<'_> {
    fn free(&self) -> [bool; 3] {
        [true, false, self.pair.is_some()]
    }
    fn value(&self, dp: &DualPoint) -> ExtReal {
        let v = self.prob.kl_reduced(dp.lambda, dp.nu, g_conj(self.pair, dp.nu));
        if v.is_nan() {
            ExtReal::PosInf
        } else {
            ExtReal::new(v)
        }
    }
    fn gradient(&self, dp: &DualPoint) -> Option<[f64; 3]> {
        let (dl, dn) = self
            .prob
            .kl_reduced_gradient(dp.lambda, dp.nu, g_conj_deriv(self.pair, dp.nu));
        Some([dl, 0.0, dn])
    }
}

struct AlphaReducedObjective<'a> {
    prob: &'a DualProblem,
    pair: Option<&'a dyn ConjugatePair>,
}

impl DualObjective for AlphaReducedObjective<'_> {
    fn free(&self) -> [bool; 3] {
        [false, true, self.pair.is_some()]
    }
    fn value(&self, dp: &DualPoint) -> ExtReal {
        self.prob
            .alpha_reduced(dp.beta, dp.nu, g_conj(self.pair, dp.nu))
            .unwrap_or(ExtReal::PosInf)
    }
    fn gradient(&self, dp: &DualPoint) -> Option<[f64; 3]> {
        // Envelope: the partials in (beta, nu) at the optimal lambda.
        let lambda = self.prob.alpha_optimal_lambda(dp.beta, dp.nu).ok()??;
        if !(lambda > 0.0) {
            return None;
        }
        let full = DualPoint::new(lambda, dp.beta, dp.nu);
        let g = self
            .prob
            .gradient_with(&full, g_conj_deriv(self.pair, dp.nu))
            .ok()?;
        Some([0.0, g.d_beta, g.d_nu])
    }
}

fn g_conj(pair: Option<&dyn ConjugatePair>, nu: f64) -> f64 {
    pair.map_or(0.0, |p| p.g_conj(nu))
}

fn g_conj_deriv(pair: Option<&dyn ConjugatePair>, nu: f64) -> f64 {
    pair.map_or(0.0, |p| p.g_conj_deriv(nu))
}

fn max_shifted(prob: &DualProblem, nu: f64) -> f64 {
    prob.psi()
        .iter()
        .zip(prob.phi())
        .map(|(s, f)| s - nu * f)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn start_points(
    prob: &DualProblem,
    pair: Option<&dyn ConjugatePair>,
    param: Parameterization,
    config: &SolverConfig,
) -> Vec<DualPoint> {
    let p = prob.baseline();
    let (_, var_psi) = p.mean_var(prob.psi()).unwrap_or((0.0, 0.0));
    let scale = math::sqrt(var_psi).max(1.0);
    let nu0 = if pair.is_some() {
        2.0 * p.expect(prob.phi()).unwrap_or(0.0)
    } else {
        0.0
    };
    let z: Vec<f64> = prob
        .psi()
        .iter()
        .zip(prob.phi())
        .map(|(s, f)| s - nu0 * f)
        .collect();
    let beta0 = p.expect(&z).unwrap_or(0.0);
    let z_max = max_shifted(prob, nu0);
    let has_inf_region = prob.family().alpha_below_one().is_some();
    START_FACTORS[..config.multistart_count]
        .iter()
        .map(|&k| {
            let lambda = k * scale;
            let beta = match param {
                Parameterization::AlphaReduced => z_max + lambda,
                _ if has_inf_region => beta0.max(z_max + lambda),
                _ => beta0,
            };
            DualPoint::new(lambda, beta, nu0)
        })
        .collect()
}

fn solve(
    prob: &DualProblem,
    pair: Option<&dyn ConjugatePair>,
    param: Parameterization,
    config: &SolverConfig,
) -> Result<BoundResult> {
    config.validate()?;
    let family = prob.family();
    let param = match param {
        Parameterization::Auto if family.is_kl() => Parameterization::KlReduced,
        Parameterization::Auto if family.alpha_below_one().is_some() => {
            Parameterization::AlphaReduced
        }
        Parameterization::Auto => Parameterization::Generic,
        Parameterization::KlReduced if !family.is_kl() => {
            return Err(Error::InvalidConfig("KL reduction requires the KL family"))
        }
        Parameterization::AlphaReduced if family.alpha_below_one().is_none() => {
            return Err(Error::InvalidConfig("alpha reduction requires alpha in (0,1)"))
        }
        other => other,
    };
    let starts = start_points(prob, pair, param, config);
    let min = match param {
        Parameterization::KlReduced => minimize_dual(&KlReducedObjective { prob, pair }, &starts, config)?,
        Parameterization::AlphaReduced => {
            minimize_dual(&AlphaReducedObjective { prob, pair }, &starts, config)?
        }
        _ => minimize_dual(&GenericObjective { prob, pair }, &starts, config)?,
    };
    let mut point = min.point;
    match param {
        Parameterization::KlReduced => point.beta = prob.kl_optimal_beta(point.lambda, point.nu),
        Parameterization::AlphaReduced => {
            point.lambda = prob
                .alpha_optimal_lambda(point.beta, point.nu)?
                .ok_or(Error::InfeasibleStart)?
        }
        _ => {}
    }
    let (mut value, mut status) = (min.value, min.status);

    // Compare against the lambda -> 0 limit, evaluated at the floor.
    let nu_limit = match pair {
        Some(pr) => prob.vanishing_lambda_infimum(pr).0,
        None => 0.0,
    };
    let lambda_floor = config.lambda_floor;
    let floor_point = DualPoint::new(
        lambda_floor,
        max_shifted(prob, nu_limit) + lambda_floor,
        nu_limit,
    );
    if let ExtReal::Finite(floor_value) = prob.objective_with(&floor_point, g_conj(pair, nu_limit)) {
        let tol = 1e-10 * floor_value.abs().max(1.0);
        let solver_at_floor = point.lambda <= lambda_floor * (1.0 + 1e-9);
        if floor_value <= value + tol || (solver_at_floor && floor_value <= value + 1e-8) {
            point = floor_point;
            value = floor_value;
            status = Status::BoundaryLambda;
        }
    }
    if !value.is_finite() {
        return Err(Error::InfeasibleStart);
    }
    let tilt = prob.tilt(&point)?;
    let diagnostics = prob.diagnostics_with(
        &point,
        pair.map(|pr| pr.g_conj_deriv(point.nu)),
        status == Status::BoundaryLambda,
    );
    Ok(BoundResult {
        value,
        dual_point: point,
        tilt,
        diagnostics,
        status,
        iterations: min.iterations,
    })
}

/// Worst case of `E_Q[rho] + Var_Q[phi]` over `D_f(Q, P) <= eta`.
pub fn variance_bound(
    data: &ProblemData,
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
    config: &SolverConfig,
) -> Result<BoundResult> {
    variance_bound_with(data, p, family, eta, config, Parameterization::Auto)
}

pub fn variance_bound_with(
    data: &ProblemData,
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
    config: &SolverConfig,
    param: Parameterization,
) -> Result<BoundResult> {
    let prob = DualProblem::variance(data, p, family, eta)?;
    solve(&prob, Some(&SquarePair), param, config)
}

/// Worst case of `E_Q[psi] - g(E_Q[phi])` for a user-supplied pair `(g, g*)`.
pub fn general_bound(
    psi: &[f64],
    phi: &[f64],
    pair: &dyn ConjugatePair,
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
    config: &SolverConfig,
) -> Result<BoundResult> {
    let prob = DualProblem::general(psi.to_vec(), phi.to_vec(), p, family, eta)?;
    solve(&prob, Some(pair), Parameterization::Auto, config)
}

/// Worst case of `E_Q[values]` over `D_f(Q, P) <= eta`; `nu` stays at zero.
pub fn mean_bound(
    values: &[f64],
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
    config: &SolverConfig,
) -> Result<BoundResult> {
    mean_bound_with(values, p, family, eta, config, Parameterization::Auto)
}

pub fn mean_bound_with(
    values: &[f64],
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
    config: &SolverConfig,
    param: Parameterization,
) -> Result<BoundResult> {
    let prob = DualProblem::mean(values, p, family, eta)?;
    solve(&prob, None, param, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    struct Quadratic;

    impl DualObjective for Quadratic {
        fn free(&self) -> [bool; 3] {
            [true; 3]
        }
        fn value(&self, dp: &DualPoint) -> ExtReal {
            ExtReal::new((dp.lambda - 1.0).powi(2) + (dp.beta + 2.0).powi(2) + dp.nu * dp.nu)
        }
        fn gradient(&self, dp: &DualPoint) -> Option<[f64; 3]> {
            Some([2.0 * (dp.lambda - 1.0), 2.0 * (dp.beta + 2.0), 2.0 * dp.nu])
        }
    }

    #[test]
    fn smoke_quadratic() {
        let m = minimize_dual(
            &Quadratic,
            &[DualPoint::new(3.0, 1.0, -2.0)],
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(m.status, Status::Converged);
        assert!((m.point.lambda - 1.0).abs() < 1e-8);
        assert!((m.point.beta + 2.0).abs() < 1e-8);
        assert!(m.point.nu.abs() < 1e-8);
        assert!(m.value.abs() < 1e-10);
    }

    struct Everywhere;

    impl DualObjective for Everywhere {
        fn free(&self) -> [bool; 3] {
            [true; 3]
        }
        fn value(&self, _: &DualPoint) -> ExtReal {
            ExtReal::PosInf
        }
        fn gradient(&self, _: &DualPoint) -> Option<[f64; 3]> {
            None
        }
    }

    #[test]
    fn infeasible_everywhere() {
        assert_eq!(
            minimize_dual(&Everywhere, &[DualPoint::new(1.0, 0.0, 0.0)], &SolverConfig::default()),
            Err(Error::InfeasibleStart)
        );
    }

    /// `eta * lambda + (beta)^2`: decreasing in -s all the way to the floor.
    struct Floor;

    impl DualObjective for Floor {
        fn free(&self) -> [bool; 3] {
            [true, true, false]
        }
        fn value(&self, dp: &DualPoint) -> ExtReal {
            ExtReal::new(0.1 * dp.lambda + dp.beta * dp.beta)
        }
        fn gradient(&self, dp: &DualPoint) -> Option<[f64; 3]> {
            Some([0.1, 2.0 * dp.beta, 0.0])
        }
    }

    #[test]
    fn pins_at_lambda_floor() {
        let cfg = SolverConfig::default();
        let m = minimize_dual(&Floor, &[DualPoint::new(1.0, 0.3, 0.0)], &cfg).unwrap();
        assert!(m.value < 1e-9);
        assert!(m.point.lambda < 1e-8);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.lambda_floor = 1e-3;
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig {
            grad_tol: 0.1,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    fn two_point(w: [f64; 2]) -> (ProblemData, EmpiricalMeasure) {
        (
            ProblemData::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap(),
            EmpiricalMeasure::new(w.to_vec()).unwrap(),
        )
    }

    #[test]
    fn symmetric_kl_is_a_boundary_case() {
        let (data, p) = two_point([0.5, 0.5]);
        let r = variance_bound(&data, &p, &FDivergenceFamily::kl(), 0.1, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::BoundaryLambda);
        assert!((r.value - 0.25).abs() < 1e-4);
        assert!(r.diagnostics.boundary_flag);
    }

    #[test]
    fn asymmetric_kl_converges() {
        let (data, p) = two_point([0.8, 0.2]);
        let r = variance_bound(&data, &p, &FDivergenceFamily::kl(), 0.1, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!((r.value - 0.2390).abs() < 2e-3, "{}", r.value);
        assert!(r.diagnostics.identities_hold(0.1), "{:?}", r.diagnostics);
    }

    #[test]
    fn alpha_two_closed_form() {
        let (data, p) = two_point([0.8, 0.2]);
        let fam = FDivergenceFamily::alpha(2.0).unwrap();
        let r = variance_bound(&data, &p, &fam, 0.08, &SolverConfig::default()).unwrap();
        assert!((r.value - 0.2304).abs() < 1e-4, "{}", r.value);
    }

    #[test]
    fn alpha_half_whole_simplex() {
        let (data, p) = two_point([0.5, 0.5]);
        let fam = FDivergenceFamily::alpha(0.5).unwrap();
        for eta in [4.0 - 2.0 * 2f64.sqrt(), 1.5, 3.0] {
            let r = variance_bound(&data, &p, &fam, eta, &SolverConfig::default()).unwrap();
            assert!((r.value - 0.25).abs() < 1e-4, "eta={eta}: {}", r.value);
        }
    }

    #[test]
    fn constant_phi_reduces_to_mean() {
        let p = EmpiricalMeasure::new(vec![0.2, 0.5, 0.3]).unwrap();
        let rho = vec![0.4, -1.0, 0.7];
        let data = ProblemData::new(rho.clone(), vec![0.3; 3]).unwrap();
        let cfg = SolverConfig::default();
        let kl = FDivergenceFamily::kl();
        let v = variance_bound(&data, &p, &kl, 0.2, &cfg).unwrap();
        let m = mean_bound(&rho, &p, &kl, 0.2, &cfg).unwrap();
        assert!((v.value - m.value).abs() < 1e-8, "{} vs {}", v.value, m.value);
    }

    #[test]
    fn mean_bound_examples() {
        let p = EmpiricalMeasure::uniform(2).unwrap();
        let kl = FDivergenceFamily::kl();
        let cfg = SolverConfig::default();
        let c = 2.5;
        assert!((mean_bound(&[c, c], &p, &kl, 0.3, &cfg).unwrap().value - c).abs() < 1e-8);
        let lo = mean_bound(&[0.0, 1.0], &p, &kl, 0.1, &cfg).unwrap();
        assert!((lo.value - 0.7198).abs() < 1e-3, "{}", lo.value);
        let hi = mean_bound(&[0.0, 1.0], &p, &kl, 0.2, &cfg).unwrap();
        assert!(hi.value >= lo.value);
        assert!(lo.diagnostics.mean_condition_gap.is_none());
        assert_eq!(lo.dual_point.nu, 0.0);
    }

    #[test]
    fn eta_out_of_range() {
        let (data, p) = two_point([0.5, 0.5]);
        let fam = FDivergenceFamily::alpha(0.5).unwrap();
        assert!(matches!(
            variance_bound(&data, &p, &fam, 4.0, &SolverConfig::default()),
            Err(Error::EtaOutOfRange { .. })
        ));
    }

    #[test]
    fn wrong_reduction_is_rejected() {
        let (data, p) = two_point([0.5, 0.5]);
        let fam = FDivergenceFamily::alpha(2.0).unwrap();
        let cfg = SolverConfig::default();
        assert!(variance_bound_with(&data, &p, &fam, 0.1, &cfg, Parameterization::KlReduced).is_err());
        assert!(variance_bound_with(&data, &p, &fam, 0.1, &cfg, Parameterization::AlphaReduced).is_err());
    }
}
