//! Dual objectives for worst-case bounds over `{Q : D_f(Q, P) <= eta}`.
//!
//! For a baseline `P` and per-atom `rho`, `phi`, the worst case of
//! `E_Q[rho] + Var_Q[phi]` equals the infimum over `lambda > 0` and real
//! `beta`, `nu` of
//!
//! ```text
//! J(lambda, beta, nu) = nu^2/4 + beta + eta*lambda + lambda * E_P[f*(Psi)],
//! Psi = (rho + phi^2 - nu*phi - beta) / lambda.
//! ```
//!
//! `J` is jointly convex. Replacing `nu^2/4` by `g*(nu)` and `rho + phi^2` by a
//! general `psi` gives the bound on `E_Q[psi] - g(E_Q[phi])`; dropping `nu`
//! entirely gives the worst-case mean. At an interior optimum the measure
//! `dQ = (f*)'(Psi) dP` is the maximizer, with `E_P[(f*)'(Psi)] = 1`,
//! `D_f(Q, P) = eta` and `E_Q[phi] = nu/2`.
//!
//! KL admits a closed-form `beta`; α in (0,1) admits a closed-form `lambda`.
//! Both reductions live here next to the generic objective.

use alloc::vec::Vec;

use crate::divergences::FDivergenceFamily;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::math::{self, exp, ln, powf};
use crate::measures::{check_len, divergence_of, EmpiricalMeasure, ProblemData};

/// Dual variables. `nu = 2c`, where `c` is the centering constant of the variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPoint {
    pub lambda: f64,
    pub beta: f64,
    pub nu: f64,
}

impl DualPoint {
    pub fn new(lambda: f64, beta: f64, nu: f64) -> Self {
        Self { lambda, beta, nu }
    }
}

/// A convex `g` with its conjugate, used to penalize `E_Q[phi]`.
///
/// Callers are responsible for `g` being C1 and superlinear with a
/// superlinear conjugate.
pub trait ConjugatePair {
    fn g(&self, z: f64) -> f64;
    fn g_conj(&self, nu: f64) -> f64;
    fn g_conj_deriv(&self, nu: f64) -> f64;
}

/// `g(z) = z^2`, `g*(nu) = nu^2/4`. Recovers the variance bound with `psi = rho + phi^2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquarePair;

impl ConjugatePair for SquarePair {
    fn g(&self, z: f64) -> f64 {
        z * z
    }
    fn g_conj(&self, nu: f64) -> f64 {
        nu * nu / 4.0
    }
    fn g_conj_deriv(&self, nu: f64) -> f64 {
        nu / 2.0
    }
}

/// `g(z) = z^4/4`, `g*(nu) = (3/4)|nu|^(4/3)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuarticPair;

impl ConjugatePair for QuarticPair {
    fn g(&self, z: f64) -> f64 {
        let z2 = z * z;
        z2 * z2 / 4.0
    }
    fn g_conj(&self, nu: f64) -> f64 {
        0.75 * powf(nu.abs(), 4.0 / 3.0)
    }
    fn g_conj_deriv(&self, nu: f64) -> f64 {
        libm::cbrt(nu)
    }
}

/// A pair given by three closures.
pub struct FnPair<G, H, D> {
    pub g: G,
    pub g_conj: H,
    pub g_conj_deriv: D,
}

impl<G, H, D> ConjugatePair for FnPair<G, H, D>
where
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    fn g(&self, z: f64) -> f64 {
        (self.g)(z)
    }
    fn g_conj(&self, nu: f64) -> f64 {
        (self.g_conj)(nu)
    }
    fn g_conj_deriv(&self, nu: f64) -> f64 {
        (self.g_conj_deriv)(nu)
    }
}

/// Partial derivatives in the original coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub d_lambda: f64,
    pub d_beta: f64,
    pub d_nu: f64,
}

/// Worst-case probabilities `p_i (f*)'(Psi_i)` and the arguments `Psi_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltResult {
    pub weights: Vec<f64>,
    pub psi: Vec<f64>,
}

/// Residuals of the stationarity identities at a dual point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `E_P[(f*)'(Psi)]`; 1 at an interior optimum.
    pub normalization: f64,
    /// `D_f(tilt, P)`; equals `eta` at an interior optimum.
    pub achieved_divergence: ExtReal,
    /// `E_tilt[phi] - nu/2`; `None` for mean bounds.
    pub mean_condition_gap: Option<f64>,
    pub boundary_flag: bool,
}

pub const NORMALIZATION_TOL: f64 = 1e-6;
pub const DIVERGENCE_TOL: f64 = 1e-5;
pub const MEAN_CONDITION_TOL: f64 = 1e-6;

impl Diagnostics {
    /// Whether the identities hold within the default tolerances. Always true
    /// on boundary instances, where they are not expected to hold.
    pub fn identities_hold(&self, eta: f64) -> bool {
        if self.boundary_flag {
            return true;
        }
        (self.normalization - 1.0).abs() <= NORMALIZATION_TOL
            && (self.achieved_divergence.to_f64() - eta).abs() <= DIVERGENCE_TOL
            && self
                .mean_condition_gap
                .is_none_or(|g| g.abs() <= MEAN_CONDITION_TOL)
    }
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    conj: f64,
    deriv: f64,
    deriv_psi: f64,
    deriv_phi: f64,
}

/// Validated problem instance: `psi`, `phi`, baseline and radius.
///
/// The objective methods assume `lambda > 0`; the free functions of this
/// module check it.
#[derive(Debug, Clone)]
pub struct DualProblem {
    psi: Vec<f64>,
    phi: Vec<f64>,
    p: EmpiricalMeasure,
    log_p: Vec<f64>,
    family: FDivergenceFamily,
    eta: f64,
}

impl DualProblem {
    pub fn general(
        psi: Vec<f64>,
        phi: Vec<f64>,
        p: &EmpiricalMeasure,
        family: &FDivergenceFamily,
        eta: f64,
    ) -> Result<Self> {
        check_len(psi.len(), phi.len())?;
        check_len(psi.len(), p.len())?;
        for (index, &value) in psi.iter().chain(&phi).enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    index: index % p.len(),
                    value,
                });
            }
        }
        family.check_eta(eta)?;
        Ok(Self {
            psi,
            phi,
            log_p: p.weights().iter().map(|&w| ln(w)).collect(),
            p: p.clone(),
            family: *family,
            eta,
        })
    }

    /// `psi = rho + phi^2`.
    pub fn variance(
        data: &ProblemData,
        p: &EmpiricalMeasure,
        family: &FDivergenceFamily,
        eta: f64,
    ) -> Result<Self> {
        data.check_against(p)?;
        Self::general(data.psi(), data.phi().to_vec(), p, family, eta)
    }

    /// Mean bound of `values`: `phi = 0`, with `nu` held at zero by the caller.
    pub fn mean(
        values: &[f64],
        p: &EmpiricalMeasure,
        family: &FDivergenceFamily,
        eta: f64,
    ) -> Result<Self> {
        Self::general(values.to_vec(), alloc::vec![0.0; values.len()], p, family, eta)
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn baseline(&self) -> &EmpiricalMeasure {
        &self.p
    }

    pub fn family(&self) -> &FDivergenceFamily {
        &self.family
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `psi_i - nu * phi_i`.
    fn shifted(&self, nu: f64) -> impl Iterator<Item = f64> + '_ {
        self.psi.iter().zip(&self.phi).map(move |(s, f)| s - nu * f)
    }

    /// Conjugate arguments `Psi_i` at `dp`.
    pub fn conj_args(&self, dp: &DualPoint) -> Vec<f64> {
        self.shifted(dp.nu)
            .map(|z| (z - dp.beta) / dp.lambda)
            .collect()
    }

    /// `E_P[f*(Psi)]`, computed in log space for KL.
    fn conj_expectation(&self, args: &[f64]) -> ExtReal {
        if self.family.is_kl() {
            if args.iter().any(|a| a.is_nan() || *a == f64::INFINITY) {
                return ExtReal::PosInf;
            }
            let shifted: Vec<f64> = self.log_p.iter().zip(args).map(|(l, a)| l + a).collect();
            let lse = math::log_sum_exp(&shifted);
            self.family.conj_eval(lse)
        } else {
            crate::measures::ext_sum(
                self.p
                    .weights()
                    .iter()
                    .zip(args)
                    .map(|(&w, &a)| self.family.conj_eval(a).scale(w)),
            )
        }
    }

    /// `g_conj + beta + eta*lambda + lambda*E_P[f*(Psi)]`. `g_conj` is the
    /// already-evaluated conjugate penalty at `dp.nu`.
    pub fn objective_with(&self, dp: &DualPoint, g_conj: f64) -> ExtReal {
        let args = self.conj_args(dp);
        match self.conj_expectation(&args) {
            ExtReal::Finite(e) => {
                let v = g_conj + dp.beta + self.eta * dp.lambda + dp.lambda * e;
                if v.is_nan() {
                    ExtReal::PosInf
                } else {
                    ExtReal::new(v)
                }
            }
            _ => ExtReal::PosInf,
        }
    }

    pub fn objective<P: ConjugatePair + ?Sized>(&self, dp: &DualPoint, pair: &P) -> ExtReal {
        self.objective_with(dp, pair.g_conj(dp.nu))
    }

    pub fn variance_objective(&self, dp: &DualPoint) -> ExtReal {
        self.objective(dp, &SquarePair)
    }

    fn moments(&self, dp: &DualPoint) -> Result<Moments> {
        let args = self.conj_args(dp);
        for (i, &a) in args.iter().enumerate() {
            if !a.is_finite() || !self.family.in_conj_interior(a) {
                return Err(Error::OutsideDomain(i));
            }
        }
        if self.family.is_kl() {
            let shifted: Vec<f64> = self.log_p.iter().zip(&args).map(|(l, a)| l + a).collect();
            let lse = math::log_sum_exp(&shifted);
            let total = self.family.conj_eval(lse).finite().ok_or(Error::NonSmooth)?;
            let w: Vec<f64> = shifted.iter().map(|s| exp(s - lse)).collect();
            let wa = math::sum(w.iter().zip(&args).map(|(w, a)| w * a));
            let wf = math::sum(w.iter().zip(&self.phi).map(|(w, f)| w * f));
            return Ok(Moments {
                conj: total,
                deriv: total,
                deriv_psi: total * wa,
                deriv_phi: total * wf,
            });
        }
        let mut conj = math::CompensatedSum::new();
        let mut deriv = math::CompensatedSum::new();
        let mut deriv_psi = math::CompensatedSum::new();
        let mut deriv_phi = math::CompensatedSum::new();
        for ((&w, &a), &f) in self.p.weights().iter().zip(&args).zip(&self.phi) {
            let c = self.family.conj_eval(a).finite().ok_or(Error::NonSmooth)?;
            let d = self.family.conj_deriv(a).finite().ok_or(Error::NonSmooth)?;
            conj.add(w * c);
            deriv.add(w * d);
            deriv_psi.add(w * d * a);
            deriv_phi.add(w * d * f);
        }
        Ok(Moments {
            conj: conj.total(),
            deriv: deriv.total(),
            deriv_psi: deriv_psi.total(),
            deriv_phi: deriv_phi.total(),
        })
    }

    /// Gradient with conjugate-penalty slope `g_conj_deriv` at `dp.nu`.
    pub fn gradient_with(&self, dp: &DualPoint, g_conj_deriv: f64) -> Result<Gradient> {
        let m = self.moments(dp).map_err(|_| Error::NonSmooth)?;
        let g = Gradient {
            d_lambda: self.eta + m.conj - m.deriv_psi,
            d_beta: 1.0 - m.deriv,
            d_nu: g_conj_deriv - m.deriv_phi,
        };
        if g.d_lambda.is_finite() && g.d_beta.is_finite() && g.d_nu.is_finite() {
            Ok(g)
        } else {
            Err(Error::NonSmooth)
        }
    }

    pub fn gradient<P: ConjugatePair + ?Sized>(&self, dp: &DualPoint, pair: &P) -> Result<Gradient> {
        self.gradient_with(dp, pair.g_conj_deriv(dp.nu))
    }

    /// Log-partition `log E_P[exp((psi - nu*phi)/lambda)]` and the softmax weights.
    fn kl_partition(&self, lambda: f64, nu: f64) -> (f64, Vec<f64>, Vec<f64>) {
        let z: Vec<f64> = self.shifted(nu).collect();
        let a: Vec<f64> = self
            .log_p
            .iter()
            .zip(&z)
            .map(|(l, zi)| l + zi / lambda)
            .collect();
        let lse = math::log_sum_exp(&a);
        let w = a.iter().map(|ai| exp(ai - lse)).collect();
        (lse, w, z)
    }

    /// KL objective after minimizing out `beta`:
    /// `nu^2/4 + eta*lambda + lambda * log E_P[exp((psi - nu*phi)/lambda)]`.
    pub fn kl_reduced(&self, lambda: f64, nu: f64, g_conj: f64) -> f64 {
        let (lse, _, _) = self.kl_partition(lambda, nu);
        g_conj + self.eta * lambda + lambda * lse
    }

    /// `(d/dlambda, d/dnu)` of [`Self::kl_reduced`] with penalty slope `g_conj_deriv`.
    pub fn kl_reduced_gradient(&self, lambda: f64, nu: f64, g_conj_deriv: f64) -> (f64, f64) {
        let (lse, w, z) = self.kl_partition(lambda, nu);
        let wz = math::sum(w.iter().zip(&z).map(|(w, z)| w * z));
        let wf = math::sum(w.iter().zip(&self.phi).map(|(w, f)| w * f));
        (self.eta + lse - wz / lambda, g_conj_deriv - wf)
    }

    /// The minimizing `beta = lambda * (log E_P[exp((psi - nu*phi)/lambda)] - 1)`.
    pub fn kl_optimal_beta(&self, lambda: f64, nu: f64) -> f64 {
        let (lse, _, _) = self.kl_partition(lambda, nu);
        lambda * (lse - 1.0)
    }

    /// `C_{beta,nu}` for α in (0,1); `+inf` when some atom has `psi - nu*phi - beta >= 0`.
    fn alpha_constant(&self, alpha: f64, beta: f64, nu: f64) -> ExtReal {
        let k = alpha / (1.0 - alpha);
        let mut acc = math::CompensatedSum::new();
        for (z, &w) in self.shifted(nu).zip(self.p.weights()) {
            let gap = beta - z;
            if !(gap > 0.0) {
                return ExtReal::PosInf;
            }
            acc.add(w * powf(gap, -k));
        }
        ExtReal::new(acc.total() / (alpha * powf(1.0 - alpha, k)))
    }

    fn alpha_of(&self) -> Result<f64> {
        self.family
            .alpha_below_one()
            .ok_or(Error::InvalidFamily(alloc::format!(
                "{} has no closed-form lambda",
                self.family
            )))
    }

    /// α in (0,1) objective after minimizing out `lambda`:
    /// `nu^2/4 + beta - α((1-α)/C)^((1-α)/α) (1/(α(1-α)) - eta)^(1/α)`.
    pub fn alpha_reduced(&self, beta: f64, nu: f64, g_conj: f64) -> Result<ExtReal> {
        let alpha = self.alpha_of()?;
        let cap = 1.0 / (alpha * (1.0 - alpha));
        Ok(match self.alpha_constant(alpha, beta, nu) {
            ExtReal::Finite(c) => {
                let log_term = ln(alpha)
                    + (1.0 - alpha) / alpha * (ln(1.0 - alpha) - ln(c))
                    + ln(cap - self.eta) / alpha;
                ExtReal::new(g_conj + beta - exp(log_term))
            }
            _ => ExtReal::PosInf,
        })
    }

    /// The minimizing `lambda = ((1/(α(1-α)) - eta)(1-α)/C)^((1-α)/α)`; `None`
    /// when `C` is infinite.
    pub fn alpha_optimal_lambda(&self, beta: f64, nu: f64) -> Result<Option<f64>> {
        let alpha = self.alpha_of()?;
        let cap = 1.0 / (alpha * (1.0 - alpha));
        Ok(self.alpha_constant(alpha, beta, nu).finite().map(|c| {
            exp((1.0 - alpha) / alpha * (ln(cap - self.eta) + ln(1.0 - alpha) - ln(c)))
        }))
    }

    /// `h(nu) = g*(nu) + max_i (psi_i - nu*phi_i)`, the `lambda -> 0` limit of
    /// the objective after minimizing over `beta`.
    pub fn vanishing_lambda_limit<P: ConjugatePair + ?Sized>(&self, nu: f64, pair: &P) -> f64 {
        pair.g_conj(nu) + self.shifted(nu).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Minimizer and minimum of [`Self::vanishing_lambda_limit`] over `nu`.
    /// The minimum is the unconstrained supremum over all `Q << P`.
    pub fn vanishing_lambda_infimum<P: ConjugatePair + ?Sized>(&self, pair: &P) -> (f64, f64) {
        let lo = self.phi.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // Stationarity puts g*'(nu) in [min phi, max phi]; bracket generously.
        let span = (hi - lo).abs().max(1.0);
        let (a, b) = (2.0 * lo - 4.0 * span, 2.0 * hi + 4.0 * span);
        let nu = math::golden_min(|nu| self.vanishing_lambda_limit(nu, pair), a, b, 400);
        (nu, self.vanishing_lambda_limit(nu, pair))
    }

    /// Worst-case weights `p_i (f*)'(Psi_i)`.
    pub fn tilt(&self, dp: &DualPoint) -> Result<TiltResult> {
        let psi = self.conj_args(dp);
        let mut weights = Vec::with_capacity(psi.len());
        for (i, (&a, &w)) in psi.iter().zip(self.p.weights()).enumerate() {
            if !a.is_finite() || !self.family.in_conj_interior(a) {
                return Err(Error::OutsideDomain(i));
            }
            let d = if self.family.is_kl() {
                exp(self.log_p[i] + a - 1.0)
            } else {
                w * self.family.conj_deriv(a).to_f64()
            };
            if !d.is_finite() {
                return Err(Error::OutsideDomain(i));
            }
            weights.push(d);
        }
        Ok(TiltResult { weights, psi })
    }

    /// Stationarity residuals at `dp`; the mean condition uses slope `g_conj_deriv`.
    pub fn diagnostics_with(
        &self,
        dp: &DualPoint,
        g_conj_deriv: Option<f64>,
        boundary_flag: bool,
    ) -> Diagnostics {
        match self.tilt(dp) {
            Ok(t) => {
                let normalization = math::sum(t.weights.iter().copied());
                let achieved_divergence = divergence_of(&t.weights, &self.p, &self.family)
                    .unwrap_or(ExtReal::PosInf);
                let mean_condition_gap = g_conj_deriv.map(|slope| {
                    math::sum(t.weights.iter().zip(&self.phi).map(|(w, f)| w * f)) - slope
                });
                Diagnostics {
                    normalization,
                    achieved_divergence,
                    mean_condition_gap,
                    boundary_flag,
                }
            }
            Err(_) => Diagnostics {
                normalization: f64::INFINITY,
                achieved_divergence: ExtReal::PosInf,
                mean_condition_gap: None,
                boundary_flag,
            },
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveLambda(lambda))
    }
}

/// Variance dual objective `J(lambda, beta, nu)`.
pub fn dual_objective_variance(
    dp: &DualPoint,
    data: &ProblemData,
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
) -> Result<ExtReal> {
    check_lambda(dp.lambda)?;
    Ok(DualProblem::variance(data, p, family, eta)?.variance_objective(dp))
}

/// Mean dual objective `beta + eta*lambda + lambda*E_P[f*((values - beta)/lambda)]`.
pub fn dual_objective_mean(
    lambda: f64,
    beta: f64,
    values: &[f64],
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
) -> Result<ExtReal> {
    check_lambda(lambda)?;
    Ok(DualProblem::mean(values, p, family, eta)?.objective_with(&DualPoint::new(lambda, beta, 0.0), 0.0))
}

/// Dual objective for `sup_Q { E_Q[psi] - g(E_Q[phi]) }` with a one-dimensional `phi`.
pub fn dual_objective_general<P: ConjugatePair + ?Sized>(
    dp: &DualPoint,
    psi: &[f64],
    phi: &[f64],
    pair: &P,
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
) -> Result<ExtReal> {
    check_lambda(dp.lambda)?;
    Ok(DualProblem::general(psi.to_vec(), phi.to_vec(), p, family, eta)?.objective(dp, pair))
}

/// KL variance objective with `beta` minimized out.
pub fn kl_reduced_objective(
    lambda: f64,
    nu: f64,
    data: &ProblemData,
    p: &EmpiricalMeasure,
    eta: f64,
) -> Result<f64> {
    check_lambda(lambda)?;
    let prob = DualProblem::variance(data, p, &FDivergenceFamily::kl(), eta)?;
    Ok(prob.kl_reduced(lambda, nu, nu * nu / 4.0))
}

/// α-divergence (α in (0,1)) variance objective with `lambda` minimized out.
pub fn alpha_reduced_objective(
    beta: f64,
    nu: f64,
    data: &ProblemData,
    p: &EmpiricalMeasure,
    alpha: f64,
    eta: f64,
) -> Result<ExtReal> {
    let family = FDivergenceFamily::alpha(alpha)?;
    let prob = DualProblem::variance(data, p, &family, eta)?;
    prob.alpha_reduced(beta, nu, nu * nu / 4.0)
}

/// Analytic gradient of the variance objective. Fails where `f*` is not
/// differentiable or infinite at some atom.
pub fn gradient_variance(
    dp: &DualPoint,
    data: &ProblemData,
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
) -> Result<Gradient> {
    check_lambda(dp.lambda)?;
    DualProblem::variance(data, p, family, eta)?.gradient(dp, &SquarePair)
}

/// Unnormalized worst-case measure `dQ = (f*)'(Psi) dP`.
pub fn tilt(
    dp: &DualPoint,
    data: &ProblemData,
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
) -> Result<TiltResult> {
    check_lambda(dp.lambda)?;
    // eta does not enter the tilt; any admissible radius validates the instance.
    let eta = match family.divergence_cap() {
        ExtReal::Finite(c) => c / 2.0,
        _ => 1.0,
    };
    DualProblem::variance(data, p, family, eta)?.tilt(dp)
}

/// Stationarity residuals of the variance problem at `dp`.
pub fn optimality_diagnostics(
    dp: &DualPoint,
    data: &ProblemData,
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
    boundary_flag: bool,
) -> Result<Diagnostics> {
    check_lambda(dp.lambda)?;
    let prob = DualProblem::variance(data, p, family, eta)?;
    Ok(prob.diagnostics_with(dp, Some(dp.nu / 2.0), boundary_flag))
}
