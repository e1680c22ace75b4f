//! Empirical measures on finite atom sets and divergences between them.
//!
//! Atoms are identified by position. A baseline measure (`EmpiricalMeasure`)
//! has strictly positive weights; candidate measures compared against it are
//! plain probability vectors and may vanish on some atoms.

use alloc::vec::Vec;

use crate::divergences::FDivergenceFamily;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::math::{self, CompensatedSum};

const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Wraps already-normalized weights; every weight must be positive and the
    /// total must be 1 within 1e-12.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value <= 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        let total = math::sum(weights.iter().copied());
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            weights: alloc::vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E[values]` under this measure.
    pub fn expect(&self, values: &[f64]) -> Result<f64> {
        check_len(self.len(), values.len())?;
        Ok(math::sum(self.weights.iter().zip(values).map(|(w, v)| w * v)))
    }

    pub fn mean_var(&self, values: &[f64]) -> Result<(f64, f64)> {
        mean_var_of(&self.weights, values)
    }
}

impl AsRef<[f64]> for EmpiricalMeasure {
    fn as_ref(&self) -> &[f64] {
        &self.weights
    }
}

/// Result of [`normalize`]: the measure on the kept atoms plus the indices of
/// dropped zero-weight atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub measure: EmpiricalMeasure,
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
}

/// Scales nonnegative weights to sum to one, dropping zero entries.
pub fn normalize(raw_weights: &[f64]) -> Result<Normalized> {
    if raw_weights.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &value) in raw_weights.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
        if value < 0.0 {
            return Err(Error::NegativeWeight { index, value });
        }
    }
    let total = math::sum(raw_weights.iter().copied());
    if total <= 0.0 {
        return Err(Error::AllZero);
    }
    let (kept, dropped): (Vec<usize>, Vec<usize>) =
        (0..raw_weights.len()).partition(|&i| raw_weights[i] > 0.0);
    let weights = kept.iter().map(|&i| raw_weights[i] / total).collect();
    Ok(Normalized {
        measure: EmpiricalMeasure::new(weights)?,
        kept,
        dropped,
    })
}

/// Per-atom cost `rho` and penalized quantity `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    rho: Vec<f64>,
    phi: Vec<f64>,
}

impl ProblemData {
    pub fn new(rho: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        check_len(rho.len(), phi.len())?;
        if rho.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in rho.iter().chain(&phi).enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    index: index % rho.len(),
                    value,
                });
            }
        }
        Ok(Self { rho, phi })
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// `psi = rho + phi^2`, atomwise.
    pub fn psi(&self) -> Vec<f64> {
        self.rho
            .iter()
            .zip(&self.phi)
            .map(|(r, f)| r + f * f)
            .collect()
    }

    /// Checks alignment with a baseline measure.
    pub fn check_against(&self, p: &EmpiricalMeasure) -> Result<()> {
        check_len(self.len(), p.len())
    }
}

pub(crate) fn check_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LengthMismatch(a, b))
    }
}

/// Sums extended-real terms with compensation on the finite part.
pub(crate) fn ext_sum<I: IntoIterator<Item = ExtReal>>(terms: I) -> ExtReal {
    let mut acc = CompensatedSum::new();
    let mut pos = false;
    let mut neg = false;
    for t in terms {
        match t {
            ExtReal::Finite(x) => acc.add(x),
            ExtReal::PosInf => pos = true,
            ExtReal::NegInf => neg = true,
        }
    }
    match (pos, neg) {
        (true, true) => panic!("inf - inf in a sum"),
        (true, false) => ExtReal::PosInf,
        (false, true) => ExtReal::NegInf,
        (false, false) => ExtReal::new(acc.total()),
    }
}

/// `D_f(q, p) = Σ p_i f(q_i / p_i)`.
///
/// `q` is any vector of nonnegative weights aligned with `p`; negative
/// entries make the divergence `+inf`.
pub fn divergence_of(q: &[f64], p: &EmpiricalMeasure, family: &FDivergenceFamily) -> Result<ExtReal> {
    check_len(q.len(), p.len())?;
    Ok(ext_sum(
        q.iter()
            .zip(p.weights())
            .map(|(&qi, &pi)| match family.f_eval(qi / pi) {
                ExtReal::Finite(v) => ExtReal::Finite(pi * v),
                inf => inf,
            }),
    ))
}

/// `E_q[g] - E_p[f*(g)]`, a lower bound on `D_f(q, p)` for every `g`.
pub fn variational_gap(
    g_values: &[f64],
    q: &[f64],
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
) -> Result<ExtReal> {
    check_len(g_values.len(), q.len())?;
    check_len(q.len(), p.len())?;
    for (index, &value) in g_values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
    }
    let eq_g = math::sum(q.iter().zip(g_values).map(|(w, g)| w * g));
    let ep_conj = ext_sum(
        p.weights()
            .iter()
            .zip(g_values)
            .map(|(&pi, &g)| family.conj_eval(g).scale(pi)),
    );
    Ok(ExtReal::Finite(eq_g).sub_inf_wins(ep_conj))
}

/// Weighted mean and population variance.
pub fn mean_var_of(weights: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    check_len(weights.len(), values.len())?;
    let mean = math::sum(weights.iter().zip(values).map(|(w, v)| w * v));
    let var = math::sum(weights.iter().zip(values).map(|(w, v)| {
        let d = v - mean;
        w * d * d
    }));
    Ok((mean, var.max(0.0)))
}
