//! Exhaustive primal search on two- and three-atom spaces.
//!
//! Evaluates `sup { E_Q[rho] + Var_Q[phi] : D_f(Q, P) <= eta }` by sweeping a
//! grid on the probability simplex, then zooming in around the incumbent.
//! Feasibility is decided by summing the per-atom divergence terms
//! `p_k f(q_k / p_k)` directly; nothing from [`crate::dual`] is used here.
//!
//! On three atoms each grid row is a line segment in the simplex. The
//! divergence is convex and the objective concave along it, so the feasible
//! run and the row maximum are both found by bisection over the grid indices.

use alloc::vec;
use alloc::vec::Vec;

use crate::divergences::FDivergenceFamily;
use crate::error::{Error, Result};
use crate::measures::{check_len, mean_var_of, EmpiricalMeasure, ProblemData};

/// Re-centerings allowed per zoom level when the incumbent sits on a window edge.
const MAX_RECENTER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub grid_per_dim: usize,
    pub refine_rounds: usize,
    /// Window shrink factor per refinement round.
    pub zoom: f64,
}

impl OracleConfig {
    /// 4001 points per axis for two atoms, 1201 for three.
    pub fn for_atoms(n: usize) -> Self {
        Self {
            grid_per_dim: if n <= 2 { 4001 } else { 1201 },
            refine_rounds: 3,
            zoom: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_per_dim < 101 {
            return Err(Error::InvalidConfig("grid_per_dim must be at least 101"));
        }
        if !(self.zoom > 1.0) {
            return Err(Error::InvalidConfig("zoom must exceed 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// `E_q[rho] + Var_q[phi]` by direct weighted sums.
pub fn primal_value(q: &[f64], data: &ProblemData) -> Result<f64> {
    check_len(q.len(), data.len())?;
    let (mean_rho, _) = mean_var_of(q, data.rho())?;
    let (_, var_phi) = mean_var_of(q, data.phi())?;
    Ok(mean_rho + var_phi)
}

/// One axis of a search window: `lo + i*step` for `i < points`.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    step: f64,
    points: usize,
}

impl Axis {
    fn full(points: usize) -> Self {
        Self {
            lo: 0.0,
            step: 1.0 / (points - 1) as f64,
            points,
        }
    }

    /// Window of width `width` centred on `c`, clipped to `[0, 1]`.
    fn around(c: f64, width: f64, points: usize) -> Self {
        let width = width.min(1.0);
        let lo = (c - width / 2.0).clamp(0.0, 1.0 - width);
        Self {
            lo,
            step: width / (points - 1) as f64,
            points,
        }
    }

    fn at(&self, i: usize) -> f64 {
        (self.lo + i as f64 * self.step).min(1.0)
    }

    fn width(&self) -> f64 {
        self.step * (self.points - 1) as f64
    }

    /// Whether index `i` lies in the outer tenth of the window on a side that
    /// is not an edge of `[0, 1]`. Near the ball boundary the best feasible
    /// grid point can sit a few cells inside the window while the optimum is
    /// outside it.
    fn interior_edge(&self, i: usize) -> bool {
        let band = self.points / 10;
        (i <= band && self.lo > 0.0) || (i + band + 1 >= self.points && self.at(self.points - 1) < 1.0)
    }
}

struct Sweep<'a> {
    data: &'a ProblemData,
    p: &'a EmpiricalMeasure,
    family: &'a FDivergenceFamily,
    eta: f64,
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    value: f64,
    q: [f64; 3],
    idx: [usize; 2],
}

impl Sweep<'_> {
    fn term(&self, k: usize, q: f64) -> f64 {
        let pk = self.p.weights()[k];
        match self.family.f_eval(q / pk).finite() {
            Some(v) => pk * v,
            None => f64::INFINITY,
        }
    }

    fn objective(&self, q: &[f64]) -> f64 {
        let (rho, phi) = (self.data.rho(), self.data.phi());
        let mut m_rho = 0.0;
        let mut m_phi = 0.0;
        let mut m_phi2 = 0.0;
        for k in 0..q.len() {
            m_rho += q[k] * rho[k];
            m_phi += q[k] * phi[k];
            m_phi2 += q[k] * phi[k] * phi[k];
        }
        m_rho + (m_phi2 - m_phi * m_phi).max(0.0)
    }

    fn two(&self, a: &Axis) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        for i in 0..a.points {
            let q1 = a.at(i);
            let q2 = (1.0 - q1).max(0.0);
            if self.term(0, q1) + self.term(1, q2) > self.eta {
                continue;
            }
            let v = self.objective(&[q1, q2]);
            if best.is_none_or(|b| v > b.value) {
                best = Some(Hit {
                    value: v,
                    q: [q1, q2, 0.0],
                    idx: [i, 0],
                });
            }
        }
        best
    }

    /// Best feasible point of a two-axis window. Each row's feasible run is
    /// located by bisection; the objective is concave along the row, so its
    /// maximum on the run is located by bisection too unless `exhaustive`.
    fn three(&self, a: &Axis, b: &Axis, exhaustive: bool) -> Option<Hit> {
        let (rho, phi) = (self.data.rho(), self.data.phi());
        let t1: Vec<f64> = (0..a.points).map(|i| self.term(0, a.at(i))).collect();
        let t2: Vec<f64> = (0..b.points).map(|j| self.term(1, b.at(j))).collect();
        // Both axes share a step, so q3 = 1 - q1 - q2 depends on i + j only.
        let c = 1.0 - a.lo - b.lo;
        let t3: Vec<f64> = (0..a.points + b.points - 1)
            .map(|s| {
                let q3 = c - s as f64 * a.step;
                if q3 < -1e-12 {
                    f64::INFINITY
                } else {
                    self.term(2, q3.max(0.0))
                }
            })
            .collect();
        let mut best: Option<Hit> = None;
        for i in 0..a.points {
            let q1 = a.at(i);
            let (r1, f1, g1) = (q1 * rho[0], q1 * phi[0], q1 * phi[0] * phi[0]);
            let row = &t3[i..i + b.points];
            let Some((lo, hi)) = feasible_run(t1[i], &t2, row, self.eta) else {
                continue;
            };
            let point = |j: usize| {
                let q2 = b.at(j);
                let q3 = (1.0 - q1 - q2).max(0.0);
                let m_rho = r1 + q2 * rho[1] + q3 * rho[2];
                let m_phi = f1 + q2 * phi[1] + q3 * phi[2];
                let m_phi2 = g1 + q2 * phi[1] * phi[1] + q3 * phi[2] * phi[2];
                (m_rho + (m_phi2 - m_phi * m_phi).max(0.0), q2, q3)
            };
            let feasible = |j: usize| t1[i] + t2[j] + row[j] <= self.eta;
            let mut consider = |j: usize| {
                let (v, q2, q3) = point(j);
                if best.is_none_or(|h| v > h.value) {
                    best = Some(Hit {
                        value: v,
                        q: [q1, q2, q3],
                        idx: [i, j],
                    });
                }
            };
            if exhaustive {
                (lo..=hi).filter(|&j| feasible(j)).for_each(&mut consider);
                continue;
            }
            // First j on the run whose forward difference is not positive.
            let (mut l, mut h) = (lo, hi);
            while l < h {
                let mid = (l + h) / 2;
                if point(mid + 1).0 <= point(mid).0 {
                    h = mid;
                } else {
                    l = mid + 1;
                }
            }
            if feasible(l) {
                consider(l);
            } else {
                (lo..=hi).filter(|&j| feasible(j)).for_each(&mut consider);
            }
        }
        best
    }
}

/// Index range of one grid row on which `d1 + t2[j] + t3[j] <= eta`.
///
/// The divergence is convex in `q2` along a row, so its feasible set is an
/// interval around the row minimum; the ends are found by bisection. Rows
/// stop where `t3` turns infinite (`q3 < 0`).
fn feasible_run(d1: f64, t2: &[f64], t3: &[f64], eta: f64) -> Option<(usize, usize)> {
    let len = t3.iter().position(|v| *v == f64::INFINITY).unwrap_or(t3.len()).min(t2.len());
    if len == 0 {
        return None;
    }
    let d = |j: usize| d1 + t2[j] + t3[j];
    // First j whose forward difference is nonnegative.
    let (mut lo, mut hi) = (0, len - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if d(mid + 1) >= d(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let jm = lo;
    if d(jm) > eta {
        return None;
    }
    let (mut a, mut b) = (0, jm);
    while a < b {
        let mid = (a + b) / 2;
        if d(mid) <= eta {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    let first = a;
    let (mut a, mut b) = (jm, len - 1);
    while a < b {
        let mid = (a + b).div_ceil(2);
        if d(mid) <= eta {
            a = mid;
        } else {
            b = mid - 1;
        }
    }
    Some((first, a))
}

/// Grid maximum of the primal objective over the divergence ball, followed by
/// `refine_rounds` zooms around the incumbent.
pub fn primal_sup_grid(
    data: &ProblemData,
    p: &EmpiricalMeasure,
    family: &FDivergenceFamily,
    eta: f64,
    config: &OracleConfig,
) -> Result<OracleResult> {
    config.validate()?;
    data.check_against(p)?;
    family.check_eta(eta)?;
    let n = p.len();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedSize(n));
    }
    let sweep = Sweep {
        data,
        p,
        family,
        eta,
    };
    let m = config.grid_per_dim;
    let search = |a: &Axis, b: &Axis| if n == 2 { sweep.two(a) } else { sweep.three(a, b, false) };

    let full = Axis::full(m);
    // The baseline itself is always feasible, so it seeds the incumbent.
    let baseline = Hit {
        value: sweep.objective(p.weights()),
        q: [p.weights()[0], p.weights()[1], if n == 3 { p.weights()[2] } else { 0.0 }],
        idx: [0, 0],
    };
    let mut best = match search(&full, &full) {
        Some(h) if h.value >= baseline.value => h,
        _ => baseline,
    };
    let mut width = 1.0;
    for _ in 0..config.refine_rounds {
        width /= config.zoom;
        for _ in 0..MAX_RECENTER {
            let a = Axis::around(best.q[0], width, m);
            let b = Axis::around(best.q[1], width, m);
            let Some(hit) = search(&a, &b) else { break };
            let moved = hit.value > best.value;
            if moved {
                best = hit;
            }
            let on_edge = a.interior_edge(hit.idx[0]) || (n == 3 && b.interior_edge(hit.idx[1]));
            if !(moved && on_edge) || a.width() <= 0.0 {
                break;
            }
        }
    }
    let argmax = best.q[..n].to_vec();
    Ok(OracleResult {
        value: primal_value(&argmax, data)?,
        argmax,
    })
}

/// Uniformly spaced points of the simplex (for tests and sampling); `steps`
/// subdivisions per axis.
pub fn simplex_grid(n: usize, steps: usize) -> Vec<Vec<f64>> {
    let h = 1.0 / steps as f64;
    match n {
        2 => (0..=steps).map(|i| vec![i as f64 * h, 1.0 - i as f64 * h]).collect(),
        3 => {
            let mut out = Vec::new();
            for i in 0..=steps {
                for j in 0..=steps - i {
                    let (a, b) = (i as f64 * h, j as f64 * h);
                    out.push(vec![a, b, (1.0 - a - b).max(0.0)]);
                }
            }
            out
        }
        _ => Vec::new(),
    }
}
