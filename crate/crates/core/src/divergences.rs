//! f-divergence generators and their Legendre conjugates.
//!
//! | family | f(t) | f*(y) |
//! |--------|------|-------|
//! | KL | t log t | e^(y-1) |
//! | α > 1 | (t^α - 1)/(α(α-1)) | c·y^m·1{y>0} + 1/(α(α-1)), m = α/(α-1) |
//! | α ∈ (0,1) | (t^α - 1)/(α(α-1)) | c·\|y\|^(-k) - 1/(α(1-α)) for y < 0, +inf otherwise, k = α/(1-α) |
//!
//! Every family here has domain `[0, inf)`, so f* is nondecreasing and the
//! derivative of f* is a nonnegative density.

use core::fmt;
use core::str::FromStr;

use alloc::format;
use alloc::string::ToString;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::math::{exp, ln, powf};

/// Above this exponent `e^(y-1)` is reported as `+inf`.
const KL_EXP_CAP: f64 = 700.0;

/// Largest admissible α.
pub const ALPHA_MAX: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    Kl,
    Alpha(f64),
}

/// A generator `f` with `f(1) = 0` on `(a, b)`, plus its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FDivergenceFamily {
    kind: FamilyKind,
    domain_lo: ExtReal,
    domain_hi: ExtReal,
    divergence_cap: ExtReal,
}

impl FDivergenceFamily {
    pub fn kl() -> Self {
        Self {
            kind: FamilyKind::Kl,
            domain_lo: ExtReal::ZERO,
            domain_hi: ExtReal::PosInf,
            divergence_cap: ExtReal::PosInf,
        }
    }

    /// α-divergence; α must lie in `(0, 1) ∪ (1, 8]`.
    pub fn alpha(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= ALPHA_MAX) || alpha == 1.0 {
            return Err(Error::InvalidFamily(format!(
                "alpha = {alpha} outside (0,1) ∪ (1,{ALPHA_MAX}]"
            )));
        }
        let cap = if alpha < 1.0 {
            ExtReal::Finite(1.0 / (alpha * (1.0 - alpha)))
        } else {
            ExtReal::PosInf
        };
        Ok(Self {
            kind: FamilyKind::Alpha(alpha),
            domain_lo: ExtReal::ZERO,
            domain_hi: ExtReal::PosInf,
            divergence_cap: cap,
        })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn domain_lo(&self) -> ExtReal {
        self.domain_lo
    }

    pub fn domain_hi(&self) -> ExtReal {
        self.domain_hi
    }

    /// Supremum of `D_f` over all measures: `1/(α(1-α))` for α in (0,1), `+inf` otherwise.
    pub fn divergence_cap(&self) -> ExtReal {
        self.divergence_cap
    }

    pub fn is_kl(&self) -> bool {
        matches!(self.kind, FamilyKind::Kl)
    }

    /// `Some(α)` for α in (0,1), where f* has a `+inf` region.
    pub fn alpha_below_one(&self) -> Option<f64> {
        match self.kind {
            FamilyKind::Alpha(a) if a < 1.0 => Some(a),
            _ => None,
        }
    }

    /// Checks `0 < eta < divergence_cap`.
    pub fn check_eta(&self, eta: f64) -> Result<()> {
        if eta > 0.0 && eta.is_finite() && self.divergence_cap > eta {
            Ok(())
        } else {
            Err(Error::EtaOutOfRange {
                eta,
                cap: self.divergence_cap.to_f64(),
            })
        }
    }

    /// `f(t)`, with the lower-semicontinuous extension at `t = 0` and `+inf` for `t < 0`.
    pub fn f_eval(&self, t: f64) -> ExtReal {
        if t.is_nan() || t < 0.0 {
            return ExtReal::PosInf;
        }
        match self.kind {
            FamilyKind::Kl => {
                if t == 0.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::new(t * ln(t))
                }
            }
            FamilyKind::Alpha(a) => ExtReal::new((powf(t, a) - 1.0) / (a * (a - 1.0))),
        }
    }

    /// Legendre conjugate `f*(y) = sup_t { y t - f(t) }`.
    pub fn conj_eval(&self, y: f64) -> ExtReal {
        match self.kind {
            FamilyKind::Kl => {
                if y - 1.0 > KL_EXP_CAP {
                    ExtReal::PosInf
                } else {
                    ExtReal::new(exp(y - 1.0))
                }
            }
            FamilyKind::Alpha(a) if a > 1.0 => {
                let base = 1.0 / (a * (a - 1.0));
                if y > 0.0 {
                    let m = a / (a - 1.0);
                    ExtReal::new(powf(y, m) * powf(a - 1.0, m) / a + base)
                } else {
                    ExtReal::Finite(base)
                }
            }
            FamilyKind::Alpha(a) => {
                if y >= 0.0 {
                    ExtReal::PosInf
                } else {
                    let k = a / (1.0 - a);
                    ExtReal::new(powf(-y, -k) * powf(1.0 - a, -k) / a - 1.0 / (a * (1.0 - a)))
                }
            }
        }
    }

    /// Right derivative of f*; `+inf` outside `dom f*`.
    pub fn conj_deriv(&self, y: f64) -> ExtReal {
        match self.kind {
            FamilyKind::Kl => self.conj_eval(y),
            FamilyKind::Alpha(a) if a > 1.0 => {
                if y > 0.0 {
                    let m = a / (a - 1.0);
                    ExtReal::new(m * powf(y, m - 1.0) * powf(a - 1.0, m) / a)
                } else {
                    ExtReal::ZERO
                }
            }
            FamilyKind::Alpha(a) => {
                if y >= 0.0 {
                    ExtReal::PosInf
                } else {
                    let k = a / (1.0 - a);
                    ExtReal::new(k * powf(-y, -k - 1.0) * powf(1.0 - a, -k) / a)
                }
            }
        }
    }

    /// Whether `y` is in the interior of `dom f*`.
    pub fn in_conj_interior(&self, y: f64) -> bool {
        match self.kind {
            FamilyKind::Kl => y - 1.0 <= KL_EXP_CAP,
            FamilyKind::Alpha(a) if a > 1.0 => y.is_finite(),
            FamilyKind::Alpha(_) => y < 0.0,
        }
    }
}

impl fmt::Display for FDivergenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::Kl => f.write_str("kl"),
            FamilyKind::Alpha(a) => write!(f, "alpha:{a}"),
        }
    }
}

/// Parses `kl` or `alpha:<value>`, case-insensitively.
impl FromStr for FDivergenceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = s.trim().to_ascii_lowercase();
        if spec == "kl" {
            return Ok(Self::kl());
        }
        match spec.strip_prefix("alpha:") {
            Some(v) => {
                let a: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidFamily(s.to_string()))?;
                Self::alpha(a)
            }
            None => Err(Error::InvalidFamily(s.to_string())),
        }
    }
}
