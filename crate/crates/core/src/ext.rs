//! Extended reals `[-inf, +inf]`.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg};

/// A value in the extended real line.
///
/// `Finite` never holds an infinity or NaN; constructors route those to the
/// matching variant. Adding `+inf` and `-inf` is treated as a bug and panics,
/// except through [`ExtReal::sub_inf_wins`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Lifts a float. `±inf` map to the infinite variants.
    ///
    /// # Panics
    /// On NaN.
    pub fn new(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not an extended real");
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Converts back to `f64`, infinities included.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// Multiplication by a strictly positive finite scalar.
    pub fn scale(self, c: f64) -> Self {
        debug_assert!(c > 0.0 && c.is_finite());
        match self {
            ExtReal::Finite(x) => ExtReal::new(x * c),
            inf => inf,
        }
    }

    /// `self - other` under the convention `inf - inf = inf`.
    pub fn sub_inf_wins(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::PosInf, _) | (_, ExtReal::NegInf) => ExtReal::PosInf,
            (ExtReal::NegInf, _) | (_, ExtReal::PosInf) => ExtReal::NegInf,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::new(a - b),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::new(x)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::new(a + b),
            (ExtReal::PosInf, ExtReal::NegInf) | (ExtReal::NegInf, ExtReal::PosInf) => {
                panic!("inf - inf is undefined here")
            }
            (ExtReal::PosInf, _) | (_, ExtReal::PosInf) => ExtReal::PosInf,
            _ => ExtReal::NegInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::new(rhs)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;

    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(-x),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl PartialEq<f64> for ExtReal {
    fn eq(&self, other: &f64) -> bool {
        self.to_f64() == *other
    }
}

impl PartialOrd<f64> for ExtReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.to_f64().partial_cmp(other)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_absorbs_infinity() {
        assert_eq!(ExtReal::PosInf + 3.0, ExtReal::PosInf);
        assert_eq!(ExtReal::Finite(1.0) + ExtReal::Finite(2.0), ExtReal::Finite(3.0));
        assert_eq!(ExtReal::new(f64::INFINITY), ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf.scale(0.5), ExtReal::PosInf);
    }

    #[test]
    fn inf_wins_convention() {
        assert_eq!(ExtReal::PosInf.sub_inf_wins(ExtReal::PosInf), ExtReal::PosInf);
        assert_eq!(ExtReal::Finite(1.0).sub_inf_wins(ExtReal::PosInf), ExtReal::NegInf);
    }

    #[test]
    #[should_panic]
    fn opposite_infinities_panic() {
        let _ = ExtReal::PosInf + ExtReal::NegInf;
    }

    #[test]
    fn ordering() {
        assert!(ExtReal::NegInf < ExtReal::Finite(-1e300));
        assert!(ExtReal::PosInf > 1e300);
    }
}
