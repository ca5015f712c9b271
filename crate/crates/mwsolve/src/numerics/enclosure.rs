use std::fmt;

use num::{Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// A pair of rational bounds `[lo, hi]` certifying that a true value lies
/// between them. Produced by every evaluator on non-dyadic arguments;
/// combinators keep containment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("enclosure bounds out of order: [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(v: Rational) -> Self {
        Self { lo: v.clone(), hi: v }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.hi + &self.lo) / Rational::from_integer(2.into())
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn add(&self, other: &Enclosure) -> Self {
        Self { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &Enclosure) -> Self {
        Self { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    /// Scalar multiple; a negative scalar swaps the bounds.
    pub fn scale(&self, a: &Rational) -> Self {
        if a.is_negative() {
            Self { lo: &self.hi * a, hi: &self.lo * a }
        } else {
            Self { lo: &self.lo * a, hi: &self.hi * a }
        }
    }

    /// Widens the upper bound by t >= 0 (used for truncated series tails).
    pub fn pad_above(&self, t: &Rational) -> Self {
        debug_assert!(!t.is_negative());
        Self { lo: self.lo.clone(), hi: &self.hi + t }
    }

    pub fn is_point(&self) -> bool {
        self.width().is_zero()
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;
    use proptest::prelude::*;

    #[test]
    fn rejects_inverted_bounds() {
        assert!(Enclosure::new(rat(1, 2), rat(1, 3)).is_err());
    }

    #[test]
    fn point_has_zero_width() {
        let e = Enclosure::point(rat(2, 7));
        assert!(e.is_point());
        assert!(e.contains(&rat(2, 7)));
        assert_eq!(e.midpoint(), rat(2, 7));
    }

    #[test]
    fn scale_by_negative_swaps() {
        let e = Enclosure::new(rat(1, 4), rat(1, 2)).unwrap();
        let s = e.scale(&rat(-2, 1));
        assert_eq!(s.lo(), &rat(-1, 1));
        assert_eq!(s.hi(), &rat(-1, 2));
    }

    proptest! {
        // Containment survives the combinators: exact values of dyadic
        // points stand in for the enclosed quantities.
        #[test]
        fn combinators_preserve_containment(
            a in -100i64..100, b in -100i64..100, wa in 0i64..20, wb in 0i64..20,
            s in -5i64..5,
        ) {
            let va = rat(a, 64);
            let vb = rat(b, 64);
            let ea = Enclosure::new(va.clone() - rat(wa, 256), va.clone() + rat(wa, 256)).unwrap();
            let eb = Enclosure::new(vb.clone() - rat(wb, 256), vb.clone() + rat(wb, 256)).unwrap();
            prop_assert!(ea.add(&eb).contains(&(&va + &vb)));
            prop_assert!(ea.sub(&eb).contains(&(&va - &vb)));
            prop_assert!(ea.scale(&rat(s, 3)).contains(&(&va * rat(s, 3))));
        }
    }
}
