//! The de Rham curve family.
//!
//! For a parameter p in (0,1), the curve is the unique bounded solution of
//! the two-branch system
//!
//! ```text
//! f(x/2)     = p f(x),
//! f((x+1)/2) = (1-p) f(x) + p,
//! ```
//!
//! a strictly increasing continuous distribution function (singular for
//! p != 1/2, the identity for p = 1/2). On a terminating binary expansion
//! the value is the finite digit product sum
//!
//! ```text
//! f(sum x_n 2^-n) = sum_n x_n p^(n - s_{n-1}) (1-p)^(s_{n-1}),
//! s_{n-1} = x_1 + ... + x_{n-1},
//! ```
//!
//! which this module evaluates exactly; non-dyadic arguments get enclosures
//! whose width is the exact increment of the curve over the truncation
//! interval.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::numerics::{expand, DyadicPoint, Enclosure, Rational};

/// Parameter of a de Rham curve: a rational p with 0 < p < 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeRhamParam {
    p: Rational,
}

impl DeRhamParam {
    pub fn new(p: Rational) -> Result<Self> {
        if p <= Rational::zero() || p >= Rational::one() {
            return Err(Error::Domain(format!("de Rham parameter {p} outside (0,1)")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    fn q(&self) -> Rational {
        Rational::one() - &self.p
    }

    /// Exact value on a dyadic point via the digit product formula.
    pub fn eval(&self, x: &DyadicPoint) -> Rational {
        if x.is_one() {
            return Rational::one();
        }
        let q = self.q();
        let mut acc = Rational::zero();
        // Measure of the interval of points sharing the digits consumed so
        // far: p per zero, (1-p) per one.
        let mut prefix = Rational::one();
        for bit in x.binary_digits() {
            if bit {
                acc += &prefix * &self.p;
                prefix *= &q;
            } else {
                prefix *= &self.p;
            }
        }
        acc
    }

    /// Certified enclosure on an arbitrary rational of [0,1] from the first
    /// `digits` binary digits. The width is the exact curve increment over
    /// the remaining dyadic interval, p^(#zeros) (1-p)^(#ones).
    pub fn eval_enclosed(&self, x: &Rational, digits: u32) -> Result<Enclosure> {
        if digits == 0 {
            return Err(Error::Domain("digit budget must be at least 1".into()));
        }
        if x.is_one() {
            // All-ones expansion: the geometric tail sums to 1 exactly.
            return Ok(Enclosure::point(Rational::one()));
        }
        let ds = expand(x, 2, digits as usize)?;
        let q = self.q();
        let mut acc = Rational::zero();
        let mut prefix = Rational::one();
        for d in ds.padded(digits as usize) {
            if d == 1 {
                acc += &prefix * &self.p;
                prefix *= &q;
            } else {
                prefix *= &self.p;
            }
        }
        let hi = &acc + &prefix;
        Ok(Enclosure::new(acc, hi).expect("width nonnegative"))
    }

    /// Both sides of the point reflection: `(f_p(x), 1 - f_{1-p}(1-x))`.
    /// The two components agree exactly for every dyadic x.
    pub fn reflect_check(&self, x: &DyadicPoint) -> (Rational, Rational) {
        let direct = self.eval(x);
        let mirrored = DeRhamParam { p: self.q() };
        let reflected = Rational::one() - mirrored.eval(&x.complement());
        (direct, reflected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, rational_pow};
    use proptest::prelude::*;

    /// Independent oracle: iterate the defining two-branch system downward
    /// from the binary digits instead of using the product formula.
    fn derham_by_system(p: &Rational, x: &DyadicPoint) -> Rational {
        if x.is_zero() {
            return Rational::zero();
        }
        if x.is_one() {
            return Rational::one();
        }
        // x = 0.b rest => x = (rest + b)/2, so f(x) = p f(rest') with the
        // appropriate branch applied in most-significant-first order, folded
        // from the right.
        let q = Rational::one() - p;
        x.binary_digits().iter().rev().fold(Rational::zero(), |acc, &bit| {
            if bit {
                &q * acc + p
            } else {
                p * acc
            }
        })
    }

    #[test]
    fn rejects_parameters_outside_open_interval() {
        assert!(DeRhamParam::new(rat(0, 1)).is_err());
        assert!(DeRhamParam::new(rat(1, 1)).is_err());
        assert!(DeRhamParam::new(rat(5, 4)).is_err());
        assert!(DeRhamParam::new(rat(1, 2)).is_ok());
    }

    #[test]
    fn power_law_at_reciprocal_powers_of_two() {
        // f_p(1/2^n) = p^n
        let p = DeRhamParam::new(rat(1, 3)).unwrap();
        let x = DyadicPoint::from_ints(1, 3).unwrap();
        assert_eq!(p.eval(&x), rat(1, 27));
        for n in 0..=20u32 {
            let x = DyadicPoint::from_ints(1, n).unwrap();
            assert_eq!(p.eval(&x), rational_pow(&rat(1, 3), n));
        }
    }

    #[test]
    fn half_parameter_is_identity() {
        let p = DeRhamParam::new(rat(1, 2)).unwrap();
        for x in DyadicPoint::grid(6) {
            assert_eq!(p.eval(&x), x.value());
        }
    }

    #[test]
    fn hand_iterated_value_at_three_quarters() {
        // digits [1,1]: p + p(1-p) = 5/9 for p = 1/3
        let p = DeRhamParam::new(rat(1, 3)).unwrap();
        let x = DyadicPoint::from_ints(3, 2).unwrap();
        assert_eq!(p.eval(&x), rat(5, 9));
    }

    #[test]
    fn agrees_with_two_branch_system_oracle() {
        for pr in [rat(1, 3), rat(2, 5), rat(3, 4)] {
            let p = DeRhamParam::new(pr.clone()).unwrap();
            for x in DyadicPoint::grid(7) {
                assert_eq!(p.eval(&x), derham_by_system(&pr, &x), "p={pr} x={x}");
            }
        }
    }

    #[test]
    fn enclosure_examples() {
        // identity case: width 2^-10 around 1/3
        let p = DeRhamParam::new(rat(1, 2)).unwrap();
        let e = p.eval_enclosed(&rat(1, 3), 10).unwrap();
        assert_eq!(e.width(), rat(1, 1024));
        assert!(e.contains(&rat(1, 3)));

        // 1/3 at p = 1/3, two digits [0,1]: [1/9, 1/3]
        let p = DeRhamParam::new(rat(1, 3)).unwrap();
        let e = p.eval_enclosed(&rat(1, 3), 2).unwrap();
        assert_eq!(e.lo(), &rat(1, 9));
        assert_eq!(e.hi(), &rat(1, 3));

        // all-zero digits at x = 0
        let e1 = p.eval_enclosed(&rat(0, 1), 1).unwrap();
        assert_eq!((e1.lo().clone(), e1.hi().clone()), (rat(0, 1), rat(1, 3)));
        let e2 = p.eval_enclosed(&rat(0, 1), 2).unwrap();
        assert_eq!((e2.lo().clone(), e2.hi().clone()), (rat(0, 1), rat(1, 9)));

        // x = 1 collapses via the geometric tail
        let e = p.eval_enclosed(&rat(1, 1), 4).unwrap();
        assert!(e.is_point());
        assert_eq!(e.lo(), &rat(1, 1));
    }

    #[test]
    fn reflection_examples() {
        let p = DeRhamParam::new(rat(1, 3)).unwrap();
        let x = DyadicPoint::from_ints(1, 2).unwrap();
        let (a, b) = p.reflect_check(&x);
        assert_eq!(a, rat(1, 9));
        assert_eq!(b, rat(1, 9));

        let p = DeRhamParam::new(rat(1, 2)).unwrap();
        let x = DyadicPoint::from_ints(3, 3).unwrap();
        let (a, b) = p.reflect_check(&x);
        assert_eq!(a, rat(3, 8));
        assert_eq!(a, b);

        let p = DeRhamParam::new(rat(2, 3)).unwrap();
        let (a, b) = p.reflect_check(&DyadicPoint::one());
        assert_eq!(a, rat(1, 1));
        assert_eq!(b, rat(1, 1));
    }

    proptest! {
        #[test]
        fn strictly_increasing_on_dyadics(a in 0u64..512, b in 0u64..512, pn in 1i64..12) {
            let p = DeRhamParam::new(rat(pn, 13)).unwrap();
            let (a, b) = (a.min(b), a.max(b));
            if a != b {
                let x = DyadicPoint::from_ints(a, 9).unwrap();
                let y = DyadicPoint::from_ints(b, 9).unwrap();
                prop_assert!(p.eval(&x) < p.eval(&y));
            }
        }

        #[test]
        fn two_branch_system_holds_exactly(k in 0u64..256, pn in 1i64..12) {
            let p = DeRhamParam::new(rat(pn, 13)).unwrap();
            let x = DyadicPoint::from_ints(k, 8).unwrap();
            let fx = p.eval(&x);
            prop_assert_eq!(p.eval(&x.halve()), rat(pn, 13) * &fx);
            prop_assert_eq!(p.eval(&x.half_shift()), rat(13 - pn, 13) * &fx + rat(pn, 13));
        }

        #[test]
        fn averaging_residual_vanishes(k in 0u64..256, pn in 1i64..12) {
            let p = DeRhamParam::new(rat(pn, 13)).unwrap();
            let x = DyadicPoint::from_ints(k, 8).unwrap();
            let half = DyadicPoint::from_ints(1, 1).unwrap();
            let residual = p.eval(&x) - p.eval(&x.halve()) - p.eval(&x.half_shift()) + p.eval(&half);
            prop_assert!(residual.is_zero());
        }

        #[test]
        fn reflection_holds_on_dyadics(k in 0u64..512, pn in 1i64..12) {
            let p = DeRhamParam::new(rat(pn, 13)).unwrap();
            let x = DyadicPoint::from_ints(k, 9).unwrap();
            let (a, b) = p.reflect_check(&x);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn enclosures_nest_and_contain(n in 1i64..100, d in 2i64..100, pn in 1i64..12) {
            let n = n.min(d);
            let p = DeRhamParam::new(rat(pn, 13)).unwrap();
            let x = rat(n, d);
            let mut prev: Option<Enclosure> = None;
            for digits in [2u32, 4, 8, 12] {
                let e = p.eval_enclosed(&x, digits).unwrap();
                if let Some(prev) = &prev {
                    prop_assert!(prev.contains_enclosure(&e));
                    prop_assert!(e.width() <= prev.width());
                }
                prev = Some(e);
            }
        }
    }
}
