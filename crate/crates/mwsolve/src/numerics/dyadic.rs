use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::bigint::{BigInt, BigUint};
use num::{One, ToPrimitive, Zero};

use super::{is_power_of_two, Rational};
use crate::error::{Error, Result};

/// An exact point of `[0,1]` with terminating binary expansion, stored as
/// `numerator / 2^level`.
///
/// Canonical form: the numerator is odd, or the level is zero. Construction
/// canonicalizes, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    numerator: BigUint,
    level: u32,
}

impl DyadicPoint {
    pub fn new(numerator: BigUint, level: u32) -> Result<Self> {
        if numerator > (BigUint::one() << level) {
            return Err(Error::Domain(format!(
                "dyadic point {numerator}/2^{level} lies outside [0,1]"
            )));
        }
        Ok(Self::canonical(numerator, level))
    }

    fn canonical(mut numerator: BigUint, mut level: u32) -> Self {
        if numerator.is_zero() {
            return Self { numerator, level: 0 };
        }
        let strip = numerator.trailing_zeros().unwrap_or(0).min(u64::from(level)) as u32;
        numerator >>= strip;
        level -= strip;
        Self { numerator, level }
    }

    pub fn from_ints(numerator: u64, level: u32) -> Result<Self> {
        Self::new(BigUint::from(numerator), level)
    }

    pub fn zero() -> Self {
        Self { numerator: BigUint::zero(), level: 0 }
    }

    pub fn one() -> Self {
        Self { numerator: BigUint::one(), level: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.level == 0 && self.numerator.is_one()
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn value(&self) -> Rational {
        Rational::new(
            BigInt::from(self.numerator.clone()),
            BigInt::one() << self.level,
        )
    }

    /// Reads a dyadic point back out of a reduced rational; `None` when the
    /// denominator is not a power of two or the value leaves `[0,1]`.
    pub fn from_rational(r: &Rational) -> Option<Self> {
        if !super::in_unit_interval(r) {
            return None;
        }
        let denom = r.denom().to_biguint()?;
        if !is_power_of_two(&denom) {
            return None;
        }
        let level = denom.trailing_zeros().unwrap_or(0).to_u32()?;
        let numerator = r.numer().to_biguint()?;
        Some(Self { numerator, level })
    }

    /// x/2.
    pub fn halve(&self) -> Self {
        Self::canonical(self.numerator.clone(), self.level + 1)
    }

    /// (x+1)/2.
    pub fn half_shift(&self) -> Self {
        let numerator = &self.numerator + (BigUint::one() << self.level);
        Self::canonical(numerator, self.level + 1)
    }

    /// The branch map (x + k) / 2^m; requires k < 2^m so the image stays in [0,1].
    pub fn branch_map(&self, k: u64, m: u32) -> Self {
        debug_assert!(m < 64 && k < (1u64 << m));
        let numerator = &self.numerator + (BigUint::from(k) << self.level);
        Self::canonical(numerator, self.level + m)
    }

    /// 1 - x.
    pub fn complement(&self) -> Self {
        let numerator = (BigUint::one() << self.level) - &self.numerator;
        Self::canonical(numerator, self.level)
    }

    /// Binary digits of the terminating expansion, most significant first;
    /// the digit count equals the level. The point 1 has no such expansion
    /// and must be special-cased by callers.
    pub fn binary_digits(&self) -> Vec<bool> {
        assert!(!self.is_one(), "1 has no terminating binary expansion");
        (0..self.level)
            .rev()
            .map(|i| self.numerator.bit(u64::from(i)))
            .collect()
    }

    /// Base-2^m digits of the terminating expansion, most significant first.
    /// The level is padded up to the next multiple of m.
    pub fn digits_base(&self, m: u32) -> Vec<u32> {
        assert!(m >= 1 && !self.is_one());
        if self.is_zero() {
            return Vec::new();
        }
        let blocks = self.level.div_ceil(m);
        let shifted = &self.numerator << (blocks * m - self.level);
        let mask = BigUint::from((1u64 << m) - 1);
        (0..blocks)
            .rev()
            .map(|b| {
                let d: BigUint = (&shifted >> (b * m)) & &mask;
                d.to_u32().expect("digit fits in u32")
            })
            .collect()
    }

    /// All points k/2^level for k = 0..=2^level, ascending.
    pub fn grid(level: u32) -> impl Iterator<Item = DyadicPoint> {
        let count = (BigUint::one() << level) + BigUint::one();
        num::range(BigUint::zero(), count)
            .map(move |k| DyadicPoint::canonical(k, level))
    }
}

impl PartialOrd for DyadicPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        let level = self.level.max(other.level);
        let a = &self.numerator << (level - self.level);
        let b = &other.numerator << (level - other.level);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.level)
    }
}

impl FromStr for DyadicPoint {
    type Err = Error;

    /// Accepts the "k/2^n" form produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: &str, pos: usize| Error::Parse { msg: msg.to_string(), pos };
        let slash = s.find("/2^").ok_or_else(|| err("expected k/2^n", 0))?;
        let numerator = s[..slash]
            .parse::<BigUint>()
            .map_err(|_| err("invalid numerator", 0))?;
        let level = s[slash + 3..]
            .parse::<u32>()
            .map_err(|_| err("invalid level", slash + 3))?;
        Self::new(numerator, level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;
    use proptest::prelude::*;

    #[test]
    fn canonicalizes_on_construction() {
        let x = DyadicPoint::from_ints(2, 2).unwrap();
        assert_eq!(x, DyadicPoint::from_ints(1, 1).unwrap());
        assert_eq!(x.to_string(), "1/2^1");
        assert_eq!(DyadicPoint::from_ints(4, 2).unwrap(), DyadicPoint::one());
        assert_eq!(DyadicPoint::from_ints(0, 9).unwrap(), DyadicPoint::zero());
    }

    #[test]
    fn rejects_points_above_one() {
        assert!(DyadicPoint::from_ints(5, 2).is_err());
    }

    #[test]
    fn value_and_from_rational_invert() {
        let x = DyadicPoint::from_ints(7, 4).unwrap();
        assert_eq!(x.value(), rat(7, 16));
        assert_eq!(DyadicPoint::from_rational(&rat(7, 16)).unwrap(), x);
        assert!(DyadicPoint::from_rational(&rat(1, 3)).is_none());
        assert!(DyadicPoint::from_rational(&rat(9, 8)).is_none());
    }

    #[test]
    fn halving_maps() {
        let x = DyadicPoint::from_ints(3, 2).unwrap(); // 3/4
        assert_eq!(x.halve().value(), rat(3, 8));
        assert_eq!(x.half_shift().value(), rat(7, 8));
        assert_eq!(DyadicPoint::one().half_shift(), DyadicPoint::one());
        assert_eq!(DyadicPoint::zero().half_shift().value(), rat(1, 2));
    }

    #[test]
    fn branch_map_is_affine_contraction() {
        let x = DyadicPoint::from_ints(1, 1).unwrap(); // 1/2
        assert_eq!(x.branch_map(2, 2).value(), rat(5, 8));
        assert_eq!(x.branch_map(3, 2).value(), rat(7, 8));
        assert_eq!(DyadicPoint::one().branch_map(3, 2), DyadicPoint::one());
    }

    #[test]
    fn digit_extraction() {
        let x = DyadicPoint::from_ints(3, 2).unwrap(); // 3/4
        assert_eq!(x.binary_digits(), vec![true, true]);
        assert_eq!(x.digits_base(2), vec![3]);
        let y = DyadicPoint::from_ints(1, 3).unwrap(); // 1/8 = 0.02 in base 4
        assert_eq!(y.digits_base(2), vec![0, 2]);
        assert_eq!(y.binary_digits(), vec![false, false, true]);
        assert!(DyadicPoint::zero().digits_base(4).is_empty());
    }

    #[test]
    fn grid_is_ascending_and_complete() {
        let pts: Vec<_> = DyadicPoint::grid(3).collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], DyadicPoint::zero());
        assert_eq!(pts[8], DyadicPoint::one());
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn display_parse_round_trip() {
        for s in ["0/2^0", "1/2^0", "3/2^5", "11/2^7"] {
            let x: DyadicPoint = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
        assert!("3/4".parse::<DyadicPoint>().is_err());
    }

    proptest! {
        #[test]
        fn ordering_matches_rational_ordering(a in 0u64..1024, b in 0u64..1024) {
            let x = DyadicPoint::from_ints(a.min(1 << 10), 10).unwrap();
            let y = DyadicPoint::from_ints(b.min(1 << 10), 10).unwrap();
            prop_assert_eq!(x.cmp(&y), x.value().cmp(&y.value()));
        }

        #[test]
        fn digits_reconstruct_value(k in 0u64..4096, m in 1u32..5) {
            let x = DyadicPoint::from_ints(k % 4096, 12).unwrap();
            if !x.is_one() {
                let base = 1u64 << m;
                let mut acc = rat(0, 1);
                let mut scale = rat(1, base as i64);
                for d in x.digits_base(m) {
                    acc += &scale * rat(d as i64, 1);
                    scale *= rat(1, base as i64);
                }
                prop_assert_eq!(acc, x.value());
            }
        }
    }
}
