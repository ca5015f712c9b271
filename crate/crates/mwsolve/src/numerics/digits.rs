use num::{One, ToPrimitive, Zero};

use super::{in_unit_interval, Rational};
use crate::error::{Error, Result};

/// A finite prefix of the base-2^m expansion of a point of `[0,1]`.
///
/// Convention: rationals with terminating expansions use the terminating one;
/// x = 1 uses the all-(base-1) expansion, materialized up to the requested
/// length. `exact` is true when the digits shown reconstruct the point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitString {
    base: u32,
    digits: Vec<u32>,
    exact: bool,
}

impl DigitString {
    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Sum of digits[n] / base^(n+1).
    pub fn reconstruct(&self) -> Rational {
        let base = Rational::from_integer(self.base.into());
        let mut acc = Rational::zero();
        for &d in self.digits.iter().rev() {
            acc = (acc + Rational::from_integer(d.into())) / &base;
        }
        acc
    }

    /// Digits padded with zeros up to `len`; only meaningful when exact.
    pub(crate) fn padded(&self, len: usize) -> Vec<u32> {
        let mut d = self.digits.clone();
        d.resize(d.len().max(len), 0);
        d
    }
}

/// Expands x in base 2^m by exact long division, emitting at most
/// `max_digits` digits.
pub fn expand(x: &Rational, base: u32, max_digits: usize) -> Result<DigitString> {
    if base < 2 || !base.is_power_of_two() {
        return Err(Error::Domain(format!("base {base} is not a power of two >= 2")));
    }
    if !in_unit_interval(x) {
        return Err(Error::Domain(format!("{x} lies outside [0,1]")));
    }
    if x.is_one() {
        return Ok(DigitString {
            base,
            digits: vec![base - 1; max_digits],
            exact: false,
        });
    }
    let base_rat = Rational::from_integer(base.into());
    let mut rem = x.clone();
    let mut digits = Vec::new();
    let mut exact = true;
    for _ in 0..max_digits {
        if rem.is_zero() {
            break;
        }
        rem *= &base_rat;
        let d = rem.floor();
        digits.push(d.to_integer().to_u32().expect("digit below base"));
        rem -= d;
    }
    if !rem.is_zero() {
        exact = false;
    }
    Ok(DigitString { base, digits, exact })
}
