//! Exact rational and dyadic arithmetic.
//!
//! Everything downstream evaluates on points of `[0,1]` with terminating
//! base-2 (equivalently base-2^m) expansions, where values come out as exact
//! big-integer rationals, or on general rationals, where values come back as
//! certified [`Enclosure`]s. No floating point ever feeds a computation;
//! floats exist only as a presentation layer on enclosure midpoints.

mod digits;
mod dyadic;
mod enclosure;

pub use digits::{expand, DigitString};
pub use dyadic::DyadicPoint;
pub use enclosure::Enclosure;

use num::bigint::{BigInt, BigUint};
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always in reduced form with positive denominator.
pub type Rational = num::BigRational;

/// Shorthand constructor from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// 2^n as a big integer.
pub fn pow2(n: u32) -> BigInt {
    BigInt::one() << n
}

/// r^n by repeated squaring, exactly.
pub fn rational_pow(r: &Rational, n: u32) -> Rational {
    let mut base = r.clone();
    let mut acc = Rational::one();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// True when 0 <= r <= 1.
pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// Parses "n/d" or "n" into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|e| Error::Parse {
        msg: format!("invalid rational {s:?}: {e}"),
        pos: 0,
    })
}

/// Exact binomial coefficient C(n, j). Errors when j > n.
pub fn binomial(n: u64, j: u64) -> Result<BigInt> {
    if j > n {
        return Err(Error::Domain(format!("binomial({n}, {j}) requires j <= n")));
    }
    Ok(num::integer::binomial(BigInt::from(n), BigInt::from(j)))
}

/// True when v is a power of two (v = 2^k for some k >= 0).
pub fn is_power_of_two(v: &BigUint) -> bool {
    if v.is_zero() {
        return false;
    }
    let tz = v.trailing_zeros().unwrap_or(0);
    (v >> tz).is_one()
}
