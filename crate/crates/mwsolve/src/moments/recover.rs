//! Exact recovery of a discrete measure from its power moments.
//!
//! The classical linear-algebra route: the atom locations are the roots of
//! the monic polynomial whose coefficients solve the Hankel system built
//! from the moments, and the masses then solve a Vandermonde system. All of
//! it runs in exact rational arithmetic, so the result either reproduces
//! every supplied moment bit for bit or the input is rejected as not coming
//! from an r-atomic probability measure on (0,1).

use num::bigint::{BigInt, BigUint};
use num::{One, Signed, ToPrimitive, Zero};

use super::MomentSequence;
use crate::error::{Error, Result};
use crate::numerics::Rational;
use crate::solutions::MeasureSpec;

/// Factorization budget for the rational-root search at r >= 3.
const DIVISOR_SEARCH_CAP: u128 = 1 << 40;

/// Recovers the unique r-atomic probability measure on (0,1) with the given
/// moments, when one exists. Needs at least 2r moments (c_0..c_{2r-1});
/// every supplied moment is verified against the reconstruction.
pub fn recover_discrete_measure(c: &MomentSequence, r: usize) -> Result<MeasureSpec> {
    if r == 0 {
        return Err(Error::Domain("atom count r must be positive".into()));
    }
    if c.len() < 2 * r {
        return Err(Error::Domain(format!(
            "recovering {r} atoms needs {} moments, got {}",
            2 * r,
            c.len()
        )));
    }
    if !c.is_probability_normalized() {
        return Err(Error::NotAtomic(format!(
            "c_0 = {} is not 1, so this is no probability moment sequence",
            c.get(0)
        )));
    }

    // Hankel system for the monic annihilating polynomial z^r + a_{r-1} z^{r-1} + ... + a_0.
    let mut matrix = Vec::with_capacity(r);
    let mut rhs = Vec::with_capacity(r);
    for j in 0..r {
        matrix.push((0..r).map(|i| c.get(i + j).clone()).collect::<Vec<_>>());
        rhs.push(-c.get(r + j));
    }
    let coeffs = solve_linear(matrix, rhs).ok_or_else(|| {
        Error::NotAtomic(format!(
            "Hankel system is singular; no measure with exactly {r} atoms matches"
        ))
    })?;

    let roots = monic_rational_roots(&coeffs)?;
    if roots.len() != r {
        return Err(Error::NotAtomic(format!(
            "found {} distinct rational atom locations, expected {r}",
            roots.len()
        )));
    }
    for root in &roots {
        if *root <= Rational::zero() || *root >= Rational::one() {
            return Err(Error::NotAtomic(format!("atom location {root} outside (0,1)")));
        }
    }
    let mut roots = roots;
    roots.sort();

    // Vandermonde system for the masses.
    let mut matrix = Vec::with_capacity(r);
    let mut rhs = Vec::with_capacity(r);
    for j in 0..r {
        matrix.push(
            roots
                .iter()
                .map(|p| crate::numerics::rational_pow(p, j as u32))
                .collect::<Vec<_>>(),
        );
        rhs.push(c.get(j).clone());
    }
    let masses = solve_linear(matrix, rhs)
        .ok_or_else(|| Error::NotAtomic("mass system is singular".into()))?;
    for (p, w) in roots.iter().zip(&masses) {
        if !w.is_positive() {
            return Err(Error::NotAtomic(format!("atom at {p} would carry mass {w}")));
        }
    }

    // Round-trip every supplied moment.
    for j in 0..c.len() {
        let mut recon = Rational::zero();
        for (p, w) in roots.iter().zip(&masses) {
            recon += w * crate::numerics::rational_pow(p, j as u32);
        }
        if recon != *c.get(j) {
            return Err(Error::NotAtomic(format!(
                "moment c_{j} = {} is not reproduced (got {recon}); no {r}-atomic measure matches",
                c.get(j)
            )));
        }
    }

    MeasureSpec::atomic(roots.into_iter().zip(masses).collect())
}

/// Gaussian elimination over the rationals; `None` when singular.
fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&row| !a[row][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = &a[row][col] / &a[col][col];
            for k in col..n {
                let delta = &factor * &a[col][k];
                a[row][k] -= delta;
            }
            let delta = &factor * &b[col];
            b[row] -= delta;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= &a[row][k] * &x[k];
        }
        x[row] = acc / &a[row][row];
    }
    Some(x)
}

/// All distinct rational roots of z^n + coeffs[n-1] z^(n-1) + ... + coeffs[0].
fn monic_rational_roots(coeffs: &[Rational]) -> Result<Vec<Rational>> {
    match coeffs.len() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![-&coeffs[0]]),
        2 => {
            // z^2 + bz + c
            let b = &coeffs[1];
            let c = &coeffs[0];
            let four = Rational::from_integer(4.into());
            let two = Rational::from_integer(2.into());
            let disc = b * b - four * c;
            if disc.is_negative() {
                return Ok(Vec::new());
            }
            let Some(root) = exact_sqrt(&disc) else {
                return Ok(Vec::new());
            };
            let r1 = (-b - &root) / &two;
            let r2 = (-b + &root) / &two;
            if r1 == r2 {
                Ok(vec![r1])
            } else {
                Ok(vec![r1, r2])
            }
        }
        _ => integer_root_search(coeffs),
    }
}

/// sqrt of a nonnegative rational when it is itself rational.
fn exact_sqrt(v: &Rational) -> Option<Rational> {
    let num = v.numer().to_biguint()?;
    let den = v.denom().to_biguint()?;
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &sn * &sn == num && &sd * &sd == den {
        Some(Rational::new(BigInt::from(sn), BigInt::from(sd)))
    } else {
        None
    }
}

/// Rational-root-theorem search after clearing denominators.
fn integer_root_search(coeffs: &[Rational]) -> Result<Vec<Rational>> {
    let n = coeffs.len();
    let mut lcm = BigInt::one();
    for c in coeffs {
        lcm = num::integer::lcm(lcm, c.denom().clone());
    }
    // integer coefficients, leading one is lcm itself
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let leading = lcm.magnitude().clone();
    let constant = ints[0].magnitude().clone();
    if constant.is_zero() {
        // zero is a root; it can never be an atom location, and crossing it
        // off would drop below the requested atom count anyway
        return Ok(Vec::new());
    }
    let mut roots = Vec::new();
    for p in divisors(&constant)? {
        for q in divisors(&leading)? {
            let candidate = Rational::new(BigInt::from(p.clone()), BigInt::from(q));
            if roots.contains(&candidate) {
                continue;
            }
            // monic in rational form: evaluate z^n + sum coeffs[i] z^i
            let mut value = crate::numerics::rational_pow(&candidate, n as u32);
            for (i, c) in coeffs.iter().enumerate() {
                value += c * crate::numerics::rational_pow(&candidate, i as u32);
            }
            if value.is_zero() {
                roots.push(candidate);
            }
        }
    }
    roots.sort();
    Ok(roots)
}

fn divisors(v: &BigUint) -> Result<Vec<BigUint>> {
    let v = v.to_u128().ok_or_else(|| {
        Error::Resource("coefficient too large for the rational-root search".into())
    })?;
    if v > DIVISOR_SEARCH_CAP {
        return Err(Error::Resource(format!(
            "divisor search on {v} exceeds the cap {DIVISOR_SEARCH_CAP}"
        )));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u128;
    while d * d <= v {
        if v % d == 0 {
            small.push(BigUint::from(d));
            if d * d != v {
                large.push(BigUint::from(v / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}
