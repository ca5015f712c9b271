//! Moment sequences and the diagnostics that separate integral-form
//! solutions from the rest.
//!
//! The dyadic samples `phi(1/2^j)` of an integral-form solution are exactly
//! the power moments of its mixing measure, hence completely monotone with
//! alternating differences converging to zero. Both properties are finitely
//! checkable, and their failure certifies that a solution is not an integral
//! mixture — the table reports only the range it actually inspected.

mod recover;

pub use recover::recover_discrete_measure;

use std::fmt::Write as _;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::{binomial, DyadicPoint, Rational};
use crate::solutions::{MeasureSpec, SolutionExpr};

/// A finite prefix (c_0, ..., c_N) of a moment sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSequence {
    values: Vec<Rational>,
}

impl MomentSequence {
    pub fn new(values: Vec<Rational>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, j: usize) -> &Rational {
        &self.values[j]
    }

    /// c_0 = 1, as any probability moment sequence must satisfy.
    pub fn is_probability_normalized(&self) -> bool {
        self.values.first().is_some_and(|c| c.is_one())
    }
}

/// Samples `(phi(1/2^j))_{j=0..=n_max}`, exactly.
pub fn dyadic_samples(s: &SolutionExpr, n_max: u32) -> Result<MomentSequence> {
    let mut values = Vec::with_capacity(n_max as usize + 1);
    for j in 0..=n_max {
        let x = DyadicPoint::from_ints(1, j).expect("1/2^j");
        values.push(s.eval(&x)?);
    }
    Ok(MomentSequence::new(values))
}

/// Power moments `c_j = int x^j dmu(x)` for j = 0..=n_max: exact for the
/// atomic part, quadrature (with its recorded tolerance) for the density
/// part. The tolerance is `None` exactly when the measure is purely atomic.
pub fn moments_of_measure(
    mu: &MeasureSpec,
    n_max: u32,
) -> (MomentSequence, Option<Rational>) {
    let mut values = Vec::with_capacity(n_max as usize + 1);
    let mut worst_tol: Option<Rational> = None;
    for j in 0..=n_max {
        let mut c = Rational::zero();
        for (loc, mass) in mu.atoms() {
            c += mass * crate::numerics::rational_pow(loc, j);
        }
        if let Some((v, tol)) = mu.density_moment(j) {
            c += Rational::from_float(v).unwrap_or_else(Rational::zero);
            let tol = Rational::from_float(tol).unwrap_or_else(Rational::zero);
            worst_tol = Some(match worst_tol.take() {
                Some(prev) if prev >= tol => prev,
                _ => tol,
            });
        }
        values.push(c);
    }
    (MomentSequence::new(values), worst_tol)
}

/// The alternating forward difference
/// `delta(k,n) = sum_{j=0}^{n} (-1)^j C(n,j) c_{k+j}`.
pub fn difference(c: &MomentSequence, k: u32, n: u32) -> Result<Rational> {
    let top = k as usize + n as usize;
    if top >= c.len() {
        return Err(Error::Domain(format!(
            "difference({k},{n}) needs c_{top}, sequence has length {}",
            c.len()
        )));
    }
    let mut acc = Rational::zero();
    for j in 0..=n {
        let coeff = Rational::from_integer(binomial(u64::from(n), u64::from(j))?);
        let term = coeff * c.get(k as usize + j as usize);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceEntry {
    pub k: u32,
    pub n: u32,
    pub value: Rational,
}

/// All differences with k <= k_max and n <= n_max, and whether every one of
/// them is nonnegative. The verdict speaks only for the tested rectangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceTable {
    k_max: u32,
    n_max: u32,
    entries: Vec<DifferenceEntry>,
    pass: bool,
}

impl DifferenceTable {
    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn entries(&self) -> &[DifferenceEntry] {
        &self.entries
    }

    pub fn pass(&self) -> bool {
        self.pass
    }

    pub fn first_negative(&self) -> Option<&DifferenceEntry> {
        self.entries.iter().find(|e| e.value.is_negative())
    }

    pub fn get(&self, k: u32, n: u32) -> Option<&Rational> {
        self.entries
            .iter()
            .find(|e| e.k == k && e.n == n)
            .map(|e| &e.value)
    }

    /// CSV with header "k,n,delta_num,delta_den,sign"; sign is -1, 0 or 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,n,delta_num,delta_den,sign\n");
        for e in &self.entries {
            let sign = match e.value.cmp(&Rational::zero()) {
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => 1,
            };
            writeln!(
                out,
                "{},{},{},{},{}",
                e.k,
                e.n,
                e.value.numer(),
                e.value.denom(),
                sign
            )
            .expect("string write");
        }
        out
    }
}

/// Computes the full difference table over k <= k_max, n <= n_max.
/// Requires the sequence to reach index k_max + n_max.
pub fn complete_monotonicity_table(
    c: &MomentSequence,
    k_max: u32,
    n_max: u32,
) -> Result<DifferenceTable> {
    if k_max as usize + n_max as usize >= c.len() {
        return Err(Error::Domain(format!(
            "table ({k_max},{n_max}) needs a sequence of length {}, got {}",
            k_max as usize + n_max as usize + 1,
            c.len()
        )));
    }
    let mut entries = Vec::new();
    let mut pass = true;
    for k in 0..=k_max {
        for n in 0..=n_max {
            let value = difference(c, k, n)?;
            pass &= !value.is_negative();
            entries.push(DifferenceEntry { k, n, value });
        }
    }
    Ok(DifferenceTable { k_max, n_max, entries, pass })
}

/// The partial sums `L(n) = delta(0,n)` for n = 0..len-1 — the sequence
/// whose limit vanishes for every integral-form solution and diverges for
/// the Cantor-type families.
pub fn limit_condition_partial_sums(c: &MomentSequence) -> Vec<Rational> {
    (0..c.len() as u32)
        .map(|n| difference(c, 0, n).expect("n below length"))
        .collect()
}

/// Outcome of the inequalities on dyadic samples that bare monotonicity
/// forces on any solution of the averaging equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub k_max: u32,
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Checks, for every k <= k_max: nonnegativity of phi(1/2^k), of the first
/// difference, and of the second difference. The second difference is also
/// recomputed through the averaging identity as
/// `phi(1/2^{k+1} + 1/2) - phi(1/2^{k+2} + 1/2)`, and both routes must
/// agree exactly.
pub fn monotonicity_forced_inequalities(
    s: &SolutionExpr,
    k_max: u32,
) -> Result<MonotonicityReport> {
    let samples = dyadic_samples(s, k_max + 2)?;
    let mut failures = Vec::new();
    for k in 0..=k_max {
        let c_k = samples.get(k as usize);
        let c_k1 = samples.get(k as usize + 1);
        let c_k2 = samples.get(k as usize + 2);
        if c_k.is_negative() {
            failures.push(format!("phi(1/2^{k}) = {c_k} < 0"));
        }
        if c_k < c_k1 {
            failures.push(format!("phi(1/2^{k}) < phi(1/2^{})", k + 1));
        }
        let direct = c_k - c_k1 - c_k1 + c_k2;
        let two = Rational::from_integer(2.into());
        debug_assert_eq!(direct, c_k - c_k1 * two + c_k2);
        let shifted_hi = shifted_sample(s, k + 1)?;
        let shifted_lo = shifted_sample(s, k + 2)?;
        let via_identity = shifted_hi - shifted_lo;
        if direct != via_identity {
            failures.push(format!(
                "second difference at k={k}: direct {direct} != shifted route {via_identity}"
            ));
        }
        if direct.is_negative() {
            failures.push(format!("second difference at k={k} is {direct} < 0"));
        }
    }
    Ok(MonotonicityReport { k_max, pass: failures.is_empty(), failures })
}

/// phi(1/2^j + 1/2) for j >= 1, exactly; the argument is (1/2^(j-1) + 1)/2.
fn shifted_sample(s: &SolutionExpr, j: u32) -> Result<Rational> {
    debug_assert!(j >= 1);
    let x = DyadicPoint::from_ints(1, j - 1).expect("1/2^(j-1)").half_shift();
    s.eval(&x)
}
