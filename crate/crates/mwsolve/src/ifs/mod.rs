//! The 2^m-branch iterated function system with probabilities.
//!
//! For m >= 1 the maps are f_k(x) = (x + k)/2^m, k = 0..2^m-1, weighted by a
//! probability vector P with entries in [0,1). The invariant measure's
//! distribution function `Phi_P` satisfies the digit recursion
//!
//! ```text
//! Phi_P((x + l)/2^m) = p_0 + ... + p_{l-1} + p_l Phi_P(x),
//! ```
//!
//! so on terminating base-2^m expansions it evaluates exactly as a finite
//! Horner sum; elsewhere it gets enclosures whose width is the invariant
//! mass of the truncation cylinder. Points whose expansion leaves the weight
//! support fall into a gap and the enclosure collapses to a point.

mod attractor;

pub use attractor::IntervalSet;

use num::bigint::BigUint;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::{expand, rat, DyadicPoint, Enclosure, Rational};

/// Hard cap on m; 2^m weights are stored densely.
pub const MAX_M: u32 = 12;

/// A probability vector over the 2^m branch maps: entries in [0,1) summing
/// to 1. Having every entry strictly below 1 forces at least two branches to
/// carry weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityVector {
    m: u32,
    weights: Vec<Rational>,
    // prefix[l] = p_0 + ... + p_{l-1}, with prefix[0] = 0
    prefix: Vec<Rational>,
}

/// Verdict of the attractor membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// The point is a limit of addresses over the weight support.
    Inside,
    /// The point left every level-j refinement of the attractor.
    OutsideAtLevel(u32),
    /// Not resolvable within the inspected digit depth.
    Undecided,
}

impl ProbabilityVector {
    pub fn new(m: u32, weights: Vec<Rational>) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(Error::Domain(format!("m = {m} outside 1..={MAX_M}")));
        }
        let count = 1usize << m;
        if weights.len() != count {
            return Err(Error::Domain(format!(
                "expected {count} weights for m = {m}, got {}",
                weights.len()
            )));
        }
        let one = Rational::one();
        let mut sum = Rational::zero();
        for (k, w) in weights.iter().enumerate() {
            if w.is_negative() || *w >= one {
                return Err(Error::Domain(format!("weight p_{k} = {w} outside [0,1)")));
            }
            sum += w;
        }
        if sum != one {
            return Err(Error::Domain(format!("weights sum to {sum}, not 1")));
        }
        let mut prefix = Vec::with_capacity(count + 1);
        prefix.push(Rational::zero());
        for w in &weights {
            let next = prefix.last().unwrap() + w;
            prefix.push(next);
        }
        Ok(Self { m, weights, prefix })
    }

    /// The vector (0, ..., 0, p, 1-p) supported on the top two branches.
    pub fn top_pair(m: u32, p: Rational) -> Result<Self> {
        if p <= Rational::zero() || p >= Rational::one() {
            return Err(Error::Domain(format!("top-pair parameter {p} outside (0,1)")));
        }
        let count = 1usize << m;
        let mut weights = vec![Rational::zero(); count];
        weights[count - 2] = p.clone();
        weights[count - 1] = Rational::one() - p;
        Self::new(m, weights)
    }

    /// Equal weights over an explicit support set.
    pub fn uniform_on(m: u32, support: &[u64]) -> Result<Self> {
        if support.len() < 2 {
            return Err(Error::Domain("support needs at least two branches".into()));
        }
        let count = 1u64 << m;
        let mut weights = vec![Rational::zero(); count as usize];
        let share = rat(1, support.len() as i64);
        for &k in support {
            if k >= count {
                return Err(Error::Domain(format!("branch index {k} >= 2^{m}")));
            }
            if !weights[k as usize].is_zero() {
                return Err(Error::Domain(format!("branch index {k} repeated")));
            }
            weights[k as usize] = share.clone();
        }
        Self::new(m, weights)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn branch_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, k: usize) -> &Rational {
        &self.weights[k]
    }

    /// Partial sum p_0 + ... + p_{l-1}.
    pub fn prefix_sum(&self, l: usize) -> &Rational {
        &self.prefix[l]
    }

    /// Indices of the branches carrying weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&k| !self.weights[k].is_zero()).collect()
    }

    pub fn is_full_support(&self) -> bool {
        self.weights.iter().all(|w| !w.is_zero())
    }

    fn in_support(&self, digit: u32) -> bool {
        !self.weights[digit as usize].is_zero()
    }

    /// Exact distribution function value on a dyadic point, by folding the
    /// digit recursion over the terminating base-2^m expansion.
    pub fn eval_phi(&self, x: &DyadicPoint) -> Rational {
        if x.is_one() {
            return Rational::one();
        }
        x.digits_base(self.m).iter().rev().fold(Rational::zero(), |acc, &d| {
            let d = d as usize;
            &self.prefix[d] + &self.weights[d] * acc
        })
    }

    /// Exact evaluation for rationals with terminating base-2^m expansion
    /// (exactly the dyadic rationals). Others must take the enclosure path.
    pub fn eval_phi_rational(&self, x: &Rational) -> Result<Rational> {
        match DyadicPoint::from_rational(x) {
            Some(d) => Ok(self.eval_phi(&d)),
            None => Err(Error::Domain(format!(
                "{x} has no terminating base-2^{} expansion; use the enclosure evaluator",
                self.m
            ))),
        }
    }

    /// Enclosure from the first `digits` base-2^m digits. The width is the
    /// invariant mass of the truncation cylinder and collapses to zero as
    /// soon as a zero-weight digit shows up.
    pub fn eval_phi_enclosed(&self, x: &Rational, digits: u32) -> Result<Enclosure> {
        if digits == 0 {
            return Err(Error::Domain("digit budget must be at least 1".into()));
        }
        if x.is_one() {
            return Ok(Enclosure::point(Rational::one()));
        }
        let base = 1u32 << self.m;
        let ds = expand(x, base, digits as usize)?;
        let mut acc = Rational::zero();
        let mut scale = Rational::one();
        for d in ds.padded(digits as usize) {
            let d = d as usize;
            acc += &scale * &self.prefix[d];
            scale *= &self.weights[d];
            if scale.is_zero() {
                break;
            }
        }
        let hi = &acc + &scale;
        Ok(Enclosure::new(acc, hi).expect("width nonnegative"))
    }

    /// Defect of the self-replication identity
    /// `Phi_P(x) = sum_k [Phi_P((x+k)/2^m) - Phi_P(k/2^m)]`, which is zero
    /// for every x.
    pub fn self_replication_residual(&self, x: &DyadicPoint) -> Rational {
        let mut rhs = Rational::zero();
        let zero = DyadicPoint::zero();
        for k in 0..(1u64 << self.m) {
            rhs += self.eval_phi(&x.branch_map(k, self.m))
                - self.eval_phi(&zero.branch_map(k, self.m));
        }
        self.eval_phi(x) - rhs
    }

    /// Level-n refinement of the attractor: the union of all n-fold branch
    /// images of [0,1] over the support, merged where adjacent. Errors when
    /// the interval count would exceed `cap`.
    pub fn attractor_approx(&self, n: u32, cap: usize) -> Result<IntervalSet> {
        attractor::approximate(self, n, cap)
    }

    /// Attractor membership by digit inspection; dyadic boundary points are
    /// checked against both of their expansions.
    pub fn membership(&self, x: &Rational, depth: u32) -> Result<Membership> {
        if depth == 0 {
            return Err(Error::Domain("depth must be at least 1".into()));
        }
        if !crate::numerics::in_unit_interval(x) {
            return Err(Error::Domain(format!("{x} lies outside [0,1]")));
        }
        let top = (1u32 << self.m) - 1;
        if let Some(d) = DyadicPoint::from_rational(x) {
            // Terminating expansion d_1..d_L then zeros; alternative
            // expansion d_1..d_{L-1}, (d_L - 1), then all top digits.
            let ds = if d.is_one() { Vec::new() } else { d.digits_base(self.m) };
            let len = ds.len();
            let all_prefix_ok = |k: usize| ds[..k].iter().all(|&d| self.in_support(d));

            let run_terminating = if d.is_one() {
                // 1 has only the all-top expansion, handled as the alternative.
                None
            } else if let Some(bad) = ds.iter().position(|&d| !self.in_support(d)) {
                Some(bad)
            } else if self.in_support(0) {
                return Ok(Membership::Inside);
            } else {
                Some(len)
            };

            let run_alternative = if d.is_zero() {
                // 0 has only the all-zeros expansion.
                None
            } else {
                let last = if d.is_one() { top } else { ds[len - 1] - 1 };
                let body = len.saturating_sub(1);
                if !all_prefix_ok(body) {
                    Some(ds[..body].iter().position(|&d| !self.in_support(d)).unwrap())
                } else if !self.in_support(last) {
                    Some(body)
                } else if self.in_support(top) {
                    return Ok(Membership::Inside);
                } else {
                    Some(body + 1)
                }
            };

            let run = run_terminating.into_iter().chain(run_alternative).max().unwrap_or(0);
            let level = run as u32 + 1;
            if level <= depth {
                Ok(Membership::OutsideAtLevel(level))
            } else {
                Ok(Membership::Undecided)
            }
        } else {
            let ds = expand(x, 1 << self.m, depth as usize)?;
            match ds.digits().iter().position(|&d| !self.in_support(d)) {
                Some(bad) => Ok(Membership::OutsideAtLevel(bad as u32 + 1)),
                None => Ok(Membership::Undecided),
            }
        }
    }

    /// Exact zero-set threshold of Phi_P for the top-pair family: the value
    /// is zero exactly on [0, (2^m - 2)/(2^m - 1)]. Only proved for that
    /// family, so other vectors are rejected.
    pub fn phi_zero_threshold(&self) -> Result<Rational> {
        let count = self.weights.len();
        let is_top_pair = self.weights[..count - 2].iter().all(|w| w.is_zero())
            && !self.weights[count - 2].is_zero()
            && !self.weights[count - 1].is_zero();
        if !is_top_pair {
            return Err(Error::Domain(
                "zero-set threshold only holds for vectors supported on the top two branches"
                    .into(),
            ));
        }
        let full = (1i64 << self.m) - 1;
        Ok(rat(full - 1, full))
    }
}

/// Monotone dyadic sequences converging to the zero-set threshold
/// (2^m - 2)/(2^m - 1) of the top-pair family: `x_q` increases toward it
/// from below, `y_q` decreases toward it from above, both via the recursion
/// z -> (z + 2^m - 2)/2^m.
pub fn threshold_sequences(m: u32, q_max: u32) -> Result<(Vec<DyadicPoint>, Vec<DyadicPoint>)> {
    if m == 0 || m > MAX_M {
        return Err(Error::Domain(format!("m = {m} outside 1..={MAX_M}")));
    }
    let shift = (1u64 << m) - 2;
    let x0 = DyadicPoint::new(BigUint::from(shift), m)?;
    let y0 = DyadicPoint::new(BigUint::from(shift + 1), m)?;
    let mut xs = vec![x0];
    let mut ys = vec![y0];
    for q in 1..=q_max as usize {
        xs.push(xs[q - 1].branch_map(shift, m));
        ys.push(ys[q - 1].branch_map(shift, m));
    }
    Ok((xs, ys))
}
