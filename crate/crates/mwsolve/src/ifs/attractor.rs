use std::fmt::Write as _;

use num::Zero;

use super::ProbabilityVector;
use crate::error::{Error, Result};
use crate::numerics::{DyadicPoint, Rational};

/// Finitely many disjoint closed intervals with dyadic endpoints, sorted
/// ascending. Produced by the attractor refinement; adjacent images are
/// merged, so consecutive intervals are separated by genuine gaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<(DyadicPoint, DyadicPoint)>,
}

impl IntervalSet {
    pub fn intervals(&self) -> &[(DyadicPoint, DyadicPoint)] {
        &self.intervals
    }

    pub fn count(&self) -> usize {
        self.intervals.len()
    }

    pub fn total_length(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |acc, (lo, hi)| acc + hi.value() - lo.value())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.intervals
            .iter()
            .any(|(lo, hi)| lo.value() <= *x && *x <= hi.value())
    }

    /// Open components of the complement within [0,1].
    pub fn gaps(&self) -> Vec<(DyadicPoint, DyadicPoint)> {
        let mut gaps = Vec::new();
        let mut cursor = DyadicPoint::zero();
        for (lo, hi) in &self.intervals {
            if *lo > cursor {
                gaps.push((cursor.clone(), lo.clone()));
            }
            cursor = hi.clone();
        }
        if cursor < DyadicPoint::one() {
            gaps.push((cursor, DyadicPoint::one()));
        }
        gaps
    }

    /// CSV rows "lo_num,lo_den,hi_num,hi_den" in reduced form, one interval
    /// per line, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (lo, hi) in &self.intervals {
            let (lo, hi) = (lo.value(), hi.value());
            writeln!(out, "{},{},{},{}", lo.numer(), lo.denom(), hi.numer(), hi.denom())
                .expect("string write");
        }
        out
    }
}

pub(super) fn approximate(p: &ProbabilityVector, n: u32, cap: usize) -> Result<IntervalSet> {
    let support: Vec<u64> = p.support().iter().map(|&k| k as u64).collect();
    let mut intervals = vec![(DyadicPoint::zero(), DyadicPoint::one())];
    for step in 0..n {
        let projected = intervals.len().saturating_mul(support.len());
        if projected > cap {
            return Err(Error::Resource(format!(
                "attractor refinement {} would hold up to {projected} intervals (cap {cap})",
                step + 1
            )));
        }
        let mut next = Vec::with_capacity(projected);
        // support indices ascend and each branch image sits inside its own
        // cell, so the concatenation is already sorted
        for &k in &support {
            for (lo, hi) in &intervals {
                next.push((lo.branch_map(k, p.m()), hi.branch_map(k, p.m())));
            }
        }
        intervals = merge_adjacent(next);
    }
    Ok(IntervalSet { intervals })
}

fn merge_adjacent(
    sorted: Vec<(DyadicPoint, DyadicPoint)>,
) -> Vec<(DyadicPoint, DyadicPoint)> {
    let mut merged: Vec<(DyadicPoint, DyadicPoint)> = Vec::with_capacity(sorted.len());
    for (lo, hi) in sorted {
        match merged.last_mut() {
            Some(last) if last.1 == lo => last.1 = hi,
            _ => merged.push((lo, hi)),
        }
    }
    merged
}
