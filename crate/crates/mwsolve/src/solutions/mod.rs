//! The solution algebra of the averaging equation.
//!
//! Closed under the constructions this crate knows how to evaluate:
//!
//! - `DeRham(p)` — the de Rham curve itself;
//! - `Averaged(P)` — the multiscale average of the IFS distribution
//!   function, `(1/m) sum_{i<m} sum_{k<2^i} [Phi_P((x+k)/2^i) - Phi_P(k/2^i)]`,
//!   Cantor-type (locally constant) whenever some branch weight vanishes;
//! - `Integral(mu)` — the mixture `int f_p(x) dmu(p)` of de Rham curves,
//!   always strictly increasing;
//! - `Convex` — convex combination of two solutions;
//! - `Series` — finite convex combination with an optional explicit tail
//!   mass that widens enclosures instead of pretending to be exact.
//!
//! Every member satisfies the averaging equation with residual exactly zero
//! on dyadic points, which `mw_residual` checks.

mod measure;
mod parse;

pub use measure::{DensityKind, DensitySpec, MeasureSpec, QuadratureRule};

use num::{One, Signed, ToPrimitive, Zero};

use crate::derham::DeRhamParam;
use crate::error::{Error, Result};
use crate::ifs::{ProbabilityVector, MAX_M};
use crate::numerics::{expand, pow2, DyadicPoint, Enclosure, Rational};

/// A description of one solution of the averaging equation.
#[derive(Clone, Debug)]
pub enum SolutionExpr {
    DeRham(DeRhamParam),
    Averaged(ProbabilityVector),
    Integral(MeasureSpec),
    Convex {
        alpha: Rational,
        left: Box<SolutionExpr>,
        right: Box<SolutionExpr>,
    },
    Series {
        terms: Vec<(Rational, SolutionExpr)>,
        /// Mass of the truncated-away terms; widens enclosures.
        tail: Rational,
    },
}

/// Enclosure plus the recorded (non-rigorous) quadrature tolerance, present
/// only when a density measure contributed.
#[derive(Clone, Debug, PartialEq)]
pub struct EnclosedValue {
    pub enclosure: Enclosure,
    pub quadrature_tol: Option<Rational>,
}

impl EnclosedValue {
    fn exact(v: Rational) -> Self {
        Self { enclosure: Enclosure::point(v), quadrature_tol: None }
    }

    fn certified(enclosure: Enclosure) -> Self {
        Self { enclosure, quadrature_tol: None }
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            enclosure: self.enclosure.add(&other.enclosure),
            quadrature_tol: add_tols(&self.quadrature_tol, &other.quadrature_tol),
        }
    }

    fn scale(&self, a: &Rational) -> Self {
        Self {
            enclosure: self.enclosure.scale(a),
            quadrature_tol: self.quadrature_tol.as_ref().map(|t| (t * a).abs()),
        }
    }
}

fn add_tols(a: &Option<Rational>, b: &Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (None, None) => None,
        (Some(t), None) | (None, Some(t)) => Some(t.clone()),
        (Some(s), Some(t)) => Some(s + t),
    }
}

impl SolutionExpr {
    pub fn derham(p: Rational) -> Result<Self> {
        Ok(SolutionExpr::DeRham(DeRhamParam::new(p)?))
    }

    pub fn averaged(p: ProbabilityVector) -> Self {
        SolutionExpr::Averaged(p)
    }

    pub fn integral(mu: MeasureSpec) -> Self {
        SolutionExpr::Integral(mu)
    }

    pub fn convex(alpha: Rational, left: SolutionExpr, right: SolutionExpr) -> Result<Self> {
        if alpha.is_negative() || alpha > Rational::one() {
            return Err(Error::Domain(format!("convex weight {alpha} outside [0,1]")));
        }
        Ok(SolutionExpr::Convex { alpha, left: Box::new(left), right: Box::new(right) })
    }

    pub fn series(terms: Vec<(Rational, SolutionExpr)>, tail: Rational) -> Result<Self> {
        if tail.is_negative() {
            return Err(Error::Domain(format!("series tail mass {tail} negative")));
        }
        let mut total = tail.clone();
        for (a, _) in &terms {
            if a.is_negative() {
                return Err(Error::Domain(format!("series weight {a} negative")));
            }
            total += a;
        }
        if total != Rational::one() {
            return Err(Error::Domain(format!(
                "series weights plus tail sum to {total}, not 1"
            )));
        }
        Ok(SolutionExpr::Series { terms, tail })
    }

    /// The identity solution, the p = 1/2 de Rham curve.
    pub fn identity() -> Self {
        SolutionExpr::DeRham(DeRhamParam::new(Rational::new(1.into(), 2.into())).unwrap())
    }

    /// Exact evaluation on a dyadic point. Measures with a density part have
    /// no exact finite form and must take the enclosure path.
    pub fn eval(&self, x: &DyadicPoint) -> Result<Rational> {
        match self {
            SolutionExpr::DeRham(p) => Ok(p.eval(x)),
            SolutionExpr::Averaged(p) => Ok(averaged_eval(p, x)),
            SolutionExpr::Integral(mu) => {
                if !mu.is_purely_atomic() {
                    return Err(Error::Mode(
                        "measure has a density part; use the enclosure evaluator".into(),
                    ));
                }
                let mut acc = Rational::zero();
                for (loc, mass) in mu.atoms() {
                    let curve = DeRhamParam::new(loc.clone()).expect("validated location");
                    acc += mass * curve.eval(x);
                }
                Ok(acc)
            }
            SolutionExpr::Convex { alpha, left, right } => {
                let l = left.eval(x)?;
                let r = right.eval(x)?;
                Ok(alpha * l + (Rational::one() - alpha) * r)
            }
            SolutionExpr::Series { terms, tail } => {
                if !tail.is_zero() {
                    return Err(Error::Mode(
                        "series carries tail mass; use the enclosure evaluator".into(),
                    ));
                }
                let mut acc = Rational::zero();
                for (a, s) in terms {
                    acc += a * s.eval(x)?;
                }
                Ok(acc)
            }
        }
    }

    /// Certified enclosure on an arbitrary rational of [0,1], spending
    /// `digits` expansion digits on every curve evaluation involved.
    pub fn eval_enclosed(&self, x: &Rational, digits: u32) -> Result<EnclosedValue> {
        if !crate::numerics::in_unit_interval(x) {
            return Err(Error::Domain(format!("{x} lies outside [0,1]")));
        }
        match self {
            SolutionExpr::DeRham(p) => Ok(EnclosedValue::certified(p.eval_enclosed(x, digits)?)),
            SolutionExpr::Averaged(p) => averaged_enclosed(p, x, digits),
            SolutionExpr::Integral(mu) => integral_enclosed(mu, x, digits),
            SolutionExpr::Convex { alpha, left, right } => {
                let l = left.eval_enclosed(x, digits)?.scale(alpha);
                let r = right
                    .eval_enclosed(x, digits)?
                    .scale(&(Rational::one() - alpha));
                Ok(l.add(&r))
            }
            SolutionExpr::Series { terms, tail } => {
                let mut acc = EnclosedValue::exact(Rational::zero());
                for (a, s) in terms {
                    acc = acc.add(&s.eval_enclosed(x, digits)?.scale(a));
                }
                // truncated terms are solutions with values in [0,1]
                acc.enclosure = acc.enclosure.pad_above(tail);
                Ok(acc)
            }
        }
    }

    /// Defect of the averaging equation at x:
    /// `phi(x) - phi(x/2) - phi((x+1)/2) + phi(1/2)`. Exactly zero for every
    /// expression in the algebra.
    pub fn mw_residual(&self, x: &DyadicPoint) -> Result<Rational> {
        let half = DyadicPoint::from_ints(1, 1).expect("1/2");
        Ok(self.eval(x)? - self.eval(&x.halve())? - self.eval(&x.half_shift())?
            + self.eval(&half)?)
    }

    /// Whether the expression's class forces strict increase (a sufficient
    /// condition, used to decide which suites check strictness).
    pub fn implies_strict(&self) -> bool {
        match self {
            SolutionExpr::DeRham(_) => true,
            SolutionExpr::Averaged(p) => p.is_full_support(),
            SolutionExpr::Integral(_) => true,
            SolutionExpr::Convex { alpha, left, right } => {
                (!alpha.is_zero() && left.implies_strict())
                    || (*alpha != Rational::one() && right.implies_strict())
            }
            SolutionExpr::Series { terms, .. } => {
                terms.iter().any(|(a, s)| !a.is_zero() && s.implies_strict())
            }
        }
    }
}

/// The multiscale average over the IFS distribution function, exactly.
fn averaged_eval(p: &ProbabilityVector, x: &DyadicPoint) -> Rational {
    let m = p.m();
    let zero = DyadicPoint::zero();
    let mut acc = Rational::zero();
    for i in 0..m {
        for k in 0..(1u64 << i) {
            acc += p.eval_phi(&x.branch_map(k, i)) - p.eval_phi(&zero.branch_map(k, i));
        }
    }
    acc / Rational::from_integer(m.into())
}

fn averaged_enclosed(p: &ProbabilityVector, x: &Rational, digits: u32) -> Result<EnclosedValue> {
    let m = p.m();
    let mut acc = Enclosure::point(Rational::zero());
    for i in 0..m {
        let scale = Rational::new(1.into(), pow2(i));
        for k in 0..(1u64 << i) {
            let shifted = (x + Rational::from_integer(k.into())) * &scale;
            let offset = Rational::new(k.into(), pow2(i));
            let term = p.eval_phi_enclosed(&shifted, digits)?;
            let base = p.eval_phi_rational(&offset).expect("dyadic offset");
            acc = acc.add(&term.sub(&Enclosure::point(base)));
        }
    }
    let inv_m = Rational::new(1.into(), m.into());
    Ok(EnclosedValue::certified(acc.scale(&inv_m)))
}

fn integral_enclosed(mu: &MeasureSpec, x: &Rational, digits: u32) -> Result<EnclosedValue> {
    let mut acc = EnclosedValue::exact(Rational::zero());
    for (loc, mass) in mu.atoms() {
        let curve = DeRhamParam::new(loc.clone()).expect("validated location");
        let e = EnclosedValue::certified(curve.eval_enclosed(x, digits)?);
        acc = acc.add(&e.scale(mass));
    }
    if let Some(d) = mu.density() {
        let coeff = mu.density_coefficient().to_f64().unwrap_or(0.0);
        let (lo, hi) = float_curve_bracket(x, digits)?;
        let g_lo = move |p: f64| lo(p) * d.kind.eval(p);
        let g_hi = move |p: f64| hi(p) * d.kind.eval(p);
        let (vlo, tol_lo) = d.rule.integrate_with_tol(&g_lo, d.nodes);
        let (vhi, tol_hi) = d.rule.integrate_with_tol(&g_hi, d.nodes);
        let enclosure = Enclosure::new(
            Rational::from_float(vlo * coeff).unwrap_or_else(Rational::zero),
            Rational::from_float(vhi * coeff).unwrap_or_else(Rational::one),
        )
        .unwrap_or_else(|_| Enclosure::point(Rational::zero()));
        let tol = Rational::from_float((tol_lo + tol_hi) * coeff.abs())
            .unwrap_or_else(Rational::zero);
        acc = acc.add(&EnclosedValue { enclosure, quadrature_tol: Some(tol) });
    }
    Ok(acc)
}

/// Float digit walk of the curve value: partial sum and remaining prefix
/// weight after the given binary digits.
fn float_curve_walk(bits: &[u32], p: f64) -> (f64, f64) {
    let mut acc = 0.0;
    let mut prefix = 1.0;
    for &b in bits {
        if b == 1 {
            acc += prefix * p;
            prefix *= 1.0 - p;
        } else {
            prefix *= p;
        }
    }
    (acc, prefix)
}

/// Lower and upper float brackets of p -> curve_p(x) from a fixed digit
/// truncation of x, shared by all quadrature nodes.
#[allow(clippy::type_complexity)]
fn float_curve_bracket(
    x: &Rational,
    digits: u32,
) -> Result<(Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>)> {
    if x.is_one() {
        return Ok((Box::new(|_| 1.0), Box::new(|_| 1.0)));
    }
    let bits = expand(x, 2, digits as usize)?.padded(digits as usize);
    let bits_hi = bits.clone();
    let lo = move |p: f64| float_curve_walk(&bits, p).0;
    let hi = move |p: f64| {
        let (a, w) = float_curve_walk(&bits_hi, p);
        a + w
    };
    Ok((Box::new(lo), Box::new(hi)))
}

/// The doubled-scale vector realizing two-step compositions: weight p_k p_l
/// at index 2^m k + l. The averaged solutions of P and of its tensor square
/// agree everywhere.
pub fn tensor_square(p: &ProbabilityVector) -> Result<ProbabilityVector> {
    let m = p.m();
    if 2 * m > MAX_M {
        return Err(Error::Resource(format!(
            "tensor square needs m = {} > {MAX_M}",
            2 * m
        )));
    }
    let count = p.branch_count();
    let mut weights = vec![Rational::zero(); count * count];
    for (k, pk) in p.weights().iter().enumerate() {
        for (l, pl) in p.weights().iter().enumerate() {
            weights[(k << m) | l] = pk * pl;
        }
    }
    ProbabilityVector::new(2 * m, weights)
}

/// The strictly increasing solution `alpha x + (1 - alpha) avg_P(x)` with P
/// supported on the top two branches. Strict because of the identity part,
/// yet its dyadic moment diagnostics diverge, so it cannot be an integral
/// mixture of curves.
pub fn strict_nonintegral_witness(m: u32, p: Rational, alpha: Rational) -> Result<SolutionExpr> {
    if m < 2 {
        return Err(Error::Domain(format!("witness needs m >= 2, got {m}")));
    }
    if alpha <= Rational::zero() || alpha >= Rational::one() {
        return Err(Error::Domain(format!("witness weight {alpha} outside (0,1)")));
    }
    let averaged = SolutionExpr::Averaged(ProbabilityVector::top_pair(m, p)?);
    SolutionExpr::convex(alpha, SolutionExpr::identity(), averaged)
}

/// Value of the top-pair averaged solution at 1/2, namely p/m.
pub fn top_pair_half_value(m: u32, p: &Rational) -> Rational {
    p / Rational::from_integer(m.into())
}

/// Right edge of the flat initial segment of the top-pair averaged
/// solution: it vanishes exactly on [0, (2^(m-1) - 1)/(2^m - 1)].
pub fn top_pair_flat_threshold(m: u32) -> Rational {
    let full = pow2(m) - 1;
    Rational::new(pow2(m - 1) - 1, full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, rational_pow};
    use proptest::prelude::*;

    fn gap_vector() -> ProbabilityVector {
        ProbabilityVector::top_pair(2, rat(1, 3)).unwrap()
    }

    fn two_atom_measure() -> MeasureSpec {
        MeasureSpec::atomic(vec![(rat(1, 4), rat(1, 2)), (rat(3, 4), rat(1, 2))]).unwrap()
    }

    fn dy(k: u64, level: u32) -> DyadicPoint {
        DyadicPoint::from_ints(k, level).unwrap()
    }

    #[test]
    fn averaged_values_of_the_top_pair_family() {
        let s = SolutionExpr::averaged(gap_vector());
        assert_eq!(s.eval(&dy(1, 1)).unwrap(), rat(1, 6)); // p/m
        assert_eq!(s.eval(&dy(1, 2)).unwrap(), rat(0, 1));
        assert_eq!(s.eval(&DyadicPoint::zero()).unwrap(), rat(0, 1));
        assert_eq!(s.eval(&DyadicPoint::one()).unwrap(), rat(1, 1));
    }

    #[test]
    fn integral_of_point_mass_at_half_is_identity() {
        let s = SolutionExpr::integral(MeasureSpec::point_mass(rat(1, 2)).unwrap());
        for x in DyadicPoint::grid(5) {
            assert_eq!(s.eval(&x).unwrap(), x.value());
        }
    }

    #[test]
    fn integral_over_atoms_is_weighted_curve_sum() {
        let s = SolutionExpr::integral(two_atom_measure());
        // curve_p(1/2) = p, so the value is the mean of the atom locations
        assert_eq!(s.eval(&dy(1, 1)).unwrap(), rat(1, 2));
    }

    #[test]
    fn convex_witness_value_at_half() {
        let s = strict_nonintegral_witness(2, rat(1, 3), rat(1, 2)).unwrap();
        assert_eq!(s.eval(&dy(1, 1)).unwrap(), rat(1, 3));
        assert_eq!(s.eval(&DyadicPoint::zero()).unwrap(), rat(0, 1));
        assert_eq!(s.eval(&DyadicPoint::one()).unwrap(), rat(1, 1));
        assert!(s.implies_strict());
    }

    #[test]
    fn series_exact_requires_zero_tail() {
        let t1 = SolutionExpr::identity();
        let t2 = SolutionExpr::averaged(gap_vector());
        let s = SolutionExpr::series(vec![(rat(1, 2), t1.clone()), (rat(1, 2), t2.clone())], rat(0, 1))
            .unwrap();
        assert_eq!(s.eval(&dy(1, 1)).unwrap(), rat(1, 3));
        let truncated =
            SolutionExpr::series(vec![(rat(1, 2), t1), (rat(1, 4), t2)], rat(1, 4)).unwrap();
        assert!(matches!(truncated.eval(&dy(1, 1)), Err(Error::Mode(_))));
        let e = truncated.eval_enclosed(&rat(1, 2), 8).unwrap();
        assert!(e.enclosure.width() >= rat(1, 4));
        assert!(e.enclosure.contains(&rat(7, 24))); // 1/4 + 1/24
    }

    #[test]
    fn mode_error_for_density_in_exact_path() {
        let d = DensitySpec {
            kind: DensityKind::Uniform,
            rule: QuadratureRule::Midpoint,
            nodes: 32,
        };
        let mu = MeasureSpec::with_density(Vec::new(), d).unwrap();
        let s = SolutionExpr::integral(mu);
        assert!(matches!(s.eval(&dy(1, 1)), Err(Error::Mode(_))));
        let e = s.eval_enclosed(&rat(1, 2), 16).unwrap();
        assert!(e.quadrature_tol.is_some());
        // int p dmu(p) = 1/2 for the uniform density at x = 1/2
        let mid = e.enclosure.midpoint().to_f64().unwrap();
        assert!((mid - 0.5).abs() < 1e-2);
    }

    #[test]
    fn residual_vanishes_across_the_algebra() {
        let exprs = vec![
            SolutionExpr::derham(rat(2, 5)).unwrap(),
            SolutionExpr::averaged(gap_vector()),
            SolutionExpr::integral(two_atom_measure()),
            strict_nonintegral_witness(2, rat(1, 3), rat(1, 2)).unwrap(),
        ];
        for s in &exprs {
            for x in DyadicPoint::grid(6) {
                assert!(s.mw_residual(&x).unwrap().is_zero(), "x={x}");
            }
        }
    }

    #[test]
    fn tensor_square_of_fair_coin() {
        let p = ProbabilityVector::new(1, vec![rat(1, 2), rat(1, 2)]).unwrap();
        let sq = tensor_square(&p).unwrap();
        assert_eq!(sq.m(), 2);
        assert_eq!(sq.weights(), &[rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)]);
    }

    #[test]
    fn tensor_square_index_map() {
        let p = gap_vector();
        let sq = tensor_square(&p).unwrap();
        assert_eq!(sq.m(), 4);
        let mut expected = vec![rat(0, 1); 16];
        for (k, l, v) in [
            (2usize, 2usize, rat(1, 9)),
            (2, 3, rat(2, 9)),
            (3, 2, rat(2, 9)),
            (3, 3, rat(4, 9)),
        ] {
            expected[(k << 2) | l] = v;
        }
        assert_eq!(sq.weights(), &expected[..]);
        let total: Rational = sq.weights().iter().sum();
        assert_eq!(total, rat(1, 1));
    }

    #[test]
    fn flat_threshold_and_half_value_formulas() {
        assert_eq!(top_pair_flat_threshold(2), rat(1, 3));
        assert_eq!(top_pair_flat_threshold(3), rat(3, 7));
        assert_eq!(top_pair_flat_threshold(1), rat(0, 1));
        assert_eq!(top_pair_half_value(2, &rat(1, 3)), rat(1, 6));
        assert_eq!(top_pair_half_value(4, &rat(3, 4)), rat(3, 16));
    }

    #[test]
    fn averaged_flatness_certificate() {
        // K_P proper: the averaged solution is constant (zero) on the whole
        // flat segment, so it is not strictly increasing.
        let s = SolutionExpr::averaged(gap_vector());
        assert!(!s.implies_strict());
        let threshold = top_pair_flat_threshold(2);
        let mut last_zero = None;
        for x in DyadicPoint::grid(6) {
            let v = s.eval(&x).unwrap();
            if x.value() <= threshold {
                assert!(v.is_zero(), "x={x}");
                last_zero = Some(x.clone());
            } else {
                assert!(v > rat(0, 1), "x={x}");
            }
        }
        assert!(last_zero.is_some());
    }

    #[test]
    fn enclosed_matches_exact_on_dyadics() {
        let exprs = vec![
            SolutionExpr::derham(rat(1, 3)).unwrap(),
            SolutionExpr::averaged(gap_vector()),
            SolutionExpr::integral(two_atom_measure()),
        ];
        for s in &exprs {
            for x in DyadicPoint::grid(4) {
                let exact = s.eval(&x).unwrap();
                let e = s.eval_enclosed(&x.value(), 16).unwrap();
                assert!(e.enclosure.contains(&exact));
                assert!(e.quadrature_tol.is_none());
            }
        }
    }

    #[test]
    fn enclosure_width_bound_for_curves() {
        let s = SolutionExpr::derham(rat(1, 3)).unwrap();
        let e = s.eval_enclosed(&rat(1, 3), 16).unwrap();
        assert!(e.enclosure.width() <= rational_pow(&rat(2, 3), 16));
    }

    proptest! {
        #[test]
        fn tensor_square_preserves_averaged_values(k in 0u64..128, pn in 1i64..6) {
            let p = ProbabilityVector::top_pair(2, rat(pn, 7)).unwrap();
            let sq = tensor_square(&p).unwrap();
            let x = DyadicPoint::from_ints(k, 7).unwrap();
            let a = SolutionExpr::averaged(p).eval(&x).unwrap();
            let b = SolutionExpr::averaged(sq).eval(&x).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn residual_zero_at_random_dyadics(k in 0u64..1024, pn in 1i64..6) {
            let s = strict_nonintegral_witness(3, rat(pn, 7), rat(2, 5)).unwrap();
            let x = DyadicPoint::from_ints(k, 10).unwrap();
            prop_assert!(s.mw_residual(&x).unwrap().is_zero());
        }

        #[test]
        fn monotone_on_dyadics(a in 0u64..256, b in 0u64..256) {
            let s = SolutionExpr::integral(two_atom_measure());
            let (a, b) = (a.min(b), a.max(b));
            let x = DyadicPoint::from_ints(a, 8).unwrap();
            let y = DyadicPoint::from_ints(b, 8).unwrap();
            let fx = s.eval(&x).unwrap();
            let fy = s.eval(&y).unwrap();
            if a == b {
                prop_assert_eq!(fx, fy);
            } else {
                prop_assert!(fx < fy);
            }
        }
    }
}
