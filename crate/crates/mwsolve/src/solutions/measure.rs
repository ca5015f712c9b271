use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::Rational;

/// Quadrature rule used for the density part of a measure. Quadrature output
/// is never certified; it always travels with a recorded tolerance estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureRule {
    /// Composite midpoint rule; stays clear of the endpoints.
    Midpoint,
    /// Composite Simpson rule.
    Simpson,
}

impl QuadratureRule {
    pub fn id(&self) -> &'static str {
        match self {
            QuadratureRule::Midpoint => "midpoint",
            QuadratureRule::Simpson => "simpson",
        }
    }

    /// Integrates g over [0,1] with n panels.
    pub fn integrate(&self, g: &dyn Fn(f64) -> f64, n: u32) -> f64 {
        let n = n.max(1);
        let h = 1.0 / f64::from(n);
        match self {
            QuadratureRule::Midpoint => {
                (0..n).map(|i| g((f64::from(i) + 0.5) * h) * h).sum()
            }
            QuadratureRule::Simpson => {
                let n = if n % 2 == 1 { n + 1 } else { n };
                let h = 1.0 / f64::from(n);
                let mut acc = g(0.0) + g(1.0);
                for i in 1..n {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * g(f64::from(i) * h);
                }
                acc * h / 3.0
            }
        }
    }

    /// Integral plus the refinement-difference tolerance estimate.
    pub fn integrate_with_tol(&self, g: &dyn Fn(f64) -> f64, n: u32) -> (f64, f64) {
        let fine = self.integrate(g, n);
        let coarse = self.integrate(g, (n / 2).max(1));
        (fine, (fine - coarse).abs())
    }
}

/// Built-in density shapes on (0,1), each normalized to total mass one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityKind {
    Uniform,
}

impl DensityKind {
    pub fn id(&self) -> &'static str {
        match self {
            DensityKind::Uniform => "uniform",
        }
    }

    pub fn eval(&self, _p: f64) -> f64 {
        match self {
            DensityKind::Uniform => 1.0,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(DensityKind::Uniform),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DensitySpec {
    pub kind: DensityKind,
    pub rule: QuadratureRule,
    pub nodes: u32,
}

/// A Borel probability measure on (0,1): finitely many atoms plus an
/// optional density part. The density coefficient is whatever mass the atoms
/// leave over, so the total is one exactly by construction; no mass sits on
/// the endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    atoms: Vec<(Rational, Rational)>,
    density: Option<DensitySpec>,
    density_coeff: Rational,
}

impl MeasureSpec {
    pub fn atomic(atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        Self::build(atoms, None)
    }

    pub fn with_density(atoms: Vec<(Rational, Rational)>, density: DensitySpec) -> Result<Self> {
        Self::build(atoms, Some(density))
    }

    pub fn point_mass(location: Rational) -> Result<Self> {
        Self::atomic(vec![(location, Rational::one())])
    }

    fn build(atoms: Vec<(Rational, Rational)>, density: Option<DensitySpec>) -> Result<Self> {
        let one = Rational::one();
        let mut total = Rational::zero();
        for (i, (loc, mass)) in atoms.iter().enumerate() {
            if *loc <= Rational::zero() || *loc >= one {
                return Err(Error::Domain(format!("atom location {loc} outside (0,1)")));
            }
            if mass.is_negative() {
                return Err(Error::Domain(format!("atom mass {mass} negative")));
            }
            if atoms[..i].iter().any(|(other, _)| other == loc) {
                return Err(Error::Domain(format!("atom location {loc} repeated")));
            }
            total += mass;
        }
        let density_coeff = &one - &total;
        match density {
            Some(d) => {
                if density_coeff.is_zero() || density_coeff.is_negative() {
                    return Err(Error::Domain(
                        "atom masses leave no mass for the density part".into(),
                    ));
                }
                if d.nodes == 0 {
                    return Err(Error::Domain("quadrature needs at least one node".into()));
                }
                Ok(Self { atoms, density, density_coeff })
            }
            None => {
                if total != one {
                    return Err(Error::Domain(format!(
                        "atom masses sum to {total}, not 1"
                    )));
                }
                Ok(Self { atoms, density: None, density_coeff: Rational::zero() })
            }
        }
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&DensitySpec> {
        self.density.as_ref()
    }

    /// Mass carried by the density part (zero for purely atomic measures).
    pub fn density_coefficient(&self) -> &Rational {
        &self.density_coeff
    }

    pub fn is_purely_atomic(&self) -> bool {
        self.density.is_none()
    }

    /// j-th power moment of the density part times its coefficient, as a
    /// float, plus the tolerance estimate.
    pub(crate) fn density_moment(&self, j: u32) -> Option<(f64, f64)> {
        let d = self.density?;
        let coeff = self.density_coeff.to_f64().unwrap_or(0.0);
        let g = move |p: f64| p.powi(j as i32) * d.kind.eval(p);
        let (v, tol) = d.rule.integrate_with_tol(&g, d.nodes);
        Some((v * coeff, tol * coeff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;

    #[test]
    fn atomic_validation() {
        assert!(MeasureSpec::atomic(vec![(rat(1, 4), rat(1, 2)), (rat(3, 4), rat(1, 2))]).is_ok());
        assert!(MeasureSpec::atomic(vec![(rat(1, 4), rat(1, 2))]).is_err());
        assert!(MeasureSpec::atomic(vec![(rat(0, 1), rat(1, 1))]).is_err());
        assert!(MeasureSpec::atomic(vec![(rat(1, 1), rat(1, 1))]).is_err());
        assert!(MeasureSpec::atomic(vec![(rat(1, 4), rat(1, 2)), (rat(1, 4), rat(1, 2))]).is_err());
        assert!(MeasureSpec::atomic(vec![(rat(1, 4), rat(3, 2)), (rat(3, 4), rat(-1, 2))]).is_err());
    }

    #[test]
    fn density_takes_leftover_mass() {
        let d = DensitySpec {
            kind: DensityKind::Uniform,
            rule: QuadratureRule::Midpoint,
            nodes: 64,
        };
        let mu = MeasureSpec::with_density(vec![(rat(1, 2), rat(1, 4))], d).unwrap();
        assert_eq!(mu.density_coefficient(), &rat(3, 4));
        assert!(!mu.is_purely_atomic());
        // atoms already carrying everything leaves the density pointless
        assert!(MeasureSpec::with_density(vec![(rat(1, 2), rat(1, 1))], d).is_err());
    }

    #[test]
    fn quadrature_rules_hit_polynomials() {
        let g = |p: f64| p * p;
        let (v, tol) = QuadratureRule::Midpoint.integrate_with_tol(&g, 512);
        assert!((v - 1.0 / 3.0).abs() <= tol.max(1e-12));
        let (v, _) = QuadratureRule::Simpson.integrate_with_tol(&g, 64);
        // Simpson is exact on quadratics up to float rounding
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }
}
