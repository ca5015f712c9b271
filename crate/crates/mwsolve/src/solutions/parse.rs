//! Textual form of solution expressions.
//!
//! ```text
//! derham:p=1/3
//! avg:m=2:P=0,0,1/3,2/3
//! int:atoms=(1/4:1/2),(3/4:1/2)
//! int:atoms=(1/2:1/4):density=uniform:rule=midpoint:nodes=256
//! convex:a=1/2:<derham:p=1/2>:<avg:m=2:P=0,0,1/3,2/3>
//! series:(1/2:<derham:p=1/3>),(1/2:<derham:p=2/3>)
//! series:(3/4:<derham:p=1/3>):tail=1/4
//! ```
//!
//! Parsing is strict; errors carry the byte offset of the offending
//! character. `Display` emits the same grammar, so printing and re-parsing
//! round-trips.

use std::fmt;
use std::str::FromStr;

use num::Zero;

use super::{DensityKind, DensitySpec, MeasureSpec, QuadratureRule, SolutionExpr};
use crate::error::Error;
use crate::ifs::ProbabilityVector;
use crate::numerics::Rational;

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Self { s, pos: 0, end: s.len() }
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, Error> {
        Err(Error::Parse { msg: msg.into(), pos: self.pos })
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..self.end]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.end
    }

    fn eat(&mut self, token: &str) -> Result<(), Error> {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            self.fail(format!("expected {token:?}"))
        }
    }

    fn eat_opt(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    /// Consumes a run of rational-number characters.
    fn rational(&mut self) -> Result<Rational, Error> {
        let start = self.pos;
        let bytes = self.rest().as_bytes();
        let mut len = 0;
        while len < bytes.len() && (bytes[len].is_ascii_digit() || bytes[len] == b'/' || bytes[len] == b'-') {
            len += 1;
        }
        if len == 0 {
            return self.fail("expected a rational number");
        }
        let text = &self.s[start..start + len];
        self.pos += len;
        text.parse::<Rational>().map_err(|e| Error::Parse {
            msg: format!("invalid rational {text:?}: {e}"),
            pos: start,
        })
    }

    fn integer(&mut self) -> Result<u32, Error> {
        let start = self.pos;
        let bytes = self.rest().as_bytes();
        let mut len = 0;
        while len < bytes.len() && bytes[len].is_ascii_digit() {
            len += 1;
        }
        if len == 0 {
            return self.fail("expected an integer");
        }
        let text = &self.s[start..start + len];
        self.pos += len;
        text.parse::<u32>().map_err(|_| Error::Parse {
            msg: format!("integer {text:?} out of range"),
            pos: start,
        })
    }

    fn identifier(&mut self) -> Result<&'a str, Error> {
        let start = self.pos;
        let bytes = self.rest().as_bytes();
        let mut len = 0;
        while len < bytes.len() && bytes[len].is_ascii_alphanumeric() {
            len += 1;
        }
        if len == 0 {
            return self.fail("expected an identifier");
        }
        self.pos += len;
        Ok(&self.s[start..start + len])
    }

    /// At '<': finds the matching '>' and returns the inner span.
    fn bracketed(&mut self) -> Result<(usize, usize), Error> {
        let open = self.pos;
        self.eat("<")?;
        let start = self.pos;
        let mut depth = 1usize;
        for (i, b) in self.s[start..self.end].bytes().enumerate() {
            match b {
                b'<' => depth += 1,
                b'>' => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos = start + i + 1;
                        return Ok((start, start + i));
                    }
                }
                _ => {}
            }
        }
        Err(Error::Parse { msg: "unbalanced '<'".into(), pos: open })
    }

    fn subexpr(&mut self) -> Result<SolutionExpr, Error> {
        let (start, end) = self.bracketed()?;
        let mut inner = Cursor { s: self.s, pos: start, end };
        let expr = parse_expr(&mut inner)?;
        if !inner.at_end() {
            return inner.fail("trailing input inside <...>");
        }
        Ok(expr)
    }
}

fn parse_expr(c: &mut Cursor) -> Result<SolutionExpr, Error> {
    if c.eat_opt("derham:p=") {
        return SolutionExpr::derham(c.rational()?);
    }
    if c.eat_opt("avg:m=") {
        let m = c.integer()?;
        c.eat(":P=")?;
        let mut weights = vec![c.rational()?];
        while c.eat_opt(",") {
            weights.push(c.rational()?);
        }
        return Ok(SolutionExpr::averaged(ProbabilityVector::new(m, weights)?));
    }
    if c.eat_opt("int:") {
        return parse_measure_expr(c);
    }
    if c.eat_opt("convex:a=") {
        let alpha = c.rational()?;
        c.eat(":")?;
        let left = c.subexpr()?;
        c.eat(":")?;
        let right = c.subexpr()?;
        return SolutionExpr::convex(alpha, left, right);
    }
    if c.eat_opt("series:") {
        let mut terms = Vec::new();
        loop {
            c.eat("(")?;
            let weight = c.rational()?;
            c.eat(":")?;
            let expr = c.subexpr()?;
            c.eat(")")?;
            terms.push((weight, expr));
            if !c.eat_opt(",") {
                break;
            }
        }
        let tail = if c.eat_opt(":tail=") { c.rational()? } else { Rational::zero() };
        return SolutionExpr::series(terms, tail);
    }
    c.fail("expected one of derham:, avg:, int:, convex:, series:")
}

fn parse_measure_expr(c: &mut Cursor) -> Result<SolutionExpr, Error> {
    let mut atoms = Vec::new();
    let mut kind: Option<DensityKind> = None;
    let mut rule = QuadratureRule::Midpoint;
    let mut nodes = 256u32;
    let mut saw_atoms = false;
    loop {
        if c.eat_opt("atoms=") {
            saw_atoms = true;
            loop {
                c.eat("(")?;
                let loc = c.rational()?;
                c.eat(":")?;
                let mass = c.rational()?;
                c.eat(")")?;
                atoms.push((loc, mass));
                if !c.eat_opt(",") {
                    break;
                }
            }
        } else if c.eat_opt("density=") {
            let pos = c.pos;
            let name = c.identifier()?;
            kind = Some(DensityKind::parse(name).ok_or(Error::Parse {
                msg: format!("unknown density {name:?}"),
                pos,
            })?);
        } else if c.eat_opt("rule=") {
            let pos = c.pos;
            rule = match c.identifier()? {
                "midpoint" => QuadratureRule::Midpoint,
                "simpson" => QuadratureRule::Simpson,
                other => {
                    return Err(Error::Parse {
                        msg: format!("unknown quadrature rule {other:?}"),
                        pos,
                    })
                }
            };
        } else if c.eat_opt("nodes=") {
            nodes = c.integer()?;
        } else {
            return c.fail("expected atoms=, density=, rule= or nodes=");
        }
        if !c.eat_opt(":") {
            break;
        }
    }
    if !saw_atoms && kind.is_none() {
        return c.fail("measure needs atoms= or density=");
    }
    let mu = match kind {
        Some(kind) => MeasureSpec::with_density(atoms, DensitySpec { kind, rule, nodes })?,
        None => MeasureSpec::atomic(atoms)?,
    };
    Ok(SolutionExpr::integral(mu))
}

impl FromStr for SolutionExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut c = Cursor::new(s);
        let expr = parse_expr(&mut c)?;
        if !c.at_end() {
            return c.fail("trailing input");
        }
        Ok(expr)
    }
}

impl fmt::Display for SolutionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionExpr::DeRham(p) => write!(f, "derham:p={}", p.p()),
            SolutionExpr::Averaged(p) => {
                write!(f, "avg:m={}:P=", p.m())?;
                for (i, w) in p.weights().iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
            SolutionExpr::Integral(mu) => {
                write!(f, "int:")?;
                if !mu.atoms().is_empty() {
                    write!(f, "atoms=")?;
                    for (i, (loc, mass)) in mu.atoms().iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "({loc}:{mass})")?;
                    }
                }
                if let Some(d) = mu.density() {
                    if !mu.atoms().is_empty() {
                        write!(f, ":")?;
                    }
                    write!(f, "density={}:rule={}:nodes={}", d.kind.id(), d.rule.id(), d.nodes)?;
                }
                Ok(())
            }
            SolutionExpr::Convex { alpha, left, right } => {
                write!(f, "convex:a={alpha}:<{left}>:<{right}>")
            }
            SolutionExpr::Series { terms, tail } => {
                write!(f, "series:")?;
                for (i, (a, s)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "({a}:<{s}>)")?;
                }
                if !tail.is_zero() {
                    write!(f, ":tail={tail}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rat, DyadicPoint};

    fn round_trips(s: &str) {
        let e: SolutionExpr = s.parse().unwrap();
        assert_eq!(e.to_string(), s);
        let again: SolutionExpr = e.to_string().parse().unwrap();
        assert_eq!(again.to_string(), s);
    }

    #[test]
    fn grammar_round_trips() {
        round_trips("derham:p=1/3");
        round_trips("avg:m=2:P=0,0,1/3,2/3");
        round_trips("int:atoms=(1/4:1/2),(3/4:1/2)");
        round_trips("int:atoms=(1/2:1/4):density=uniform:rule=midpoint:nodes=256");
        round_trips("int:density=uniform:rule=simpson:nodes=64");
        round_trips("convex:a=1/2:<derham:p=1/2>:<avg:m=2:P=0,0,1/3,2/3>");
        round_trips("series:(1/2:<derham:p=1/3>),(1/2:<derham:p=2/3>)");
        round_trips("series:(3/4:<derham:p=1/3>):tail=1/4");
        round_trips("convex:a=1/3:<convex:a=1/2:<derham:p=1/4>:<derham:p=3/4>>:<derham:p=1/2>");
    }

    #[test]
    fn parsed_expressions_evaluate() {
        let e: SolutionExpr = "avg:m=2:P=0,0,1/3,2/3".parse().unwrap();
        let half = DyadicPoint::from_ints(1, 1).unwrap();
        assert_eq!(e.eval(&half).unwrap(), rat(1, 6));
        let e: SolutionExpr = "int:atoms=(1/4:1/2),(3/4:1/2)".parse().unwrap();
        assert_eq!(e.eval(&half).unwrap(), rat(1, 2));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = "nonsense:p=1".parse::<SolutionExpr>().unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 0, .. }));

        let err = "derham:p=".parse::<SolutionExpr>().unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 9, .. }));

        let err = "convex:a=1/2:<derham:p=1/3".parse::<SolutionExpr>().unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 13, .. }));

        let err = "avg:m=2:P=0,0,1/3,2/3,9".parse::<SolutionExpr>().unwrap_err();
        assert!(matches!(err, Error::Domain(_)));

        // syntactically fine, out-of-domain value
        let err = "derham:p=2".parse::<SolutionExpr>().unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let err = "derham:p=1/3zzz".parse::<SolutionExpr>().unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 12, .. }));
    }
}
