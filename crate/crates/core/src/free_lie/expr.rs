//! Bracket expressions such as `[x,[x,y]] - 2*[y,[x,y]]`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parsed bracket expression. Coefficients are kept as exact rationals and
/// only mapped into a field at evaluation time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BracketExpr {
    Zero,
    Name(String),
    Bracket(Box<BracketExpr>, Box<BracketExpr>),
    Add(Box<BracketExpr>, Box<BracketExpr>),
    Sub(Box<BracketExpr>, Box<BracketExpr>),
    Neg(Box<BracketExpr>),
    /// `num/den * expr` with `den > 0`.
    Scale(BigInt, BigInt, Box<BracketExpr>),
}

/// Anything with named generators, linear structure and a bracket, so that
/// expressions can be evaluated in free, nilpotent or finite-dimensional
/// algebras alike.
pub trait BracketAlgebra {
    type Scalar: Scalar;
    type Element: Clone;

    fn scalar_field(&self) -> &<Self::Scalar as Scalar>::Field;
    fn named_generator(&self, name: &str) -> Result<Self::Element>;
    fn zero_element(&self) -> Self::Element;
    fn add_elements(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn scale_element(&self, a: &Self::Element, c: &Self::Scalar) -> Self::Element;
    fn bracket_elements(&self, a: &Self::Element, b: &Self::Element) -> Result<Self::Element>;
}

impl BracketExpr {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { chars: text.char_indices().collect(), pos: 0, len: text.len() };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn name(s: &str) -> Self {
        BracketExpr::Name(s.to_string())
    }

    pub fn bracket(a: BracketExpr, b: BracketExpr) -> Self {
        BracketExpr::Bracket(Box::new(a), Box::new(b))
    }

    /// Left-normed bracket `[⋯[a₁, a₂], ⋯, aₙ]`.
    pub fn left_normed<I: IntoIterator<Item = BracketExpr>>(items: I) -> Option<Self> {
        let mut it = items.into_iter();
        let first = it.next()?;
        Some(it.fold(first, BracketExpr::bracket))
    }

    /// Generator names in order of first appearance.
    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut Vec<String>) {
        match self {
            BracketExpr::Zero => {}
            BracketExpr::Name(n) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            BracketExpr::Bracket(a, b) | BracketExpr::Add(a, b) | BracketExpr::Sub(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            BracketExpr::Neg(a) | BracketExpr::Scale(_, _, a) => a.collect_names(out),
        }
    }

    pub fn evaluate<A: BracketAlgebra>(&self, algebra: &A) -> Result<A::Element> {
        Ok(match self {
            BracketExpr::Zero => algebra.zero_element(),
            BracketExpr::Name(n) => algebra.named_generator(n)?,
            BracketExpr::Bracket(a, b) => algebra.bracket_elements(&a.evaluate(algebra)?, &b.evaluate(algebra)?)?,
            BracketExpr::Add(a, b) => algebra.add_elements(&a.evaluate(algebra)?, &b.evaluate(algebra)?),
            BracketExpr::Sub(a, b) => {
                let minus = A::Scalar::from_i64(algebra.scalar_field(), -1);
                let b = algebra.scale_element(&b.evaluate(algebra)?, &minus);
                algebra.add_elements(&a.evaluate(algebra)?, &b)
            }
            BracketExpr::Neg(a) => {
                let minus = A::Scalar::from_i64(algebra.scalar_field(), -1);
                algebra.scale_element(&a.evaluate(algebra)?, &minus)
            }
            BracketExpr::Scale(num, den, a) => {
                let c = A::Scalar::from_ratio(algebra.scalar_field(), num, den).ok_or_else(|| Error::Syntax {
                    column: 0,
                    message: format!("coefficient {num}/{den} is undefined in {}", algebra.scalar_field()),
                })?;
                algebra.scale_element(&a.evaluate(algebra)?, &c)
            }
        })
    }

    fn is_sum(&self) -> bool {
        matches!(self, BracketExpr::Add(..) | BracketExpr::Sub(..))
    }
}

/// Evaluates names through a lookup table instead of the algebra's own
/// generators, e.g. to apply a homomorphism given on generators.
pub struct Substitution<'a, A: BracketAlgebra> {
    pub algebra: &'a A,
    pub images: HashMap<String, A::Element>,
}

impl<A: BracketAlgebra> BracketAlgebra for Substitution<'_, A> {
    type Scalar = A::Scalar;
    type Element = A::Element;

    fn scalar_field(&self) -> &<A::Scalar as Scalar>::Field {
        self.algebra.scalar_field()
    }

    fn named_generator(&self, name: &str) -> Result<A::Element> {
        self.images.get(name).cloned().ok_or_else(|| Error::UnboundName(name.to_string()))
    }

    fn zero_element(&self) -> A::Element {
        self.algebra.zero_element()
    }

    fn add_elements(&self, a: &A::Element, b: &A::Element) -> A::Element {
        self.algebra.add_elements(a, b)
    }

    fn scale_element(&self, a: &A::Element, c: &A::Scalar) -> A::Element {
        self.algebra.scale_element(a, c)
    }

    fn bracket_elements(&self, a: &A::Element, b: &A::Element) -> Result<A::Element> {
        self.algebra.bracket_elements(a, b)
    }
}

/// Evaluates an expression given as text.
pub fn evaluate_expression<A: BracketAlgebra>(algebra: &A, text: &str) -> Result<A::Element> {
    BracketExpr::parse(text)?.evaluate(algebra)
}

impl fmt::Display for BracketExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &BracketExpr| {
            if e.is_sum() || matches!(e, BracketExpr::Neg(_)) {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            BracketExpr::Zero => f.write_str("0"),
            BracketExpr::Name(n) => f.write_str(n),
            BracketExpr::Bracket(a, b) => write!(f, "[{a},{b}]"),
            BracketExpr::Add(a, b) => {
                write!(f, "{a} + ")?;
                wrap(f, b)
            }
            BracketExpr::Sub(a, b) => {
                write!(f, "{a} - ")?;
                wrap(f, b)
            }
            BracketExpr::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a)
            }
            BracketExpr::Scale(n, d, a) => {
                write!(f, "{n}")?;
                if !d.is_one() {
                    write!(f, "/{d}")?;
                }
                f.write_str("*")?;
                wrap(f, a)
            }
        }
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn column(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i) + 1
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax { column: self.column(), message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.get(self.pos), Some((_, c)) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<BracketExpr> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    e = BracketExpr::Add(Box::new(e), Box::new(self.term()?));
                }
                Some('-') => {
                    self.pos += 1;
                    e = BracketExpr::Sub(Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<BracketExpr> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(BracketExpr::Neg(Box::new(self.term()?)))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let den = if self.peek() == Some('/') {
                    self.pos += 1;
                    self.integer()?
                } else {
                    BigInt::one()
                };
                if den.is_zero() {
                    return Err(self.error("zero denominator"));
                }
                match self.peek() {
                    Some('*') => {
                        self.pos += 1;
                        Ok(BracketExpr::Scale(num, den, Box::new(self.term()?)))
                    }
                    Some(c) if c == '[' || c == '(' || c.is_alphabetic() || c == '_' => {
                        Ok(BracketExpr::Scale(num, den, Box::new(self.term()?)))
                    }
                    _ if num.is_zero() => Ok(BracketExpr::Zero),
                    _ => Err(self.error("a bare number is not a Lie element")),
                }
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('[') => {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(']')?;
                Ok(BracketExpr::bracket(a, b))
            }
            Some(c) if c.is_alphabetic() || c == '_' => Ok(BracketExpr::Name(self.identifier())),
            Some(_) => Err(self.error("expected a name, bracket or coefficient")),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some((_, c)) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        Ok(s.parse().expect("digits"))
    }

    fn identifier(&mut self) -> String {
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some((_, c)) if c.is_alphanumeric() || *c == '_' || *c == '\'') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().map(|&(_, c)| c).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_brackets() {
        let e = BracketExpr::parse("[x, [x,y]] - 2*[y,[x,y]]").unwrap();
        let xy = BracketExpr::bracket(BracketExpr::name("x"), BracketExpr::name("y"));
        let expected = BracketExpr::Sub(
            Box::new(BracketExpr::bracket(BracketExpr::name("x"), xy.clone())),
            Box::new(BracketExpr::Scale(2.into(), 1.into(), Box::new(BracketExpr::bracket(BracketExpr::name("y"), xy)))),
        );
        assert_eq!(e, expected);
        assert_eq!(e.names(), vec!["x", "y"]);
    }

    #[test]
    fn display_round_trips() {
        for s in ["[x,[x,y]] - 2*[y,[x,y]]", "-(a + b)", "1/2*[a1,b1] + [a2,b2]", "x - (y - z)", "0", "2 x"] {
            let e = BracketExpr::parse(s).unwrap();
            assert_eq!(BracketExpr::parse(&e.to_string()).unwrap(), e, "{s}");
        }
    }

    #[test]
    fn reports_columns() {
        match BracketExpr::parse("[x,y") {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(BracketExpr::parse("x +").is_err());
        assert!(BracketExpr::parse("3").is_err());
        assert!(BracketExpr::parse("1/0*x").is_err());
    }

    #[test]
    fn left_normed_builds_nested_brackets() {
        let e = BracketExpr::left_normed(["a", "b", "c"].map(BracketExpr::name)).unwrap();
        assert_eq!(e.to_string(), "[[a,b],c]");
    }
}
