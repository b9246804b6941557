//! Element expressions.
//!
//! ```text
//! expr   := '-'? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := rational | 'h' ('^' '-'? nat)? | ident ('^' nat)?
//!         | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Printing an [`ElementExpr`] and parsing the result gives the same tree.
//!
//! ```
//! use qdp::examples::builtin;
//! use qdp::expr::parse_element;
//!
//! let p = builtin("borel2").unwrap().quea;
//! let a = parse_element("y*x", &p).unwrap();
//! assert_eq!(p.show(&a), "-y + x*y");
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::freealg::Element;
use crate::hopf::Presentation;
use crate::series::{HSeries, Rational};

/// Syntax tree of an element expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementExpr {
    Num(Rational),
    /// `h^k`.
    H(i64),
    /// `name^e`.
    Gen(String, u32),
    Exp(Box<ElementExpr>),
    Paren(Box<ElementExpr>),
    /// Signed terms; `true` marks a subtracted term.
    Sum(Vec<(bool, ElementExpr)>),
    Product(Vec<ElementExpr>),
}

/// Generator names: ASCII letters, digits, `_` and `'`, not starting with
/// a digit or `'`, and neither `h` nor `exp`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') && s != "h" && s != "exp"
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(src[start..i].parse().expect("digits"))));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return err(i, format!("unexpected character {ch:?}"));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ElementExpr> {
        let mut terms = Vec::new();
        let neg = self.eat(&Tok::Minus);
        terms.push((neg, self.term()?));
        loop {
            let neg = if self.eat(&Tok::Plus) {
                false
            } else if self.eat(&Tok::Minus) {
                true
            } else {
                break;
            };
            terms.push((neg, self.term()?));
        }
        if terms.len() == 1 && !terms[0].0 {
            return Ok(terms.pop().expect("one term").1);
        }
        Ok(ElementExpr::Sum(terms))
    }

    fn term(&mut self) -> Result<ElementExpr> {
        let mut factors = vec![self.factor()?];
        while self.eat(&Tok::Star) {
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().expect("one factor"));
        }
        Ok(ElementExpr::Product(factors))
    }

    fn nat(&mut self) -> Result<BigInt> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(n)
            }
            _ => err(pos, "expected a natural number"),
        }
    }

    fn small_nat(&mut self) -> Result<u32> {
        let pos = self.pos();
        let n = self.nat()?;
        u32::try_from(&n).or_else(|_| err(pos, "exponent too large"))
    }

    fn factor(&mut self) -> Result<ElementExpr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                if self.eat(&Tok::Slash) {
                    let dpos = self.pos();
                    let d = self.nat()?;
                    if d.is_zero() {
                        return err(dpos, "zero denominator");
                    }
                    Ok(ElementExpr::Num(Rational::new(n, d)))
                } else {
                    Ok(ElementExpr::Num(Rational::from_integer(n)))
                }
            }
            Some(Tok::Ident(name)) if name == "h" => {
                self.at += 1;
                if self.eat(&Tok::Caret) {
                    let neg = self.eat(&Tok::Minus);
                    let k = self.small_nat()? as i64;
                    Ok(ElementExpr::H(if neg { -k } else { k }))
                } else {
                    Ok(ElementExpr::H(1))
                }
            }
            Some(Tok::Ident(name)) if name == "exp" => {
                self.at += 1;
                if !self.eat(&Tok::LParen) {
                    return err(self.pos(), "expected '(' after exp");
                }
                let inner = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return err(self.pos(), "expected ')'");
                }
                Ok(ElementExpr::Exp(Box::new(inner)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if self.eat(&Tok::Caret) {
                    let e = self.small_nat()?;
                    Ok(ElementExpr::Gen(name, e))
                } else {
                    Ok(ElementExpr::Gen(name, 1))
                }
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return err(self.pos(), "expected ')'");
                }
                Ok(ElementExpr::Paren(Box::new(inner)))
            }
            Some(t) => err(pos, format!("unexpected {t:?}")),
            None => err(pos, "unexpected end of input"),
        }
    }
}

/// Parses without resolving identifiers.
pub fn parse_expr(src: &str) -> Result<ElementExpr> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return err(p.pos(), "trailing input");
    }
    Ok(e)
}

impl fmt::Display for ElementExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementExpr::Num(q) => write!(f, "{q}"),
            ElementExpr::H(1) => write!(f, "h"),
            ElementExpr::H(k) => write!(f, "h^{k}"),
            ElementExpr::Gen(g, 1) => write!(f, "{g}"),
            ElementExpr::Gen(g, e) => write!(f, "{g}^{e}"),
            ElementExpr::Exp(e) => write!(f, "exp({e})"),
            ElementExpr::Paren(e) => write!(f, "({e})"),
            ElementExpr::Sum(terms) => {
                for (i, (neg, t)) in terms.iter().enumerate() {
                    match (i, neg) {
                        (0, true) => write!(f, "-")?,
                        (0, false) => {}
                        (_, true) => write!(f, " - ")?,
                        (_, false) => write!(f, " + ")?,
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
            ElementExpr::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

impl ElementExpr {
    /// Evaluates in `p`, normal-forming every product.
    pub fn eval(&self, p: &Presentation) -> Result<Element> {
        let n = p.h_order();
        Ok(match self {
            ElementExpr::Num(q) => p.scalar(HSeries::constant(q.clone(), n)),
            ElementExpr::H(k) => p.scalar(HSeries::h_pow(*k, n)),
            ElementExpr::Gen(g, e) => {
                let i = p.generator_index(g).ok_or_else(|| Error::UnknownGenerator(g.clone()))?;
                p.power(&p.gen(i), *e)?
            }
            ElementExpr::Exp(e) => p.exp(&e.eval(p)?)?,
            ElementExpr::Paren(e) => e.eval(p)?,
            ElementExpr::Sum(terms) => {
                let mut acc = Element::zero(p.id());
                for (neg, t) in terms {
                    let v = t.eval(p)?;
                    acc = if *neg { acc.try_sub(&v)? } else { acc.try_add(&v)? };
                }
                p.residual(&acc)
            }
            ElementExpr::Product(fs) => {
                let vals = fs.iter().map(|x| x.eval(p)).collect::<Result<Vec<_>>>()?;
                p.multiply_all(&vals)?
            }
        })
    }

    /// Evaluates a generator-free expression as a series of order `order`.
    pub fn eval_series(&self, order: i64) -> Result<HSeries> {
        Ok(match self {
            ElementExpr::Num(q) => HSeries::constant(q.clone(), order),
            ElementExpr::H(k) => HSeries::h_pow(*k, order),
            ElementExpr::Gen(g, _) => return Err(Error::UnknownGenerator(g.clone())),
            ElementExpr::Exp(e) => e.eval_series(order)?.exp()?,
            ElementExpr::Paren(e) => e.eval_series(order)?,
            ElementExpr::Sum(terms) => {
                let mut acc = HSeries::zero(order);
                for (neg, t) in terms {
                    let v = t.eval_series(order)?;
                    acc = if *neg { &acc - &v } else { &acc + &v };
                }
                acc
            }
            ElementExpr::Product(fs) => {
                let mut acc = HSeries::constant(Rational::one(), order);
                for x in fs {
                    acc = (&acc * &x.eval_series(order)?).truncate(order);
                }
                acc
            }
        })
    }
}

/// Parses and normal-forms an element of `p`.
pub fn parse_element(src: &str, p: &Presentation) -> Result<Element> {
    parse_expr(src)?.eval(p)
}

/// Parses a generator-free expression such as `exp(2*h)`.
pub fn parse_series(src: &str, order: i64) -> Result<HSeries> {
    parse_expr(src)?.eval_series(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::builtin_with;
    use crate::series::rat;

    #[test]
    fn identifiers() {
        assert!(is_identifier("x1"));
        assert!(is_identifier("X'"));
        assert!(!is_identifier("h"));
        assert!(!is_identifier("exp"));
        assert!(!is_identifier("1x"));
        assert!(!is_identifier(""));
    }

    #[test]
    fn borel2_examples() {
        let p = builtin_with("borel2", 6, 6).unwrap().quea;
        let a = parse_element("h*x + h^2*y", &p).unwrap();
        let want = p
            .mono(&[1, 0], HSeries::h_pow(1, 6))
            .try_add(&p.mono(&[0, 1], HSeries::h_pow(2, 6)))
            .unwrap();
        assert_eq!(a, want);
        assert_eq!(p.show(&parse_element("y*x", &p).unwrap()), "-y + x*y");
        assert_eq!(parse_element("h*q", &p).unwrap_err(), Error::UnknownGenerator("q".into()));
        assert!(matches!(
            parse_element("exp(x)", &p),
            Err(Error::NotTopologicallyNilpotent { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(parse_expr("x + * y").unwrap_err(), Error::Parse { pos: 4, msg: "unexpected Star".into() });
        assert!(matches!(parse_expr("(x"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_expr("x $"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_expr("1/0"), Err(Error::Parse { pos: 2, .. })));
    }

    #[test]
    fn series_shorthand() {
        let e = parse_series("exp(2*h)", 4).unwrap();
        assert_eq!(
            e,
            HSeries::from_coeffs(0, vec![rat(1, 1), rat(2, 1), rat(2, 1), rat(4, 3), rat(2, 3)], 4)
        );
        assert_eq!(parse_series("1 - 1/2*h^2", 3).unwrap().to_string(), "1 - 1/2*h^2");
    }

    #[test]
    fn print_parse_fixed_point() {
        for s in ["-y + x*y", "(x + 1)*(y - h^2)", "exp(h*x)*y^3", "1/2*h^-1*x", "-(x)"] {
            let e = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{s}");
        }
    }
}
