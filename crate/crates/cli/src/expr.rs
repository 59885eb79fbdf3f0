//! Element expressions: polynomials in one variable with rational
//! coefficients, e.g. `3/2*x^2 - x + 1`, `(x + 1)^2/4`, `0.25x`.

use hermsig_core::{Poly, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    /// Byte offset into the expression.
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError { offset, message: message.into() })
}

/// Exact value of a decimal literal such as `12`, `0.125` or `3.`.
pub fn decimal(text: &str) -> Option<Rational> {
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(digits, scale))
}

/// A signed decimal or fraction `p/q`.
pub fn number(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let value = match body.split_once('/') {
        Some((p, q)) => {
            let q = decimal(q)?;
            if q.is_zero() {
                return None;
            }
            decimal(p)? / q
        }
        None => decimal(body)?,
    };
    Some(if neg { -value } else { value })
}

fn tokenize(src: &str, var: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::Open,
            b')' => Tok::Close,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let lit = &src[start..i];
                match decimal(lit) {
                    Some(r) => out.push((start, Tok::Num(r))),
                    None => return err(start, format!("malformed number `{lit}`")),
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let name = &src[start..i];
                if name != var {
                    return err(start, format!("unknown identifier `{name}` (the field variable is `{var}`)"));
                }
                out.push((start, Tok::Var));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return err(start, format!("unexpected character `{ch}`"));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn expr(&mut self) -> Result<Poly, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.offset();
                    let d = self.unary()?;
                    match d.degree() {
                        None => return err(at, "division by zero"),
                        Some(0) => acc = acc.scale(&d.coeff(0).recip()),
                        Some(_) => return err(at, "division by a non-constant expression"),
                    }
                }
                // implicit product: `2x`, `3(x + 1)`
                Some(Tok::Var) | Some(Tok::Open) => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ExprError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, ExprError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.offset();
        let k = match self.peek() {
            Some(Tok::Num(r)) if r.is_integer() => r.to_integer(),
            _ => return err(at, "exponent must be a non-negative integer literal"),
        };
        self.pos += 1;
        let k: u32 = match k.try_into() {
            Ok(k) if k <= 1024 => k,
            _ => return err(at, "exponent too large"),
        };
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Poly, ExprError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Poly::constant(r))
            }
            Some(Tok::Var) => {
                self.pos += 1;
                Ok(Poly::x())
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return err(self.offset(), "expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => err(at, "expected a number, the variable or `(`"),
            None => err(at, "unexpected end of expression"),
        }
    }
}

/// Parses `src` as a polynomial in `var`.
pub fn parse_poly(src: &str, var: &str) -> Result<Poly, ExprError> {
    let toks = tokenize(src, var)?;
    if toks.is_empty() {
        return err(0, "empty expression");
    }
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return err(p.offset(), "unexpected trailing input");
    }
    Ok(out)
}

pub fn is_one(p: &Poly) -> bool {
    p.degree() == Some(0) && p.coeff(0).is_one()
}
