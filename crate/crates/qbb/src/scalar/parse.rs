//! Recursive-descent parser for rational functions in `q`.
//!
//! Grammar: integers, `q`, `+ - * / ^`, parentheses and unary minus.
//! Exponents are (optionally signed) integer literals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Coefficient, LaurentPolynomial, RationalFunction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map(|s| s.chars().count()).unwrap_or(0) + 1;
        ParseError { line, column, message: message.into() }
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub(crate) fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek_raw().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        Ok(self.src[start..self.pos].parse().expect("digits"))
    }

    pub(crate) fn small_integer(&mut self) -> Result<i64, ParseError> {
        let at = self.pos;
        let n = self.integer()?;
        i64::try_from(n).map_err(|_| {
            self.pos = at;
            self.error("integer out of range")
        })
    }

    pub(crate) fn identifier(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek_raw().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.pos += self.peek_raw().unwrap().len_utf8();
        }
        if start == self.pos {
            return Err(self.error("expected an index name"));
        }
        Ok(self.src[start..self.pos].to_string())
    }
}

/// Parses text such as `1/(1-q^2)` or `q^2+3*q^-1`.
pub fn parse_rational_function<C: Coefficient>(src: &str) -> Result<RationalFunction<C>, ParseError> {
    let mut cur = Cursor::new(src);
    let v = expr(&mut cur)?;
    if !cur.at_end() {
        let c = cur.peek().unwrap();
        return Err(cur.error(format!("unexpected character '{c}'")));
    }
    Ok(v)
}

fn expr<C: Coefficient>(cur: &mut Cursor) -> Result<RationalFunction<C>, ParseError> {
    let mut acc = term(cur)?;
    loop {
        if cur.eat('+') {
            acc = &acc + &term(cur)?;
        } else if cur.eat('-') {
            acc = &acc - &term(cur)?;
        } else {
            return Ok(acc);
        }
    }
}

fn term<C: Coefficient>(cur: &mut Cursor) -> Result<RationalFunction<C>, ParseError> {
    let mut acc = unary(cur)?;
    loop {
        if cur.eat('*') {
            acc = &acc * &unary(cur)?;
        } else if cur.peek() == Some('/') {
            cur.eat('/');
            cur.skip_ws();
            let at = cur.error("division by zero");
            let d = unary(cur)?;
            acc = acc.try_div(&d).map_err(|_| at)?;
        } else {
            return Ok(acc);
        }
    }
}

fn unary<C: Coefficient>(cur: &mut Cursor) -> Result<RationalFunction<C>, ParseError> {
    if cur.eat('-') {
        return Ok(-unary(cur)?);
    }
    if cur.eat('+') {
        return unary(cur);
    }
    power(cur)
}

fn power<C: Coefficient>(cur: &mut Cursor) -> Result<RationalFunction<C>, ParseError> {
    let base = atom(cur)?;
    if cur.eat('^') {
        let neg = if cur.eat('-') {
            true
        } else {
            cur.eat('+');
            false
        };
        cur.skip_ws();
        let at = cur.error("zero raised to a negative power");
        let e = cur.small_integer()?;
        let e = if neg { -e } else { e };
        return base.pow(e).map_err(|_| at);
    }
    Ok(base)
}

fn atom<C: Coefficient>(cur: &mut Cursor) -> Result<RationalFunction<C>, ParseError> {
    match cur.peek() {
        Some('q') => {
            cur.eat('q');
            Ok(RationalFunction::q_pow(1))
        }
        Some('(') => {
            cur.eat('(');
            let v = expr(cur)?;
            if !cur.eat(')') {
                return Err(cur.error("expected ')'"));
            }
            Ok(v)
        }
        Some(c) if c.is_ascii_digit() => {
            let n = cur.integer()?;
            Ok(LaurentPolynomial::constant(C::from_rational(BigRational::from_integer(n))).into())
        }
        Some(c) => Err(cur.error(format!("unexpected character '{c}'"))),
        None => Err(cur.error("unexpected end of input")),
    }
}
