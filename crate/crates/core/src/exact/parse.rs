//! Text form of [`RealExpr`].
//!
//! Grammar (whitespace-insensitive except inside literals):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! primary := literal | '(' expr ')'
//!          | 'pow' '(' expr ',' exponent ')' | 'root' '(' expr ',' int ')'
//!          | 'sqrt' '(' expr ')' | 'floor' '(' expr ')'
//! literal := '-'? digits ('/' digits)?      -- no spaces inside a literal
//! ```
//!
//! `Display` only emits the fully parenthesised subset, and parsing it back
//! rebuilds the identical tree.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::expr::{Node, RealExpr};
use super::ExactError;

impl FromStr for RealExpr {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }
}

/// Parses a comma-separated list, splitting only at top-level commas.
pub fn parse_list(s: &str) -> Result<Vec<RealExpr>, ExactError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].parse()?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].parse()?);
    Ok(out)
}

/// Parses an exact rational literal such as `-7/2` or `10^52`; anything that
/// does not reduce to a rational is rejected.
pub fn parse_rational(s: &str) -> Result<BigRational, ExactError> {
    let e: RealExpr = s.parse()?;
    e.fold_rational().ok_or_else(|| ExactError::Parse { pos: 0, msg: format!("`{s}` is not an exact rational") })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExactError {
        ExactError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ExactError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<RealExpr, ExactError> {
        let mut left = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let right = self.term()?;
                    left = RealExpr::from_node(Node::Add(left, right));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let right = self.term()?;
                    left = RealExpr::from_node(Node::Sub(left, right));
                }
                _ => return Ok(left),
            }
        }
    }

    fn term(&mut self) -> Result<RealExpr, ExactError> {
        let mut left = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let right = self.unary()?;
                    left = RealExpr::from_node(Node::Mul(left, right));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let right = self.unary()?;
                    left = RealExpr::from_node(Node::Div(left, right));
                }
                _ => return Ok(left),
            }
        }
    }

    fn unary(&mut self) -> Result<RealExpr, ExactError> {
        if self.peek() == Some(b'-') {
            let next = self.src.get(self.pos + 1).copied();
            if next.is_some_and(|c| c.is_ascii_digit()) {
                return self.power();
            }
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(RealExpr::from_node(Node::Mul(RealExpr::int(-1), inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<RealExpr, ExactError> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = if self.peek() == Some(b'(') {
                self.pos += 1;
                let e = self.literal()?;
                self.expect(b')')?;
                e
            } else {
                self.literal()?
            };
            return Ok(RealExpr::from_node(Node::Pow(base, exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<RealExpr, ExactError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => Ok(RealExpr::rational(self.literal()?)),
            Some(c) if c.is_ascii_alphabetic() => self.call(),
            _ => Err(self.error("expected a number, `(` or a function")),
        }
    }

    fn call(&mut self) -> Result<RealExpr, ExactError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default().to_string();
        self.expect(b'(')?;
        let arg = self.expr()?;
        let node = match name.as_str() {
            "pow" => {
                self.expect(b',')?;
                Node::Pow(arg, self.literal()?)
            }
            "root" => {
                self.expect(b',')?;
                let k = self.literal()?;
                if !k.is_integer() || !k.is_positive() {
                    return Err(self.error("root index must be a positive integer"));
                }
                Node::Pow(arg, k.recip())
            }
            "sqrt" => Node::Pow(arg, BigRational::new(1.into(), 2.into())),
            "floor" => Node::Floor(arg),
            _ => {
                self.pos = start;
                return Err(self.error(&format!("unknown function `{name}`")));
            }
        };
        self.expect(b')')?;
        Ok(RealExpr::from_node(node))
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn literal(&mut self) -> Result<BigRational, ExactError> {
        self.skip_ws();
        let negative = self.src.get(self.pos) == Some(&b'-');
        if negative {
            self.pos += 1;
        }
        let num = self.digits().ok_or_else(|| self.error("expected digits"))?;
        let mut value = BigRational::from_integer(num);
        if self.src.get(self.pos) == Some(&b'/') && self.src.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            let den = self.digits().ok_or_else(|| self.error("expected digits"))?;
            if den.is_zero() {
                return Err(self.error("zero denominator"));
            }
            value /= BigRational::from_integer(den);
        }
        if self.src.get(self.pos) == Some(&b'.') {
            return Err(self.error("decimal literals are not exact; write p/q"));
        }
        Ok(if negative { -value } else { value })
    }
}
