//! Reading scalars back from strings.
//!
//! Accepts the output of `Display` ("p^v * (c0 + c1*g + ...)", "0", "O(p^k)")
//! as well as ordinary arithmetic over integers, `p` and `g`:
//! sums, products, quotients, integer powers and parentheses.

use num_bigint::BigInt;

use super::context::Context;
use super::scalar::PadicScalar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Int(text.parse().unwrap()));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a Context,
    toks: Vec<Tok>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{c}' at token {}", self.pos)))
        }
    }

    fn sum(&mut self) -> Result<PadicScalar> {
        let mut acc = self.product()?;
        loop {
            if self.eat_sym('+') {
                let t = self.product()?;
                acc = acc.checked_add(&t)?;
            } else if self.eat_sym('-') {
                let t = self.product()?;
                acc = acc.checked_sub(&t)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<PadicScalar> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_sym('*') {
                let t = self.unary()?;
                acc = acc.checked_mul(&t)?;
            } else if self.eat_sym('/') {
                let t = self.unary()?;
                acc = acc.div(&t)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<PadicScalar> {
        if self.eat_sym('-') {
            Ok(self.unary()?.neg())
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<PadicScalar> {
        let base = self.atom()?;
        if self.eat_sym('^') {
            let neg = self.eat_sym('-');
            let e = match self.peek() {
                Some(Tok::Int(k)) => {
                    let k: i64 = k.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    self.pos += 1;
                    k
                }
                _ => return Err(Error::Parse("expected integer exponent".into())),
            };
            base.pow_signed(if neg { -e } else { e })
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<PadicScalar> {
        let tok = self.peek().cloned().ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Int(k) => Ok(PadicScalar::from_bigint(self.ctx, &k)),
            Tok::Sym('(') => {
                let v = self.sum()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Tok::Ident(name) => match name.as_str() {
                "p" => Ok(PadicScalar::p_power(self.ctx, 1)),
                "g" => Ok(PadicScalar::generator(self.ctx)),
                "O" => {
                    self.expect_sym('(')?;
                    let inner = self.sum()?;
                    self.expect_sym(')')?;
                    let k = inner.valuation().ok_or_else(|| Error::Parse("O(...) needs a nonzero argument".into()))?;
                    Ok(PadicScalar::zero_with_precision(self.ctx, k))
                }
                other => Err(Error::Parse(format!("unknown symbol {other:?}"))),
            },
            Tok::Sym(c) => Err(Error::Parse(format!("unexpected '{c}'"))),
        }
    }
}

/// Parses a scalar in the given context.
pub fn parse_scalar(ctx: &Context, s: &str) -> Result<PadicScalar> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    let mut parser = Parser { ctx, toks, pos: 0 };
    let v = parser.sum()?;
    if parser.pos != parser.toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    Ok(v)
}
