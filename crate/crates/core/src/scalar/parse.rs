//! Expression grammar for exact scalar fields:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' ['-'] integer)?
//! atom   := number | identifier | '(' expr ')'
//! ```
//! Numbers are integers or decimals and are read exactly.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::chart::Chart;
use crate::scalar::field::ScalarField;
use crate::scalar::poly::Q;
use crate::scalar::ratfun::RatFn;

pub fn parse_expr(chart: &Chart, src: &str) -> Result<ScalarField> {
    Ok(ScalarField::exact(chart, parse_ratfn(chart, src)?))
}

pub fn parse_ratfn(chart: &Chart, src: &str) -> Result<RatFn> {
    let mut p = Parser { chart, chars: src.chars().collect(), pos: 0 };
    p.skip_ws();
    if p.pos == p.chars.len() {
        return Err(p.error("empty expression"));
    }
    let r = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(r)
}

struct Parser<'a> {
    chart: &'a Chart,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        let before = &self.chars[..self.pos.min(self.chars.len())];
        let line = 1 + before.iter().filter(|&&c| c == '\n').count();
        let col = 1 + before.iter().rev().take_while(|&&c| c != '\n').count();
        Error::Parse { line, col, msg: msg.to_string() }
    }

    fn n(&self) -> usize {
        self.chart.dim()
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatFn> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                '-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFn> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                '/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    acc = acc.div(&d).ok_or_else(|| {
                        self.pos = at;
                        self.error("division by zero")
                    })?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFn> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFn> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer exponent"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let e: u32 = digits.parse().map_err(|_| self.error("exponent too large"))?;
        let r = base.pow(e);
        if negative {
            RatFn::one(self.n()).div(&r).ok_or_else(|| self.error("zero to a negative power"))
        } else {
            Ok(r)
        }
    }

    fn atom(&mut self) -> Result<RatFn> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some('(') => {
                self.pos += 1;
                let r = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(r)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len() && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.chart.index_of(&name) {
                    Some(i) => Ok(RatFn::var(self.n(), i)),
                    None => Err(Error::UnknownCoordinate(name)),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<RatFn> {
        let start = self.pos;
        let mut int = String::new();
        let mut frac = String::new();
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            int.push(self.chars[self.pos]);
            self.pos += 1;
        }
        if self.pos < self.chars.len() && self.chars[self.pos] == '.' {
            self.pos += 1;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                frac.push(self.chars[self.pos]);
                self.pos += 1;
            }
        }
        if int.is_empty() && frac.is_empty() {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
        let mut d = BigInt::one();
        for _ in 0..frac.len() {
            d *= 10;
        }
        Ok(RatFn::constant(self.n(), Q::new(n, d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::poly::{q, qf};

    fn chart() -> Chart {
        Chart::new(&["x1", "x2", "y"]).unwrap()
    }

    #[test]
    fn parses_rational_expressions() {
        let c = chart();
        let f = parse_ratfn(&c, "3/2*x1^2 - (x2 + 1)/(x1 - 1) + 0.25").unwrap();
        let v = f.eval_q(&[q(3), q(1), q(0)]).unwrap();
        assert_eq!(v, qf(27, 2) - q(1) + qf(1, 4));
        let g = parse_ratfn(&c, "x1^-2").unwrap();
        assert_eq!(g.eval_q(&[q(2), q(0), q(0)]).unwrap(), qf(1, 4));
        assert_eq!(parse_ratfn(&c, "-y^2").unwrap().eval_q(&[q(0), q(0), q(3)]).unwrap(), q(-9));
    }

    #[test]
    fn reports_errors() {
        let c = chart();
        assert!(matches!(parse_ratfn(&c, "x1^"), Err(Error::Parse { line: 1, col: 4, .. })));
        assert_eq!(parse_ratfn(&c, "w + 1").unwrap_err(), Error::UnknownCoordinate("w".into()));
        assert!(matches!(parse_ratfn(&c, "x1 / 0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_ratfn(&c, "(x1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn display_round_trips() {
        let c = chart();
        let f = parse_ratfn(&c, "(x1^2*y - 1/3)/((x2 + 1)^2*x1)").unwrap();
        let g = parse_ratfn(&c, &f.fmt_with(c.names())).unwrap();
        assert!(f.sub(&g).is_zero());
    }
}
