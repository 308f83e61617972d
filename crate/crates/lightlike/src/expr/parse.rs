//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ('-')? power
//! power  := atom ('^' integer)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers are `x1..xm`, the aliases `u`, `v` when `m = 2`, and the
//! functions `exp log sin cos sinh cosh`. The exponent may carry a sign.

use std::sync::Arc;

use super::Expr;
use crate::error::{Error, Result};

pub fn parse(text: &str, m: usize) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, m };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    m: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax { offset: self.pos, message: message.to_string() }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Arc::new(lhs), Arc::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Arc::new(lhs), Arc::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Arc::new(lhs), Arc::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Arc::new(lhs), Arc::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Arc::new(self.power()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer exponent"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let n: i32 =
            digits.parse().map_err(|_| Error::Syntax { offset: start, message: "exponent out of range".into() })?;
        Ok(Expr::IntPow(Arc::new(base), if negative { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if exp_start == self.pos {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        text.parse::<f64>()
            .map(Expr::Constant)
            .map_err(|_| Error::Syntax { offset: start, message: format!("bad number `{text}`") })
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident");
        let func: Option<fn(Arc<Expr>) -> Expr> = match name {
            "exp" => Some(Expr::Exp),
            "log" => Some(Expr::Log),
            "sin" => Some(Expr::Sin),
            "cos" => Some(Expr::Cos),
            "sinh" => Some(Expr::Sinh),
            "cosh" => Some(Expr::Cosh),
            _ => None,
        };
        if let Some(node) = func {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(node(Arc::new(arg)));
        }
        let index = match name {
            "u" if self.m == 2 => 1,
            "v" if self.m == 2 => 2,
            _ => match name.strip_prefix('x').map(str::parse::<usize>) {
                Some(Ok(k)) => {
                    if k == 0 || k > self.m {
                        return Err(Error::CoordinateOutOfRange { index: k, m: self.m, offset: start });
                    }
                    k
                }
                _ => return Err(Error::UnknownIdentifier { name: name.to_string(), offset: start }),
            },
        };
        Ok(Expr::Coordinate(index))
    }
}
