//! Minimal arithmetic-expression reader for state parameters.
//!
//! Accepts decimal literals combined with `+`, `-`, `*`, `/`, parentheses and
//! `sqrt(...)`, so exact inputs like `2*sqrt(2)` or `(sqrt(97)+1)/8` can be
//! written in JSON files and on the command line.

use crate::{Error, Result};

/// Evaluates an expression to a float.
pub fn eval(input: &str) -> Result<f64> {
    let mut p = Parser {
        bytes: input.as_bytes(),
        pos: 0,
        src: input,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("trailing input"));
    }
    if !v.is_finite() {
        return Err(Error::Parse(format!("expression `{input}` is not finite")));
    }
    Ok(v)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<f64> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<f64> {
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc *= self.factor()?;
                }
                b'/' => {
                    self.pos += 1;
                    acc /= self.factor()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<f64> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                if name != "sqrt" {
                    return Err(self.err("unknown function (only sqrt is supported)"));
                }
                self.expect(b'(')?;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v.sqrt())
            }
            _ => Err(self.err("expected a number, `(` or `sqrt(`")),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E')
                && self.pos > start
                && self
                    .bytes
                    .get(self.pos + 1)
                    .is_some_and(|&d| d.is_ascii_digit() || d == b'+' || d == b'-')
            {
                self.pos += 2;
            } else {
                break;
            }
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.err("malformed number"))
    }
}

#[cfg(test)]
mod tests {
    use super::eval;

    #[test]
    fn literals_and_arithmetic() {
        assert_eq!(eval("1.5").unwrap(), 1.5);
        assert_eq!(eval("2+3*4").unwrap(), 14.0);
        assert_eq!(eval("(2+3)*4").unwrap(), 20.0);
        assert_eq!(eval("-2.5e-1").unwrap(), -0.25);
        assert_eq!(eval("4/3").unwrap(), 4.0 / 3.0);
    }

    #[test]
    fn sqrt_forms() {
        assert_eq!(eval("2*sqrt(2)").unwrap(), 2.0 * 2f64.sqrt());
        assert_eq!(eval("1/sqrt(2)").unwrap(), 1.0 / 2f64.sqrt());
        assert_eq!(eval("(sqrt(97)+1)/8").unwrap(), (97f64.sqrt() + 1.0) / 8.0);
        assert_eq!(eval(" sqrt( 6 ) ").unwrap(), 6f64.sqrt());
    }

    #[test]
    fn rejects_garbage() {
        assert!(eval("").is_err());
        assert!(eval("2+").is_err());
        assert!(eval("cos(1)").is_err());
        assert!(eval("1 2").is_err());
        assert!(eval("sqrt(-1)").is_err());
        assert!(eval("1/0").is_err());
    }
}
