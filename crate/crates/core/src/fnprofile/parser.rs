//! Recursive-descent parser for profile expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' INT)?
//! base   := NUMBER | 'pi' | 'x' | '(' expr ')' | FUNC '(' expr ')'
//! FUNC   := 'sin' | 'cos' | 'exp'
//! ```
//!
//! The leading `'-'` in `factor` is the only addition to the plain grammar.
//! Error offsets are 1-based byte positions.

use thiserror::Error;

use super::expr::FunctionExpr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }
}

/// Parses `text` into an expression tree.
pub fn parse(text: &str) -> Result<FunctionExpr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { offset: self.pos + 1, message: message.into() }
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

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => Err(self.syntax(format!("expected `{}`, found `{}`", c as char, d as char))),
            None => Err(self.syntax(format!("expected `{}`, found end of input", c as char))),
        }
    }

    fn expr(&mut self) -> Result<FunctionExpr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == b'+' {
                FunctionExpr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                FunctionExpr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<FunctionExpr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = if c == b'*' {
                FunctionExpr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                FunctionExpr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<FunctionExpr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(match inner {
                FunctionExpr::Const(c) => FunctionExpr::Const(-c),
                other => FunctionExpr::Neg(Box::new(other)),
            });
        }
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.syntax("expected a non-negative integer exponent"));
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let n: u32 = digits.parse().map_err(|_| ParseError::Syntax {
                offset: start + 1,
                message: "exponent out of range".into(),
            })?;
            return Ok(FunctionExpr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<FunctionExpr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "x" => Ok(FunctionExpr::X),
                    "pi" => Ok(FunctionExpr::Pi),
                    "sin" | "cos" | "exp" => {
                        let name = name.to_string();
                        self.expect(b'(')?;
                        let arg = Box::new(self.expr()?);
                        self.expect(b')')?;
                        Ok(match name.as_str() {
                            "sin" => FunctionExpr::Sin(arg),
                            "cos" => FunctionExpr::Cos(arg),
                            _ => FunctionExpr::Exp(arg),
                        })
                    }
                    _ => Err(ParseError::UnknownIdentifier {
                        offset: start + 1,
                        name: name.to_string(),
                    }),
                }
            }
            Some(c) => Err(self.syntax(format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<FunctionExpr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.syntax("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(FunctionExpr::Const)
            .map_err(|_| ParseError::Syntax { offset: start + 1, message: "malformed number".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use FunctionExpr::*;

    #[test]
    fn parses_examples() {
        assert_eq!(parse("sin(2*x)").unwrap(), Sin(Box::new(Mul(Box::new(Const(2.0)), Box::new(X)))));
        assert_eq!(
            parse("1 - 2/x").unwrap(),
            Sub(Box::new(Const(1.0)), Box::new(Div(Box::new(Const(2.0)), Box::new(X))))
        );
    }

    #[test]
    fn unbalanced_parenthesis_reports_offset() {
        let err = parse("sin(2*x").unwrap_err();
        assert_eq!(err.offset(), 8);
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("2*y + 1").unwrap_err();
        assert_eq!(err, ParseError::UnknownIdentifier { offset: 3, name: "y".into() });
        assert!(matches!(parse("e^2"), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse("sin x"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn misc_syntax() {
        assert!(parse("").is_err());
        assert!(parse("x^-1").is_err());
        assert!(parse("2 x").is_err());
        assert_eq!(parse("1.5e3").unwrap(), Const(1500.0));
        assert_eq!(parse(" -x^2").unwrap(), Neg(Box::new(Pow(Box::new(X), 2))));
        assert_eq!(parse("-2").unwrap(), Const(-2.0));
        assert_eq!(parse("x^2^3"), Err(ParseError::Syntax { offset: 4, message: "unexpected `^`".into() }));
    }

    #[test]
    fn print_parse_round_trip() {
        for s in ["sin(2*x)", "1-2/x", "-x^2-1", "x*(0-x)", "(x+1)^2*exp(-x)", "2-(3-x)", "x/(2*x)", "cos(pi*x)/-3"] {
            let e = parse(s).unwrap();
            let printed = e.to_string();
            let back = parse(&printed).unwrap();
            assert_eq!(back, e, "{s} -> {printed}");
            assert_eq!(back.to_string(), printed);
        }
    }
}
