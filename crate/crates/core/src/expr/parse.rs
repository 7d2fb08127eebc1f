//! Recursive-descent parser for the coefficient language.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          right-associative, exponent constant
//! atom    := number | 't' | func '(' sum ')' | '(' sum ')'
//! func    := 'sin' | 'cos' | 'exp' | 'ln'
//! ```

use super::{Expr, Func, Scalar};
use num_rational::Rational64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at byte {offset} is not a constant rational number")]
    NonConstantExponent { offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(Scalar),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            tokens.push((start, tok));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let (value, len) = lex_number(&text[start..]).ok_or_else(|| ParseError::Syntax {
                offset: start,
                message: "malformed number".into(),
            })?;
            tokens.push((start, Token::Number(value)));
            i += len;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push((start, Token::Ident(text[start..i].to_string())));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                offset: start,
                message: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(tokens)
}

/// Lexes `digits[.digits][(e|E)[+-]digits]` into an exact value when it fits.
fn lex_number(s: &str) -> Option<(Scalar, usize)> {
    let b = s.as_bytes();
    let mut i = 0;
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let int_part = &s[int_start..i];
    let mut frac_part = "";
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let fs = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        frac_part = &s[fs..i];
    }
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut exp: i64 = 0;
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let ds = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j == ds {
            return None;
        }
        exp = s[i + 1..j].parse().ok()?;
        i = j;
    }
    let literal = &s[..i];
    let exact = || -> Option<Rational64> {
        let digits = format!("{int_part}{frac_part}");
        let mantissa: i64 = digits.parse().ok()?;
        let scale = exp - frac_part.len() as i64;
        let pow10 = 10i64.checked_pow(u32::try_from(scale.unsigned_abs()).ok()?)?;
        if scale >= 0 {
            Some(Rational64::from_integer(mantissa.checked_mul(pow10)?))
        } else {
            Some(Rational64::new(mantissa, pow10))
        }
    };
    let value = match exact() {
        Some(r) => Scalar::Exact(r),
        None => Scalar::Inexact(literal.parse().ok()?),
    };
    Some((value, i))
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = lhs.add(self.product()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = lhs.sub(self.product()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = lhs.mul(self.unary()?);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = lhs.div(self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let offset = self.offset();
        let exponent = self.unary()?;
        let r = const_rational(&exponent).ok_or(ParseError::NonConstantExponent { offset })?;
        Ok(Expr::Pow(Box::new(base), r))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Token::Number(v)) => Ok(Expr::Num(v)),
            Some(Token::Ident(name)) => {
                if name == "t" {
                    return Ok(Expr::T);
                }
                let func =
                    Func::from_name(&name).ok_or(ParseError::UnknownIdentifier { offset, name })?;
                self.expect(Token::LParen, "`(` after function name")?;
                let arg = self.sum()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(Expr::call(func, arg))
            }
            Some(Token::LParen) => {
                let inner = self.sum()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.error("expected a number, `t`, a function or `(`"))
            }
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Folds a constant expression built from exact literals into a rational.
fn const_rational(e: &Expr) -> Option<Rational64> {
    let folded = match e {
        Expr::Num(c) => *c,
        Expr::Neg(a) => Scalar::Exact(-const_rational(a)?),
        Expr::Add(a, b) => Scalar::Exact(const_rational(a)?).add(Scalar::Exact(const_rational(b)?)),
        Expr::Sub(a, b) => Scalar::Exact(const_rational(a)?).sub(Scalar::Exact(const_rational(b)?)),
        Expr::Mul(a, b) => Scalar::Exact(const_rational(a)?).mul(Scalar::Exact(const_rational(b)?)),
        Expr::Div(a, b) => {
            Scalar::Exact(const_rational(a)?).div(Scalar::Exact(const_rational(b)?))?
        }
        Expr::Pow(a, r) => Scalar::Exact(const_rational(a)?).pow(*r)?,
        Expr::T | Expr::Call(..) => return None,
    };
    folded.as_exact()
}

pub(super) fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let e = parser.sum()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(s: &str, t: f64) -> f64 {
        parse(s).unwrap().eval(t).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("2+3*4", 0.0), 14.0);
        assert_eq!(eval("8/4/2", 0.0), 1.0);
        assert_eq!(eval("8-4-2", 0.0), 2.0);
        assert_eq!(eval("-t^2", 3.0), -9.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        assert_eq!(eval("-2*t", 3.0), -6.0);
        assert_eq!(eval("2^-1", 0.0), 0.5);
        assert_eq!(eval("t^(1/3)", 27.0), 3.0);
    }

    #[test]
    fn literals() {
        assert_eq!(parse("1/3").unwrap(), Expr::int(1).div(Expr::int(3)));
        assert_eq!(parse("0.25").unwrap(), Expr::ratio(1, 4));
        assert_eq!(parse("1.5e2").unwrap(), Expr::int(150));
        assert_eq!(parse("2.5E-1").unwrap(), Expr::ratio(1, 4));
        assert_eq!(eval(".5", 0.0), 0.5);
    }

    #[test]
    fn errors() {
        assert_eq!(parse(""), Err(ParseError::Empty));
        assert_eq!(parse("   "), Err(ParseError::Empty));
        assert_eq!(
            parse("t + x"),
            Err(ParseError::UnknownIdentifier {
                offset: 4,
                name: "x".into()
            })
        );
        assert!(matches!(
            parse("t +"),
            Err(ParseError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse("(t"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse("t )"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse("t # 2"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse("7t"),
            Err(ParseError::Syntax { offset: 1, .. })
        ));
        assert_eq!(
            parse("t^t"),
            Err(ParseError::NonConstantExponent { offset: 2 })
        );
        assert!(matches!(
            parse("sin t"),
            Err(ParseError::Syntax { offset: 4, .. })
        ));
        assert!(matches!(
            parse("1e"),
            Err(ParseError::Syntax { offset: 0, .. })
        ));
    }
}
