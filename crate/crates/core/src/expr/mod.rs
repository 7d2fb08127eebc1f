//! Closed-form expressions of the time variable `t`.
//!
//! Every time-varying coefficient in this crate is an [`Expr`]. Expressions are
//! parsed from text, differentiated symbolically, simplified, and evaluated at
//! real `t`. Powers carry constant rational exponents; odd-denominator powers of
//! negative bases evaluate through the real signed root, so `t^(1/3)` at `-8`
//! is `-2`.
//!
//! ```
//! use ltvdecomp::expr::Expr;
//!
//! let c = Expr::parse("(t^2+3*t-6)/9").unwrap();
//! assert!((c.eval(3.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
//! let d = c.derivative(1);
//! assert_eq!(d.to_string(), "(2*t + 3)/9");
//! ```

mod parse;
mod poly;
mod scalar;
mod simplify;

pub use parse::ParseError;
pub use scalar::{real_pow, Scalar};

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            _ => None,
        }
    }
}

/// Expression tree over the single variable `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Scalar),
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational64),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{reason} in `{node}` at t = {t}")]
    Domain {
        node: String,
        t: f64,
        reason: &'static str,
    },
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse::parse(text)
    }

    pub fn num(value: f64) -> Expr {
        Expr::Num(Scalar::from_f64(value))
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(Scalar::int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::Num(Scalar::ratio(num, den))
    }

    pub fn t() -> Expr {
        Expr::T
    }

    pub fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }

    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }

    pub fn pow(self, num: i64, den: i64) -> Expr {
        Expr::Pow(Box::new(self), Rational64::new(num, den))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    pub fn as_const(&self) -> Option<Scalar> {
        match self {
            Expr::Num(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(Scalar::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(Scalar::is_one)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::T => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Evaluates the expression at `t`.
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        let domain = |reason| EvalError::Domain {
            node: self.to_string(),
            t,
            reason,
        };
        Ok(match self {
            Expr::Num(c) => c.to_f64(),
            Expr::T => t,
            Expr::Neg(a) => -a.eval(t)?,
            Expr::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Expr::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            Expr::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Expr::Div(a, b) => {
                let den = b.eval(t)?;
                if den == 0.0 {
                    return Err(domain("division by zero"));
                }
                a.eval(t)? / den
            }
            Expr::Pow(a, r) => {
                let base = a.eval(t)?;
                real_pow(base, *r).ok_or_else(|| domain("power undefined"))?
            }
            Expr::Call(f, a) => {
                let x = a.eval(t)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(domain("logarithm of a non-positive value"));
                        }
                        x.ln()
                    }
                }
            }
        })
    }

    /// `n`-th symbolic derivative with respect to `t`, simplified after each
    /// differentiation.
    pub fn derivative(&self, n: usize) -> Expr {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.diff_once().simplify();
        }
        e
    }

    fn diff_once(&self) -> Expr {
        match self {
            Expr::Num(_) => Expr::int(0),
            Expr::T => Expr::int(1),
            Expr::Neg(a) => a.diff_once().neg(),
            Expr::Add(a, b) => a.diff_once().add(b.diff_once()),
            Expr::Sub(a, b) => a.diff_once().sub(b.diff_once()),
            Expr::Mul(a, b) => a
                .diff_once()
                .mul((**b).clone())
                .add((**a).clone().mul(b.diff_once())),
            Expr::Div(a, b) => {
                let num = a
                    .diff_once()
                    .mul((**b).clone())
                    .sub((**a).clone().mul(b.diff_once()));
                num.div((**b).clone().pow(2, 1))
            }
            Expr::Pow(a, r) => {
                let lowered = Expr::Pow(a.clone(), *r - 1);
                Expr::Num(Scalar::Exact(*r)).mul(lowered).mul(a.diff_once())
            }
            Expr::Call(f, a) => {
                let inner = a.diff_once();
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, (**a).clone()),
                    Func::Cos => Expr::call(Func::Sin, (**a).clone()).neg(),
                    Func::Exp => self.clone(),
                    Func::Ln => return inner.div((**a).clone()),
                };
                outer.mul(inner)
            }
        }
    }

    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(c) if c.is_negative() => 3,
            Expr::Num(Scalar::Exact(r)) if !r.is_integer() => 2,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::T | Expr::Call(..) => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    /// Canonical text form; parsing it yields an expression that evaluates
    /// identically.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::T => write!(f, "t"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                // `--x` and `-(-1)` are kept unambiguous
                write_operand(f, a, 4)
            }
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " + ")?;
                write_operand(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                write!(f, " - ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                write!(f, "*")?;
                write_operand(f, b, 4)
            }
            Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                write!(f, "/")?;
                write_operand(f, b, 4)
            }
            Expr::Pow(a, r) => {
                write_operand(f, a, 5)?;
                if r.is_integer() && *r.numer() >= 0 {
                    write!(f, "^{}", r.numer())
                } else if r.is_integer() {
                    write!(f, "^({})", r.numer())
                } else {
                    write!(f, "^({}/{})", r.numer(), r.denom())
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

impl From<f64> for Expr {
    fn from(value: f64) -> Self {
        Expr::num(value)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Expr::parse(&text).map_err(serde::de::Error::custom)
    }
}
