//! The three linear time-varying systems and their initial data.
//!
//! * [`ThirdOrderSystem`]: `c3 y''' + c2 y'' + c1 y' + c0 y = x`
//! * [`FirstOrderSystem`]: `a1 y' + a0 y = x`
//! * [`SecondOrderSystem`]: `b2 y'' + b1 y' + b0 y = x`
//!
//! Leading coefficients must not vanish. Symbolic root finding is out of reach,
//! so this is checked on whatever grid the caller samples.

use crate::expr::Expr;
use serde::{Deserialize, Serialize};

/// Magnitude below which a leading coefficient counts as zero.
pub const LEADING_ZERO_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThirdOrderSystem {
    pub c3: Expr,
    pub c2: Expr,
    pub c1: Expr,
    pub c0: Expr,
    pub t0: f64,
    pub y0: f64,
    pub dy0: f64,
    pub ddy0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderSystem {
    pub a1: Expr,
    pub a0: Expr,
    pub y0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderSystem {
    pub b2: Expr,
    pub b1: Expr,
    pub b0: Expr,
    pub y0: f64,
    pub dy0: f64,
}

/// Integration constants `(e2, e1, e0)` that parameterize the commutative
/// partners of a first-order system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionConstants {
    pub e2: f64,
    pub e1: f64,
    pub e0: f64,
}

impl DecompositionConstants {
    pub const fn new(e2: f64, e1: f64, e0: f64) -> Self {
        DecompositionConstants { e2, e1, e0 }
    }

    pub fn sum(&self) -> f64 {
        self.e2 + self.e1 + self.e0
    }

    /// The gauge image `(λ³e2, λ²e1, λe0)`, which yields the same composed system.
    pub fn rescaled(&self, lambda: f64) -> Self {
        DecompositionConstants {
            e2: lambda.powi(3) * self.e2,
            e1: lambda.powi(2) * self.e1,
            e0: lambda * self.e0,
        }
    }
}

impl ThirdOrderSystem {
    /// System with zero initial data at `t0`.
    pub fn new(c3: Expr, c2: Expr, c1: Expr, c0: Expr, t0: f64) -> Self {
        ThirdOrderSystem {
            c3,
            c2,
            c1,
            c0,
            t0,
            y0: 0.0,
            dy0: 0.0,
            ddy0: 0.0,
        }
    }

    /// Parses the four coefficients from text.
    pub fn parse(
        c3: &str,
        c2: &str,
        c1: &str,
        c0: &str,
        t0: f64,
    ) -> Result<Self, crate::expr::ParseError> {
        Ok(Self::new(
            Expr::parse(c3)?,
            Expr::parse(c2)?,
            Expr::parse(c1)?,
            Expr::parse(c0)?,
            t0,
        ))
    }

    pub fn with_initial(mut self, y0: f64, dy0: f64, ddy0: f64) -> Self {
        self.y0 = y0;
        self.dy0 = dy0;
        self.ddy0 = ddy0;
        self
    }

    /// Coefficients from the highest derivative down.
    pub fn coefficients(&self) -> [&Expr; 4] {
        [&self.c3, &self.c2, &self.c1, &self.c0]
    }
}

impl FirstOrderSystem {
    pub fn new(a1: Expr, a0: Expr) -> Self {
        FirstOrderSystem { a1, a0, y0: 0.0 }
    }

    pub fn with_initial(mut self, y0: f64) -> Self {
        self.y0 = y0;
        self
    }
}

impl SecondOrderSystem {
    pub fn new(b2: Expr, b1: Expr, b0: Expr) -> Self {
        SecondOrderSystem {
            b2,
            b1,
            b0,
            y0: 0.0,
            dy0: 0.0,
        }
    }

    pub fn with_initial(mut self, y0: f64, dy0: f64) -> Self {
        self.y0 = y0;
        self.dy0 = dy0;
        self
    }
}

/// A point where a leading coefficient vanishes or cannot be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub coefficient: &'static str,
    pub value: Option<f64>,
    pub reason: String,
}

/// Anything with a leading coefficient that must stay away from zero.
pub trait LeadingCoefficient {
    fn leading(&self) -> (&'static str, &Expr);

    fn validate_on_grid(&self, times: &[f64]) -> Vec<Violation> {
        let (name, expr) = self.leading();
        validate_expr(name, expr, times)
    }
}

impl LeadingCoefficient for ThirdOrderSystem {
    fn leading(&self) -> (&'static str, &Expr) {
        ("c3", &self.c3)
    }
}

impl LeadingCoefficient for SecondOrderSystem {
    fn leading(&self) -> (&'static str, &Expr) {
        ("b2", &self.b2)
    }
}

impl LeadingCoefficient for FirstOrderSystem {
    fn leading(&self) -> (&'static str, &Expr) {
        ("a1", &self.a1)
    }
}

pub(crate) fn validate_expr(name: &'static str, expr: &Expr, times: &[f64]) -> Vec<Violation> {
    times
        .iter()
        .filter_map(|&t| match expr.eval(t) {
            Ok(v) if v.abs() < LEADING_ZERO_THRESHOLD => Some(Violation {
                t,
                coefficient: name,
                value: Some(v),
                reason: "leading coefficient vanishes".into(),
            }),
            Ok(v) if !v.is_finite() => Some(Violation {
                t,
                coefficient: name,
                value: Some(v),
                reason: "leading coefficient is not finite".into(),
            }),
            Ok(_) => None,
            Err(e) => Some(Violation {
                t,
                coefficient: name,
                value: None,
                reason: e.to_string(),
            }),
        })
        .collect()
}

/// `n` uniformly spaced points covering `[start, end]`.
pub fn uniform_grid(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (end - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_order_leading_coefficient() {
        let c = ThirdOrderSystem::parse("t^3", "0", "0", "0", 1.0).unwrap();
        assert!(c.validate_on_grid(&[1.0, 2.0, 3.0]).is_empty());
        let v = c.validate_on_grid(&[0.0]);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].t, 0.0);
        assert_eq!(v[0].coefficient, "c3");
    }

    #[test]
    fn first_order_positive_window() {
        let a = FirstOrderSystem::new(Expr::T, Expr::int(1));
        let times: Vec<f64> = (1..=15).map(|k| k as f64 * 0.01).collect();
        assert!(a.validate_on_grid(&times).is_empty());
    }

    #[test]
    fn evaluation_failure_is_a_violation() {
        let b = SecondOrderSystem::new(Expr::parse("1/t").unwrap(), Expr::int(0), Expr::int(0));
        let v = b.validate_on_grid(&[0.0, 1.0]);
        assert_eq!(v.len(), 1);
        assert!(v[0].value.is_none());
    }

    #[test]
    fn gauge_rescaling() {
        let k = DecompositionConstants::new(1.0, 1.0, -1.0).rescaled(2.0);
        assert_eq!(k, DecompositionConstants::new(8.0, 4.0, -2.0));
        assert_eq!(uniform_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
