//! Series connection of a first-order system `A` and a second-order system `B`
//! into an equivalent third-order system, for both orderings.
//!
//! In `AB` the input drives `A` and `B` produces the output; in `BA` the roles
//! are swapped. Each ordering yields its own coefficient formulas and its own
//! mapping from the stage initial values to `(y, y', y'')` at `t0`.

use crate::expr::{EvalError, Expr};
use crate::systems::{
    FirstOrderSystem, SecondOrderSystem, ThirdOrderSystem, LEADING_ZERO_THRESHOLD,
};

/// Which subsystem receives the external input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// `x -> A -> B -> y`
    Ab,
    /// `x -> B -> A -> y`
    Ba,
}

impl Ordering {
    pub fn label(self) -> &'static str {
        match self {
            Ordering::Ab => "AB",
            Ordering::Ba => "BA",
        }
    }
}

fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
    terms
        .into_iter()
        .reduce(Expr::add)
        .unwrap_or_else(|| Expr::int(0))
        .simplify()
}

fn leading_at(e: &Expr, t0: f64) -> Result<f64, EvalError> {
    let v = e.eval(t0)?;
    if v.abs() < LEADING_ZERO_THRESHOLD {
        return Err(EvalError::Domain {
            node: e.to_string(),
            t: t0,
            reason: "leading coefficient vanishes",
        });
    }
    Ok(v)
}

/// Coefficients `(y''', y'', y', y)` of the `AB` connection.
pub fn coefficients_ab(a: &FirstOrderSystem, b: &SecondOrderSystem) -> [Expr; 4] {
    let (a1, a0) = (&a.a1, &a.a0);
    let (b2, b1, b0) = (&b.b2, &b.b1, &b.b0);
    let db2 = b2.derivative(1);
    let db1 = b1.derivative(1);
    let db0 = b0.derivative(1);
    [
        a1.clone().mul(b2.clone()).simplify(),
        sum([
            a1.clone().mul(db2),
            a1.clone().mul(b1.clone()),
            a0.clone().mul(b2.clone()),
        ]),
        sum([
            a1.clone().mul(db1),
            a1.clone().mul(b0.clone()),
            a0.clone().mul(b1.clone()),
        ]),
        sum([a1.clone().mul(db0), a0.clone().mul(b0.clone())]),
    ]
}

/// Coefficients `(y''', y'', y', y)` of the `BA` connection.
pub fn coefficients_ba(a: &FirstOrderSystem, b: &SecondOrderSystem) -> [Expr; 4] {
    let (a1, a0) = (&a.a1, &a.a0);
    let (b2, b1, b0) = (&b.b2, &b.b1, &b.b0);
    let da1 = a1.derivative(1);
    let dda1 = da1.derivative(1);
    let da0 = a0.derivative(1);
    let dda0 = da0.derivative(1);
    let two = || Expr::int(2);
    [
        a1.clone().mul(b2.clone()).simplify(),
        sum([
            two().mul(da1.clone()).mul(b2.clone()),
            a0.clone().mul(b2.clone()),
            a1.clone().mul(b1.clone()),
        ]),
        sum([
            dda1.mul(b2.clone()),
            two().mul(da0.clone()).mul(b2.clone()),
            da1.mul(b1.clone()),
            a0.clone().mul(b1.clone()),
            a1.clone().mul(b0.clone()),
        ]),
        sum([
            dda0.mul(b2.clone()),
            da0.mul(b1.clone()),
            a0.clone().mul(b0.clone()),
        ]),
    ]
}

/// Third-order system equivalent to `x -> A -> B -> y` started at `t0`.
pub fn compose_ab(
    a: &FirstOrderSystem,
    b: &SecondOrderSystem,
    t0: f64,
) -> Result<ThirdOrderSystem, EvalError> {
    let [c3, c2, c1, c0] = coefficients_ab(a, b);
    let ddy0 = ic_ab(a, b, t0)?;
    Ok(ThirdOrderSystem {
        c3,
        c2,
        c1,
        c0,
        t0,
        y0: b.y0,
        dy0: b.dy0,
        ddy0,
    })
}

/// `y''(t0)` of the `AB` connection: `B` solved for its second derivative with
/// `A`'s initial output as input.
fn ic_ab(a: &FirstOrderSystem, b: &SecondOrderSystem, t0: f64) -> Result<f64, EvalError> {
    let b2 = leading_at(&b.b2, t0)?;
    let b1 = b.b1.eval(t0)?;
    let b0 = b.b0.eval(t0)?;
    Ok((a.y0 - b0 * b.y0 - b1 * b.dy0) / b2)
}

/// Third-order system equivalent to `x -> B -> A -> y` started at `t0`.
pub fn compose_ba(
    a: &FirstOrderSystem,
    b: &SecondOrderSystem,
    t0: f64,
) -> Result<ThirdOrderSystem, EvalError> {
    let [c3, c2, c1, c0] = coefficients_ba(a, b);
    let (y0, dy0, ddy0) = initial_ba(a, b, t0)?;
    Ok(ThirdOrderSystem {
        c3,
        c2,
        c1,
        c0,
        t0,
        y0,
        dy0,
        ddy0,
    })
}

/// `(y, y', y'')` at `t0` of the `BA` connection.
pub fn initial_ba(
    a: &FirstOrderSystem,
    b: &SecondOrderSystem,
    t0: f64,
) -> Result<(f64, f64, f64), EvalError> {
    let a1 = leading_at(&a.a1, t0)?;
    let a0 = a.a0.eval(t0)?;
    let da1 = a.a1.derivative(1).eval(t0)?;
    let da0 = a.a0.derivative(1).eval(t0)?;
    let y = a.y0;
    let dy = (b.y0 - a0 * a.y0) / a1;
    let ddy = b.dy0 / a1 - (a0 + da1) / (a1 * a1) * b.y0
        + ((a0 * a0 + da1 * a0) / (a1 * a1) - da0 / a1) * a.y0;
    Ok((y, dy, ddy))
}

/// `(y, y', y'')` at `t0` of the `AB` connection.
pub fn initial_ab(
    a: &FirstOrderSystem,
    b: &SecondOrderSystem,
    t0: f64,
) -> Result<(f64, f64, f64), EvalError> {
    Ok((b.y0, b.dy0, ic_ab(a, b, t0)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn assert_coeffs(c: &ThirdOrderSystem, expected: [&str; 4], times: &[f64]) {
        for (got, want) in c.coefficients().iter().zip(expected) {
            let want = p(want);
            for &t in times {
                let (g, w) = (got.eval(t).unwrap(), want.eval(t).unwrap());
                assert!(
                    (g - w).abs() <= 1e-12 * (1.0 + w.abs()),
                    "{got} vs {want} at {t}"
                );
            }
        }
    }

    fn example2() -> (FirstOrderSystem, SecondOrderSystem) {
        (
            FirstOrderSystem::new(p("t"), p("1")),
            SecondOrderSystem::new(p("t^2"), p("4*t"), p("1")),
        )
    }

    #[test]
    fn euler_pair_composes_both_ways() {
        let (a, b) = example2();
        let times = [0.3, 1.0, 2.5, 7.0];
        let ab = compose_ab(&a, &b, 1.0).unwrap();
        let ba = compose_ba(&a, &b, 1.0).unwrap();
        assert_coeffs(&ab, ["t^3", "7*t^2", "9*t", "1"], &times);
        assert_coeffs(&ba, ["t^3", "7*t^2", "9*t", "1"], &times);
        assert_eq!(ab.c2.to_string(), "7*t^2");
    }

    #[test]
    fn pure_integrators() {
        let a = FirstOrderSystem::new(p("1"), p("0"));
        let b = SecondOrderSystem::new(p("1"), p("0"), p("0"));
        for c in [
            compose_ab(&a, &b, 0.0).unwrap(),
            compose_ba(&a, &b, 0.0).unwrap(),
        ] {
            assert_eq!(
                c.coefficients().map(|e| e.to_string()),
                ["1", "0", "0", "0"]
            );
        }
    }

    #[test]
    fn first_example_pair_expands_to_published_system() {
        let a = FirstOrderSystem::new(p("1"), p("t/3"));
        let b = SecondOrderSystem::new(p("1"), p("(2*t+3)/3"), p("(t^2+3*t-6)/9"));
        let ab = compose_ab(&a, &b, 0.0).unwrap();
        assert_coeffs(
            &ab,
            ["1", "t+1", "(t^2+2*t)/3", "(t^3+3*t^2+9)/27"],
            &[0.0, 0.5, 1.0, 4.0, 10.0],
        );
    }

    #[test]
    fn non_commutative_pair_differs() {
        let a = FirstOrderSystem::new(p("1"), p("t"));
        let b = SecondOrderSystem::new(p("1"), p("0"), p("0"));
        let ab = coefficients_ab(&a, &b);
        let ba = coefficients_ba(&a, &b);
        // y' coefficient: AB has a1*b1' + a1*b0 + a0*b1 = 0, BA adds 2*a0'*b2 = 2
        assert_eq!(ab[2].eval(1.7).unwrap(), 0.0);
        assert_eq!(ba[2].eval(1.7).unwrap(), 2.0);
    }

    #[test]
    fn initial_value_maps() {
        let a = FirstOrderSystem::new(p("t"), p("1")).with_initial(2.0);
        let b = SecondOrderSystem::new(p("t^2"), p("4*t"), p("1")).with_initial(3.0, -1.0);
        let t0 = 2.0;
        let ab = compose_ab(&a, &b, t0).unwrap();
        // (yA - b0 yB - b1 yB') / b2 = (2 - 3 + 8) / 4
        assert_eq!((ab.y0, ab.dy0, ab.ddy0), (3.0, -1.0, 7.0 / 4.0));
        let ba = compose_ba(&a, &b, t0).unwrap();
        // y' = (yB - a0 yA)/a1 = (3 - 2)/2
        assert_eq!(ba.y0, 2.0);
        assert_eq!(ba.dy0, 0.5);
        // y'' = yB'/a1 - (a0+a1')/a1^2 yB + ((a0^2 + a1' a0)/a1^2 - a0'/a1) yA
        let want = -1.0 / 2.0 - 2.0 / 4.0 * 3.0 + (2.0 / 4.0) * 2.0;
        assert!((ba.ddy0 - want).abs() < 1e-15);
    }

    #[test]
    fn domain_error_at_initial_time() {
        let a = FirstOrderSystem::new(p("t"), p("1"));
        let b = SecondOrderSystem::new(p("t^2"), p("4/t"), p("1"));
        assert!(compose_ab(&a, &b, 0.0).is_err());
        assert!(compose_ba(&a, &b, 0.0).is_err());
    }
}
