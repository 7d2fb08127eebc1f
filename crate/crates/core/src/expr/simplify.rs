//! Conservative simplification: constant folding, identity elimination,
//! `x - x`, a few power rules that are valid under signed-root semantics, and
//! canonicalization of every rational-function subtree.

use super::poly::RatFunc;
use super::{Expr, Func, Scalar};
use num_rational::Rational64;
use num_traits::{One, Zero};

pub(super) fn simplify(e: &Expr) -> Expr {
    let rebuilt = match e {
        Expr::Num(_) | Expr::T => e.clone(),
        Expr::Neg(a) => neg(simplify(a)),
        Expr::Add(a, b) => add(simplify(a), simplify(b)),
        Expr::Sub(a, b) => sub(simplify(a), simplify(b)),
        Expr::Mul(a, b) => mul(simplify(a), simplify(b)),
        Expr::Div(a, b) => div(simplify(a), simplify(b)),
        Expr::Pow(a, r) => pow(simplify(a), *r),
        Expr::Call(f, a) => call(*f, simplify(a)),
    };
    match RatFunc::from_expr(&rebuilt) {
        Some(rf) => {
            let canonical = rf.to_expr();
            // keep whichever form is smaller; expansion can grow products
            if canonical.size() <= rebuilt.size()
                || !matches!(rebuilt, Expr::Mul(..) | Expr::Pow(..))
            {
                canonical
            } else {
                rebuilt
            }
        }
        None => rebuilt,
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(c) => Expr::Num(c.neg()),
        Expr::Neg(inner) => *inner,
        other => other.neg(),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Num(x.add(y)),
        (Some(x), _) if x.is_zero() => b,
        (_, Some(y)) if y.is_zero() => a,
        (_, Some(y)) if y.is_negative() => a.sub(Expr::Num(y.neg())),
        _ => match b {
            Expr::Neg(inner) => sub(a, *inner),
            b => a.add(b),
        },
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if a == b {
        return Expr::int(0);
    }
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Num(x.sub(y)),
        (_, Some(y)) if y.is_zero() => a,
        (Some(x), _) if x.is_zero() => neg(b),
        (_, Some(y)) if y.is_negative() => a.add(Expr::Num(y.neg())),
        _ => match b {
            Expr::Neg(inner) => add(a, *inner),
            b => a.sub(b),
        },
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Num(x.mul(y)),
        (Some(x), _) if x.is_zero() => Expr::int(0),
        (_, Some(y)) if y.is_zero() => Expr::int(0),
        (Some(x), _) if x.is_one() => b,
        (_, Some(y)) if y.is_one() => a,
        (Some(x), _) if x.neg().is_one() => neg(b),
        (_, Some(y)) if y.neg().is_one() => neg(a),
        // constants to the left
        (None, Some(_)) => mul(b, a),
        (Some(x), None) => match b {
            Expr::Mul(inner_a, inner_b) if inner_a.as_const().is_some() => {
                let c = inner_a.as_const().unwrap_or_else(Scalar::one);
                mul(Expr::Num(x.mul(c)), *inner_b)
            }
            Expr::Neg(inner) => mul(Expr::Num(x.neg()), *inner),
            b => a.mul(b),
        },
        (None, None) => match (a, b) {
            (Expr::Neg(x), Expr::Neg(y)) => mul(*x, *y),
            (Expr::Neg(x), y) | (y, Expr::Neg(x)) => neg(mul(*x, y)),
            (x, y) if x == y => pow(x, Rational64::from_integer(2)),
            (x, y) => x.mul(y),
        },
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (_, Some(y)) if y.is_zero() => a.div(b),
        (Some(x), Some(y)) => match x.div(y) {
            Some(q) => Expr::Num(q),
            None => a.div(b),
        },
        (Some(x), _) if x.is_zero() => Expr::int(0),
        (_, Some(y)) if y.is_one() => a,
        (_, Some(y)) if y.neg().is_one() => neg(a),
        _ if a == b => Expr::int(1),
        _ => match (a, b) {
            (Expr::Neg(x), Expr::Neg(y)) => div(*x, *y),
            (Expr::Neg(x), y) => neg(div(*x, y)),
            (x, y) => x.div(y),
        },
    }
}

fn odd(n: i64) -> bool {
    n % 2 != 0
}

fn pow(base: Expr, r: Rational64) -> Expr {
    if r.is_zero() {
        return Expr::int(1);
    }
    if r.is_one() {
        return base;
    }
    let odd_den = odd(*r.denom());
    match base {
        Expr::Num(c) => match c.pow(r) {
            Some(v) => Expr::Num(v),
            None => Expr::Num(c).pow_raw(r),
        },
        // (u^a)^r = u^(a*r) when a has odd numerator and denominator and r
        // has an odd denominator
        Expr::Pow(inner, a) if odd(*a.numer()) && odd(*a.denom()) && odd_den => pow(*inner, a * r),
        // (c*u)^r = c^r * u^r for odd denominators, or for c > 0
        Expr::Mul(c, u) if c.as_const().is_some_and(|c| odd_den || !c.is_negative()) => {
            let c = c.as_const().unwrap_or_else(Scalar::one);
            match c.pow(r) {
                Some(cr) => mul(Expr::Num(cr), pow(*u, r)),
                None => Expr::Mul(Box::new(Expr::Num(c)), u).pow_raw(r),
            }
        }
        Expr::Div(u, c)
            if c.as_const()
                .is_some_and(|c| !c.is_zero() && (odd_den || !c.is_negative())) =>
        {
            let c = c.as_const().unwrap_or_else(Scalar::one);
            match c.pow(-r) {
                Some(cr) => mul(Expr::Num(cr), pow(*u, r)),
                None => Expr::Div(u, Box::new(Expr::Num(c))).pow_raw(r),
            }
        }
        Expr::Neg(u) if odd_den => {
            if odd(*r.numer()) {
                neg(pow(*u, r))
            } else {
                pow(*u, r)
            }
        }
        other => other.pow_raw(r),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    match (f, a.as_const()) {
        (Func::Sin, Some(c)) if c.is_zero() => Expr::int(0),
        (Func::Cos, Some(c)) if c.is_zero() => Expr::int(1),
        (Func::Exp, Some(c)) if c.is_zero() => Expr::int(1),
        (Func::Ln, Some(c)) if c.is_one() => Expr::int(0),
        (Func::Ln, _) => match a {
            Expr::Call(Func::Exp, inner) => *inner,
            a => Expr::call(f, a),
        },
        _ => Expr::call(f, a),
    }
}

impl Expr {
    fn pow_raw(self, r: Rational64) -> Expr {
        Expr::Pow(Box::new(self), r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> String {
        Expr::parse(text).unwrap().simplify().to_string()
    }

    #[test]
    fn identities() {
        assert_eq!(s("0*t + 1*t"), "t");
        assert_eq!(s("t^1"), "t");
        assert_eq!(s("2/6"), "1/3");
        assert_eq!(s("sin(t) - sin(t)"), "0");
        assert_eq!(s("exp(0)*sin(t)"), "sin(t)");
        assert_eq!(s("--t"), "t");
        assert_eq!(s("ln(exp(t))"), "t");
    }

    #[test]
    fn signed_root_powers() {
        assert_eq!(s("(t^3)^(1/3)"), "t");
        assert_eq!(s("(t^3/1)^(1/3)"), "t");
        assert_eq!(s("(t^3)^(2/3)"), "t^2");
        assert_eq!(s("(-8)^(1/3)"), "-2");
        assert_eq!(s("(8*t^3)^(1/3)"), "2*t");
        // (t^2)^(1/2) is |t|, not t
        assert_eq!(s("(t^2)^(1/2)"), "(t^2)^(1/2)");
    }

    #[test]
    fn keeps_non_rational_structure() {
        assert_eq!(s("sin(t)*2"), "2*sin(t)");
        assert_eq!(s("(t+t)*cos(t)"), "2*t*cos(t)");
    }

    #[test]
    fn cube_root_of_constant_stays_exact_when_possible() {
        assert_eq!(s("(27/8)^(1/3)"), "3/2");
        let e = Expr::parse("2^(1/3)").unwrap().simplify();
        assert!((e.eval(0.0).unwrap() - 2f64.cbrt()).abs() < 1e-15);
    }
}
