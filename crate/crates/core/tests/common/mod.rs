#![allow(dead_code)]

use ltvdecomp::expr::{Expr, Func};
use ltvdecomp::systems::DecompositionConstants;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn p(s: &str) -> Expr {
    Expr::parse(s).unwrap()
}

const EXPONENTS: &[(i64, i64)] = &[(2, 1), (3, 1), (-1, 1), (1, 3), (2, 3), (1, 2), (3, 2)];
const LITERALS: &[&str] = &["1", "2", "3", "-1", "-2", "1/2", "0.25", "1.5", "0"];

/// Random expression of depth at most `depth`, built without simplification.
pub fn random_expr(rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.6) {
            Expr::t()
        } else {
            p(LITERALS.choose(rng).unwrap())
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..10) {
        0 | 1 => random_expr(rng, d).add(random_expr(rng, d)),
        2 => random_expr(rng, d).sub(random_expr(rng, d)),
        3 | 4 => random_expr(rng, d).mul(random_expr(rng, d)),
        5 => random_expr(rng, d).div(random_expr(rng, d)),
        6 => {
            let (n, m) = *EXPONENTS.choose(rng).unwrap();
            random_expr(rng, d).pow(n, m)
        }
        7 => random_expr(rng, d).neg(),
        _ => {
            let f = *[Func::Sin, Func::Cos, Func::Exp, Func::Ln]
                .choose(rng)
                .unwrap();
            Expr::call(f, random_expr(rng, d))
        }
    }
}

/// Central difference of `e` at `t`, if `e` is finite and moderate on the
/// stencil.
pub fn central_difference(e: &Expr, t: f64, h: f64) -> Option<f64> {
    let plus = e.eval(t + h).ok()?;
    let minus = e.eval(t - h).ok()?;
    (plus.is_finite() && minus.is_finite()).then(|| (plus - minus) / (2.0 * h))
}

fn coefficient(rng: &mut impl Rng, lo: f64, hi: f64) -> String {
    // two decimals, so the literal is exact and prints compactly
    format!("{:.2}", rng.gen_range(lo..hi))
}

/// Random smooth first-order coefficients `(a1, a0)` with `a1 > 0` on
/// `[0, 3]`.
pub fn random_first_order(rng: &mut impl Rng) -> (Expr, Expr) {
    let c = coefficient(rng, 0.5, 2.0);
    let d = coefficient(rng, 0.0, 1.0);
    let a1 = match rng.gen_range(0..4) {
        0 => format!("{c} + {d}*t^2"),
        1 => format!("{c}*exp({d}*t)"),
        2 => format!("{c} + 0.4*sin({d}*t)"),
        _ => format!("({c} + t)^(1/3)"),
    };
    let (u, v, w) = (
        coefficient(rng, -2.0, 2.0),
        coefficient(rng, -1.0, 1.0),
        coefficient(rng, -0.5, 0.5),
    );
    let a0 = match rng.gen_range(0..3) {
        0 => format!("{u} + {v}*t + {w}*t^3"),
        1 => format!("{u} + {v}*cos(t)"),
        _ => format!("{u}*exp(-{d}*t) + {w}*t"),
    };
    (p(&a1), p(&a0))
}

pub fn random_constants(rng: &mut impl Rng) -> DecompositionConstants {
    let mut e2 = rng.gen_range(0.2..3.0);
    if rng.gen_bool(0.3) {
        e2 = -e2;
    }
    DecompositionConstants::new(e2, rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}
