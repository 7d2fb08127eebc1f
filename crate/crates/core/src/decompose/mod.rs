//! Decomposition of a third-order system into a commutative first/second-order
//! pair.
//!
//! Given constants `(e2, e1, e0)`, the first-order factor `A` follows from the two
//! leading coefficients of `C`:
//!
//! ```text
//! a1 = (c3 / e2)^(1/3)
//! a0 = (c2 - c3') / (3 e2^(1/3) c3^(2/3)) - e1 / (3 e2)
//! ```
//!
//! and the second-order factor `B` is the commutative partner of `A` selected by
//! the same constants:
//!
//! ```text
//! b2 = e2 a1^2
//! b1 = e2 (a1' + 2 a0) a1 + e1 a1
//! b0 = e2 (a0' a1 + a0^2) + e1 a0 + e0
//! ```
//!
//! `C` decomposes exactly when the remaining two coefficients agree with the
//! composition, i.e. when `c1 - (a1 b1' + a1 b0 + a0 b1)` and
//! `c0 - (a1 b0' + a0 b0)` vanish. Those residuals are sampled rather than
//! compared structurally.

mod fit;
mod report;

pub use fit::{fit_constants, FitError, FitOptions, FitResult};
pub use report::{ConstraintResidual, ResidualReport};

use crate::expr::{EvalError, Expr, Scalar};
use crate::systems::{
    DecompositionConstants, FirstOrderSystem, SecondOrderSystem, ThirdOrderSystem,
};
use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

/// Default relative tolerance for coefficient residuals.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-6;
/// Default number of sample points for coefficient checks.
pub const DEFAULT_SAMPLES: usize = 64;
/// Sample points where `|c3|` falls below this are skipped.
pub const C3_SKIP_THRESHOLD: f64 = 1e-9;
/// Tolerance on `e2 + e1 + e0 = 1`.
pub const E_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("e2 must be nonzero")]
    ZeroE2,
    #[error("no usable sample times (all skipped or none given)")]
    NoSamples,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("system is not decomposable with the given constants:\n{}", .0.summary())]
    NotDecomposable(Box<ResidualReport>),
}

fn constant(x: f64) -> Expr {
    Expr::Num(Scalar::from_f64(x))
}

fn cube_root(x: f64) -> Scalar {
    Scalar::from_f64(x)
        .pow(Rational64::new(1, 3))
        .unwrap_or_else(|| Scalar::Inexact(x.cbrt()))
}

/// First-order factor `(a1, a0)` determined by `c3`, `c2` and the constants.
pub fn subsystem_a(
    c3: &Expr,
    c2: &Expr,
    k: &DecompositionConstants,
) -> Result<(Expr, Expr), DecomposeError> {
    if k.e2 == 0.0 {
        return Err(DecomposeError::ZeroE2);
    }
    let a1 = c3.clone().div(constant(k.e2)).pow(1, 3).simplify();
    let dc3 = c3.derivative(1);
    let denom = Expr::int(3)
        .mul(Expr::Num(cube_root(k.e2)))
        .mul(c3.clone().pow(2, 3));
    let offset = constant(k.e1).div(Expr::int(3).mul(constant(k.e2)));
    let a0 = c2.clone().sub(dc3).div(denom).sub(offset).simplify();
    Ok((a1, a0))
}

/// Second-order partner `(b2, b1, b0)` of the first-order system `(a1, a0)`.
pub fn subsystem_b_from_a(
    a1: &Expr,
    a0: &Expr,
    k: &DecompositionConstants,
) -> Result<(Expr, Expr, Expr), DecomposeError> {
    if k.e2 == 0.0 {
        return Err(DecomposeError::ZeroE2);
    }
    let (e2, e1, e0) = (constant(k.e2), constant(k.e1), constant(k.e0));
    let da1 = a1.derivative(1);
    let da0 = a0.derivative(1);
    let b2 = e2.clone().mul(a1.clone().pow(2, 1)).simplify();
    let b1 = e2
        .clone()
        .mul(da1.add(Expr::int(2).mul(a0.clone())))
        .mul(a1.clone())
        .add(e1.clone().mul(a1.clone()))
        .simplify();
    let b0 = e2
        .mul(da0.mul(a1.clone()).add(a0.clone().pow(2, 1)))
        .add(e1.mul(a0.clone()))
        .add(e0)
        .simplify();
    Ok((b2, b1, b0))
}

/// Both factors of `C` for the given constants, with zero initial data.
pub fn factor_pair(
    c: &ThirdOrderSystem,
    k: &DecompositionConstants,
) -> Result<(FirstOrderSystem, SecondOrderSystem), DecomposeError> {
    let (a1, a0) = subsystem_a(&c.c3, &c.c2, k)?;
    let (b2, b1, b0) = subsystem_b_from_a(&a1, &a0, k)?;
    Ok((
        FirstOrderSystem::new(a1, a0),
        SecondOrderSystem::new(b2, b1, b0),
    ))
}

fn sample(label: &str, residual: &Expr, times: &[f64]) -> Result<ConstraintResidual, EvalError> {
    let samples = times
        .iter()
        .map(|&t| Ok((t, residual.eval(t)?)))
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(ConstraintResidual::new(label, samples))
}

fn max_abs_over(exprs: &[&Expr], times: &[f64]) -> Result<f64, EvalError> {
    let mut m: f64 = 0.0;
    for e in exprs {
        for &t in times {
            m = m.max(e.eval(t)?.abs());
        }
    }
    Ok(m)
}

/// Residuals of the three commutativity constraints of the pair `(A, B)`:
///
/// ```text
/// r31 = a1 b2' - 2 a1' b2
/// r32 = a1 b1' - a1' b1 - (a1'' + 2 a0') b2
/// r33 = a1 b0' - a0'' b2 - a0' b1
/// ```
///
/// `tol` is relative to the largest coefficient magnitude of `A` and `B` on
/// `times`.
pub fn commutativity_residuals(
    a: &FirstOrderSystem,
    b: &SecondOrderSystem,
    times: &[f64],
    tol: f64,
) -> Result<ResidualReport, EvalError> {
    let (a1, a0) = (&a.a1, &a.a0);
    let (b2, b1, b0) = (&b.b2, &b.b1, &b.b0);
    let da1 = a1.derivative(1);
    let dda1 = da1.derivative(1);
    let da0 = a0.derivative(1);
    let dda0 = da0.derivative(1);
    let r31 = a1
        .clone()
        .mul(b2.derivative(1))
        .sub(Expr::int(2).mul(da1.clone()).mul(b2.clone()));
    let r32 = a1
        .clone()
        .mul(b1.derivative(1))
        .sub(da1.mul(b1.clone()))
        .sub(dda1.add(Expr::int(2).mul(da0.clone())).mul(b2.clone()));
    let r33 = a1
        .clone()
        .mul(b0.derivative(1))
        .sub(dda0.mul(b2.clone()))
        .sub(da0.mul(b1.clone()));
    let constraints = vec![
        sample("r31", &r31, times)?,
        sample("r32", &r32, times)?,
        sample("r33", &r33, times)?,
    ];
    let scale = max_abs_over(&[a1, a0, b2, b1, b0], times)?;
    Ok(ResidualReport::new(
        times.to_vec(),
        Vec::new(),
        constraints,
        tol,
        scale,
    ))
}

/// Splits `times` into points where `c3` is usable and points to skip.
pub(crate) fn usable_times(c3: &Expr, times: &[f64]) -> Result<(Vec<f64>, Vec<f64>), EvalError> {
    let mut keep = Vec::with_capacity(times.len());
    let mut skipped = Vec::new();
    for &t in times {
        if c3.eval(t)?.abs() < C3_SKIP_THRESHOLD {
            skipped.push(t);
        } else {
            keep.push(t);
        }
    }
    Ok((keep, skipped))
}

/// Checks whether `C` equals the composition of its factors for the constants
/// `k`, by sampling
///
/// ```text
/// r56 = c1 - (a1 b1' + a1 b0 + a0 b1)
/// r57 = c0 - (a1 b0' + a0 b0)
/// ```
///
/// The verdict passes when both max-abs residuals are within
/// `tol * (1 + max(|c1|, |c0|))` over the sampled times.
pub fn decomposability_check(
    c: &ThirdOrderSystem,
    k: &DecompositionConstants,
    times: &[f64],
    tol: f64,
) -> Result<ResidualReport, DecomposeError> {
    let (keep, skipped) = usable_times(&c.c3, times)?;
    if keep.is_empty() {
        return Err(DecomposeError::NoSamples);
    }
    let (a, b) = factor_pair(c, k)?;
    let (a1, a0) = (&a.a1, &a.a0);
    let (b1, b0) = (&b.b1, &b.b0);
    let r56 = c.c1.clone().sub(
        a1.clone()
            .mul(b1.derivative(1))
            .add(a1.clone().mul(b0.clone()))
            .add(a0.clone().mul(b1.clone())),
    );
    let r57 = c.c0.clone().sub(
        a1.clone()
            .mul(b0.derivative(1))
            .add(a0.clone().mul(b0.clone())),
    );
    let constraints = vec![sample("r56", &r56, &keep)?, sample("r57", &r57, &keep)?];
    let scale = max_abs_over(&[&c.c1, &c.c0], &keep)?;
    Ok(ResidualReport::new(keep, skipped, constraints, tol, scale))
}

/// A successful decomposition of `C`.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub first: FirstOrderSystem,
    pub second: SecondOrderSystem,
    pub constants: DecompositionConstants,
    pub report: ResidualReport,
}

/// Decomposes `C` into `A` and `B` when the coefficient check passes.
///
/// The stage initial values are taken from `C`: `y_A(t0) = y_B(t0) = y(t0)` and
/// `y_B'(t0) = y'(t0)`.
pub fn decompose(
    c: &ThirdOrderSystem,
    k: &DecompositionConstants,
    times: &[f64],
    tol: f64,
) -> Result<Decomposition, DecomposeError> {
    let report = decomposability_check(c, k, times, tol)?;
    if !report.pass {
        return Err(DecomposeError::NotDecomposable(Box::new(report)));
    }
    let (a, b) = factor_pair(c, k)?;
    Ok(Decomposition {
        first: a.with_initial(c.y0),
        second: b.with_initial(c.y0, c.dy0),
        constants: *k,
        report,
    })
}

/// Initial-value requirements for a decomposition with `y(t0) != 0`.
#[derive(Debug, Clone, Serialize)]
pub struct IcRequirement {
    /// `e2 + e1 + e0 = 1` within [`E_SUM_TOL`].
    pub e_sum_ok: bool,
    /// `kappa = (1 - a0) / a1`.
    pub kappa: Expr,
    pub kappa_at_t0: f64,
    pub required_dy0: f64,
    pub required_ddy0: f64,
}

impl IcRequirement {
    /// Whether `C`'s initial data meets the requirement within `tol`
    /// (relative). Zero initial output is always admissible when the
    /// derivatives are zero too.
    pub fn satisfied_by(&self, c: &ThirdOrderSystem, tol: f64) -> bool {
        let close = |x: f64, y: f64| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()));
        let derivatives = close(c.dy0, self.required_dy0) && close(c.ddy0, self.required_ddy0);
        if c.y0 == 0.0 {
            derivatives
        } else {
            derivatives && self.e_sum_ok
        }
    }
}

/// Requirements on `y'(t0)` and `y''(t0)` so that `C`, `AB` and `BA` share the
/// same nonzero initial output:
///
/// ```text
/// y'(t0)  = kappa(t0) y(t0)
/// y''(t0) = (kappa(t0)^2 + kappa'(t0)) y(t0)
/// ```
pub fn ic_conditions(
    c: &ThirdOrderSystem,
    k: &DecompositionConstants,
) -> Result<IcRequirement, DecomposeError> {
    let (a1, a0) = subsystem_a(&c.c3, &c.c2, k)?;
    let kappa = Expr::int(1).sub(a0).div(a1).simplify();
    let t0 = c.t0;
    let kappa_at_t0 = kappa.eval(t0)?;
    let dkappa = kappa.derivative(1).eval(t0)?;
    Ok(IcRequirement {
        e_sum_ok: (k.sum() - 1.0).abs() <= E_SUM_TOL,
        kappa,
        kappa_at_t0,
        // adding zero turns -0 into 0
        required_dy0: kappa_at_t0 * c.y0 + 0.0,
        required_ddy0: (kappa_at_t0 * kappa_at_t0 + dkappa) * c.y0 + 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::uniform_grid;

    const EXAMPLE_K: DecompositionConstants = DecompositionConstants::new(1.0, 1.0, -1.0);

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn same(e: &Expr, want: &str, times: &[f64]) {
        let want = p(want);
        for &t in times {
            let (g, w) = (e.eval(t).unwrap(), want.eval(t).unwrap());
            assert!(
                (g - w).abs() < 1e-12 * (1.0 + w.abs()),
                "{e} vs {want} at t={t}"
            );
        }
    }

    fn example1() -> ThirdOrderSystem {
        ThirdOrderSystem::parse("1", "t+1", "(t^2+2*t)/3", "(t^3+3*t^2+9)/27", 0.0).unwrap()
    }

    fn example3() -> ThirdOrderSystem {
        ThirdOrderSystem::parse("t^3", "9*t^2", "53/3*t", "155/27", 1.0).unwrap()
    }

    #[test]
    fn first_order_factor_examples() {
        let ts = [0.5, 1.0, 2.0, 5.0];
        let (a1, a0) = subsystem_a(&p("1"), &p("t+1"), &EXAMPLE_K).unwrap();
        assert_eq!((a1.to_string(), a0.to_string()), ("1".into(), "t/3".into()));
        let (a1, a0) = subsystem_a(&p("t^3"), &p("7*t^2"), &EXAMPLE_K).unwrap();
        assert_eq!((a1.to_string(), a0.to_string()), ("t".into(), "1".into()));
        let (a1, a0) = subsystem_a(&p("t^3"), &p("9*t^2"), &EXAMPLE_K).unwrap();
        same(&a1, "t", &ts);
        same(&a0, "5/3", &ts);
    }

    #[test]
    fn second_order_partner_examples() {
        let (b2, b1, b0) = subsystem_b_from_a(&p("1"), &p("t/3"), &EXAMPLE_K).unwrap();
        assert_eq!(b2.to_string(), "1");
        assert_eq!(b1.to_string(), "(2*t + 3)/3");
        assert_eq!(b0.to_string(), "(t^2 + 3*t - 6)/9");
        let (b2, b1, b0) = subsystem_b_from_a(&p("t"), &p("1"), &EXAMPLE_K).unwrap();
        assert_eq!([b2, b1, b0].map(|e| e.to_string()), ["t^2", "4*t", "1"]);
        let (b2, b1, b0) = subsystem_b_from_a(&p("t"), &p("5/3"), &EXAMPLE_K).unwrap();
        assert_eq!(
            [b2, b1, b0].map(|e| e.to_string()),
            ["t^2", "16*t/3", "31/9"]
        );
    }

    #[test]
    fn zero_e2_is_rejected() {
        let k = DecompositionConstants::new(0.0, 1.0, 1.0);
        assert!(matches!(
            subsystem_a(&p("1"), &p("1"), &k),
            Err(DecomposeError::ZeroE2)
        ));
        assert!(matches!(
            subsystem_b_from_a(&p("1"), &p("1"), &k),
            Err(DecomposeError::ZeroE2)
        ));
    }

    #[test]
    fn commutativity_residual_examples() {
        let a = FirstOrderSystem::new(p("t"), p("1"));
        let b = SecondOrderSystem::new(p("t^2"), p("4*t"), p("1"));
        let r = commutativity_residuals(&a, &b, &[0.5, 1.0, 2.0], 1e-12).unwrap();
        assert!(r.pass);
        assert!(r.max_abs() < 1e-12);

        let a = FirstOrderSystem::new(p("1"), p("t"));
        let b = SecondOrderSystem::new(p("1"), p("0"), p("0"));
        let r = commutativity_residuals(&a, &b, &[0.0, 1.0, 3.0], 1e-9).unwrap();
        assert!(!r.pass);
        assert!(r
            .get("r32")
            .unwrap()
            .samples
            .iter()
            .all(|&(_, v)| v == -2.0));
    }

    #[test]
    fn decomposability_examples() {
        let times = uniform_grid(0.0, 10.0, 100);
        let r = decomposability_check(&example1(), &EXAMPLE_K, &times, 1e-9).unwrap();
        assert!(r.pass, "{}", r.summary());
        assert!(r.max_abs() < 1e-9);

        let mut bad = example1();
        bad.c1 = bad.c1.add(Expr::int(1));
        let r = decomposability_check(&bad, &EXAMPLE_K, &times, 1e-9).unwrap();
        assert!(!r.pass);
        let r56 = r.get("r56").unwrap();
        assert!(r56
            .samples
            .iter()
            .all(|&(_, v)| (v.abs() - 1.0).abs() < 1e-9));

        let times = uniform_grid(1.0, 10.0, 64);
        let r = decomposability_check(&example3(), &EXAMPLE_K, &times, 1e-9).unwrap();
        assert!(r.pass, "{}", r.summary());
    }

    #[test]
    fn skips_zeros_of_leading_coefficient() {
        let c = ThirdOrderSystem::parse("t^3", "7*t^2", "9*t", "1", 0.01).unwrap();
        let times = uniform_grid(-1.0, 1.0, 5);
        let r = decomposability_check(&c, &EXAMPLE_K, &times, 1e-9).unwrap();
        assert_eq!(r.skipped, vec![0.0]);
        assert_eq!(r.times.len(), 4);
        assert!(r.pass, "{}", r.summary());
    }

    #[test]
    fn decompose_examples() {
        let times = uniform_grid(0.0, 10.0, 64);
        let c = example1().with_initial(2.0, 3.0, 4.0);
        let d = decompose(&c, &EXAMPLE_K, &times, 1e-9).unwrap();
        assert_eq!(d.first.a0.to_string(), "t/3");
        assert_eq!((d.first.y0, d.second.y0, d.second.dy0), (2.0, 2.0, 3.0));

        let d = decompose(&example3(), &EXAMPLE_K, &uniform_grid(1.0, 10.0, 64), 1e-9).unwrap();
        same(&d.second.b1, "16*t/3", &[1.0, 2.0]);

        let mut bad = example1();
        bad.c0 = bad.c0.add(p("t"));
        match decompose(&bad, &EXAMPLE_K, &times, 1e-9) {
            Err(DecomposeError::NotDecomposable(r)) => {
                assert!(r.get("r57").unwrap().max_abs > 1.0);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn initial_value_requirements() {
        // Euler example: kappa = -2/(3t)
        let c = example3().with_initial(1.0, 0.0, 0.0);
        let ic = ic_conditions(&c, &EXAMPLE_K).unwrap();
        assert!(ic.e_sum_ok);
        assert!((ic.required_dy0 + 2.0 / 3.0).abs() < 1e-14);
        assert!((ic.required_ddy0 - 10.0 / 9.0).abs() < 1e-14);
        assert_eq!(ic.kappa.to_string(), "-2/(3*t)");

        let mut c = example1();
        c.y0 = 1.0;
        let ic = ic_conditions(&c, &EXAMPLE_K).unwrap();
        assert!((ic.required_dy0 - 1.0).abs() < 1e-15);
        assert!((ic.required_ddy0 - 2.0 / 3.0).abs() < 1e-15);

        for t0 in [0.01, 0.5, 3.0] {
            let c = ThirdOrderSystem::parse("t^3", "7*t^2", "9*t", "1", t0)
                .unwrap()
                .with_initial(-4.0, 0.0, 0.0);
            let ic = ic_conditions(&c, &EXAMPLE_K).unwrap();
            assert_eq!(ic.required_dy0, 0.0);
            assert!(ic.satisfied_by(&c, 1e-12));
        }
    }
}
