//! Search for decomposition constants that make a given system decomposable.
//!
//! The map `(e2, e1, e0) -> (λ³e2, λ²e1, λe0)` leaves the composed system
//! unchanged, so the search fixes the gauge `e2 = 1` and looks for `(e1, e0)`.
//! With `e2 = 1`, `a1 = c3^(1/3)` does not depend on the constants and
//! `a0 = base - e1/3` where `base = (c2 - c3') / (3 c3^(2/3))`. The residuals
//! are therefore cheap polynomials in `(e1, e0)` once `a1`, `base` and their
//! derivatives are sampled, and the symbolic check is run once on the result.

use super::{decomposability_check, usable_times, DecomposeError, ResidualReport};
use crate::expr::{EvalError, Expr};
use crate::systems::{DecompositionConstants, ThirdOrderSystem};
use serde::Serialize;
use thiserror::Error;

/// Half-width of the seeding grid over `(e1, e0)`.
const SEED_RANGE: f64 = 10.0;
/// Seeding grid points per axis (unit spacing).
const SEED_POINTS: usize = 21;
/// Nelder-Mead iteration cap.
const MAX_ITERATIONS: usize = 500;
/// Nelder-Mead coefficients: reflection, expansion, contraction and the
/// shrink factor applied to every vertex but the best.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
/// Initial simplex edge around the best seed.
const INITIAL_STEP: f64 = 0.5;
/// Tolerance on `e2 + e1 + e0 = 1` that marks nonzero-initial-value support.
pub const E_SUM_FLAG_TOL: f64 = 1e-6;
/// Tolerance of the gauge root-find for `e2 + e1 + e0 = 1`.
const GAUGE_ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Relative RMS tolerance; see [`fit_constants`].
    pub tol: f64,
    /// Rescale the gauge so that `e2 + e1 + e0 = 1` when the fit misses it.
    pub nonzero_ic: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: super::DEFAULT_RESIDUAL_TOL,
            nonzero_ic: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub constants: DecompositionConstants,
    /// RMS of the `r56`/`r57` residuals at the fitted constants.
    pub rms: f64,
    /// `e2 + e1 + e0 = 1` within [`E_SUM_FLAG_TOL`].
    pub nonzero_ic_capable: bool,
    /// Gauge factor applied after the fit, if any.
    pub gauge_lambda: Option<f64>,
    pub iterations: usize,
    pub report: ResidualReport,
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("at least 8 usable sample times are required, got {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(
        "no constants found: best (e2, e1, e0) = ({:.6}, {:.6}, {:.6}) leaves rms residual {rms:.3e}",
        best.e2, best.e1, best.e0
    )]
    NoFit {
        best: DecompositionConstants,
        rms: f64,
    },
}

/// Sampled quantities that do not depend on `(e1, e0)` under the `e2 = 1` gauge.
struct Samples {
    c1: Vec<f64>,
    c0: Vec<f64>,
    a1: [Vec<f64>; 3],
    base: [Vec<f64>; 3],
}

impl Samples {
    fn collect(c: &ThirdOrderSystem, times: &[f64]) -> Result<Self, EvalError> {
        let unit = DecompositionConstants::new(1.0, 0.0, 0.0);
        let (a1, base) = super::subsystem_a(&c.c3, &c.c2, &unit).map_err(|e| match e {
            DecomposeError::Eval(e) => e,
            _ => unreachable!("unit gauge has e2 = 1"),
        })?;
        let at = |e: &Expr| {
            times
                .iter()
                .map(|&t| e.eval(t))
                .collect::<Result<Vec<_>, _>>()
        };
        let derivs = |e: &Expr| -> Result<[Vec<f64>; 3], EvalError> {
            let d1 = e.derivative(1);
            let d2 = d1.derivative(1);
            Ok([at(e)?, at(&d1)?, at(&d2)?])
        };
        Ok(Samples {
            c1: at(&c.c1)?,
            c0: at(&c.c0)?,
            a1: derivs(&a1)?,
            base: derivs(&base)?,
        })
    }

    fn scale(&self) -> f64 {
        self.c1
            .iter()
            .chain(&self.c0)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Mean square of both residual families at `(1, e1, e0)`.
    fn mean_square(&self, e1: f64, e0: f64) -> f64 {
        let n = self.c1.len();
        let mut acc = 0.0;
        for i in 0..n {
            let (a1, da1, dda1) = (self.a1[0][i], self.a1[1][i], self.a1[2][i]);
            let a0 = self.base[0][i] - e1 / 3.0;
            let (da0, dda0) = (self.base[1][i], self.base[2][i]);
            let b1 = (da1 + 2.0 * a0) * a1 + e1 * a1;
            let db1 = (dda1 + 2.0 * da0) * a1 + (da1 + 2.0 * a0) * da1 + e1 * da1;
            let b0 = da0 * a1 + a0 * a0 + e1 * a0 + e0;
            let db0 = dda0 * a1 + da0 * da1 + 2.0 * a0 * da0 + e1 * da0;
            let r56 = self.c1[i] - (a1 * db1 + a1 * b0 + a0 * b1);
            let r57 = self.c0[i] - (a1 * db0 + a0 * b0);
            acc += r56 * r56 + r57 * r57;
        }
        let mean = acc / (2 * n) as f64;
        if mean.is_finite() {
            mean
        } else {
            f64::INFINITY
        }
    }
}

/// Deterministic Nelder-Mead minimization in two variables.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2]) -> ([f64; 2], f64, usize) {
    let mut simplex = [
        start,
        [start[0] + INITIAL_STEP, start[1]],
        [start[0], start[1] + INITIAL_STEP],
    ];
    let mut values = simplex.map(&f);
    let lerp =
        |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        if values[0] == 0.0 {
            break;
        }
        let diameter = (1..3)
            .map(|i| (simplex[i][0] - simplex[0][0]).hypot(simplex[i][1] - simplex[0][1]))
            .fold(0.0, f64::max);
        let magnitude = 1.0 + simplex[0][0].abs().max(simplex[0][1].abs());
        if diameter < 1e-13 * magnitude {
            break;
        }
        iterations += 1;
        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -REFLECT);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, simplex[2], -EXPAND);
            let fe = f(expanded);
            if fe < fr {
                (simplex[2], values[2]) = (expanded, fe);
            } else {
                (simplex[2], values[2]) = (reflected, fr);
            }
        } else if fr < values[1] {
            (simplex[2], values[2]) = (reflected, fr);
        } else {
            let (toward, ft) = if fr < values[2] {
                (reflected, fr)
            } else {
                (simplex[2], values[2])
            };
            let contracted = lerp(centroid, toward, CONTRACT);
            let fc = f(contracted);
            if fc < ft {
                (simplex[2], values[2]) = (contracted, fc);
            } else {
                for i in 1..3 {
                    simplex[i] = lerp(simplex[0], simplex[i], SHRINK);
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap_or(0);
    (simplex[best], values[best], iterations)
}

/// Real `λ > 0` with `λ³e2 + λ²e1 + λe0 = 1`, by bisection. Requires `e2 > 0`.
fn gauge_for_unit_sum(k: &DecompositionConstants) -> Option<f64> {
    let p = |l: f64| ((k.e2 * l + k.e1) * l + k.e0) * l - 1.0;
    if k.e2 <= 0.0 {
        return None;
    }
    // every real root lies below the Cauchy bound
    let mut hi = 1.0 + k.e1.abs().max(k.e0.abs()).max(1.0) / k.e2;
    let mut lo = 0.0;
    if p(hi) <= 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = p(mid);
        if v.abs() <= GAUGE_ROOT_TOL * 1e-3 {
            return Some(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    (p(mid).abs() <= GAUGE_ROOT_TOL).then_some(mid)
}

/// Finds `(e2, e1, e0)` minimizing the sum of squared decomposability
/// residuals over `times`.
///
/// The gauge is fixed at `e2 = 1`; `(e1, e0)` are seeded from a unit-spaced
/// grid on `[-10, 10]²` and refined by Nelder-Mead. The fit succeeds when the
/// RMS residual is within `tol * (1 + max(|c1|, |c0|))`. With
/// [`FitOptions::nonzero_ic`], a fit whose constants do not sum to one is
/// rescaled along the gauge so that they do.
pub fn fit_constants(
    c: &ThirdOrderSystem,
    times: &[f64],
    options: FitOptions,
) -> Result<FitResult, FitError> {
    let (keep, _) = usable_times(&c.c3, times)?;
    if keep.len() < 8 {
        return Err(FitError::TooFewSamples(keep.len()));
    }
    let samples = Samples::collect(c, &keep)?;
    let objective = |x: [f64; 2]| samples.mean_square(x[0], x[1]);

    let mut seed = [0.0, 0.0];
    let mut seed_value = f64::INFINITY;
    for i in 0..SEED_POINTS {
        for j in 0..SEED_POINTS {
            let x = [i as f64 - SEED_RANGE, j as f64 - SEED_RANGE];
            let v = objective(x);
            if v < seed_value {
                (seed, seed_value) = (x, v);
            }
        }
    }
    let (best, value, iterations) = nelder_mead(objective, seed);
    let rms = value.sqrt();
    let mut constants = DecompositionConstants::new(1.0, best[0], best[1]);
    let within = rms <= options.tol * (1.0 + samples.scale());
    if !within {
        return Err(FitError::NoFit {
            best: constants,
            rms,
        });
    }

    let mut gauge_lambda = None;
    if options.nonzero_ic && (constants.sum() - 1.0).abs() > E_SUM_FLAG_TOL {
        if let Some(lambda) = gauge_for_unit_sum(&constants) {
            constants = constants.rescaled(lambda);
            gauge_lambda = Some(lambda);
        }
    }
    let report = decomposability_check(c, &constants, &keep, options.tol)?;
    Ok(FitResult {
        constants,
        rms,
        nonzero_ic_capable: (constants.sum() - 1.0).abs() <= E_SUM_FLAG_TOL,
        gauge_lambda,
        iterations,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::compose_ab;
    use crate::decompose::factor_pair;
    use crate::systems::uniform_grid;

    fn close(k: &DecompositionConstants, want: [f64; 3], tol: f64) -> bool {
        (k.e2 - want[0]).abs() <= tol
            && (k.e1 - want[1]).abs() <= tol
            && (k.e0 - want[2]).abs() <= tol
    }

    #[test]
    fn recovers_published_constants() {
        let c =
            ThirdOrderSystem::parse("1", "t+1", "(t^2+2*t)/3", "(t^3+3*t^2+9)/27", 0.0).unwrap();
        let fit = fit_constants(&c, &uniform_grid(0.0, 10.0, 64), FitOptions::default()).unwrap();
        assert!(
            close(&fit.constants, [1.0, 1.0, -1.0], 1e-6),
            "{:?}",
            fit.constants
        );
        assert!(fit.nonzero_ic_capable);
        assert!(fit.report.pass);
    }

    #[test]
    fn triple_integrator() {
        let c = ThirdOrderSystem::parse("1", "0", "0", "0", 0.0).unwrap();
        let fit = fit_constants(&c, &uniform_grid(0.0, 5.0, 16), FitOptions::default()).unwrap();
        assert!(close(&fit.constants, [1.0, 0.0, 0.0], 1e-12));
        assert_eq!(fit.rms, 0.0);
    }

    #[test]
    fn off_grid_constants_are_refined() {
        // build C from a pair with constants that are not on the seeding grid
        let k = DecompositionConstants::new(1.0, 0.37, 2.3);
        let seed = ThirdOrderSystem::parse("t^3 + 1", "t", "0", "0", 0.0).unwrap();
        let (a, b) = factor_pair(&seed, &k).unwrap();
        let c = compose_ab(&a, &b, 0.5).unwrap();
        let fit = fit_constants(&c, &uniform_grid(0.5, 3.0, 40), FitOptions::default()).unwrap();
        assert!(
            close(&fit.constants, [1.0, 0.37, 2.3], 1e-6),
            "{:?}",
            fit.constants
        );
    }

    #[test]
    fn gauge_rescaling_reaches_unit_sum() {
        let k = DecompositionConstants::new(1.0, 0.37, 2.3);
        let seed = ThirdOrderSystem::parse("t^3 + 1", "t", "0", "0", 0.0).unwrap();
        let (a, b) = factor_pair(&seed, &k).unwrap();
        let c = compose_ab(&a, &b, 0.5).unwrap();
        let options = FitOptions {
            nonzero_ic: true,
            ..FitOptions::default()
        };
        let fit = fit_constants(&c, &uniform_grid(0.5, 3.0, 40), options).unwrap();
        assert!(fit.gauge_lambda.is_some());
        assert!((fit.constants.sum() - 1.0).abs() <= 1e-9);
        assert!(fit.nonzero_ic_capable);
        assert!(fit.report.pass, "{}", fit.report.summary());
    }

    #[test]
    fn reports_failure_with_best_residual() {
        let c = ThirdOrderSystem::parse("1", "t+1", "(t^2+2*t)/3 + t^2", "(t^3+3*t^2+9)/27", 0.0)
            .unwrap();
        match fit_constants(&c, &uniform_grid(0.0, 10.0, 64), FitOptions::default()) {
            Err(FitError::NoFit { rms, .. }) => assert!(rms > 1e-3),
            other => panic!("expected NoFit, got {other:?}"),
        }
    }

    #[test]
    fn too_few_samples() {
        let c = ThirdOrderSystem::parse("t", "0", "0", "0", 0.0).unwrap();
        assert!(matches!(
            fit_constants(&c, &[0.0, 1.0, 2.0], FitOptions::default()),
            Err(FitError::TooFewSamples(2))
        ));
    }

    #[test]
    fn nelder_mead_minimizes_quadratic() {
        let (x, v, _) = nelder_mead(
            |x| (x[0] - 0.3).powi(2) + 10.0 * (x[1] + 1.7).powi(2),
            [5.0, 5.0],
        );
        assert!(
            (x[0] - 0.3).abs() < 1e-7 && (x[1] + 1.7).abs() < 1e-7,
            "{x:?}"
        );
        assert!(v < 1e-14);
    }
}
