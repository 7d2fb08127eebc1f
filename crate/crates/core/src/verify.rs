//! Agreement between simulated responses, and the combined evidence that a
//! decomposition is valid for a given scenario.

use crate::cascade::Ordering;
use crate::decompose::{
    commutativity_residuals, decomposability_check, ic_conditions, DecomposeError, IcRequirement,
    ResidualReport, DEFAULT_RESIDUAL_TOL, DEFAULT_SAMPLES,
};
use crate::sim::{integrate_third, simulate_cascade, Signal, SimConfig, SimError, Trajectory};
use crate::systems::{
    uniform_grid, DecompositionConstants, FirstOrderSystem, SecondOrderSystem, ThirdOrderSystem,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default bound on pairwise `rel_max_abs` between responses.
pub const DEFAULT_TRAJECTORY_TOL: f64 = 1e-3;
/// Default relative tolerance when comparing initial data with requirements.
pub const DEFAULT_IC_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("series need at least 2 samples, got {0}")]
    TooShort(usize),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distance {
    pub max_abs: f64,
    pub rms: f64,
    /// `max_abs / max(1e-12, max|u|, max|v|)`.
    pub rel_max_abs: f64,
}

pub fn trajectory_distance(u: &[f64], v: &[f64]) -> Result<Distance, VerifyError> {
    if u.len() != v.len() {
        return Err(VerifyError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if u.len() < 2 {
        return Err(VerifyError::TooShort(u.len()));
    }
    let mut max_abs: f64 = 0.0;
    let mut sq = 0.0;
    let mut peak: f64 = 1e-12;
    for (a, b) in u.iter().zip(v) {
        let d = (a - b).abs();
        max_abs = max_abs.max(d);
        sq += d * d;
        peak = peak.max(a.abs()).max(b.abs());
    }
    Ok(Distance {
        max_abs,
        rms: (sq / u.len() as f64).sqrt(),
        rel_max_abs: max_abs / peak,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative bound on coefficient residuals.
    pub residual: f64,
    /// Bound on pairwise `rel_max_abs` of the responses.
    pub trajectory: f64,
    /// Relative bound on initial-data mismatch.
    pub initial: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: DEFAULT_RESIDUAL_TOL,
            trajectory: DEFAULT_TRAJECTORY_TOL,
            initial: DEFAULT_IC_TOL,
        }
    }
}

/// Everything needed to exercise a decomposition numerically.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub constants: DecompositionConstants,
    pub input: Signal,
    pub noise: Signal,
    /// Orderings whose junction receives `noise`.
    pub noise_orderings: Vec<Ordering>,
    pub sim: SimConfig,
    pub tolerances: Tolerances,
}

impl Scenario {
    pub fn new(constants: DecompositionConstants, input: Signal, sim: SimConfig) -> Self {
        Scenario {
            constants,
            input,
            noise: Signal::Zero,
            noise_orderings: Vec::new(),
            sim,
            tolerances: Tolerances::default(),
        }
    }

    pub fn with_noise(mut self, noise: Signal, orderings: &[Ordering]) -> Self {
        self.noise = noise;
        self.noise_orderings = orderings.to_vec();
        self
    }

    fn noise_for(&self, order: Ordering) -> &Signal {
        if self.noise_orderings.contains(&order) {
            &self.noise
        } else {
            &Signal::Zero
        }
    }

    fn noise_active(&self) -> bool {
        !self.noise.is_zero() && !self.noise_orderings.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDistance {
    pub pair: String,
    pub distance: Distance,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NoiseAsymmetry {
    pub rms_ab_vs_c: f64,
    pub rms_ba_vs_c: f64,
    pub ab_less_affected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub coefficients: bool,
    pub commutativity: bool,
    pub initial_conditions: bool,
    pub responses: bool,
    pub overall: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub constants: DecompositionConstants,
    pub coefficients: ResidualReport,
    pub commutativity: ResidualReport,
    pub initial_conditions: IcRequirement,
    /// `C`'s initial data as used by the run.
    pub initial_data: [f64; 3],
    /// Columns `yC`, `yAB`, `yBA`, `junctionAB`, `junctionBA`.
    pub trajectory: Trajectory,
    pub distances: Vec<PairDistance>,
    pub noise: Option<NoiseAsymmetry>,
    pub tolerances: Tolerances,
    pub verdict: Verdict,
}

impl DecompositionReport {
    pub fn distance(&self, pair: &str) -> Option<Distance> {
        self.distances
            .iter()
            .find(|d| d.pair == pair)
            .map(|d| d.distance)
    }

    /// Verdict at other tolerances. Loosening any tolerance never turns a
    /// pass into a failure.
    pub fn verdict_at(&self, tol: &Tolerances) -> Verdict {
        let coefficients = self.coefficients.passes(tol.residual);
        let commutativity = self.commutativity.passes(tol.residual);
        let [y0, dy0, ddy0] = self.initial_data;
        let ic = &self.initial_conditions;
        let close = |x: f64, y: f64| (x - y).abs() <= tol.initial * (1.0 + x.abs().max(y.abs()));
        let initial_conditions = close(dy0, ic.required_dy0)
            && close(ddy0, ic.required_ddy0)
            && (y0 == 0.0 || ic.e_sum_ok);
        // noise is meant to separate the responses, so only the noiseless
        // comparison enters the verdict
        let responses = self.noise.is_some()
            || self
                .distances
                .iter()
                .all(|d| d.distance.rel_max_abs <= tol.trajectory);
        Verdict {
            coefficients,
            commutativity,
            initial_conditions,
            responses,
            overall: coefficients && commutativity && initial_conditions && responses,
        }
    }

    pub fn summary(&self) -> String {
        let mut lines = vec![
            format!(
                "constants: e2 = {}, e1 = {}, e0 = {}",
                self.constants.e2, self.constants.e1, self.constants.e0
            ),
            self.coefficients.summary(),
            self.commutativity.summary(),
            format!(
                "kappa = {}; required y'(t0) = {:.6}, y''(t0) = {:.6}; given {:.6}, {:.6}",
                self.initial_conditions.kappa,
                self.initial_conditions.required_dy0,
                self.initial_conditions.required_ddy0,
                self.initial_data[1],
                self.initial_data[2],
            ),
        ];
        for d in &self.distances {
            lines.push(format!(
                "{}: max|d| = {:.3e}, rms = {:.3e}, rel = {:.3e}",
                d.pair, d.distance.max_abs, d.distance.rms, d.distance.rel_max_abs
            ));
        }
        if let Some(n) = &self.noise {
            lines.push(format!(
                "noise: rms(yAB - yC) = {:.4e}, rms(yBA - yC) = {:.4e}",
                n.rms_ab_vs_c, n.rms_ba_vs_c
            ));
        }
        let v = &self.verdict;
        lines.push(format!(
            "verdict: coefficients {}, commutativity {}, initial conditions {}, responses {} => {}",
            pass(v.coefficients),
            pass(v.commutativity),
            pass(v.initial_conditions),
            pass(v.responses),
            pass(v.overall)
        ));
        lines.join("\n")
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Simulates `C`, `AB` and `BA` for the scenario and bundles the result with
/// the coefficient, commutativity and initial-value checks.
///
/// `C` is simulated from its own initial data; `A` and `B` keep theirs. The
/// coefficient checks sample 64 points over the simulation window.
pub fn decomposition_report(
    c: &ThirdOrderSystem,
    a: &FirstOrderSystem,
    b: &SecondOrderSystem,
    scenario: &Scenario,
) -> Result<DecompositionReport, VerifyError> {
    let tol = scenario.tolerances;
    let cfg = &scenario.sim;
    let times = uniform_grid(cfg.t0, cfg.t_end, DEFAULT_SAMPLES);
    let coefficients = decomposability_check(c, &scenario.constants, &times, tol.residual)?;
    let commutativity = commutativity_residuals(a, b, &coefficients.times, tol.residual)
        .map_err(DecomposeError::from)?;
    let mut at_start = c.clone();
    at_start.t0 = cfg.t0;
    let initial_conditions = ic_conditions(&at_start, &scenario.constants)?;

    let yc = integrate_third(&at_start, &scenario.input, cfg)?;
    let ab = simulate_cascade(
        a,
        b,
        Ordering::Ab,
        &scenario.input,
        scenario.noise_for(Ordering::Ab),
        cfg,
    )?;
    let ba = simulate_cascade(
        a,
        b,
        Ordering::Ba,
        &scenario.input,
        scenario.noise_for(Ordering::Ba),
        cfg,
    )?;
    let column = |t: &Trajectory, name| t.column(name).map(<[f64]>::to_vec).unwrap_or_default();
    let mut trajectory = Trajectory::new(yc.times.clone());
    trajectory.push("yC", column(&yc, "y"));
    trajectory.push("yAB", column(&ab, "y"));
    trajectory.push("yBA", column(&ba, "y"));
    trajectory.push("junctionAB", column(&ab, "junction"));
    trajectory.push("junctionBA", column(&ba, "junction"));

    let series = |name| trajectory.column(name).unwrap_or_default();
    let mut distances = Vec::new();
    for (l, r) in [("yAB", "yC"), ("yBA", "yC"), ("yAB", "yBA")] {
        distances.push(PairDistance {
            pair: format!("{l}-{r}"),
            distance: trajectory_distance(series(l), series(r))?,
        });
    }
    let noise = scenario.noise_active().then(|| {
        let (ab, ba) = (distances[0].distance.rms, distances[1].distance.rms);
        NoiseAsymmetry {
            rms_ab_vs_c: ab,
            rms_ba_vs_c: ba,
            ab_less_affected: ab < ba,
        }
    });

    let mut report = DecompositionReport {
        constants: scenario.constants,
        coefficients,
        commutativity,
        initial_conditions,
        initial_data: [c.y0, c.dy0, c.ddy0],
        trajectory,
        distances,
        noise,
        tolerances: tol,
        verdict: Verdict {
            coefficients: false,
            commutativity: false,
            initial_conditions: false,
            responses: false,
            overall: false,
        },
    };
    report.verdict = report.verdict_at(&tol);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::decompose;
    use crate::expr::Expr;
    use crate::sim::FrequencyUnit;

    #[test]
    fn distances() {
        let d = trajectory_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!((d.max_abs, d.rms, d.rel_max_abs), (0.0, 0.0, 0.0));
        let d = trajectory_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert_eq!(d.max_abs, 4.0);
        assert!((d.rms - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.rel_max_abs, 1.0);
        assert!(matches!(
            trajectory_distance(&[0.0, 1.0], &[0.0]),
            Err(VerifyError::LengthMismatch { left: 2, right: 1 })
        ));
        assert!(matches!(
            trajectory_distance(&[0.0], &[0.0]),
            Err(VerifyError::TooShort(1))
        ));
    }

    fn euler_scenario(
        y0: f64,
    ) -> (
        ThirdOrderSystem,
        FirstOrderSystem,
        SecondOrderSystem,
        Scenario,
    ) {
        let k = DecompositionConstants::new(1.0, 1.0, -1.0);
        let c = ThirdOrderSystem::parse("t^3", "7*t^2", "9*t", "1", 0.5)
            .unwrap()
            .with_initial(y0, 0.0, 0.0);
        let d = decompose(&c, &k, &uniform_grid(0.5, 3.0, 64), 1e-9).unwrap();
        let x = Signal::Sinusoid {
            amplitude: 1.0,
            bias: 0.0,
            frequency: 1.0,
            phase: 0.0,
            unit: FrequencyUnit::Hz,
        };
        let scenario = Scenario::new(k, x, SimConfig::new(0.5, 3.0, 0.01));
        (c, d.first, d.second, scenario)
    }

    #[test]
    fn consistent_scenario_passes() {
        let (c, a, b, scenario) = euler_scenario(-4.0);
        let r = decomposition_report(&c, &a, &b, &scenario).unwrap();
        assert!(r.verdict.overall, "{}", r.summary());
        assert!(r.noise.is_none());
        assert_eq!(r.trajectory.columns.len(), 5);
    }

    #[test]
    fn inconsistent_initial_data_is_flagged() {
        let (mut c, a, b, scenario) = euler_scenario(1.0);
        c.ddy0 = 3.0;
        let r = decomposition_report(&c, &a, &b, &scenario).unwrap();
        assert!(!r.verdict.initial_conditions);
        assert!(!r.verdict.responses, "{}", r.summary());
        assert!(r.distance("yAB-yBA").unwrap().rel_max_abs < 1e-3);
        let loose = Tolerances {
            residual: 1.0,
            trajectory: 10.0,
            initial: 10.0,
        };
        assert!(r.verdict_at(&loose).overall);
    }

    #[test]
    fn noise_reported_when_active() {
        let (c, a, b, scenario) = euler_scenario(0.0);
        let noise = Signal::Expression {
            expr: Expr::parse("0.1").unwrap(),
        };
        let r =
            decomposition_report(&c, &a, &b, &scenario.with_noise(noise, &[Ordering::Ba])).unwrap();
        let n = r.noise.unwrap();
        assert_eq!(n.rms_ab_vs_c, r.distance("yAB-yC").unwrap().rms);
        assert!(n.ab_less_affected);
    }
}
