//! Fixed-step simulation of the third-order system and of both cascade
//! orderings, plus the input and junction-noise generators.
//!
//! All integration uses the explicit third-order Bogacki-Shampine tableau
//!
//! ```text
//!   0  |
//!  1/2 | 1/2
//!  3/4 | 0    3/4
//! -----+---------------
//!      | 2/9  1/3  4/9
//! ```
//!
//! without its embedded error estimate, so every run lands on the same uniform
//! grid. Inputs and noise are sampled at the stage abscissae.

use crate::cascade::Ordering;
use crate::expr::{EvalError, Expr};
use crate::systems::{
    FirstOrderSystem, SecondOrderSystem, ThirdOrderSystem, LEADING_ZERO_THRESHOLD,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

/// Upper bound on the number of steps of one run.
pub const MAX_STEPS: f64 = 1e7;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid simulation settings: {0}")]
    Config(String),
    #[error("invalid signal: {0}")]
    Signal(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("leading coefficient {name} vanishes at t = {t}")]
    LeadingZero { name: &'static str, t: f64 },
    #[error("state became non-finite after t = {last_valid}")]
    NonFinite { last_valid: f64 },
}

impl SimError {
    /// Whether the failure happened while integrating rather than while
    /// checking the inputs.
    pub fn is_numeric(&self) -> bool {
        !matches!(self, SimError::Config(_) | SimError::Signal(_))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyUnit {
    #[default]
    Hz,
    RadPerSec,
}

/// Input or junction-noise waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Signal {
    /// `amplitude * sin(w t + phase) + bias`, with `w = 2π f` in Hz mode and
    /// `w = f` in rad/s mode.
    Sinusoid {
        amplitude: f64,
        #[serde(default)]
        bias: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        unit: FrequencyUnit,
    },
    /// `bias + amplitude` during the first `duty_percent` of every period
    /// (periods start at `t = 0`), `bias` otherwise.
    Pulse {
        amplitude: f64,
        duty_percent: f64,
        #[serde(default)]
        bias: f64,
        period: f64,
    },
    Expression {
        expr: Expr,
    },
    Zero,
}

impl Signal {
    pub fn validate(&self) -> Result<(), SimError> {
        match *self {
            Signal::Pulse {
                duty_percent,
                period,
                ..
            } => {
                if !(duty_percent > 0.0 && duty_percent < 100.0) {
                    return Err(SimError::Signal(format!(
                        "pulse duty must lie in (0, 100), got {duty_percent}"
                    )));
                }
                if !(period > 0.0 && period.is_finite()) {
                    return Err(SimError::Signal(format!(
                        "pulse period must be positive, got {period}"
                    )));
                }
                Ok(())
            }
            Signal::Sinusoid {
                amplitude,
                bias,
                frequency,
                phase,
                ..
            } => {
                if [amplitude, bias, frequency, phase]
                    .iter()
                    .all(|v| v.is_finite())
                {
                    Ok(())
                } else {
                    Err(SimError::Signal(
                        "sinusoid parameters must be finite".into(),
                    ))
                }
            }
            _ => Ok(()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Signal::Zero => true,
            Signal::Expression { expr } => expr.is_zero(),
            _ => false,
        }
    }

    /// Switches a sinusoid to rad/s; other signals are unchanged.
    pub fn in_rad_per_sec(mut self) -> Self {
        if let Signal::Sinusoid { unit, .. } = &mut self {
            *unit = FrequencyUnit::RadPerSec;
        }
        self
    }
}

/// Value of `s` at time `t`.
pub fn eval_signal(s: &Signal, t: f64) -> Result<f64, EvalError> {
    Ok(match s {
        Signal::Sinusoid {
            amplitude,
            bias,
            frequency,
            phase,
            unit,
        } => {
            let w = match unit {
                FrequencyUnit::Hz => TAU * frequency,
                FrequencyUnit::RadPerSec => *frequency,
            };
            amplitude * (w * t + phase).sin() + bias
        }
        Signal::Pulse {
            amplitude,
            duty_percent,
            bias,
            period,
        } => {
            let position = (t / period).rem_euclid(1.0);
            if position < duty_percent / 100.0 {
                bias + amplitude
            } else {
                *bias
            }
        }
        Signal::Expression { expr } => expr.eval(t)?,
        Signal::Zero => 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t0: f64,
    pub t_end: f64,
    pub step: f64,
}

impl SimConfig {
    pub fn new(t0: f64, t_end: f64, step: f64) -> Self {
        SimConfig { t0, t_end, step }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let SimConfig { t0, t_end, step } = *self;
        if !(t0.is_finite() && t_end.is_finite() && step.is_finite()) {
            return Err(SimError::Config("t0, t_end and step must be finite".into()));
        }
        if step <= 0.0 {
            return Err(SimError::Config(format!(
                "step must be positive, got {step}"
            )));
        }
        if t_end <= t0 {
            return Err(SimError::Config(format!(
                "t_end ({t_end}) must exceed t0 ({t0})"
            )));
        }
        if (t_end - t0) / step > MAX_STEPS {
            return Err(SimError::Config(format!(
                "{} steps exceed the limit of {MAX_STEPS}",
                ((t_end - t0) / step).ceil()
            )));
        }
        Ok(())
    }

    /// Number of steps; a final partial step is dropped.
    pub fn steps(&self) -> usize {
        ((self.t_end - self.t0) / self.step + 1e-9).floor() as usize
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps())
            .map(|k| self.t0 + k as f64 * self.step)
            .collect()
    }
}

/// Sampled time series on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>) -> Self {
        Trajectory {
            times,
            columns: Vec::new(),
        }
    }

    /// Appends a column. Panics if its length differs from `times`.
    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        assert_eq!(
            values.len(),
            self.times.len(),
            "column length must match the time grid"
        );
        self.columns.push((name.into(), values));
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// One Bogacki-Shampine step of size `h` from `(t, y)`.
pub fn rk3_step<const N: usize, E>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> Result<[f64; N], E> {
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = f(t + 0.75 * h, &axpy(y, 0.75 * h, &k2))?;
    Ok(std::array::from_fn(|i| {
        y[i] + h * (2.0 / 9.0 * k1[i] + 1.0 / 3.0 * k2[i] + 4.0 / 9.0 * k3[i])
    }))
}

/// Integrates `y' = f(t, y)` over the grid of `cfg` and returns the states.
pub fn integrate<const N: usize>(
    cfg: &SimConfig,
    y0: [f64; N],
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N], SimError>,
) -> Result<Vec<[f64; N]>, SimError> {
    cfg.validate()?;
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(SimError::NonFinite { last_valid: cfg.t0 });
    }
    let n = cfg.steps();
    let mut states = Vec::with_capacity(n + 1);
    states.push(y0);
    let mut y = y0;
    for k in 0..n {
        let t = cfg.t0 + k as f64 * cfg.step;
        y = rk3_step(&mut f, t, &y, cfg.step)?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite { last_valid: t });
        }
        states.push(y);
    }
    Ok(states)
}

fn leading(name: &'static str, e: &Expr, t: f64) -> Result<f64, SimError> {
    let v = e.eval(t)?;
    if v.abs() < LEADING_ZERO_THRESHOLD {
        return Err(SimError::LeadingZero { name, t });
    }
    Ok(v)
}

fn check_signals(signals: &[&Signal]) -> Result<(), SimError> {
    signals.iter().try_for_each(|s| s.validate())
}

/// `C` in companion form `(y, y', y'')`, started from its initial data at
/// `cfg.t0`. Returns the single column `y`.
pub fn integrate_third(
    c: &ThirdOrderSystem,
    x: &Signal,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    check_signals(&[x])?;
    let states = integrate(cfg, [c.y0, c.dy0, c.ddy0], |t, s| {
        let c3 = leading("c3", &c.c3, t)?;
        let rhs =
            eval_signal(x, t)? - c.c2.eval(t)? * s[2] - c.c1.eval(t)? * s[1] - c.c0.eval(t)? * s[0];
        Ok([s[1], s[2], rhs / c3])
    })?;
    let mut traj = Trajectory::new(cfg.times());
    traj.push("y", states.iter().map(|s| s[0]).collect());
    Ok(traj)
}

fn first_rate(a: &FirstOrderSystem, t: f64, input: f64, y: f64) -> Result<f64, SimError> {
    let a1 = leading("a1", &a.a1, t)?;
    Ok((input - a.a0.eval(t)? * y) / a1)
}

fn second_accel(
    b: &SecondOrderSystem,
    t: f64,
    input: f64,
    y: f64,
    dy: f64,
) -> Result<f64, SimError> {
    let b2 = leading("b2", &b.b2, t)?;
    Ok((input - b.b1.eval(t)? * dy - b.b0.eval(t)? * y) / b2)
}

/// Both stages integrated as one coupled state. The second stage is driven by
/// the first stage's output plus `noise`.
///
/// Returns the columns `y` (final-stage output) and `junction` (the signal
/// entering the second stage).
pub fn simulate_cascade(
    a: &FirstOrderSystem,
    b: &SecondOrderSystem,
    order: Ordering,
    x: &Signal,
    noise: &Signal,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    check_signals(&[x, noise])?;
    let times = cfg.times();
    let mut traj = Trajectory::new(times.clone());
    match order {
        Ordering::Ab => {
            let states = integrate(cfg, [a.y0, b.y0, b.dy0], |t, s| {
                let ya = first_rate(a, t, eval_signal(x, t)?, s[0])?;
                let u = s[0] + eval_signal(noise, t)?;
                Ok([ya, s[2], second_accel(b, t, u, s[1], s[2])?])
            })?;
            let junction = junction(&times, &states, noise)?;
            traj.push("y", states.iter().map(|s| s[1]).collect());
            traj.push("junction", junction);
        }
        Ordering::Ba => {
            let states = integrate(cfg, [b.y0, b.dy0, a.y0], |t, s| {
                let ddyb = second_accel(b, t, eval_signal(x, t)?, s[0], s[1])?;
                let u = s[0] + eval_signal(noise, t)?;
                Ok([s[1], ddyb, first_rate(a, t, u, s[2])?])
            })?;
            let junction = junction(&times, &states, noise)?;
            traj.push("y", states.iter().map(|s| s[2]).collect());
            traj.push("junction", junction);
        }
    }
    Ok(traj)
}

/// Stage-one output (state 0 in both layouts) plus noise, on the grid.
fn junction<const N: usize>(
    times: &[f64],
    states: &[[f64; N]],
    noise: &Signal,
) -> Result<Vec<f64>, SimError> {
    times
        .iter()
        .zip(states)
        .map(|(&t, s)| Ok(s[0] + eval_signal(noise, t)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn triple_integrator_at_rest() {
        let c = ThirdOrderSystem::parse("1", "0", "0", "0", 0.0).unwrap();
        let traj = integrate_third(&c, &Signal::Zero, &SimConfig::new(0.0, 1.0, 0.1)).unwrap();
        assert!(traj.column("y").unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cubic_is_integrated_exactly() {
        let c = ThirdOrderSystem::parse("1", "0", "0", "0", 0.0).unwrap();
        let x = Signal::Expression { expr: p("6") };
        let cfg = SimConfig::new(0.0, 2.0, 0.1);
        let traj = integrate_third(&c, &x, &cfg).unwrap();
        assert_eq!(traj.len(), 21);
        for (t, y) in traj.times.iter().zip(traj.column("y").unwrap()) {
            assert!((y - t.powi(3)).abs() < 1e-12, "y({t}) = {y}");
        }
    }

    #[test]
    fn exponential_decay() {
        let cfg = SimConfig::new(0.0, 1.0, 0.01);
        let states = integrate(&cfg, [1.0], |_, y| Ok([-y[0]])).unwrap();
        assert_eq!(states.len(), 101);
        assert!((states[100][0] - (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn signals() {
        let pulse = Signal::Pulse {
            amplitude: 4.0,
            duty_percent: 50.0,
            bias: -2.3,
            period: 1.0,
        };
        assert!((eval_signal(&pulse, 0.25).unwrap() - 1.7).abs() < 1e-15);
        assert_eq!(eval_signal(&pulse, 0.75).unwrap(), -2.3);
        assert!((eval_signal(&pulse, 3.1).unwrap() - 1.7).abs() < 1e-15);
        let sine = Signal::Sinusoid {
            amplitude: 10.0,
            bias: -5.0,
            frequency: 3.0,
            phase: 0.0,
            unit: FrequencyUnit::RadPerSec,
        };
        assert_eq!(eval_signal(&sine, 0.0).unwrap(), -5.0);
        let hz = Signal::Sinusoid {
            amplitude: 1.0,
            bias: 0.0,
            frequency: 1.0,
            phase: 0.0,
            unit: FrequencyUnit::Hz,
        };
        assert!((eval_signal(&hz, 0.25).unwrap() - 1.0).abs() < 1e-15);
        assert!(
            (eval_signal(&hz.clone().in_rad_per_sec(), 0.25).unwrap() - 0.25f64.sin()).abs()
                < 1e-15
        );
        let e = Signal::Expression { expr: p("ln(t)") };
        assert!(eval_signal(&e, 0.0).is_err());
    }

    #[test]
    fn signal_validation() {
        let bad = Signal::Pulse {
            amplitude: 1.0,
            duty_percent: 100.0,
            bias: 0.0,
            period: 1.0,
        };
        assert!(matches!(bad.validate(), Err(SimError::Signal(_))));
        let bad = Signal::Pulse {
            amplitude: 1.0,
            duty_percent: 50.0,
            bias: 0.0,
            period: 0.0,
        };
        assert!(bad.validate().is_err());
        let c = ThirdOrderSystem::parse("1", "0", "0", "0", 0.0).unwrap();
        assert!(integrate_third(&c, &bad, &SimConfig::new(0.0, 1.0, 0.1)).is_err());
    }

    #[test]
    fn signal_json_form() {
        let s: Signal = serde_json::from_str(
            r#"{"kind":"sinusoid","amplitude":10,"bias":-5,"frequency":3,"unit":"rad_per_sec"}"#,
        )
        .unwrap();
        assert_eq!(eval_signal(&s, 0.0).unwrap(), -5.0);
        let s: Signal = serde_json::from_str(r#"{"kind":"expression","expr":"2*t"}"#).unwrap();
        assert_eq!(eval_signal(&s, 1.5).unwrap(), 3.0);
        let s: Signal = serde_json::from_str(r#"{"kind":"zero"}"#).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn config_validation_and_grid() {
        assert!(SimConfig::new(0.0, 1.0, 0.0).validate().is_err());
        assert!(SimConfig::new(1.0, 1.0, 0.1).validate().is_err());
        assert!(SimConfig::new(0.0, 1e8, 1.0).validate().is_err());
        let cfg = SimConfig::new(0.01, 0.15, 0.001);
        assert_eq!(cfg.steps(), 140);
        let times = cfg.times();
        assert!((times[140] - 0.15).abs() < 1e-15);
    }

    #[test]
    fn cascade_of_rest_systems_stays_at_rest() {
        let a = FirstOrderSystem::new(p("1"), p("0"));
        let b = SecondOrderSystem::new(p("1"), p("0"), p("1"));
        let cfg = SimConfig::new(0.0, 5.0, 0.01);
        for order in [Ordering::Ab, Ordering::Ba] {
            let traj = simulate_cascade(&a, &b, order, &Signal::Zero, &Signal::Zero, &cfg).unwrap();
            assert!(traj.column("y").unwrap().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn leading_zero_and_blowup_abort() {
        let c = ThirdOrderSystem::parse("t - 0.5", "0", "0", "0", 0.0).unwrap();
        let err = integrate_third(&c, &Signal::Zero, &SimConfig::new(0.0, 1.0, 0.25)).unwrap_err();
        assert_eq!(err, SimError::LeadingZero { name: "c3", t: 0.5 });
        assert!(err.is_numeric());

        let cfg = SimConfig::new(0.0, 100.0, 1.0);
        match integrate(&cfg, [1.0], |_, y| Ok([y[0] * y[0] * 1e100])) {
            Err(SimError::NonFinite { last_valid }) => assert!(last_valid < 100.0),
            other => panic!("expected abort, got {other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        let a = FirstOrderSystem::new(p("1"), p("t/3")).with_initial(1.0);
        let b = SecondOrderSystem::new(p("1"), p("(2*t+3)/3"), p("(t^2+3*t-6)/9"))
            .with_initial(1.0, 0.5);
        let x = Signal::Sinusoid {
            amplitude: 10.0,
            bias: -5.0,
            frequency: 3.0,
            phase: 0.0,
            unit: FrequencyUnit::Hz,
        };
        let noise = Signal::Pulse {
            amplitude: 4.0,
            duty_percent: 50.0,
            bias: -2.3,
            period: 1.0,
        };
        let cfg = SimConfig::new(1.0, 4.0, 0.01);
        let first = simulate_cascade(&a, &b, Ordering::Ba, &x, &noise, &cfg).unwrap();
        let second = simulate_cascade(&a, &b, Ordering::Ba, &x, &noise, &cfg).unwrap();
        assert_eq!(first, second);
        let j = first.column("junction").unwrap();
        assert!((j[0] - (1.0 + 1.7)).abs() < 1e-15);
    }
}
