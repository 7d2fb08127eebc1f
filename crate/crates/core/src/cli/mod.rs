//! Command-line front end.
//!
//! ```text
//! ltvdecomp decompose|fit|simulate|verify [--config PATH] [--scenario NAME]
//!           [--out DIR] [--emit-plot-data] [--tol X] [--rad-per-sec]
//! ```
//!
//! Exit codes: 0 pass, 1 input error, 2 condition or fit failure, 3 numeric
//! abort.

pub mod config;
mod output;

pub use config::{Config, ConfigError, BUILTIN_SCENARIOS};
pub use output::{write_csv, write_plot_data};

use crate::decompose::{
    decompose, fit_constants, ic_conditions, DecomposeError, Decomposition, FitError, FitOptions,
    DEFAULT_SAMPLES,
};
use crate::expr::EvalError;
use crate::sim::SimError;
use crate::systems::{uniform_grid, DecompositionConstants, LeadingCoefficient, ThirdOrderSystem};
use crate::verify::{decomposition_report, DecompositionReport, Scenario, VerifyError};
use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Input = 1,
    Condition = 2,
    Numeric = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ltvdecomp",
    version,
    about = "Decompose third-order LTV systems into commutative cascades"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Split the system into A and B and check the coefficient conditions.
    Decompose,
    /// Search for decomposition constants.
    Fit,
    /// Simulate C, AB and BA and write the trajectories.
    Simulate,
    /// Run every check; exit 0 only if all pass.
    Verify,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// JSON scenario file.
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "scenario")]
    pub config: Option<PathBuf>,
    /// Built-in scenario (example1, example2, example3, example3-zero-input, example4).
    #[arg(long, global = true, value_name = "NAME")]
    pub scenario: Option<String>,
    /// Output directory for CSV and JSON files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Also write one `t,value` file per column.
    #[arg(long, global = true)]
    pub emit_plot_data: bool,
    /// Relative residual tolerance (overrides the config).
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
    /// Read sinusoid frequencies as rad/s instead of Hz.
    #[arg(long, global = true)]
    pub rad_per_sec: bool,
}

/// Failure that ends a command with a nonzero exit code.
#[derive(Debug)]
struct Failure {
    exit: Exit,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure {
            exit: Exit::Input,
            message: message.to_string(),
        }
    }

    fn condition(message: impl ToString) -> Self {
        Failure {
            exit: Exit::Condition,
            message: message.to_string(),
        }
    }

    fn numeric(message: impl ToString) -> Self {
        Failure {
            exit: Exit::Numeric,
            message: message.to_string(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(format!("cannot write output: {e}"))
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure::input(e)
    }
}

impl From<DecomposeError> for Failure {
    fn from(e: DecomposeError) -> Self {
        match e {
            DecomposeError::NotDecomposable(_) => Failure::condition(e),
            _ => Failure::input(e),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        if e.is_numeric() {
            Failure::numeric(e)
        } else {
            Failure::input(e)
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Decompose(e) => e.into(),
            VerifyError::Sim(e) => e.into(),
            other => Failure::numeric(other),
        }
    }
}

/// Parses arguments and runs the command, writing reports to `out` and
/// diagnostics to `err`.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let _ = write!(err, "{e}");
            if e.use_stderr() {
                Exit::Input
            } else {
                Exit::Pass
            }
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let result = match cli.command {
        Command::Decompose => cmd_decompose(&cli.options, out),
        Command::Fit => cmd_fit(&cli.options, out),
        Command::Simulate => cmd_simulate(&cli.options, out),
        Command::Verify => cmd_verify(&cli.options, out),
    };
    match result {
        Ok(exit) => exit,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.exit
        }
    }
}

/// Loads the config selected by `--config` or `--scenario` and applies the
/// command-line overrides.
pub fn load_config(options: &Options) -> Result<Config, ConfigError> {
    let mut config = match (&options.config, &options.scenario) {
        (Some(path), _) => Config::load(path)?,
        (None, Some(name)) => Config::builtin(name)?,
        (None, None) => {
            return Err(ConfigError::Field {
                origin: "command line".into(),
                field: "--config",
                message: "one of --config or --scenario is required".into(),
            })
        }
    };
    if let Some(tol) = options.tol {
        config.tolerances.residual = tol;
    }
    if options.rad_per_sec {
        config.use_rad_per_sec();
    }
    Ok(config)
}

/// Parsed system, its sampling grid and the constants (given or fitted).
struct Prepared {
    config: Config,
    parsed: config::ParsedSystem,
    times: Vec<f64>,
    constants: DecompositionConstants,
    fitted: bool,
}

fn sample_times(config: &Config) -> Vec<f64> {
    let (start, end) = config.window();
    uniform_grid(start, end, DEFAULT_SAMPLES)
}

fn check_leading(c: &ThirdOrderSystem, times: &[f64]) -> Result<(), Failure> {
    let violations = c.validate_on_grid(times);
    let at_start = c.validate_on_grid(&[c.t0]);
    if !at_start.is_empty() || violations.len() == times.len() {
        let v = at_start.first().or(violations.first()).expect("nonempty");
        return Err(Failure::input(format!(
            "leading coefficient c3 = {} is unusable at t = {}: {}",
            c.c3, v.t, v.reason
        )));
    }
    Ok(())
}

fn load_and_check(options: &Options) -> Result<(Config, config::ParsedSystem, Vec<f64>), Failure> {
    let config = load_config(options)?;
    config.validate_signals()?;
    let parsed = config.parse_system()?;
    let times = sample_times(&config);
    check_leading(&parsed.system, &times)?;
    Ok((config, parsed, times))
}

fn prepare(options: &Options) -> Result<Prepared, Failure> {
    let (config, parsed, times) = load_and_check(options)?;
    let (constants, fitted) = match config.constants {
        Some(k) => {
            if k.e2 == 0.0 || ![k.e2, k.e1, k.e0].iter().all(|v| v.is_finite()) {
                return Err(Failure::input(
                    "constants: e2 must be nonzero and all values finite",
                ));
            }
            (k, false)
        }
        None => {
            let fit = run_fit(&config, &parsed, &times)?;
            (fit.constants, true)
        }
    };
    Ok(Prepared {
        config,
        parsed,
        times,
        constants,
        fitted,
    })
}

fn run_fit(
    config: &Config,
    parsed: &config::ParsedSystem,
    times: &[f64],
) -> Result<crate::decompose::FitResult, Failure> {
    let options = FitOptions {
        tol: config.tolerances.residual,
        nonzero_ic: parsed.system.y0 != 0.0,
    };
    fit_constants(&parsed.system, times, options).map_err(|e| match e {
        FitError::NoFit { .. } => Failure::condition(e),
        other => Failure::input(other),
    })
}

impl Prepared {
    /// `C` with `"auto"` initial derivatives filled in.
    fn system(&self) -> Result<ThirdOrderSystem, Failure> {
        let c = &self.parsed.system;
        if !self.parsed.needs_auto() {
            return Ok(c.clone());
        }
        let ic = ic_conditions(c, &self.constants)?;
        Ok(self.parsed.resolved(ic.required_dy0, ic.required_ddy0))
    }

    fn decompose(&self, c: &ThirdOrderSystem) -> Result<Decomposition, Failure> {
        Ok(decompose(
            c,
            &self.constants,
            &self.times,
            self.config.tolerances.residual,
        )?)
    }

    fn scenario(&self) -> Result<Scenario, Failure> {
        let (noise, orderings) = self.config.noise();
        let mut scenario = Scenario::new(
            self.constants,
            self.config.input.clone(),
            self.config.simulation()?,
        )
        .with_noise(noise, &orderings);
        scenario.tolerances = self.config.tolerances;
        Ok(scenario)
    }

    fn report(&self) -> Result<DecompositionReport, Failure> {
        let scenario = self.scenario()?;
        let c = self.system()?;
        let d = self.decompose(&c)?;
        Ok(decomposition_report(&c, &d.first, &d.second, &scenario)?)
    }
}

fn describe_constants(k: &DecompositionConstants, fitted: bool) -> String {
    format!(
        "constants ({}): e2 = {}, e1 = {}, e0 = {}",
        if fitted { "fitted" } else { "given" },
        k.e2,
        k.e1,
        k.e0
    )
}

fn cmd_decompose(options: &Options, out: &mut dyn Write) -> Result<Exit, Failure> {
    let prepared = prepare(options)?;
    let c = prepared.system()?;
    writeln!(
        out,
        "{}",
        describe_constants(&prepared.constants, prepared.fitted)
    )?;
    let ic = ic_conditions(&c, &prepared.constants)?;
    let d = match prepared.decompose(&c) {
        Ok(d) => d,
        Err(f) => {
            if f.exit == Exit::Condition {
                writeln!(out, "{}", f.message)?;
            }
            return Err(f);
        }
    };
    let (a, b) = (&d.first, &d.second);
    writeln!(out, "A: a1 = {}\n   a0 = {}", a.a1, a.a0)?;
    writeln!(out, "B: b2 = {}\n   b1 = {}\n   b0 = {}", b.b2, b.b1, b.b0)?;
    writeln!(
        out,
        "initial values: yA(t0) = {}, yB(t0) = {}, yB'(t0) = {}",
        a.y0, b.y0, b.dy0
    )?;
    writeln!(out, "kappa = {}", ic.kappa)?;
    writeln!(
        out,
        "required at t0 = {}: y' = {}, y'' = {} (given {}, {}); e2 + e1 + e0 = 1: {}",
        c.t0,
        ic.required_dy0,
        ic.required_ddy0,
        c.dy0,
        c.ddy0,
        if ic.e_sum_ok { "yes" } else { "no" }
    )?;
    writeln!(
        out,
        "residuals over {} points ({} skipped):\n{}",
        d.report.times.len(),
        d.report.skipped.len(),
        d.report.summary()
    )?;
    writeln!(out, "decomposable: yes")?;
    if let Some(dir) = &options.out {
        std::fs::create_dir_all(dir)?;
        let body = serde_json::json!({ "decomposition": d, "initial_conditions": ic });
        write_json(&dir.join("decomposition.json"), &body)?;
    }
    Ok(Exit::Pass)
}

fn cmd_fit(options: &Options, out: &mut dyn Write) -> Result<Exit, Failure> {
    let (config, parsed, times) = load_and_check(options)?;
    match run_fit(&config, &parsed, &times) {
        Ok(fit) => {
            let k = fit.constants;
            writeln!(out, "e2 = {}, e1 = {}, e0 = {}", k.e2, k.e1, k.e0)?;
            writeln!(out, "rms residual = {:.3e}", fit.rms)?;
            if let Some(lambda) = fit.gauge_lambda {
                writeln!(out, "rescaled by lambda = {lambda}")?;
            }
            writeln!(
                out,
                "nonzero initial output supported: {}",
                if fit.nonzero_ic_capable { "yes" } else { "no" }
            )?;
            if let Some(dir) = &options.out {
                std::fs::create_dir_all(dir)?;
                write_json(&dir.join("fit.json"), &fit)?;
            }
            Ok(Exit::Pass)
        }
        Err(f) => {
            if f.exit == Exit::Condition {
                writeln!(out, "{}", f.message)?;
            }
            Err(f)
        }
    }
}

fn cmd_simulate(options: &Options, out: &mut dyn Write) -> Result<Exit, Failure> {
    let prepared = prepare(options)?;
    let report = prepared.report()?;
    let dir = options.out.clone().unwrap_or_else(|| PathBuf::from("."));
    write_outputs(&dir, &report, options.emit_plot_data)?;
    writeln!(out, "{}", report.summary())?;
    writeln!(out, "wrote {}", dir.join("trajectory.csv").display())?;
    Ok(Exit::Pass)
}

fn cmd_verify(options: &Options, out: &mut dyn Write) -> Result<Exit, Failure> {
    let prepared = prepare(options)?;
    let report = prepared.report()?;
    if let Some(dir) = &options.out {
        write_outputs(dir, &report, options.emit_plot_data)?;
    }
    writeln!(out, "{}", report.summary())?;
    Ok(if report.verdict.overall {
        Exit::Pass
    } else {
        Exit::Condition
    })
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Failure::numeric)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn write_outputs(dir: &Path, report: &DecompositionReport, plot_data: bool) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)?;
    let mut columns = vec!["yC", "yAB", "yBA"];
    if report.noise.is_some() {
        columns.extend(["junctionAB", "junctionBA"]);
    }
    let file = std::fs::File::create(dir.join("trajectory.csv"))?;
    write_csv(std::io::BufWriter::new(file), &report.trajectory, &columns)?;
    if plot_data {
        write_plot_data(dir, &report.trajectory, &columns)?;
    }
    write_json(&dir.join("report.json"), &output::ReportFile::from(report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Exit, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let exit = main_with(
            std::iter::once("ltvdecomp").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            exit,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn decompose_builtin() {
        let (exit, out, err) = run_args(&["decompose", "--scenario", "example1"]);
        assert_eq!(exit, Exit::Pass, "{err}");
        assert!(out.contains("a0 = t/3"), "{out}");
        assert!(out.contains("b0 = (t^2 + 3*t - 6)/9"), "{out}");
    }

    #[test]
    fn missing_source_is_an_input_error() {
        let (exit, _, err) = run_args(&["fit"]);
        assert_eq!(exit, Exit::Input);
        assert!(err.contains("--scenario"), "{err}");
        let (exit, _, _) = run_args(&["fit", "--scenario", "nope"]);
        assert_eq!(exit, Exit::Input);
        let (exit, _, _) = run_args(&["explode"]);
        assert_eq!(exit, Exit::Input);
    }

    #[test]
    fn fit_builtin() {
        let (exit, out, _) = run_args(&["fit", "--scenario", "example3"]);
        assert_eq!(exit, Exit::Pass);
        assert!(
            out.contains("nonzero initial output supported: yes"),
            "{out}"
        );
    }
}
