//! CSV and JSON output. Numbers use Rust's shortest round-trip formatting, so
//! the decimal separator is always `.`; lines end with `\n`.

use crate::decompose::{IcRequirement, ResidualReport};
use crate::sim::Trajectory;
use crate::systems::DecompositionConstants;
use crate::verify::{DecompositionReport, NoiseAsymmetry, PairDistance, Tolerances, Verdict};
use serde::Serialize;
use std::io::{self, Write};
use std::path::Path;

/// Writes `t` followed by the named columns, in the given order.
pub fn write_csv(mut w: impl Write, traj: &Trajectory, columns: &[&str]) -> io::Result<()> {
    let series = columns
        .iter()
        .map(|name| {
            traj.column(name)
                .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, format!("no column {name}")))
        })
        .collect::<io::Result<Vec<_>>>()?;
    write!(w, "t")?;
    for name in columns {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for (i, t) in traj.times.iter().enumerate() {
        write!(w, "{t}")?;
        for s in &series {
            write!(w, ",{}", s[i])?;
        }
        writeln!(w)?;
    }
    w.flush()
}

/// One `plot_<column>.csv` with header `t,value` per column.
pub fn write_plot_data(dir: &Path, traj: &Trajectory, columns: &[&str]) -> io::Result<()> {
    for name in columns {
        let values = traj
            .column(name)
            .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, format!("no column {name}")))?;
        let mut w =
            io::BufWriter::new(std::fs::File::create(dir.join(format!("plot_{name}.csv")))?);
        writeln!(w, "t,value")?;
        for (t, v) in traj.times.iter().zip(values) {
            writeln!(w, "{t},{v}")?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ResidualSummary<'a> {
    label: &'a str,
    max_abs: f64,
    rms: f64,
}

#[derive(Serialize)]
struct CheckSummary<'a> {
    pass: bool,
    samples: usize,
    skipped: &'a [f64],
    tolerance: f64,
    scale: f64,
    residuals: Vec<ResidualSummary<'a>>,
}

impl<'a> From<&'a ResidualReport> for CheckSummary<'a> {
    fn from(r: &'a ResidualReport) -> Self {
        CheckSummary {
            pass: r.pass,
            samples: r.times.len(),
            skipped: &r.skipped,
            tolerance: r.tolerance,
            scale: r.scale,
            residuals: r
                .constraints
                .iter()
                .map(|c| ResidualSummary {
                    label: &c.label,
                    max_abs: c.max_abs,
                    rms: c.rms,
                })
                .collect(),
        }
    }
}

/// `report.json`: the decomposition report without per-sample data.
#[derive(Serialize)]
pub(crate) struct ReportFile<'a> {
    constants: DecompositionConstants,
    coefficients: CheckSummary<'a>,
    commutativity: CheckSummary<'a>,
    initial_conditions: &'a IcRequirement,
    initial_data: [f64; 3],
    distances: &'a [PairDistance],
    noise: Option<NoiseAsymmetry>,
    tolerances: Tolerances,
    verdict: Verdict,
    samples: usize,
}

impl<'a> From<&'a DecompositionReport> for ReportFile<'a> {
    fn from(r: &'a DecompositionReport) -> Self {
        ReportFile {
            constants: r.constants,
            coefficients: (&r.coefficients).into(),
            commutativity: (&r.commutativity).into(),
            initial_conditions: &r.initial_conditions,
            initial_data: r.initial_data,
            distances: &r.distances,
            noise: r.noise,
            tolerances: r.tolerances,
            verdict: r.verdict,
            samples: r.trajectory.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut traj = Trajectory::new(vec![0.0, 0.5]);
        traj.push("yC", vec![1.0, -2.25]);
        traj.push("yAB", vec![1e-20, 3.0]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &traj, &["yC", "yAB"]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,yC,yAB\n0,1,0.00000000000000000001\n0.5,-2.25,3\n"
        );
        assert!(write_csv(Vec::new(), &traj, &["yBA"]).is_err());
    }
}
