use serde::Serialize;

/// Sampled residual of one coefficient constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintResidual {
    pub label: String,
    /// `(t, residual)` pairs, aligned with [`ResidualReport::times`].
    pub samples: Vec<(f64, f64)>,
    pub max_abs: f64,
    pub rms: f64,
}

impl ConstraintResidual {
    pub fn new(label: impl Into<String>, samples: Vec<(f64, f64)>) -> Self {
        let max_abs = samples.iter().map(|(_, r)| r.abs()).fold(0.0, f64::max);
        let rms = if samples.is_empty() {
            0.0
        } else {
            (samples.iter().map(|(_, r)| r * r).sum::<f64>() / samples.len() as f64).sqrt()
        };
        ConstraintResidual {
            label: label.into(),
            samples,
            max_abs,
            rms,
        }
    }
}

/// Residuals of a family of constraints sampled on a common time grid.
///
/// The verdict passes when every constraint's max-abs residual is within
/// `tolerance * (1 + scale)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub times: Vec<f64>,
    /// Requested times that were dropped because the leading coefficient is
    /// (numerically) zero there.
    pub skipped: Vec<f64>,
    pub constraints: Vec<ConstraintResidual>,
    pub tolerance: f64,
    pub scale: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(
        times: Vec<f64>,
        skipped: Vec<f64>,
        constraints: Vec<ConstraintResidual>,
        tolerance: f64,
        scale: f64,
    ) -> Self {
        let mut report = ResidualReport {
            times,
            skipped,
            constraints,
            tolerance,
            scale,
            pass: false,
        };
        report.pass = report.passes(tolerance);
        report
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        let bound = tolerance * (1.0 + self.scale);
        self.constraints.iter().all(|c| c.max_abs <= bound)
    }

    pub fn get(&self, label: &str) -> Option<&ConstraintResidual> {
        self.constraints.iter().find(|c| c.label == label)
    }

    pub fn max_abs(&self) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.max_abs)
            .fold(0.0, f64::max)
    }

    /// One line per constraint.
    pub fn summary(&self) -> String {
        self.constraints
            .iter()
            .map(|c| {
                format!(
                    "{}: max|r| = {:.3e}, rms = {:.3e}",
                    c.label, c.max_abs, c.rms
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}
