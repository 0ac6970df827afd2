use std::fmt;

use serde::Serialize;

use nhreduce::TrajectoryReport;

#[derive(Debug, Clone, Serialize)]
pub struct StepRow {
    pub k: usize,
    pub dynamic_residual: f64,
    pub kinematic_residual: f64,
    pub manifold_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub level: &'static str,
    pub pairs: usize,
    pub max_dynamic_residual: f64,
    pub max_kinematic_residual: f64,
    pub max_manifold_drift: f64,
    pub tol: f64,
    pub passed: bool,
    pub first_failure: Option<usize>,
    pub wall_time_s: Option<f64>,
}

/// JSON form of a [`TrajectoryReport`].
#[derive(Debug, Clone, Serialize)]
pub struct ReportDoc {
    pub summary: Summary,
    pub steps: Vec<StepRow>,
}

impl ReportDoc {
    pub fn new(level: &'static str, r: &TrajectoryReport) -> Self {
        let steps = r
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| StepRow { k, dynamic_residual: s.dynamic, kinematic_residual: s.kinematic, manifold_drift: s.drift })
            .collect();
        Self {
            summary: Summary {
                level,
                pairs: r.steps.len(),
                max_dynamic_residual: r.max_dynamic,
                max_kinematic_residual: r.max_kinematic,
                max_manifold_drift: r.max_drift,
                tol: r.tol,
                passed: r.passed,
                first_failure: r.first_failure,
                wall_time_s: r.wall_time.map(|d| d.as_secs_f64()),
            },
            steps,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for ReportDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.summary;
        writeln!(f, "level            {}", s.level)?;
        writeln!(f, "pairs            {}", s.pairs)?;
        writeln!(f, "max dynamic      {:.3e}", s.max_dynamic_residual)?;
        writeln!(f, "max kinematic    {:.3e}", s.max_kinematic_residual)?;
        writeln!(f, "max drift        {:.3e}", s.max_manifold_drift)?;
        writeln!(f, "tolerance        {:.1e}", s.tol)?;
        if let Some(k) = s.first_failure {
            writeln!(f, "first failure    pair {k}")?;
        }
        write!(f, "result           {}", if s.passed { "PASS" } else { "FAIL" })
    }
}
