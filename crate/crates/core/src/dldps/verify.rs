use std::time::Duration;

use nalgebra::DVector;
use rand::Rng;

use super::{central_difference, DiscretePath, DldpsSystem, PathPair, Tangent};

/// Residual magnitudes at one pair of a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResidual {
    /// Max `|ν_d|` over the variational basis against the previous pair; zero
    /// for the first pair.
    pub dynamic: f64,
    pub kinematic: f64,
    /// Manifold drift of both points, and the `C''(E)` gap with the previous
    /// pair.
    pub drift: f64,
}

impl StepResidual {
    pub fn max(&self) -> f64 {
        self.dynamic.max(self.kinematic).max(self.drift)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryReport {
    pub steps: Vec<StepResidual>,
    pub max_dynamic: f64,
    pub max_kinematic: f64,
    pub max_drift: f64,
    pub tol: f64,
    pub passed: bool,
    /// Index of the first pair whose residuals exceed `tol`.
    pub first_failure: Option<usize>,
    pub wall_time: Option<Duration>,
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

/// Checks a discrete path against the equations of motion.
///
/// Evaluation failures (for instance a point outside the Cayley chart) are
/// recorded as infinite residuals.
pub fn verify_trajectory(sys: &DldpsSystem, path: &DiscretePath, tol: f64) -> TrajectoryReport {
    let b = sys.bundle();
    let mut steps = Vec::with_capacity(path.len());
    for (k, pair) in path.pairs.iter().enumerate() {
        let kinematic = sys
            .model()
            .kin_residual(&pair.eps, &pair.m_next)
            .map(|r| max_abs(&r))
            .unwrap_or(f64::INFINITY);
        let mut drift = b.drift_total(&pair.eps).max(b.base.drift(&pair.m_next));
        let mut dynamic = 0.0;
        if k > 0 {
            let prev = &path.pairs[k - 1];
            drift = drift.max(max_abs(&(b.phi(&pair.eps) - &prev.m_next)));
            dynamic = sys
                .dynamic_residual(prev, pair)
                .map(|r| max_abs(&r))
                .unwrap_or(f64::INFINITY);
        }
        steps.push(StepResidual { dynamic, kinematic, drift });
    }
    let max_of = |f: fn(&StepResidual) -> f64| steps.iter().map(f).fold(0.0, f64::max);
    let first_failure = steps.iter().position(|s| !(s.max() <= tol));
    TrajectoryReport {
        max_dynamic: max_of(|s| s.dynamic),
        max_kinematic: max_of(|s| s.kinematic),
        max_drift: max_of(|s| s.drift),
        tol,
        passed: first_failure.is_none(),
        first_failure,
        wall_time: None,
        steps,
    }
}

fn random_tangent<R: Rng>(basis: &[Tangent], ambient: usize, rng: &mut R) -> Tangent {
    basis
        .iter()
        .fold(DVector::zeros(ambient), |acc, b| acc + b * rng.gen_range(-1.0..1.0))
}

/// Largest relative discrepancy between the model's `D₁L_d`, `D₂L_d` and
/// central differences of `L_d` with step `h` along random chart tangents.
///
/// Discrepancies are measured relative to `max(|analytic|, |fd|, 1)`.
pub fn fd_check_gradients<R: Rng>(
    sys: &DldpsSystem,
    samples: &[PathPair],
    h: f64,
    rng: &mut R,
) -> f64 {
    let b = sys.bundle();
    let m = sys.model();
    let rel = |a: f64, f: f64| (a - f).abs() / a.abs().max(f.abs()).max(1.0);
    let mut worst: f64 = 0.0;
    for pair in samples {
        let d_eps = random_tangent(&b.tangent_basis_total(&pair.eps), b.total_ambient_dim(), rng);
        let c = b.tangent_coords_total(&pair.eps, &d_eps);
        let fd1 = central_difference(h, |t| m.lagrangian(&b.retract_total(&pair.eps, &(&c * t)), &pair.m_next));
        let an1 = m.d1_lagrangian(&pair.eps, &pair.m_next, &d_eps);

        let d_m = random_tangent(&b.base.tangent_basis(&pair.m_next), b.base.ambient_dim(), rng);
        let cm = b.base.tangent_coords(&pair.m_next, &d_m);
        let fd2 = central_difference(h, |t| m.lagrangian(&pair.eps, &b.base.retract(&pair.m_next, &(&cm * t))));
        let an2 = m.d2_lagrangian(&pair.eps, &pair.m_next, &d_m);

        for (a, f) in [(an1, fd1), (an2, fd2)] {
            worst = match (a, f) {
                (Ok(a), Ok(f)) => worst.max(rel(a, f)),
                _ => f64::INFINITY,
            };
        }
    }
    worst
}
