//! A nonholonomic particle on ℝ³ reduced in one stage by `G = ℝ²` (x and z
//! translations) and in two stages by `H = ℝ` (z translations) followed by
//! `G/H` (x translations).
//!
//! Coordinates of `C'(E)` at each level, with points of `E` stored base-first:
//!
//! | level | ε | m |
//! |-------|---|---|
//! | full  | `(x₀, y₀, z₀)` | `(x₁, y₁, z₁)` |
//! | H     | `(x₀, y₀, w)`  | `(x₁, y₁)` |
//! | G     | `(y₀, u, w)`   | `y₁` |
//! | G/H   | `(y₀, w, u)`   | `y₁` |
//!
//! with `u = x₁ − x₀` and `w = z₁ − z₀`.

use nalgebra::DVector;

use crate::connections::{abelian_translation_connection, AbelianUpsilon, AffineDiscreteConnection, Translation};
use crate::dldps::{
    integrate, verify_trajectory, BundleSpec, DiscretePath, DldpsModel, DldpsSystem, Euclidean, NewtonOptions, PathPair,
    Point, Tangent, TrajectoryReport,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParticleStage {
    Full,
    /// Reduced by `H` (z translations).
    H,
    /// Reduced by `G` in one stage.
    G,
    /// Reduced by `H`, then by `G/H`.
    GOverH,
}

impl ParticleStage {
    pub const ALL: [ParticleStage; 4] = [Self::Full, Self::H, Self::G, Self::GOverH];

    fn base_dim(self) -> usize {
        match self {
            Self::Full => 3,
            Self::H => 2,
            Self::G | Self::GOverH => 1,
        }
    }
}

/// `dx, dy, dz, y₀, y₁` of a pair; every entry is linear in `(ε, m)`.
fn parts(stage: ParticleStage, eps: &[f64], m: &[f64]) -> [f64; 5] {
    match stage {
        ParticleStage::Full => [m[0] - eps[0], m[1] - eps[1], m[2] - eps[2], eps[1], m[1]],
        ParticleStage::H => [m[0] - eps[0], m[1] - eps[1], eps[2], eps[1], m[1]],
        ParticleStage::G => [eps[1], m[0] - eps[0], eps[2], eps[0], m[0]],
        ParticleStage::GOverH => [eps[2], m[0] - eps[0], eps[1], eps[0], m[0]],
    }
}

/// The particle at one reduction level: `L_d = (dx² + dy² + dz²)/(2h)` and
/// kinematic constraint `dz = ½(y₀ + y₁)·dx`.
#[derive(Debug)]
pub struct ParticleModel {
    stage: ParticleStage,
    h_step: f64,
    bundle: BundleSpec,
}

impl ParticleModel {
    pub fn new(stage: ParticleStage, h_step: f64) -> Result<Self> {
        if !(h_step > 0.0 && h_step.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {h_step}")));
        }
        let nb = stage.base_dim();
        Ok(Self {
            stage,
            h_step,
            bundle: BundleSpec::new(Euclidean(nb), Euclidean(3 - nb)),
        })
    }

    pub fn stage(&self) -> ParticleStage {
        self.stage
    }

    fn directional(&self, q: [f64; 5], dq: [f64; 5]) -> f64 {
        (q[0] * dq[0] + q[1] * dq[1] + q[2] * dq[2]) / self.h_step
    }
}

impl DldpsModel for ParticleModel {
    fn bundle(&self) -> &BundleSpec {
        &self.bundle
    }

    fn var_dim(&self) -> usize {
        2
    }

    fn kin_dim(&self) -> usize {
        1
    }

    fn lagrangian(&self, eps: &Point, m: &Point) -> Result<f64> {
        let q = parts(self.stage, eps.as_slice(), m.as_slice());
        Ok((q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) / (2.0 * self.h_step))
    }

    fn d1_lagrangian(&self, eps: &Point, m: &Point, d_eps: &Tangent) -> Result<f64> {
        let q = parts(self.stage, eps.as_slice(), m.as_slice());
        let dq = parts(self.stage, d_eps.as_slice(), &vec![0.0; m.len()]);
        Ok(self.directional(q, dq))
    }

    fn d2_lagrangian(&self, eps: &Point, m: &Point, d_m: &Tangent) -> Result<f64> {
        let q = parts(self.stage, eps.as_slice(), m.as_slice());
        let dq = parts(self.stage, &vec![0.0; eps.len()], d_m.as_slice());
        Ok(self.directional(q, dq))
    }

    fn var_basis(&self, eps: &Point, _m: &Point) -> Result<Vec<Tangent>> {
        let v = |a: [f64; 3]| DVector::from_row_slice(&a);
        Ok(match self.stage {
            ParticleStage::Full => vec![v([1.0, 0.0, eps[1]]), v([0.0, 1.0, 0.0])],
            ParticleStage::H => vec![v([1.0, 0.0, -eps[1]]), v([0.0, 1.0, 0.0])],
            ParticleStage::G => vec![v([0.0, -1.0, -eps[0]]), v([1.0, 0.0, 0.0])],
            ParticleStage::GOverH => vec![v([0.0, -eps[0], -1.0]), v([1.0, 0.0, 0.0])],
        })
    }

    fn kin_residual(&self, eps: &Point, m: &Point) -> Result<DVector<f64>> {
        let q = parts(self.stage, eps.as_slice(), m.as_slice());
        Ok(DVector::from_element(1, q[2] - 0.5 * (q[3] + q[4]) * q[0]))
    }

    fn chain_map(&self, _prev: &PathPair, _cur: &PathPair, d_eps1: &Tangent) -> Result<Tangent> {
        let nb = self.stage.base_dim();
        let mut out = -d_eps1;
        out.rows_mut(0, nb).fill(0.0);
        Ok(out)
    }
}

pub fn build_particle_full(h_step: f64) -> Result<DldpsSystem> {
    DldpsSystem::new(ParticleModel::new(ParticleStage::Full, h_step)?)
}

pub fn build_particle_reduced(stage: ParticleStage, h_step: f64) -> Result<DldpsSystem> {
    DldpsSystem::new(ParticleModel::new(stage, h_step)?)
}

/// The three reduction maps between particle levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StagedReduction {
    FullToH,
    FullToG,
    HToGOverH,
}

pub fn upsilon_staged(r: StagedReduction) -> AbelianUpsilon {
    match r {
        StagedReduction::FullToH => AbelianUpsilon::new(abelian_translation_connection(3, &[2]), 0),
        StagedReduction::FullToG => AbelianUpsilon::new(abelian_translation_connection(3, &[0, 2]), 0),
        StagedReduction::HToGOverH => AbelianUpsilon::new(abelian_translation_connection(2, &[0]), 1),
    }
}

/// `F: ((y₀, w, u), y₁) ↦ ((y₀, u, w), y₁)`.
pub fn staged_f_map(pair: &PathPair) -> PathPair {
    let mut eps = pair.eps.clone();
    eps.swap_rows(1, 2);
    PathPair::new(eps, pair.m_next.clone())
}

pub fn staged_f_inverse(pair: &PathPair) -> PathPair {
    staged_f_map(pair)
}

/// A pair `((x₀,y₀,z₀), (x₀+dx, y₀+dy, z₁))` with `z₁` chosen on the
/// constraint.
pub fn particle_initial(q0: [f64; 3], dx: f64, dy: f64) -> PathPair {
    let (x1, y1) = (q0[0] + dx, q0[1] + dy);
    let z1 = q0[2] + 0.5 * (q0[1] + y1) * dx;
    PathPair::new(DVector::from_row_slice(&q0), DVector::from_row_slice(&[x1, y1, z1]))
}

/// Translates a full-level path by `(a, 0, c) ∈ G`.
pub fn translate_full(path: &DiscretePath, a: f64, c: f64) -> DiscretePath {
    let shift = |p: &Point| DVector::from_row_slice(&[p[0] + a, p[1], p[2] + c]);
    DiscretePath::new(path.pairs.iter().map(|p| PathPair::new(shift(&p.eps), shift(&p.m_next))).collect())
}

/// Translates an H-level path by `a ∈ G/H` (an x shift).
pub fn translate_h(path: &DiscretePath, a: f64) -> DiscretePath {
    DiscretePath::new(
        path.pairs
            .iter()
            .map(|p| {
                PathPair::new(
                    DVector::from_row_slice(&[p.eps[0] + a, p.eps[1], p.eps[2]]),
                    DVector::from_row_slice(&[p.m_next[0] + a, p.m_next[1]]),
                )
            })
            .collect(),
    )
}

/// `max |g·𝒜^H(m₀,m₁)·g⁻¹ − 𝒜^H(l_g m₀, l_g m₁)|` over `g ∈ G` and pairs.
pub fn horizontal_invariance_defect(pairs: &[(Point, Point)], group: &[(f64, f64)]) -> f64 {
    let ah = abelian_translation_connection(3, &[2]);
    let ag = abelian_translation_connection(3, &[0, 2]);
    let mut worst: f64 = 0.0;
    for (m0, m1) in pairs {
        let base = ah.form(m0, m1).0;
        for &(a, c) in group {
            let g = Translation(DVector::from_row_slice(&[a, c]));
            let moved = ah.form(&ag.act(&g, m0), &ag.act(&g, m1)).0;
            worst = worst.max((moved - &base).amax());
        }
    }
    worst
}

#[derive(Debug, Clone)]
pub struct StagedReport {
    pub full: TrajectoryReport,
    pub h: TrajectoryReport,
    pub g: TrajectoryReport,
    pub g_over_h: TrajectoryReport,
    /// `max |F(Υ_{G/H}(Υ_H(x))) − Υ_G(x)|` along the trajectory.
    pub f_defect: f64,
    pub horizontal_defect: f64,
    pub passed: bool,
    /// Name of the first failing check.
    pub first_failure: Option<&'static str>,
}

pub const F_TOL: f64 = 1e-12;

/// Projects a full-level path to the three reduced levels.
pub fn project_stages(full: &DiscretePath) -> (DiscretePath, DiscretePath, DiscretePath) {
    let h = upsilon_staged(StagedReduction::FullToH).project_path(full);
    let g = upsilon_staged(StagedReduction::FullToG).project_path(full);
    let gh = upsilon_staged(StagedReduction::HToGOverH).project_path(&h);
    (h, g, gh)
}

/// Verifies the given full, H, G and G/H paths in their own systems and the
/// correspondences between them.
pub fn check_stages(
    h_step: f64,
    full: &DiscretePath,
    h: &DiscretePath,
    g: &DiscretePath,
    gh: &DiscretePath,
    tol: f64,
) -> Result<StagedReport> {
    let v = |stage, path| -> Result<TrajectoryReport> {
        Ok(verify_trajectory(&build_particle_reduced(stage, h_step)?, path, tol))
    };
    let full_r = v(ParticleStage::Full, full)?;
    let h_r = v(ParticleStage::H, h)?;
    let g_r = v(ParticleStage::G, g)?;
    let gh_r = v(ParticleStage::GOverH, gh)?;

    let f_defect = if gh.len() == g.len() {
        gh.pairs
            .iter()
            .zip(&g.pairs)
            .map(|(a, b)| {
                let fa = staged_f_map(a);
                (fa.eps - &b.eps).amax().max((fa.m_next - &b.m_next).amax())
            })
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let samples: Vec<(Point, Point)> = full.pairs.iter().map(|p| (p.eps.clone(), p.m_next.clone())).collect();
    let horizontal_defect = horizontal_invariance_defect(&samples, &[(0.75, -1.5), (-2.0, 0.25)]);

    let checks = [
        ("full", full_r.passed),
        ("H", h_r.passed),
        ("G", g_r.passed),
        ("G/H", gh_r.passed),
        ("F", f_defect <= F_TOL),
        ("horizontal", horizontal_defect <= F_TOL),
    ];
    let first_failure = checks.iter().find(|c| !c.1).map(|c| c.0);
    Ok(StagedReport {
        full: full_r,
        h: h_r,
        g: g_r,
        g_over_h: gh_r,
        f_defect,
        horizontal_defect,
        passed: first_failure.is_none(),
        first_failure,
    })
}

/// Integrates the full particle, projects the trajectory to every reduced
/// level and checks all of them.
pub fn staged_equivalence_test(
    h_step: f64,
    initial: &PathPair,
    steps: usize,
    opts: &NewtonOptions,
    tol: f64,
) -> Result<(DiscretePath, StagedReport)> {
    let full = integrate(&build_particle_full(h_step)?, initial, steps, opts)?;
    let (h, g, gh) = project_stages(&full);
    let report = check_stages(h_step, &full, &h, &g, &gh, tol)?;
    Ok((full, report))
}

/// Lifts a G/H-level path back to the full level in two stages, starting at
/// `q0 = (x₀, y₀, z₀)`.
pub fn reconstruct_two_stage(gh: &DiscretePath, q0: &Point) -> DiscretePath {
    let h = upsilon_staged(StagedReduction::HToGOverH).lift_path(&q0.rows(0, 2).into_owned(), gh);
    upsilon_staged(StagedReduction::FullToH).lift_path(q0, &h)
}

/// Lifts a G-level path back to the full level, starting at `q0`.
pub fn reconstruct_one_stage(g: &DiscretePath, q0: &Point) -> DiscretePath {
    upsilon_staged(StagedReduction::FullToG).lift_path(q0, g)
}
