use anyhow::anyhow;
use clap::ValueEnum;
use nalgebra::{Matrix3, Vector3};

use nhreduce::connections::{canonical_group_connection, upsilon_ll};
use nhreduce::ll_reduce::{
    configurations, connection_independence_check, eps_residual, eta_points, invert_legendre, reconstruct, MomentumValue,
};
use nhreduce::staged::{
    check_stages, project_stages, reconstruct_one_stage, reconstruct_two_stage, upsilon_staged, StagedReduction,
};
use nhreduce::{DiscretePath, ParticleStage, So3};

use crate::config::{Level, RunConfig};
use crate::run::{suslov_spec_of, CmdResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Project the full path and compare with the reduced file.
    Project,
    /// Lift the reduced file from the first full point and compare.
    Reconstruct,
    /// Check every particle stage and the one-stage/two-stage map.
    Staged,
    /// Compare `ℒ(W_k)` with a momentum file and check its EPS residual.
    Momentum,
    /// Check a file reduced with connection `h` against `W h⁻¹`.
    Connection,
}

/// Outcome of a comparison: the largest deviation and whether every
/// auxiliary verification passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub deviation: f64,
    pub checks_passed: bool,
    pub notes: Vec<String>,
}

fn mismatch(msg: impl std::fmt::Display) -> Failure {
    Failure::config(anyhow!("{msg}"))
}

fn max_dev(a: &DiscretePath, b: &DiscretePath) -> CmdResult<f64> {
    if a.len() != b.len() {
        return Err(mismatch(format!("paths have {} and {} rows", a.len(), b.len())));
    }
    Ok(a.pairs
        .iter()
        .zip(&b.pairs)
        .map(|(x, y)| (&x.eps - &y.eps).amax().max((&x.m_next - &y.m_next).amax()))
        .fold(0.0, f64::max))
}

fn mat_dev(a: &[Matrix3<f64>], b: &[Matrix3<f64>]) -> CmdResult<f64> {
    if a.len() != b.len() {
        return Err(mismatch(format!("paths have {} and {} points", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs().max()).fold(0.0, f64::max))
}

fn momenta(path: &DiscretePath) -> Vec<MomentumValue> {
    path.pairs.iter().map(|p| MomentumValue::from_vee(&Vector3::from_column_slice(p.eps.as_slice()))).collect()
}

fn momentum_dev(a: &[MomentumValue], b: &[MomentumValue]) -> CmdResult<f64> {
    if a.len() != b.len() {
        return Err(mismatch(format!("paths have {} and {} points", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x.vee() - y.vee()).amax()).fold(0.0, f64::max))
}

/// The level a reduced file of this system is compared against.
pub fn full_level(level: Level) -> Level {
    if level.is_suslov() {
        Level::SuslovFull
    } else {
        Level::Particle(ParticleStage::Full)
    }
}

/// Runs `mode` on a full-level path and a reduced path at the config's level.
pub fn compare(cfg: &RunConfig, mode: Mode, full: &DiscretePath, reduced: &DiscretePath, tol: f64) -> CmdResult<Comparison> {
    let level = cfg.level().map_err(Failure::config)?;
    let plain = |deviation| Ok(Comparison { deviation, checks_passed: true, notes: vec![] });
    match (mode, level) {
        (_, Level::SuslovFull) | (_, Level::Particle(ParticleStage::Full)) => {
            Err(mismatch("the config must describe the reduced level"))
        }
        (Mode::Project, Level::SuslovEta) => {
            let v = upsilon_ll(&canonical_group_connection(cfg.h())).project_path(&configurations(full));
            plain(mat_dev(&v, &eta_points(reduced))?)
        }
        (Mode::Project, Level::SuslovMomentum) | (Mode::Momentum, Level::SuslovMomentum) => {
            let spec = suslov_spec_of(cfg)?;
            let w = upsilon_ll(&canonical_group_connection(So3::identity())).project_path(&configurations(full));
            let p: Vec<_> = w.iter().map(|w| spec.legendre(w)).collect();
            let given = momenta(reduced);
            let mut deviation = momentum_dev(&p, &given)?;
            let mut notes = vec![];
            if mode == Mode::Momentum {
                let mut eps_max: f64 = 0.0;
                for (k, pair) in given.windows(2).enumerate() {
                    let r = eps_residual(&spec, &pair[0], &pair[1], Some(&w[k])).map_err(Failure::solver)?;
                    eps_max = eps_max.max(r.amax());
                }
                notes.push(format!("max EPS residual {eps_max:.3e}"));
                deviation = deviation.max(eps_max);
            }
            Ok(Comparison { deviation, checks_passed: true, notes })
        }
        (Mode::Project, Level::Particle(stage)) => {
            let (h, g, gh) = project_stages(full);
            let projected = match stage {
                ParticleStage::H => h,
                ParticleStage::G => g,
                _ => gh,
            };
            plain(max_dev(&projected, reduced)?)
        }
        (Mode::Reconstruct, Level::SuslovEta | Level::SuslovMomentum) => {
            let g = configurations(full);
            let g0 = *g.first().ok_or_else(|| mismatch("full path is empty"))?;
            let (h, v) = if level == Level::SuslovEta {
                (cfg.h(), eta_points(reduced))
            } else {
                let spec = suslov_spec_of(cfg)?;
                let mut seed = Matrix3::identity();
                let mut w = Vec::with_capacity(reduced.len());
                for p in momenta(reduced) {
                    seed = invert_legendre(&spec, &p, &seed).map_err(Failure::solver)?;
                    w.push(seed);
                }
                (So3::identity(), w)
            };
            plain(mat_dev(&reconstruct(&h, &v, &g0), &g)?)
        }
        (Mode::Reconstruct, Level::Particle(stage)) => {
            let q0 = full.pairs.first().ok_or_else(|| mismatch("full path is empty"))?.eps.clone();
            let lifted = match stage {
                ParticleStage::H => upsilon_staged(StagedReduction::FullToH).lift_path(&q0, reduced),
                ParticleStage::G => reconstruct_one_stage(reduced, &q0),
                _ => reconstruct_two_stage(reduced, &q0),
            };
            plain(max_dev(&lifted, full)?)
        }
        (Mode::Staged, Level::Particle(stage @ (ParticleStage::G | ParticleStage::GOverH))) => {
            let (h, mut g, mut gh) = project_stages(full);
            let deviation = if stage == ParticleStage::G {
                let d = max_dev(&g, reduced)?;
                g = reduced.clone();
                d
            } else {
                let d = max_dev(&gh, reduced)?;
                gh = reduced.clone();
                d
            };
            let report = check_stages(cfg.h_step(), full, &h, &g, &gh, tol).map_err(Failure::config)?;
            let notes = vec![
                format!("F defect {:.3e}", report.f_defect),
                format!("horizontal defect {:.3e}", report.horizontal_defect),
                format!("first failing check {}", report.first_failure.unwrap_or("none")),
            ];
            Ok(Comparison { deviation, checks_passed: report.passed, notes })
        }
        (Mode::Connection, Level::SuslovEta) => {
            let spec = suslov_spec_of(cfg)?;
            let h = cfg.h();
            let g = configurations(full);
            let report = connection_independence_check(&spec, &h, &g, tol).map_err(Failure::config)?;
            let w = upsilon_ll(&canonical_group_connection(So3::identity())).project_path(&g);
            let expected: Vec<_> = w.iter().map(|w| w * h.matrix().transpose()).collect();
            let deviation = mat_dev(&expected, &eta_points(reduced))?;
            let notes = vec![
                format!("A^e verification max residual {:.3e}", report.reduced_e.max_dynamic.max(report.reduced_e.max_kinematic)),
                format!("A^h verification max residual {:.3e}", report.reduced_h.max_dynamic.max(report.reduced_h.max_kinematic)),
                format!("max |V - W h^-1| of the projections {:.3e}", report.max_deviation),
            ];
            Ok(Comparison { deviation, checks_passed: report.passed, notes })
        }
        (mode, level) => Err(mismatch(format!("mode {mode:?} does not apply to level {}", level.name()))),
    }
}

