use std::fmt;
use std::time::Instant;

use nalgebra::DVector;

use nhreduce::ll_reduce::{
    build_m_ll, build_m_s, integrate_momentum, momentum_path, reduce_to_eta_with, LlSystemSpec,
};
use nhreduce::matgroup::mat_to_vec;
use nhreduce::staged::{
    build_particle_full, build_particle_reduced, particle_initial, upsilon_staged, StagedReduction,
};
use nhreduce::suslov::suslov_spec;
use nhreduce::{integrate, verify_trajectory, DiscretePath, DldpsSystem, ParticleStage, PathPair, TrajectoryReport};

use crate::config::{Level, RunConfig};
use nhreduce::connections::ReductionMap;

/// A failed command together with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub const DEVIATION: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const SOLVER: u8 = 3;
    pub const VERIFY: u8 = 4;

    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self { code, error: error.into() }
    }

    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        Self::new(Self::CONFIG, error)
    }

    pub fn solver(error: impl Into<anyhow::Error>) -> Self {
        Self::new(Self::SOLVER, error)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

pub fn suslov_spec_of(cfg: &RunConfig) -> CmdResult<LlSystemSpec> {
    let inertia = cfg.inertia().map_err(Failure::config)?;
    suslov_spec(&inertia).map_err(Failure::config)
}

/// The system a level's trajectories are verified against.
pub fn system_for(cfg: &RunConfig, level: Level) -> CmdResult<DldpsSystem> {
    let built = match level {
        Level::SuslovFull => build_m_ll(&suslov_spec_of(cfg)?),
        Level::SuslovEta => reduce_to_eta_with(&suslov_spec_of(cfg)?, &cfg.h()),
        Level::SuslovMomentum => build_m_s(&suslov_spec_of(cfg)?),
        Level::Particle(ParticleStage::Full) => build_particle_full(cfg.h_step()),
        Level::Particle(stage) => build_particle_reduced(stage, cfg.h_step()),
    };
    built.map_err(Failure::config)
}

/// The initial pair of a particle run at the given stage.
pub fn particle_start(cfg: &RunConfig, stage: ParticleStage) -> PathPair {
    let (q0, [dx, dy]) = cfg.particle_start();
    let full = particle_initial(q0, dx, dy);
    let h = || upsilon_staged(StagedReduction::FullToH).forward(&full);
    match stage {
        ParticleStage::Full => full.clone(),
        ParticleStage::H => h(),
        ParticleStage::G => upsilon_staged(StagedReduction::FullToG).forward(&full),
        ParticleStage::GOverH => upsilon_staged(StagedReduction::HToGOverH).forward(&h()),
    }
}

fn integrate_level(cfg: &RunConfig, level: Level, sys: &DldpsSystem) -> nhreduce::Result<DiscretePath> {
    let opts = cfg.newton();
    match level {
        Level::SuslovFull => {
            let initial = PathPair::new(mat_to_vec(&nalgebra::Matrix3::identity()), mat_to_vec(&cfg.w0()));
            integrate(sys, &initial, cfg.steps, &opts)
        }
        Level::SuslovEta => {
            let v0 = cfg.w0() * cfg.h().matrix().transpose();
            integrate(sys, &PathPair::new(mat_to_vec(&v0), DVector::zeros(0)), cfg.steps, &opts)
        }
        Level::SuslovMomentum => {
            let spec = suslov_spec(&cfg.inertia().expect("validated"))?;
            Ok(momentum_path(&integrate_momentum(&spec, &cfg.w0(), cfg.steps, &opts)?.p))
        }
        Level::Particle(stage) => integrate(sys, &particle_start(cfg, stage), cfg.steps, &opts),
    }
}

/// Integrates the configured run and verifies the result at `tol`.
///
/// Solver errors map to exit code 3; the verification outcome is returned
/// for the caller to judge.
pub fn simulate(cfg: &RunConfig, tol: f64) -> CmdResult<(DiscretePath, TrajectoryReport)> {
    let level = cfg.level().map_err(Failure::config)?;
    let sys = system_for(cfg, level)?;
    log::info!("integrating {} for {} steps", level.name(), cfg.steps);
    let start = Instant::now();
    let path = integrate_level(cfg, level, &sys).map_err(Failure::solver)?;
    let elapsed = start.elapsed();
    log::debug!("integration took {elapsed:?}");
    let mut report = verify_trajectory(&sys, &path, tol);
    report.wall_time = Some(elapsed);
    Ok((path, report))
}
