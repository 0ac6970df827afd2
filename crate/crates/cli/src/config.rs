use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use nhreduce::matgroup::cay;
use nhreduce::{InertiaParams, ParticleStage, So3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Suslov,
    Particle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelKind {
    Full,
    Eta,
    Momentum,
    HReduced,
    GReduced,
    GhReduced,
}

/// A run description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemKind,
    pub level: LevelKind,
    /// `[I11, I22, I33, I13, I23]`.
    #[serde(default)]
    pub inertia: Option<[f64; 5]>,
    #[serde(default)]
    pub h_step: Option<f64>,
    /// Cayley parameters of the connection element `h`.
    #[serde(default)]
    pub connection_h: [f64; 3],
    pub steps: usize,
    #[serde(default = "default_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// `(ω₁, ω₂)` with `W₀ = cay(ω₁, ω₂, 0)`.
    #[serde(default)]
    pub omega: Option<[f64; 2]>,
    /// Initial particle position.
    #[serde(default)]
    pub q0: Option<[f64; 3]>,
    /// `(Δx, Δy)` of the first particle step; `Δz` follows from the constraint.
    #[serde(default)]
    pub offset: Option<[f64; 2]>,
}

fn default_tol() -> f64 {
    1e-12
}

fn default_max_iter() -> usize {
    50
}

/// A validated (system, level) combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    SuslovFull,
    SuslovEta,
    SuslovMomentum,
    Particle(ParticleStage),
}

impl Level {
    pub fn is_suslov(self) -> bool {
        !matches!(self, Level::Particle(_))
    }

    pub fn name(self) -> &'static str {
        match self {
            Level::SuslovFull => "suslov/full",
            Level::SuslovEta => "suslov/eta",
            Level::SuslovMomentum => "suslov/momentum",
            Level::Particle(ParticleStage::Full) => "particle/full",
            Level::Particle(ParticleStage::H) => "particle/h_reduced",
            Level::Particle(ParticleStage::G) => "particle/g_reduced",
            Level::Particle(ParticleStage::GOverH) => "particle/gh_reduced",
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn level(&self) -> Result<Level> {
        Ok(match (self.system, self.level) {
            (SystemKind::Suslov, LevelKind::Full) => Level::SuslovFull,
            (SystemKind::Suslov, LevelKind::Eta) => Level::SuslovEta,
            (SystemKind::Suslov, LevelKind::Momentum) => Level::SuslovMomentum,
            (SystemKind::Particle, LevelKind::Full) => Level::Particle(ParticleStage::Full),
            (SystemKind::Particle, LevelKind::HReduced) => Level::Particle(ParticleStage::H),
            (SystemKind::Particle, LevelKind::GReduced) => Level::Particle(ParticleStage::G),
            (SystemKind::Particle, LevelKind::GhReduced) => Level::Particle(ParticleStage::GOverH),
            (s, l) => bail!("level {l:?} is not available for system {s:?}"),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let level = self.level()?;
        if !(self.newton_tol > 0.0 && self.newton_tol.is_finite()) {
            bail!("newton_tol must be positive");
        }
        if self.max_iter == 0 {
            bail!("max_iter must be positive");
        }
        if level.is_suslov() {
            self.inertia()?;
            if self.connection_h.iter().any(|x| !x.is_finite()) {
                bail!("connection_h must be finite");
            }
            if self.omega.is_some_and(|w| w.iter().any(|x| !x.is_finite())) {
                bail!("omega must be finite");
            }
            if level != Level::SuslovEta && self.connection_h != [0.0; 3] {
                bail!("connection_h applies to the eta level only");
            }
        } else {
            let h = self.h_step.context("particle runs need h_step")?;
            if !(h > 0.0 && h.is_finite()) {
                bail!("h_step must be positive, got {h}");
            }
            let finite = self.q0.unwrap_or_default().iter().chain(self.offset.unwrap_or_default().iter()).all(|x| x.is_finite());
            if !finite {
                bail!("q0 and offset must be finite");
            }
        }
        Ok(())
    }

    pub fn inertia(&self) -> Result<InertiaParams> {
        let a = self.inertia.context("suslov runs need inertia = [I11, I22, I33, I13, I23]")?;
        InertiaParams::from_array(a).map_err(Into::into)
    }

    pub fn h(&self) -> So3 {
        So3::cay(&Vector3::from(self.connection_h))
    }

    pub fn w0(&self) -> Matrix3<f64> {
        let [a, b] = self.omega.unwrap_or([0.2, 0.1]);
        cay(&Vector3::new(a, b, 0.0))
    }

    pub fn particle_start(&self) -> ([f64; 3], [f64; 2]) {
        (self.q0.unwrap_or([0.0, 1.0, 0.0]), self.offset.unwrap_or([0.1, 0.05]))
    }

    pub fn h_step(&self) -> f64 {
        self.h_step.unwrap_or(0.1)
    }

    pub fn newton(&self) -> nhreduce::NewtonOptions {
        nhreduce::NewtonOptions {
            tol: self.newton_tol,
            max_iter: self.max_iter,
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<RunConfig> {
        let c: RunConfig = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    #[test]
    fn defaults_fill_in() {
        let c = parse(r#"{"system":"suslov","level":"eta","inertia":[1,2,3,0,0],"steps":5}"#).unwrap();
        assert_eq!(c.newton_tol, 1e-12);
        assert_eq!(c.max_iter, 50);
        assert_eq!(c.connection_h, [0.0; 3]);
        assert_eq!(c.level().unwrap(), Level::SuslovEta);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for bad in [
            r#"{"system":"suslov","level":"g_reduced","inertia":[1,2,3,0,0],"steps":5}"#,
            r#"{"system":"suslov","level":"eta","inertia":[1,-2,3,0,0],"steps":5}"#,
            r#"{"system":"suslov","level":"eta","steps":5}"#,
            r#"{"system":"particle","level":"full","steps":5}"#,
            r#"{"system":"particle","level":"full","h_step":-1,"steps":5}"#,
            r#"{"system":"particle","level":"full","h_step":0.1,"steps":-5}"#,
            r#"{"system":"particle","level":"full","h_step":0.1,"steps":5,"colour":1}"#,
            r#"{"system":"suslov","level":"full","inertia":[1,2,3,0,0],"connection_h":[0,0,1],"steps":5}"#,
        ] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }
}
