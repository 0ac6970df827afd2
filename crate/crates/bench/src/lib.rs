//! Shared fixtures for the benchmarks.

use nhreduce::ll_reduce::eta_path;
use nhreduce::matgroup::mat_to_vec;
use nhreduce::staged::{build_particle_full, particle_initial};
use nhreduce::suslov::{build_suslov, default_w0};
use nhreduce::{DldpsSystem, InertiaParams, PathPair, SuslovLevel};

/// Inertia with off-diagonal terms, so the reduced dynamics is not a steady rotation.
pub fn generic_inertia() -> InertiaParams {
    InertiaParams::new(2.0, 3.0, 4.0, 0.3, -0.2).expect("positive definite")
}

pub fn suslov(level: SuslovLevel) -> DldpsSystem {
    build_suslov(level, &generic_inertia()).expect("valid system")
}

pub fn suslov_full_start() -> PathPair {
    PathPair::new(mat_to_vec(&nalgebra::Matrix3::identity()), mat_to_vec(&default_w0()))
}

pub fn suslov_eta_start() -> PathPair {
    eta_path(&[default_w0()]).pairs.remove(0)
}

pub fn particle() -> (DldpsSystem, PathPair) {
    (build_particle_full(0.1).expect("valid step"), particle_initial([0.0, 1.0, 0.0], 0.1, 0.05))
}
