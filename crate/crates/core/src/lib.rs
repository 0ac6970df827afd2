//! Discrete Lagrange–D'Alembert–Poincaré systems and their reduction.
//!
//! * [`matgroup`]: SO(3) utilities (hat/vee, Cayley map, coadjoint action).
//! * [`dldps`]: systems on trivialized bundles, the section of motion,
//!   a Newton integrator, trajectory verification and transport along
//!   bundle isomorphisms.
//! * [`connections`]: affine discrete connections and reduction maps.
//! * [`ll_reduce`]: left-invariant systems on SO(3) and their reduced,
//!   momentum and reconstructed forms.
//! * [`suslov`]: the discrete Suslov rigid body.
//! * [`staged`]: a particle reduced in one and in two stages.

pub mod connections;
pub mod dldps;
pub mod error;
pub mod ll_reduce;
pub mod matgroup;
pub mod staged;
pub mod suslov;

pub use dldps::{
    integrate, verify_trajectory, BundleSpec, DiscretePath, DldpsModel, DldpsSystem, NewtonOptions, PathPair, Point,
    StepOutcome, StepResidual, Tangent, TrajectoryReport,
};
pub use error::{Error, Result};
pub use ll_reduce::{LlSystemSpec, MomentumValue};
pub use matgroup::{ConstraintSubspace, So3};
pub use staged::ParticleStage;
pub use suslov::{InertiaParams, SuslovLevel};
