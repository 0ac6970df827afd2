//! Discrete Lagrange–D'Alembert–Poincaré systems `(E, L_d, 𝒟_d, 𝒟, 𝒫)` on
//! trivialized bundles, their section of motion `ν_d`, and the machinery to
//! integrate and verify trajectories.
//!
//! A point of `C'(E) = E × M` is a [`PathPair`] `(ε, m)`. Two consecutive
//! pairs form a point of `C''(E)` when `φ(ε₁) = m₁`; the equations of motion
//! at such a quad are `ν_d(quad) = 0` on the variational constraints at the
//! second pair, together with the kinematic constraint on every pair.

mod bundle;
mod solver;
mod transport;
mod verify;

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

pub use bundle::{BundleSpec, Euclidean, Manifold, Point, PointManifold, So3Manifold, Tangent};
pub use solver::{integrate, newton_on_chart, newton_step, NewtonOptions, StepOutcome};
pub use transport::{transport_system, BundleDiffeo, MapFn, TangentMapFn};
pub use verify::{fd_check_gradients, verify_trajectory, StepResidual, TrajectoryReport};

use crate::error::{Error, Result};

/// Central-difference step for Lagrangian partials without a closed form.
pub const FD_GRADIENT_STEP: f64 = 1e-6;

/// Tolerance on `φ(ε₁) = m₁` for a pair of pairs to lie in `C''(E)`.
pub const COMPAT_TOL: f64 = 1e-10;

/// One element `(ε_k, m_{k+1})` of `C'(E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPair {
    pub eps: Point,
    pub m_next: Point,
}

impl PathPair {
    pub fn new(eps: Point, m_next: Point) -> Self {
        Self { eps, m_next }
    }
}

/// A sequence of pairs with `φ(ε_{k+1}) = m_{k+1}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscretePath {
    pub pairs: Vec<PathPair>,
}

impl DiscretePath {
    pub fn new(pairs: Vec<PathPair>) -> Self {
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Largest `|φ(ε_{k+1}) − m_{k+1}|` along the path.
    pub fn compatibility_gap(&self, bundle: &BundleSpec) -> f64 {
        self.pairs
            .windows(2)
            .map(|w| (bundle.phi(&w[1].eps) - &w[0].m_next).abs().max())
            .fold(0.0, f64::max)
    }
}

/// The data of a DLDPS. Implementors supply the Lagrangian, constraints and
/// chaining map; the partial differentials default to central differences
/// along the bundle charts.
pub trait DldpsModel: Send + Sync {
    fn bundle(&self) -> &BundleSpec;

    /// Rank `s` of the variational constraints 𝒟.
    fn var_dim(&self) -> usize;

    /// Number `c` of kinematic residual components.
    fn kin_dim(&self) -> usize;

    fn lagrangian(&self, eps: &Point, m: &Point) -> Result<f64>;

    /// `D₁L_d(ε, m)(δε)`.
    fn d1_lagrangian(&self, eps: &Point, m: &Point, d_eps: &Tangent) -> Result<f64> {
        let b = self.bundle();
        let c = b.tangent_coords_total(eps, d_eps);
        central_difference(FD_GRADIENT_STEP, |t| {
            self.lagrangian(&b.retract_total(eps, &(&c * t)), m)
        })
    }

    /// `D₂L_d(ε, m)(δm)`.
    fn d2_lagrangian(&self, eps: &Point, m: &Point, d_m: &Tangent) -> Result<f64> {
        let base = &self.bundle().base;
        let c = base.tangent_coords(m, d_m);
        central_difference(FD_GRADIENT_STEP, |t| {
            self.lagrangian(eps, &base.retract(m, &(&c * t)))
        })
    }

    /// Vectors `δε` with `(δε, 0)` spanning `𝒟_{(ε, m)}`.
    fn var_basis(&self, eps: &Point, m: &Point) -> Result<Vec<Tangent>>;

    /// Residual whose zero set is the kinematic constraint `𝒟_d`.
    fn kin_residual(&self, eps: &Point, m: &Point) -> Result<DVector<f64>>;

    /// `𝒫((ε₀, m₁), (ε₁, m₂))(δε₁, 0) ∈ ker dφ(ε₀)`, for `δε₁` in 𝒟 at the
    /// second pair.
    fn chain_map(&self, prev: &PathPair, cur: &PathPair, d_eps1: &Tangent) -> Result<Tangent>;
}

pub(crate) fn central_difference(h: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    Ok((f(h)? - f(-h)?) / (2.0 * h))
}

/// A validated DLDPS: the number of equations matches `dim E`.
#[derive(Clone)]
pub struct DldpsSystem {
    model: Arc<dyn DldpsModel>,
}

impl fmt::Debug for DldpsSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DldpsSystem")
            .field("bundle", self.model.bundle())
            .field("var_dim", &self.model.var_dim())
            .field("kin_dim", &self.model.kin_dim())
            .finish()
    }
}

impl DldpsSystem {
    pub fn new(model: impl DldpsModel + 'static) -> Result<Self> {
        Self::from_arc(Arc::new(model))
    }

    pub fn from_arc(model: Arc<dyn DldpsModel>) -> Result<Self> {
        let (var, kin, total) = (model.var_dim(), model.kin_dim(), model.bundle().total_dim());
        if var + kin != total {
            return Err(Error::IllPosed { var, kin, total });
        }
        Ok(Self { model })
    }

    pub fn model(&self) -> &dyn DldpsModel {
        self.model.as_ref()
    }

    pub fn bundle(&self) -> &BundleSpec {
        self.model.bundle()
    }

    pub fn check_quad(&self, prev: &PathPair, cur: &PathPair) -> Result<()> {
        let gap = (self.bundle().phi(&cur.eps) - &prev.m_next).abs().max();
        if gap > COMPAT_TOL || gap.is_nan() {
            return Err(Error::IncompatibleQuad { gap });
        }
        Ok(())
    }

    /// `ν_d((ε₀,m₁),(ε₁,m₂))(δε₁)`.
    pub fn eval_nu_d(&self, prev: &PathPair, cur: &PathPair, d_eps1: &Tangent) -> Result<f64> {
        self.check_quad(prev, cur)?;
        self.nu_unchecked(prev, cur, d_eps1)
    }

    fn nu_unchecked(&self, prev: &PathPair, cur: &PathPair, d_eps1: &Tangent) -> Result<f64> {
        let m = self.model();
        let chained = m.chain_map(prev, cur, d_eps1)?;
        Ok(m.d1_lagrangian(&cur.eps, &cur.m_next, d_eps1)?
            + m.d2_lagrangian(&prev.eps, &prev.m_next, &self.bundle().dphi(d_eps1))?
            + m.d1_lagrangian(&prev.eps, &prev.m_next, &chained)?)
    }

    /// `ν_d` on each variational basis vector at `cur`.
    pub fn dynamic_residual(&self, prev: &PathPair, cur: &PathPair) -> Result<DVector<f64>> {
        self.check_quad(prev, cur)?;
        let basis = self.model.var_basis(&cur.eps, &cur.m_next)?;
        let vals = basis
            .iter()
            .map(|b| self.nu_unchecked(prev, cur, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(vals))
    }

    /// `s` dynamic entries followed by `c` kinematic entries.
    pub fn residual_vector(&self, prev: &PathPair, cur: &PathPair) -> Result<DVector<f64>> {
        let dynamic = self.dynamic_residual(prev, cur)?;
        let kin = self.model.kin_residual(&cur.eps, &cur.m_next)?;
        let mut out = DVector::zeros(dynamic.len() + kin.len());
        out.rows_mut(0, dynamic.len()).copy_from(&dynamic);
        out.rows_mut(dynamic.len(), kin.len()).copy_from(&kin);
        Ok(out)
    }
}
