use std::sync::Arc;

use nalgebra::DVector;

use super::{BundleSpec, DldpsModel, DldpsSystem, PathPair, Point, Tangent};
use crate::error::{Error, Result};

pub type MapFn = Arc<dyn Fn(&Point) -> Result<Point> + Send + Sync>;
/// `(point, tangent) ↦ tangent` at the image point.
pub type TangentMapFn = Arc<dyn Fn(&Point, &Tangent) -> Result<Tangent> + Send + Sync>;

/// A bundle isomorphism `F: E → E'` covering `f: M → M'`, with inverses and
/// differentials. `total_diff` is evaluated at a point of `E`,
/// `total_inv_diff` at a point of `E'`; likewise for the base maps.
#[derive(Clone)]
pub struct BundleDiffeo {
    pub total: MapFn,
    pub total_inv: MapFn,
    pub total_diff: TangentMapFn,
    pub total_inv_diff: TangentMapFn,
    pub base: MapFn,
    pub base_inv: MapFn,
    pub base_diff: TangentMapFn,
    pub base_inv_diff: TangentMapFn,
}

impl BundleDiffeo {
    pub fn identity() -> Self {
        let id: MapFn = Arc::new(|p| Ok(p.clone()));
        let did: TangentMapFn = Arc::new(|_, v| Ok(v.clone()));
        Self {
            total: id.clone(),
            total_inv: id.clone(),
            total_diff: did.clone(),
            total_inv_diff: did.clone(),
            base: id.clone(),
            base_inv: id,
            base_diff: did.clone(),
            base_inv_diff: did,
        }
    }

    pub fn map_pair(&self, pair: &PathPair) -> Result<PathPair> {
        Ok(PathPair::new((self.total)(&pair.eps)?, (self.base)(&pair.m_next)?))
    }

    pub fn unmap_pair(&self, pair: &PathPair) -> Result<PathPair> {
        Ok(PathPair::new((self.total_inv)(&pair.eps)?, (self.base_inv)(&pair.m_next)?))
    }
}

/// Round-trip tolerance for the diffeomorphism check.
const ROUND_TRIP_TOL: f64 = 1e-12;

struct Transported {
    source: DldpsSystem,
    target: BundleSpec,
    diffeo: BundleDiffeo,
}

impl Transported {
    fn pull(&self, eps: &Point, m: &Point) -> Result<(Point, Point)> {
        Ok(((self.diffeo.total_inv)(eps)?, (self.diffeo.base_inv)(m)?))
    }
}

impl DldpsModel for Transported {
    fn bundle(&self) -> &BundleSpec {
        &self.target
    }

    fn var_dim(&self) -> usize {
        self.source.model().var_dim()
    }

    fn kin_dim(&self) -> usize {
        self.source.model().kin_dim()
    }

    fn lagrangian(&self, eps: &Point, m: &Point) -> Result<f64> {
        let (e, n) = self.pull(eps, m)?;
        self.source.model().lagrangian(&e, &n)
    }

    fn d1_lagrangian(&self, eps: &Point, m: &Point, d_eps: &Tangent) -> Result<f64> {
        let (e, n) = self.pull(eps, m)?;
        let de = (self.diffeo.total_inv_diff)(eps, d_eps)?;
        self.source.model().d1_lagrangian(&e, &n, &de)
    }

    fn d2_lagrangian(&self, eps: &Point, m: &Point, d_m: &Tangent) -> Result<f64> {
        let (e, n) = self.pull(eps, m)?;
        let dn = (self.diffeo.base_inv_diff)(m, d_m)?;
        self.source.model().d2_lagrangian(&e, &n, &dn)
    }

    fn var_basis(&self, eps: &Point, m: &Point) -> Result<Vec<Tangent>> {
        let (e, n) = self.pull(eps, m)?;
        self.source
            .model()
            .var_basis(&e, &n)?
            .iter()
            .map(|v| (self.diffeo.total_diff)(&e, v))
            .collect()
    }

    fn kin_residual(&self, eps: &Point, m: &Point) -> Result<DVector<f64>> {
        let (e, n) = self.pull(eps, m)?;
        self.source.model().kin_residual(&e, &n)
    }

    fn chain_map(&self, prev: &PathPair, cur: &PathPair, d_eps1: &Tangent) -> Result<Tangent> {
        let p = self.diffeo.unmap_pair(prev)?;
        let c = self.diffeo.unmap_pair(cur)?;
        let d = (self.diffeo.total_inv_diff)(&cur.eps, d_eps1)?;
        let chained = self.source.model().chain_map(&p, &c, &d)?;
        (self.diffeo.total_diff)(&p.eps, &chained)
    }
}

/// The system induced on `target` by a bundle isomorphism: the Lagrangian and
/// kinematic constraints are pulled back, the variational constraints are
/// pushed forward by `dF`, and `𝒫' = dF ∘ 𝒫 ∘ dF⁻¹`. Its section of motion
/// satisfies `ν'(F×f quad)(dF δ) = ν(quad)(δ)`.
///
/// `samples` are points of the source used to check that the maps are
/// mutually inverse.
pub fn transport_system(
    sys: &DldpsSystem,
    diffeo: BundleDiffeo,
    target: BundleSpec,
    samples: &[PathPair],
) -> Result<DldpsSystem> {
    if target.total_dim() != sys.bundle().total_dim() || target.base_dim() != sys.bundle().base_dim() {
        return Err(Error::Dimension {
            expected: sys.bundle().total_dim(),
            got: target.total_dim(),
        });
    }
    let mut worst: f64 = 0.0;
    for s in samples {
        let back = diffeo.unmap_pair(&diffeo.map_pair(s)?)?;
        worst = worst
            .max((back.eps - &s.eps).abs().max())
            .max((back.m_next - &s.m_next).abs().max());
    }
    if !(worst <= ROUND_TRIP_TOL) {
        return Err(Error::InconsistentDiffeo(worst));
    }
    DldpsSystem::new(Transported {
        source: sys.clone(),
        target,
        diffeo,
    })
}
