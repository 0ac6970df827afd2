//! Manifolds with explicit charts and globally trivialized bundles `E ≅ M × F`.
//!
//! Points and tangent vectors are stored in ambient coordinates. A point of
//! the total space is the base coordinates followed by the fiber coordinates.

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::DVector;

use crate::matgroup::{cay, hat, mat_to_vec, orthogonality_drift, polar_project, vec_to_mat, vee_unchecked};

pub type Point = DVector<f64>;
pub type Tangent = DVector<f64>;

/// An embedded manifold with a retraction-based chart around every point.
pub trait Manifold: Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn ambient_dim(&self) -> usize;

    /// Chart map around `p`; `retract(p, 0) == p`.
    fn retract(&self, p: &Point, coords: &DVector<f64>) -> Point;

    /// Derivative of the chart map at the origin.
    fn tangent_basis(&self, p: &Point) -> Vec<Tangent>;

    /// Chart coordinates of a tangent vector at `p` (inverse of `tangent_basis`).
    fn tangent_coords(&self, p: &Point, v: &Tangent) -> DVector<f64>;

    /// Distance of `p` from the manifold in ambient coordinates.
    fn drift(&self, _p: &Point) -> f64 {
        0.0
    }

    /// Closest point on the manifold.
    fn project(&self, p: &Point) -> Point {
        p.clone()
    }

    /// Initial guess for the point after `cur` given the one before it.
    fn extrapolate(&self, prev: &Point, cur: &Point) -> Point;
}

/// ℝⁿ with the identity chart.
#[derive(Debug, Clone, Copy)]
pub struct Euclidean(pub usize);

impl Manifold for Euclidean {
    fn dim(&self) -> usize {
        self.0
    }

    fn ambient_dim(&self) -> usize {
        self.0
    }

    fn retract(&self, p: &Point, coords: &DVector<f64>) -> Point {
        p + coords
    }

    fn tangent_basis(&self, _p: &Point) -> Vec<Tangent> {
        (0..self.0).map(|i| DVector::from_fn(self.0, |j, _| f64::from(u8::from(i == j)))).collect()
    }

    fn tangent_coords(&self, _p: &Point, v: &Tangent) -> DVector<f64> {
        v.clone()
    }

    fn extrapolate(&self, prev: &Point, cur: &Point) -> Point {
        cur * 2.0 - prev
    }
}

/// A single point; the base of bundles such as `G → {e}`.
#[derive(Debug, Clone, Copy)]
pub struct PointManifold;

impl Manifold for PointManifold {
    fn dim(&self) -> usize {
        0
    }

    fn ambient_dim(&self) -> usize {
        0
    }

    fn retract(&self, p: &Point, _coords: &DVector<f64>) -> Point {
        p.clone()
    }

    fn tangent_basis(&self, _p: &Point) -> Vec<Tangent> {
        Vec::new()
    }

    fn tangent_coords(&self, _p: &Point, _v: &Tangent) -> DVector<f64> {
        DVector::zeros(0)
    }

    fn extrapolate(&self, _prev: &Point, cur: &Point) -> Point {
        cur.clone()
    }
}

/// SO(3) embedded in ℝ⁹ (row-major), with the left Cayley chart
/// `c ↦ g·cay(ĉ)`.
#[derive(Debug, Clone, Copy)]
pub struct So3Manifold;

impl Manifold for So3Manifold {
    fn dim(&self) -> usize {
        3
    }

    fn ambient_dim(&self) -> usize {
        9
    }

    fn retract(&self, p: &Point, coords: &DVector<f64>) -> Point {
        let g = vec_to_mat(p.as_slice());
        let c = nalgebra::Vector3::new(coords[0], coords[1], coords[2]);
        mat_to_vec(&(g * cay(&c)))
    }

    fn tangent_basis(&self, p: &Point) -> Vec<Tangent> {
        let g = vec_to_mat(p.as_slice());
        [nalgebra::Vector3::x(), nalgebra::Vector3::y(), nalgebra::Vector3::z()]
            .iter()
            .map(|e| mat_to_vec(&(g * hat(e))))
            .collect()
    }

    fn tangent_coords(&self, p: &Point, v: &Tangent) -> DVector<f64> {
        let g = vec_to_mat(p.as_slice());
        let c = vee_unchecked(&(g.transpose() * vec_to_mat(v.as_slice())));
        DVector::from_column_slice(c.as_slice())
    }

    fn drift(&self, p: &Point) -> f64 {
        orthogonality_drift(&vec_to_mat(p.as_slice()))
    }

    fn project(&self, p: &Point) -> Point {
        mat_to_vec(&polar_project(&vec_to_mat(p.as_slice())))
    }

    fn extrapolate(&self, prev: &Point, cur: &Point) -> Point {
        let (a, b) = (vec_to_mat(prev.as_slice()), vec_to_mat(cur.as_slice()));
        mat_to_vec(&(b * a.transpose() * b))
    }
}

/// A globally trivialized fiber bundle `φ: E = M × F → M`.
#[derive(Debug, Clone)]
pub struct BundleSpec {
    pub base: Arc<dyn Manifold>,
    pub fiber: Arc<dyn Manifold>,
}

impl BundleSpec {
    pub fn new(base: impl Manifold + 'static, fiber: impl Manifold + 'static) -> Self {
        Self {
            base: Arc::new(base),
            fiber: Arc::new(fiber),
        }
    }

    /// `id_M: M → M`.
    pub fn identity(base: impl Manifold + 'static) -> Self {
        Self::new(base, PointManifold)
    }

    /// `F → {point}`.
    pub fn over_point(fiber: impl Manifold + 'static) -> Self {
        Self::new(PointManifold, fiber)
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber.dim()
    }

    pub fn total_dim(&self) -> usize {
        self.base.dim() + self.fiber.dim()
    }

    pub fn total_ambient_dim(&self) -> usize {
        self.base.ambient_dim() + self.fiber.ambient_dim()
    }

    /// `φ(ε)`.
    pub fn phi(&self, eps: &Point) -> Point {
        eps.rows(0, self.base.ambient_dim()).into_owned()
    }

    /// `dφ(ε)(δε)`; the projection is linear in these coordinates.
    pub fn dphi(&self, d_eps: &Tangent) -> Tangent {
        self.phi(d_eps)
    }

    pub fn fiber_part(&self, eps: &Point) -> Point {
        eps.rows(self.base.ambient_dim(), self.fiber.ambient_dim()).into_owned()
    }

    pub fn join(&self, base: &Point, fiber: &Point) -> Point {
        let mut out = DVector::zeros(self.total_ambient_dim());
        out.rows_mut(0, base.len()).copy_from(base);
        out.rows_mut(base.len(), fiber.len()).copy_from(fiber);
        out
    }

    /// Chart of E: base coordinates followed by fiber coordinates.
    pub fn retract_total(&self, eps: &Point, coords: &DVector<f64>) -> Point {
        let nb = self.base.dim();
        let base = self.base.retract(&self.phi(eps), &coords.rows(0, nb).into_owned());
        let fiber = self
            .fiber
            .retract(&self.fiber_part(eps), &coords.rows(nb, self.fiber.dim()).into_owned());
        self.join(&base, &fiber)
    }

    pub fn tangent_coords_total(&self, eps: &Point, v: &Tangent) -> DVector<f64> {
        let b = self.base.tangent_coords(&self.phi(eps), &self.phi(v));
        let f = self.fiber.tangent_coords(&self.fiber_part(eps), &self.fiber_part(v));
        let mut out = DVector::zeros(b.len() + f.len());
        out.rows_mut(0, b.len()).copy_from(&b);
        out.rows_mut(b.len(), f.len()).copy_from(&f);
        out
    }

    /// Tangent basis of E: base directions then fiber (vertical) directions.
    pub fn tangent_basis_total(&self, eps: &Point) -> Vec<Tangent> {
        let (m, f) = (self.phi(eps), self.fiber_part(eps));
        let zb = DVector::zeros(self.base.ambient_dim());
        let zf = DVector::zeros(self.fiber.ambient_dim());
        let mut out: Vec<Tangent> = self.base.tangent_basis(&m).iter().map(|b| self.join(b, &zf)).collect();
        out.extend(self.fiber.tangent_basis(&f).iter().map(|v| self.join(&zb, v)));
        out
    }

    pub fn drift_total(&self, eps: &Point) -> f64 {
        self.base.drift(&self.phi(eps)).max(self.fiber.drift(&self.fiber_part(eps)))
    }

    pub fn project_total(&self, eps: &Point) -> Point {
        self.join(
            &self.base.project(&self.phi(eps)),
            &self.fiber.project(&self.fiber_part(eps)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::cay;
    use nalgebra::Vector3;

    fn so3_point() -> Point {
        mat_to_vec(&cay(&Vector3::new(0.3, -0.7, 0.2)))
    }

    #[test]
    fn retraction_at_zero_is_identity() {
        let p = so3_point();
        assert_eq!(So3Manifold.retract(&p, &DVector::zeros(3)), p);
        let q = DVector::from_vec(vec![1.0, 2.0]);
        assert_eq!(Euclidean(2).retract(&q, &DVector::zeros(2)), q);
    }

    #[test]
    fn retracted_points_stay_on_so3() {
        let p = so3_point();
        for c in [[1e-2, 0.0, 0.0], [-5e-3, 5e-3, 5e-3], [0.0, 0.0, -1e-2]] {
            let q = So3Manifold.retract(&p, &DVector::from_row_slice(&c));
            assert!(So3Manifold.drift(&q) <= 1e-12);
        }
    }

    #[test]
    fn tangent_coords_invert_basis() {
        let p = so3_point();
        let basis = So3Manifold.tangent_basis(&p);
        let v = &basis[0] * 0.5 - &basis[2] * 2.0;
        let c = So3Manifold.tangent_coords(&p, &v);
        assert!((c - DVector::from_row_slice(&[0.5, 0.0, -2.0])).abs().max() < 1e-14);
    }

    #[test]
    fn trivial_bundle_layout() {
        let b = BundleSpec::new(Euclidean(2), Euclidean(1));
        let eps = DVector::from_row_slice(&[1.0, 2.0, 3.0]);
        assert_eq!(b.phi(&eps).as_slice(), &[1.0, 2.0]);
        assert_eq!(b.fiber_part(&eps).as_slice(), &[3.0]);
        assert_eq!(b.join(&b.phi(&eps), &b.fiber_part(&eps)), eps);
        assert_eq!(b.total_dim(), 3);
        let moved = b.retract_total(&eps, &DVector::from_row_slice(&[0.5, 0.0, -1.0]));
        assert_eq!(moved.as_slice(), &[1.5, 2.0, 2.0]);
    }

    #[test]
    fn so3_extrapolation_repeats_increment() {
        let a = cay(&Vector3::new(0.1, 0.0, 0.0));
        let w = cay(&Vector3::new(0.0, 0.2, 0.0));
        let b = a * w;
        let next = vec_to_mat(So3Manifold.extrapolate(&mat_to_vec(&a), &mat_to_vec(&b)).as_slice());
        assert!((next - b * w).abs().max() < 1e-15);
    }
}
