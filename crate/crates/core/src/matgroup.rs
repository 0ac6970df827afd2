//! Matrix Lie group kernel for SO(3) and the abelian translation groups.
//!
//! The dual of 𝔰𝔬(3) is identified with 𝔰𝔬(3) itself through the trace
//! pairing `⟨A, B⟩ = ½ tr(A Bᵀ)`, so covectors are stored as skew matrices.
//! On skew matrices this pairing is the Euclidean dot product of the `vee`
//! images.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{DVector, Matrix3, Vector3};

use crate::error::{Error, Result};

/// Default orthogonality tolerance for [`So3::new`].
pub const ORTHO_TOL: f64 = 1e-10;

/// Tolerance on the symmetric part accepted by [`vee`].
pub const SKEW_TOL: f64 = 1e-12;

/// Rotations with angle above `π − CAYLEY_MARGIN` are outside the Cayley chart.
pub const CAYLEY_MARGIN: f64 = 1e-6;

pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

pub fn vee(s: &Matrix3<f64>) -> Result<Vector3<f64>> {
    let sym = (s + s.transpose()).abs().max() * 0.5;
    if sym > SKEW_TOL * s.abs().max().max(1.0) {
        return Err(Error::NotSkew(sym));
    }
    Ok(vee_unchecked(s))
}

/// `vee` of the skew part of `s`, with no check.
pub fn vee_unchecked(s: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * (s[(2, 1)] - s[(1, 2)]),
        0.5 * (s[(0, 2)] - s[(2, 0)]),
        0.5 * (s[(1, 0)] - s[(0, 1)]),
    )
}

pub fn skew_part(m: &Matrix3<f64>) -> Matrix3<f64> {
    (m - m.transpose()) * 0.5
}

/// Cayley transform `(I + ω̂/2)(I − ω̂/2)⁻¹`.
pub fn cay(omega: &Vector3<f64>) -> Matrix3<f64> {
    let half = hat(omega) * 0.5;
    let id = Matrix3::identity();
    // I − ω̂/2 has eigenvalues 1 and 1 ± i|ω|/2, never singular.
    let inv = (id - half).try_inverse().expect("I - skew/2 is always invertible");
    (id + half) * inv
}

/// Inverse Cayley transform `2(W − I)(W + I)⁻¹`, defined for rotation angles
/// strictly inside `(−π, π)`.
pub fn cay_inv(w: &Matrix3<f64>) -> Result<Vector3<f64>> {
    let angle = rotation_angle(w);
    if angle > PI - CAYLEY_MARGIN {
        return Err(Error::AngleAtPi { angle });
    }
    let id = Matrix3::identity();
    let inv = (w + id)
        .try_inverse()
        .ok_or(Error::AngleAtPi { angle })?;
    Ok(vee_unchecked(&((w - id) * inv * 2.0)))
}

/// Rotation angle in `[0, π]`.
pub fn rotation_angle(w: &Matrix3<f64>) -> f64 {
    let s = vee_unchecked(w).norm();
    let c = 0.5 * (w.trace() - 1.0);
    s.atan2(c)
}

pub fn trace_pairing(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    0.5 * (a * b.transpose()).trace()
}

/// Coadjoint action `Ad*_W p`, i.e. the skew part of `Wᵀ p W`.
pub fn ad_star(w: &Matrix3<f64>, p: &Matrix3<f64>) -> Matrix3<f64> {
    skew_part(&(w.transpose() * p * w))
}

/// Nearest rotation in Frobenius norm (polar factor).
pub fn polar_project(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut r = u * vt;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * vt;
    }
    r
}

/// Largest entry of `W Wᵀ − I` together with `|det W − 1|`.
pub fn orthogonality_drift(w: &Matrix3<f64>) -> f64 {
    let e = (w * w.transpose() - Matrix3::identity()).abs().max();
    e.max((w.determinant() - 1.0).abs())
}

/// Rotation by `angle` about the unit vector `axis` (Rodrigues).
pub fn axis_angle(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = hat(&axis.normalize());
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// Row-major flattening used as ambient coordinates of SO(3) points.
pub fn mat_to_vec(m: &Matrix3<f64>) -> DVector<f64> {
    DVector::from_iterator(9, (0..3).flat_map(|i| (0..3).map(move |j| m[(i, j)])))
}

pub fn vec_to_mat(v: &[f64]) -> Matrix3<f64> {
    Matrix3::from_row_slice(&v[..9])
}

/// A point of SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3(Matrix3<f64>);

impl So3 {
    pub fn new(mat: Matrix3<f64>) -> Result<Self> {
        Self::with_tolerance(mat, ORTHO_TOL)
    }

    pub fn with_tolerance(mat: Matrix3<f64>, tol: f64) -> Result<Self> {
        let drift = orthogonality_drift(&mat);
        if drift > tol {
            return Err(Error::NotOrthogonal(drift));
        }
        Ok(So3(mat))
    }

    pub fn identity() -> Self {
        So3(Matrix3::identity())
    }

    pub fn cay(omega: &Vector3<f64>) -> Self {
        So3(cay(omega))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        So3(self.0.transpose())
    }

    pub fn distance(&self, other: &So3) -> f64 {
        (self.0 - other.0).abs().max()
    }
}

impl Mul for So3 {
    type Output = So3;

    fn mul(self, rhs: So3) -> So3 {
        So3(self.0 * rhs.0)
    }
}

impl Mul<&So3> for &So3 {
    type Output = So3;

    fn mul(self, rhs: &So3) -> So3 {
        So3(self.0 * rhs.0)
    }
}

/// A subspace 𝔡 ⊂ 𝔰𝔬(3) together with its trace-pairing complement.
///
/// Both bases are orthonormal under the pairing, stored as `vee` vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSubspace {
    basis: Vec<Vector3<f64>>,
    annihilator: Vec<Vector3<f64>>,
}

impl ConstraintSubspace {
    /// Orthonormalizes `spanning` and completes it to a basis of 𝔰𝔬(3).
    /// Fails if the vectors are linearly dependent.
    pub fn new(spanning: &[Vector3<f64>]) -> Result<Self> {
        let mut basis: Vec<Vector3<f64>> = Vec::new();
        for v in spanning {
            let r = gram_schmidt(&basis, v);
            if r.norm() < 1e-10 * v.norm().max(1.0) {
                return Err(Error::Dimension {
                    expected: basis.len() + 1,
                    got: basis.len(),
                });
            }
            basis.push(r.normalize());
        }
        let mut all = basis.clone();
        let mut annihilator = Vec::new();
        for e in [Vector3::x(), Vector3::y(), Vector3::z()] {
            if all.len() == 3 {
                break;
            }
            let r = gram_schmidt(&all, &e);
            if r.norm() > 1e-6 {
                let r = r.normalize();
                all.push(r);
                annihilator.push(r);
            }
        }
        Ok(Self { basis, annihilator })
    }

    pub fn basis(&self) -> &[Vector3<f64>] {
        &self.basis
    }

    pub fn annihilator_basis(&self) -> &[Vector3<f64>] {
        &self.annihilator
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Pairing coefficients of the skew matrix `a` against the basis.
    pub fn project_onto(&self, a: &Matrix3<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.basis.len(),
            self.basis.iter().map(|b| trace_pairing(a, &hat(b))),
        )
    }

    /// Pairing coefficients against the annihilator basis.
    pub fn project_annihilator(&self, a: &Matrix3<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.annihilator.len(),
            self.annihilator.iter().map(|b| trace_pairing(a, &hat(b))),
        )
    }

    /// The element `Σ cᵢ bᵢ` of 𝔡 as a `vee` vector.
    pub fn combine(&self, coeffs: &[f64]) -> Vector3<f64> {
        self.basis
            .iter()
            .zip(coeffs)
            .fold(Vector3::zeros(), |acc, (b, c)| acc + b * *c)
    }
}

fn gram_schmidt(basis: &[Vector3<f64>], v: &Vector3<f64>) -> Vector3<f64> {
    let mut r = *v;
    for _ in 0..2 {
        for b in basis {
            r -= b * b.dot(&r);
        }
    }
    r
}
