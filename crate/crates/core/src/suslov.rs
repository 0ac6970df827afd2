//! The discrete Suslov rigid body on SO(3).
//!
//! `L_d(g₀, g₁) = −tr(g₁ 𝕁 g₀ᵗ)` with mass tensor `𝕁`, constraint subspace
//! `𝔡 = span{ê₁, ê₂}` (no rotation about the body's third axis) and discrete
//! constraint set `𝒮_d = cay(𝔡)`.

use nalgebra::{Matrix3, Vector3};

use crate::dldps::DldpsSystem;
use crate::error::{Error, Result};
use crate::ll_reduce::{build_m_ll, build_m_s, reduce_to_eta, LlSystemSpec, MomentumValue, ReducedLagrangian};
use crate::matgroup::{cay_inv, hat, ConstraintSubspace};

/// Inertia tensor entries in a body frame where `I₁₂ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaParams {
    pub i11: f64,
    pub i22: f64,
    pub i33: f64,
    pub i13: f64,
    pub i23: f64,
}

impl InertiaParams {
    pub fn new(i11: f64, i22: f64, i33: f64, i13: f64, i23: f64) -> Result<Self> {
        let p = Self { i11, i22, i33, i13, i23 };
        p.validate()?;
        Ok(p)
    }

    pub fn diagonal(i11: f64, i22: f64, i33: f64) -> Result<Self> {
        Self::new(i11, i22, i33, 0.0, 0.0)
    }

    /// Accepts a full tensor; it must be symmetric with `I₁₂ = 0`.
    pub fn from_tensor(m: &Matrix3<f64>) -> Result<Self> {
        let asym = (m - m.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::InvalidInertia(format!("tensor is not symmetric (defect {asym:e})")));
        }
        if m[(0, 1)] != 0.0 {
            return Err(Error::InvalidInertia(format!("I12 = {} must be zero", m[(0, 1)])));
        }
        Self::new(m[(0, 0)], m[(1, 1)], m[(2, 2)], m[(0, 2)], m[(1, 2)])
    }

    /// `[I₁₁, I₂₂, I₃₃, I₁₃, I₂₃]`.
    pub fn from_array(a: [f64; 5]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn tensor(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.i11, 0.0, self.i13, //
            0.0, self.i22, self.i23, //
            self.i13, self.i23, self.i33,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.tensor();
        if t.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInertia("non-finite entry".into()));
        }
        let min_eig = t.symmetric_eigenvalues().min();
        if !(min_eig > 0.0) {
            return Err(Error::InvalidInertia(format!(
                "tensor is not positive definite (smallest eigenvalue {min_eig})"
            )));
        }
        Ok(())
    }
}

/// The mass tensor `𝕁` associated with the inertia tensor.
pub fn mass_tensor(i: &InertiaParams) -> Result<Matrix3<f64>> {
    i.validate()?;
    Ok(Matrix3::new(
        0.5 * (i.i22 + i.i33 - i.i11),
        0.0,
        -i.i13,
        0.0,
        0.5 * (i.i11 + i.i33 - i.i22),
        -i.i23,
        -i.i13,
        -i.i23,
        0.5 * (i.i11 + i.i22 - i.i33),
    ))
}

/// `ℓ_d(W) = −tr(W𝕁)` with closed-form differential and Legendre transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuslovLagrangian {
    pub j: Matrix3<f64>,
}

impl ReducedLagrangian for SuslovLagrangian {
    fn value(&self, w: &Matrix3<f64>) -> f64 {
        -(w * self.j).trace()
    }

    fn differential(&self, _w: &Matrix3<f64>, dw: &Matrix3<f64>) -> f64 {
        -(dw * self.j).trace()
    }

    fn legendre(&self, w: &Matrix3<f64>) -> Matrix3<f64> {
        w * self.j - self.j * w.transpose()
    }

    fn legendre_differential(&self, _w: &Matrix3<f64>, dw: &Matrix3<f64>) -> Matrix3<f64> {
        dw * self.j - self.j * dw.transpose()
    }
}

pub fn suslov_lagrangian(j: &Matrix3<f64>, g0: &Matrix3<f64>, g1: &Matrix3<f64>) -> f64 {
    -(g1 * j * g0.transpose()).trace()
}

/// `D₁L_d(g₀, g₁)(g₀ω̂)`.
pub fn suslov_d1(j: &Matrix3<f64>, g0: &Matrix3<f64>, g1: &Matrix3<f64>, omega: &Vector3<f64>) -> f64 {
    -(g1 * j * hat(omega).transpose() * g0.transpose()).trace()
}

/// `D₂L_d(g₀, g₁)(g₁ω̂)`.
pub fn suslov_d2(j: &Matrix3<f64>, g0: &Matrix3<f64>, g1: &Matrix3<f64>, omega: &Vector3<f64>) -> f64 {
    -(g1 * hat(omega) * j * g0.transpose()).trace()
}

/// Third component of `cay⁻¹(W)`; it vanishes on `𝒮_d`.
pub fn sd_residual(w: &Matrix3<f64>) -> Result<f64> {
    Ok(cay_inv(w)?[2])
}

pub fn suslov_subspace() -> ConstraintSubspace {
    ConstraintSubspace::new(&[Vector3::x(), Vector3::y()]).expect("e1, e2 are independent")
}

pub fn suslov_spec(i: &InertiaParams) -> Result<LlSystemSpec> {
    Ok(LlSystemSpec::new(SuslovLagrangian { j: mass_tensor(i)? }, suslov_subspace()))
}

pub fn suslov_legendre(j: &Matrix3<f64>, w: &Matrix3<f64>) -> MomentumValue {
    MomentumValue::new(&(w * j - j * w.transpose()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuslovLevel {
    /// `id_G: G → G`, pairs `(g_k, g_{k+1})`.
    Full,
    /// `G → {e}`, points `W_k`.
    Eta,
    /// `𝔤* → {0}`, points `vee(p_k)`.
    Momentum,
}

pub fn build_suslov(level: SuslovLevel, i: &InertiaParams) -> Result<DldpsSystem> {
    let spec = suslov_spec(i)?;
    match level {
        SuslovLevel::Full => build_m_ll(&spec),
        SuslovLevel::Eta => reduce_to_eta(&spec),
        SuslovLevel::Momentum => build_m_s(&spec),
    }
}

/// Default test data: `I = diag(1, 2, 3)`.
pub fn default_inertia() -> InertiaParams {
    InertiaParams::diagonal(1.0, 2.0, 3.0).expect("valid")
}

/// Default initial body increment `cay(hat(0.2, 0.1, 0))`.
pub fn default_w0() -> Matrix3<f64> {
    crate::matgroup::cay(&Vector3::new(0.2, 0.1, 0.0))
}
