//! Affine discrete connections on the trivial principal bundles used here,
//! and the reduction maps `Υ_{𝒜_d}` they induce.
//!
//! A connection is given by its form `𝒜_d(m₀, m₁) ∈ G`, which satisfies
//! `𝒜_d(g₀·m₀, g₁·m₁) = g₁ 𝒜_d(m₀, m₁) g₀⁻¹`. The horizontal space is its
//! zero set and the horizontal lift picks the unique point over a given
//! reduced point with `𝒜_d = e`. The domain is the whole product in every
//! instance below.

use std::fmt::Debug;

use nalgebra::{DVector, Matrix3};

use crate::dldps::{DiscretePath, PathPair, Point};
use crate::matgroup::So3;

pub trait LieGroup: Clone + Debug {
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    /// Max-norm distance in the ambient representation.
    fn distance(&self, other: &Self) -> f64;
}

impl LieGroup for So3 {
    fn compose(&self, other: &Self) -> Self {
        self * other
    }

    fn inverse(&self) -> Self {
        So3::inverse(self)
    }

    fn distance(&self, other: &Self) -> f64 {
        So3::distance(self, other)
    }
}

/// An element of the abelian group ℝᵏ.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation(pub DVector<f64>);

impl LieGroup for Translation {
    fn compose(&self, other: &Self) -> Self {
        Translation(&self.0 + &other.0)
    }

    fn inverse(&self) -> Self {
        Translation(-&self.0)
    }

    fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).abs().max()
    }
}

pub trait AffineDiscreteConnection {
    type Group: LieGroup;
    type Point: Clone;
    type Reduced;

    /// The left action `l_g` on the base of the principal bundle.
    fn act(&self, g: &Self::Group, m: &Self::Point) -> Self::Point;

    fn form(&self, m0: &Self::Point, m1: &Self::Point) -> Self::Group;

    /// `γ(m) = 𝒜_d(m, m)⁻¹`.
    fn level(&self, m: &Self::Point) -> Self::Group {
        self.form(m, m).inverse()
    }

    /// The unique `m₁` over `r₁` with `𝒜_d(m₀, m₁) = e`.
    fn hlift(&self, m0: &Self::Point, r1: &Self::Reduced) -> Self::Point;

    fn in_domain(&self, _m0: &Self::Point, _m1: &Self::Point) -> bool {
        true
    }
}

/// `|𝒜_d(g₀m₀, g₁m₁) − g₁ 𝒜_d(m₀, m₁) g₀⁻¹|`.
pub fn equivariance_defect<C: AffineDiscreteConnection>(
    conn: &C,
    g0: &C::Group,
    g1: &C::Group,
    m0: &C::Point,
    m1: &C::Point,
) -> f64 {
    let lhs = conn.form(&conn.act(g0, m0), &conn.act(g1, m1));
    let rhs = g1.compose(&conn.form(m0, m1)).compose(&g0.inverse());
    lhs.distance(&rhs)
}

/// The connections `𝒜^h(g₀, g₁) = g₁ h⁻¹ g₀⁻¹` on `SO(3) → {e}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalGroupConnection {
    pub h: So3,
}

pub fn canonical_group_connection(h: So3) -> CanonicalGroupConnection {
    CanonicalGroupConnection { h }
}

impl AffineDiscreteConnection for CanonicalGroupConnection {
    type Group = So3;
    type Point = So3;
    type Reduced = ();

    fn act(&self, g: &So3, m: &So3) -> So3 {
        g * m
    }

    fn form(&self, g0: &So3, g1: &So3) -> So3 {
        g1 * &self.h.inverse() * g0.inverse()
    }

    fn level(&self, g: &So3) -> So3 {
        g * &self.h * g.inverse()
    }

    fn hlift(&self, g0: &So3, _r1: &()) -> So3 {
        g0 * &self.h
    }
}

/// Translation connection on `ℝⁿ → ℝⁿ/ℝᵏ`, where ℝᵏ moves the coordinates
/// listed in `group_coords`. The form is the difference of those coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianTranslationConnection {
    n: usize,
    group_coords: Vec<usize>,
    reduced_coords: Vec<usize>,
}

pub fn abelian_translation_connection(n: usize, group_coords: &[usize]) -> AbelianTranslationConnection {
    let reduced_coords = (0..n).filter(|i| !group_coords.contains(i)).collect();
    AbelianTranslationConnection {
        n,
        group_coords: group_coords.to_vec(),
        reduced_coords,
    }
}

impl AbelianTranslationConnection {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn group_dim(&self) -> usize {
        self.group_coords.len()
    }

    /// The projection `ℝⁿ → ℝᵏ` onto the group directions.
    pub fn split(&self, m: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.group_coords.len(), self.group_coords.iter().map(|&i| m[i]))
    }

    /// Coordinates of the orbit `[m] ∈ ℝⁿ/ℝᵏ`.
    pub fn reduce(&self, m: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.reduced_coords.len(), self.reduced_coords.iter().map(|&i| m[i]))
    }
}

impl AffineDiscreteConnection for AbelianTranslationConnection {
    type Group = Translation;
    type Point = DVector<f64>;
    type Reduced = DVector<f64>;

    fn act(&self, g: &Translation, m: &DVector<f64>) -> DVector<f64> {
        let mut out = m.clone();
        for (k, &i) in self.group_coords.iter().enumerate() {
            out[i] += g.0[k];
        }
        out
    }

    fn form(&self, m0: &DVector<f64>, m1: &DVector<f64>) -> Translation {
        Translation(self.split(m1) - self.split(m0))
    }

    fn hlift(&self, m0: &DVector<f64>, r1: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.n);
        for (k, &i) in self.reduced_coords.iter().enumerate() {
            out[i] = r1[k];
        }
        for &i in &self.group_coords {
            out[i] = m0[i];
        }
        out
    }
}

/// A G-invariant map `C'(E) → C'(Ě)` with a section for lifting.
pub trait ReductionMap {
    type Full;
    type Reduced;
    type Seed;

    fn forward(&self, x: &Self::Full) -> Self::Reduced;

    /// The unique preimage of `r` whose starting point is `seed`.
    fn lift(&self, seed: &Self::Seed, r: &Self::Reduced) -> Self::Full;
}

/// Reduction of an LL system by `𝒜^h`, written in the η-model:
/// `(g₀, g₁) ↦ V = g₀⁻¹ g₁ h⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlUpsilon {
    pub h: Matrix3<f64>,
}

pub fn upsilon_ll(conn: &CanonicalGroupConnection) -> LlUpsilon {
    LlUpsilon { h: *conn.h.matrix() }
}

impl ReductionMap for LlUpsilon {
    type Full = (Matrix3<f64>, Matrix3<f64>);
    type Reduced = Matrix3<f64>;
    type Seed = Matrix3<f64>;

    fn forward(&self, (g0, g1): &Self::Full) -> Matrix3<f64> {
        g0.transpose() * g1 * self.h.transpose()
    }

    fn lift(&self, g0: &Matrix3<f64>, v: &Matrix3<f64>) -> Self::Full {
        (*g0, g0 * v * self.h)
    }
}

impl LlUpsilon {
    /// Reduced path `V_k` of the configurations `g_0, …, g_N`.
    pub fn project_path(&self, g: &[Matrix3<f64>]) -> Vec<Matrix3<f64>> {
        g.windows(2).map(|w| self.forward(&(w[0], w[1]))).collect()
    }

    /// `g_{k+1} = g_k V_k h`, starting from `g0`.
    pub fn lift_path(&self, g0: &Matrix3<f64>, v: &[Matrix3<f64>]) -> Vec<Matrix3<f64>> {
        let mut out = Vec::with_capacity(v.len() + 1);
        out.push(*g0);
        for vk in v {
            let next = self.lift(out.last().unwrap(), vk).1;
            out.push(next);
        }
        out
    }
}

/// `Υ_{𝒜_d}` for a translation connection on the base of a trivial bundle
/// `E = M × F → M` on which the group acts only on `M`.
///
/// With `E` points stored base-first, `((m₀, f₀), m₁)` maps to
/// `(([m₀], f₀, 𝒜_d(m₀, m₁)), [m₁])`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianUpsilon {
    pub conn: AbelianTranslationConnection,
    pub fiber_ambient: usize,
}

impl AbelianUpsilon {
    pub fn new(conn: AbelianTranslationConnection, fiber_ambient: usize) -> Self {
        Self { conn, fiber_ambient }
    }

    fn split_eps(&self, eps: &Point) -> (DVector<f64>, DVector<f64>) {
        let n = self.conn.dim();
        (eps.rows(0, n).into_owned(), eps.rows(n, self.fiber_ambient).into_owned())
    }

    /// `dΥ`; the map is affine in these coordinates, so this is `Υ` applied
    /// to the tangent vectors.
    pub fn forward_tangent(&self, d_eps: &Point, d_m: &Point) -> PathPair {
        self.forward(&PathPair::new(d_eps.clone(), d_m.clone()))
    }

    pub fn project_path(&self, path: &DiscretePath) -> DiscretePath {
        DiscretePath::new(path.pairs.iter().map(|p| self.forward(p)).collect())
    }

    /// Lifts a reduced path starting over `seed`.
    pub fn lift_path(&self, seed: &Point, reduced: &DiscretePath) -> DiscretePath {
        let mut m = seed.clone();
        let mut pairs = Vec::with_capacity(reduced.len());
        for r in &reduced.pairs {
            let pair = self.lift(&m, r);
            m = pair.m_next.clone();
            pairs.push(pair);
        }
        DiscretePath::new(pairs)
    }
}

impl ReductionMap for AbelianUpsilon {
    type Full = PathPair;
    type Reduced = PathPair;
    type Seed = Point;

    fn forward(&self, pair: &PathPair) -> PathPair {
        let (m0, f0) = self.split_eps(&pair.eps);
        let r0 = self.conn.reduce(&m0);
        let a = self.conn.form(&m0, &pair.m_next).0;
        let eps = DVector::from_iterator(
            r0.len() + f0.len() + a.len(),
            r0.iter().chain(f0.iter()).chain(a.iter()).copied(),
        );
        PathPair::new(eps, self.conn.reduce(&pair.m_next))
    }

    fn lift(&self, m0: &Point, r: &PathPair) -> PathPair {
        let nr = self.conn.dim() - self.conn.group_dim();
        let f0 = r.eps.rows(nr, self.fiber_ambient).into_owned();
        let a = r.eps.rows(nr + self.fiber_ambient, self.conn.group_dim()).into_owned();
        let m1 = self.conn.act(&Translation(a), &self.conn.hlift(m0, &r.m_next));
        let eps = DVector::from_iterator(m0.len() + f0.len(), m0.iter().chain(f0.iter()).copied());
        PathPair::new(eps, m1)
    }
}
