//! Coordinate-level exterior algebra for the Euclidean plane and for the
//! Minkowski space M²·¹ = (ℝ³, ⟨·,·⟩₂,₁).
//!
//! Everything is expressed in one fixed orthonormal basis (e₁, e₂, e₃) with
//! ⟨e₁,e₁⟩ = ⟨e₂,e₂⟩ = 1 and ⟨e₃,e₃⟩ = −1. Bivector components are stored in
//! the order (e₁∧e₂, e₁∧e₃, e₂∧e₃); on that basis the induced inner product
//! has signature (1,2). The Hodge-star tables are hard-coded so that every
//! sign is fixed once, here, and nowhere else.
//!
//! Covectors are carried by the same [`MinkVec3`] storage: a covector α is
//! represented by its components (α₁, α₂, α₃) on the dual basis (e¹, e², e³).
//! The musical isomorphisms [`flat`] and [`sharp`] are then the sign flip of
//! the third component. Interior products pair components directly (no metric
//! involved), so the same formulas serve vectors against forms.

use crate::fmath;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A displacement (or point) of the Euclidean plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct EucVec2 {
    pub u1: f64,
    pub u2: f64,
}

/// A vector of M²·¹: (x, y, τ) with the (2,1) inner product.
///
/// Also used for covectors, stored by dual-basis components (see module docs).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct MinkVec3 {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

/// A bivector (or 2-form) of M²·¹ on the basis (e₁∧e₂, e₁∧e₃, e₂∧e₃).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct MinkBivec3 {
    pub c12: f64,
    pub c13: f64,
    pub c23: f64,
}

/// A trivector (or 3-form) of M²·¹: multiple of ω = e₁∧e₂∧e₃, with ‖ω‖² = −1.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct MinkTrivec3 {
    pub c123: f64,
}

/// Error from [`interior_product_solve`]: the two covectors are (numerically)
/// linearly dependent, so their wedge vanishes and the solution space of
/// i_u(α∧β) = 0 is not a line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DependentForms;

impl core::fmt::Display for DependentForms {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("covectors are linearly dependent (wedge below tolerance)")
    }
}

impl core::error::Error for DependentForms {}

// ---------------------------------------------------------------------------
// EucVec2
// ---------------------------------------------------------------------------

impl EucVec2 {
    pub const ZERO: Self = Self { u1: 0.0, u2: 0.0 };

    #[inline]
    pub fn new(u1: f64, u2: f64) -> Self {
        Self { u1, u2 }
    }

    /// Euclidean inner product.
    #[inline]
    pub fn dot(self, v: Self) -> f64 {
        self.u1 * v.u1 + self.u2 * v.u2
    }

    /// Squared Euclidean norm.
    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm.
    #[inline]
    pub fn norm(self) -> f64 {
        fmath::hypot(self.u1, self.u2)
    }

    /// Distance to another point.
    #[inline]
    pub fn dist(self, v: Self) -> f64 {
        fmath::hypot(self.u1 - v.u1, self.u2 - v.u2)
    }

    /// Counter-clockwise quarter turn; equals the Euclidean Hodge star of a
    /// plane vector ([`euc_star_vec`]).
    #[inline]
    pub fn rot90(self) -> Self {
        Self { u1: -self.u2, u2: self.u1 }
    }

    /// Lift into M²·¹ with prescribed third component.
    #[inline]
    pub fn lift(self, u3: f64) -> MinkVec3 {
        MinkVec3 { u1: self.u1, u2: self.u2, u3 }
    }
}

impl core::ops::Add for EucVec2 {
    type Output = Self;
    #[inline]
    fn add(self, v: Self) -> Self {
        Self { u1: self.u1 + v.u1, u2: self.u2 + v.u2 }
    }
}

impl core::ops::Sub for EucVec2 {
    type Output = Self;
    #[inline]
    fn sub(self, v: Self) -> Self {
        Self { u1: self.u1 - v.u1, u2: self.u2 - v.u2 }
    }
}

impl core::ops::Neg for EucVec2 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { u1: -self.u1, u2: -self.u2 }
    }
}

impl core::ops::Mul<f64> for EucVec2 {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self { u1: self.u1 * s, u2: self.u2 * s }
    }
}

impl core::ops::Mul<EucVec2> for f64 {
    type Output = EucVec2;
    #[inline]
    fn mul(self, v: EucVec2) -> EucVec2 {
        v * self
    }
}

// ---------------------------------------------------------------------------
// MinkVec3
// ---------------------------------------------------------------------------

impl MinkVec3 {
    pub const ZERO: Self = Self { u1: 0.0, u2: 0.0, u3: 0.0 };
    pub const E1: Self = Self { u1: 1.0, u2: 0.0, u3: 0.0 };
    pub const E2: Self = Self { u1: 0.0, u2: 1.0, u3: 0.0 };
    pub const E3: Self = Self { u1: 0.0, u2: 0.0, u3: 1.0 };

    #[inline]
    pub fn new(u1: f64, u2: f64, u3: f64) -> Self {
        Self { u1, u2, u3 }
    }

    /// Spatial part (drop the third component).
    #[inline]
    pub fn spatial(self) -> EucVec2 {
        EucVec2 { u1: self.u1, u2: self.u2 }
    }

    /// Minkowski squared norm ⟨u,u⟩ (any sign).
    #[inline]
    pub fn norm2(self) -> f64 {
        mink_inner(self, self)
    }

    /// Euclidean norm of the component triple (used only for tolerances).
    #[inline]
    pub fn euc_norm(self) -> f64 {
        fmath::sqrt(self.u1 * self.u1 + self.u2 * self.u2 + self.u3 * self.u3)
    }
}

impl core::ops::Add for MinkVec3 {
    type Output = Self;
    #[inline]
    fn add(self, v: Self) -> Self {
        Self { u1: self.u1 + v.u1, u2: self.u2 + v.u2, u3: self.u3 + v.u3 }
    }
}

impl core::ops::Sub for MinkVec3 {
    type Output = Self;
    #[inline]
    fn sub(self, v: Self) -> Self {
        Self { u1: self.u1 - v.u1, u2: self.u2 - v.u2, u3: self.u3 - v.u3 }
    }
}

impl core::ops::Neg for MinkVec3 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { u1: -self.u1, u2: -self.u2, u3: -self.u3 }
    }
}

impl core::ops::Mul<f64> for MinkVec3 {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self { u1: self.u1 * s, u2: self.u2 * s, u3: self.u3 * s }
    }
}

impl core::ops::Mul<MinkVec3> for f64 {
    type Output = MinkVec3;
    #[inline]
    fn mul(self, v: MinkVec3) -> MinkVec3 {
        v * self
    }
}

impl core::ops::Neg for MinkBivec3 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { c12: -self.c12, c13: -self.c13, c23: -self.c23 }
    }
}

impl core::ops::Add for MinkBivec3 {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        Self { c12: self.c12 + b.c12, c13: self.c13 + b.c13, c23: self.c23 + b.c23 }
    }
}

impl core::ops::Mul<f64> for MinkBivec3 {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self { c12: self.c12 * s, c13: self.c13 * s, c23: self.c23 * s }
    }
}

impl MinkBivec3 {
    #[inline]
    pub fn new(c12: f64, c13: f64, c23: f64) -> Self {
        Self { c12, c13, c23 }
    }

    /// Euclidean norm of the component triple (used only for tolerances).
    #[inline]
    pub fn euc_norm(self) -> f64 {
        fmath::sqrt(self.c12 * self.c12 + self.c13 * self.c13 + self.c23 * self.c23)
    }
}

impl MinkTrivec3 {
    #[inline]
    pub fn new(c123: f64) -> Self {
        Self { c123 }
    }
}

// ---------------------------------------------------------------------------
// Euclidean-plane operations
// ---------------------------------------------------------------------------

/// Wedge of two plane vectors: the coefficient of e₁∧e₂, i.e. det[u v].
#[inline]
pub fn wedge2(u: EucVec2, v: EucVec2) -> f64 {
    u.u1 * v.u2 - u.u2 * v.u1
}

/// Euclidean Hodge star of a scalar (n = 2): ∗1 = e₁∧e₂, returned as the
/// bivector coefficient.
#[inline]
pub fn euc_star_scalar(s: f64) -> f64 {
    s
}

/// Euclidean Hodge star of a plane vector: ∗e₁ = e₂, ∗e₂ = −e₁ (a CCW
/// quarter turn).
#[inline]
pub fn euc_star_vec(u: EucVec2) -> EucVec2 {
    u.rot90()
}

/// Euclidean Hodge star of a plane bivector (coefficient of e₁∧e₂): ∗(e₁∧e₂) = 1.
#[inline]
pub fn euc_star_bivec(c: f64) -> f64 {
    c
}

// ---------------------------------------------------------------------------
// Minkowski inner products and wedges
// ---------------------------------------------------------------------------

/// The (2,1) inner product: u₁v₁ + u₂v₂ − u₃v₃.
#[inline]
pub fn mink_inner(u: MinkVec3, v: MinkVec3) -> f64 {
    u.u1 * v.u1 + u.u2 * v.u2 - u.u3 * v.u3
}

/// Induced inner product on bivectors; the basis (e₁∧e₂, e₁∧e₃, e₂∧e₃) is
/// orthogonal with signature (1,2).
#[inline]
pub fn mink_inner_bivec(a: MinkBivec3, b: MinkBivec3) -> f64 {
    a.c12 * b.c12 - a.c13 * b.c13 - a.c23 * b.c23
}

/// Induced inner product on trivectors: ‖ω‖² = −1.
#[inline]
pub fn mink_inner_trivec(a: MinkTrivec3, b: MinkTrivec3) -> f64 {
    -a.c123 * b.c123
}

/// Wedge of two vectors of M²·¹ (also valid for covector components).
#[inline]
pub fn mink_wedge(u: MinkVec3, v: MinkVec3) -> MinkBivec3 {
    MinkBivec3 {
        c12: u.u1 * v.u2 - u.u2 * v.u1,
        c13: u.u1 * v.u3 - u.u3 * v.u1,
        c23: u.u2 * v.u3 - u.u3 * v.u2,
    }
}

/// Wedge of a bivector with a vector: the coefficient of ω.
#[inline]
pub fn wedge_bivec_vec(b: MinkBivec3, w: MinkVec3) -> MinkTrivec3 {
    MinkTrivec3 { c123: b.c12 * w.u3 - b.c13 * w.u2 + b.c23 * w.u1 }
}

/// Triple wedge u∧v∧w: the determinant of the component matrix, as a trivector.
#[inline]
pub fn mink_wedge3(u: MinkVec3, v: MinkVec3, w: MinkVec3) -> MinkTrivec3 {
    wedge_bivec_vec(mink_wedge(u, v), w)
}

// ---------------------------------------------------------------------------
// Minkowski Hodge star (hard-coded A-basis tables)
// ---------------------------------------------------------------------------
//
//   ∗1 = ω            ∗e₁ = e₂∧e₃     ∗(e₁∧e₂) = e₃     ∗ω = −1
//                     ∗e₂ = −e₁∧e₃    ∗(e₁∧e₃) = e₂
//                     ∗e₃ = −e₁∧e₂    ∗(e₂∧e₃) = −e₁
//
// The same tables hold verbatim for forms on the dual basis.

/// ∗ of a scalar: s ↦ s·ω.
#[inline]
pub fn hodge_star_scalar(s: f64) -> MinkTrivec3 {
    MinkTrivec3 { c123: s }
}

/// ∗ of a vector (or covector component triple).
#[inline]
pub fn hodge_star_vec(u: MinkVec3) -> MinkBivec3 {
    MinkBivec3 { c12: -u.u3, c13: -u.u2, c23: u.u1 }
}

/// ∗ of a bivector (or 2-form component triple).
#[inline]
pub fn hodge_star_bivec(b: MinkBivec3) -> MinkVec3 {
    MinkVec3 { u1: -b.c23, u2: b.c13, u3: b.c12 }
}

/// ∗ of a trivector: t·ω ↦ −t.
#[inline]
pub fn hodge_star_trivec(t: MinkTrivec3) -> f64 {
    -t.c123
}

/// ∗(u ∧ v) in one call; the zero vector iff u, v are linearly dependent.
#[inline]
pub fn star_wedge(u: MinkVec3, v: MinkVec3) -> MinkVec3 {
    hodge_star_bivec(mink_wedge(u, v))
}

// ---------------------------------------------------------------------------
// Musical isomorphisms and interior products
// ---------------------------------------------------------------------------

/// ♭: vector components → covector components. Under the (2,1) form this is
/// the sign flip of the third component.
#[inline]
pub fn flat(u: MinkVec3) -> MinkVec3 {
    MinkVec3 { u1: u.u1, u2: u.u2, u3: -u.u3 }
}

/// ♯: covector components → vector components (same sign flip as [`flat`]).
#[inline]
pub fn sharp(a: MinkVec3) -> MinkVec3 {
    flat(a)
}

/// Interior product of a vector into a 3-form Θ = t·e¹∧e²∧e³ (metric-free
/// dual pairing on components): i_u(Θ) = t·(u₁ e²∧e³ − u₂ e¹∧e³ + u₃ e¹∧e²).
#[inline]
pub fn interior_product_trivec(u: MinkVec3, theta: MinkTrivec3) -> MinkBivec3 {
    MinkBivec3 {
        c12: theta.c123 * u.u3,
        c13: -theta.c123 * u.u2,
        c23: theta.c123 * u.u1,
    }
}

/// Interior product of a vector into a 2-form (metric-free dual pairing):
/// i_u(e^i∧e^j) = u_i e^j − u_j e^i, extended linearly.
#[inline]
pub fn interior_product_bivec(u: MinkVec3, b: MinkBivec3) -> MinkVec3 {
    MinkVec3 {
        u1: -b.c12 * u.u2 - b.c13 * u.u3,
        u2: b.c12 * u.u1 - b.c23 * u.u3,
        u3: b.c13 * u.u1 + b.c23 * u.u2,
    }
}

/// Generator of the solution line of i_u(α∧β) = 0 for independent covectors
/// α, β.
///
/// The solution space {u : i_u(α∧β) = 0} is the line spanned by (∗(α∧β))♯;
/// here the generator is normalized to the component-wise cross product
/// α × β, which spans the same line and pairs to zero with both covectors by
/// the triple-product identity.
pub fn interior_product_solve(alpha: MinkVec3, beta: MinkVec3) -> Result<MinkVec3, DependentForms> {
    let w = mink_wedge(alpha, beta);
    if w.euc_norm() <= 1e-12 * alpha.euc_norm() * beta.euc_norm() {
        return Err(DependentForms);
    }
    Ok(MinkVec3 {
        u1: alpha.u2 * beta.u3 - alpha.u3 * beta.u2,
        u2: alpha.u3 * beta.u1 - alpha.u1 * beta.u3,
        u3: alpha.u1 * beta.u2 - alpha.u2 * beta.u1,
    })
}
