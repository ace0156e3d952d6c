//! The forward TDOA maps τ₂ and τ₂*, their Jacobian, the rank classification
//! of the degeneracy locus, and samplers for the level sets A_i(τ).
//!
//! All outputs are reported in the caller's sensor order; none of these
//! operations depend on the internal orientation normalization.

use alloc::vec::Vec;

use crate::exterior_algebra::{wedge2, EucVec2};
use crate::fmath;
use crate::sensor_config::{halfline_membership, GeometryClass, LinePart, Point2, SensorConfig};

/// A point of the τ-plane: (τ₁₀, τ₂₀), range differences in meters
/// (propagation speed 1).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct TauPair {
    pub tau1: f64,
    pub tau2: f64,
}

impl TauPair {
    #[inline]
    pub fn new(tau1: f64, tau2: f64) -> Self {
        Self { tau1, tau2 }
    }

    /// Euclidean distance in the τ-plane.
    #[inline]
    pub fn dist(self, o: TauPair) -> f64 {
        fmath::hypot(self.tau1 - o.tau1, self.tau2 - o.tau2)
    }

    #[inline]
    pub fn as_vec(self) -> EucVec2 {
        EucVec2::new(self.tau1, self.tau2)
    }
}

impl core::ops::Neg for TauPair {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { tau1: -self.tau1, tau2: -self.tau2 }
    }
}

/// A point of τ*-space: (τ₁₀, τ₂₀, τ₂₁). Images of the complete map satisfy
/// τ₁₀ − τ₂₀ + τ₂₁ = 0 up to rounding.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct TauTriple {
    pub tau10: f64,
    pub tau20: f64,
    pub tau21: f64,
}

impl TauTriple {
    #[inline]
    pub fn new(tau10: f64, tau20: f64, tau21: f64) -> Self {
        Self { tau10, tau20, tau21 }
    }

    /// Signed defect of the plane identity H: τ₁₀ − τ₂₀ + τ₂₁.
    #[inline]
    pub fn h_defect(self) -> f64 {
        self.tau10 - self.tau20 + self.tau21
    }
}

/// The 2×2 Jacobian of τ₂; rows are the gradients ∇τ₁(x), ∇τ₂(x)
/// (each a difference of two unit vectors, hence of norm ≤ 2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jacobian2 {
    pub row1: EucVec2,
    pub row2: EucVec2,
}

impl Jacobian2 {
    #[inline]
    pub fn det(self) -> f64 {
        wedge2(self.row1, self.row2)
    }
}

/// Rank classification of the forward map at a plane point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankLabel {
    Rank2,
    Rank1,
    Rank0,
    /// Within the sensor band: the map is not differentiable at receivers.
    AtSensor,
}

impl RankLabel {
    /// Stable CSV value: the numeric rank, or "at_sensor".
    pub fn as_str(self) -> &'static str {
        match self {
            RankLabel::Rank2 => "2",
            RankLabel::Rank1 => "1",
            RankLabel::Rank0 => "0",
            RankLabel::AtSensor => "at_sensor",
        }
    }
}

/// The Jacobian is undefined at a receiver position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtSensorError;

impl core::fmt::Display for AtSensorError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("gradient undefined: point coincides with a receiver")
    }
}

impl core::error::Error for AtSensorError {}

/// Default half-width of the "at a sensor" band: 1e−9 × max pairwise
/// sensor distance.
#[inline]
pub fn at_sensor_band(cfg: &SensorConfig) -> f64 {
    1e-9 * max_pair_dist(cfg)
}

#[inline]
fn max_pair_dist(cfg: &SensorConfig) -> f64 {
    fmath::max(cfg.d10_len, fmath::max(cfg.d20_len, cfg.d21_len))
}

/// The TDOA map: τ₂(x) = (d₁(x) − d₀(x), d₂(x) − d₀(x)) in the caller's
/// sensor order. Defined everywhere (distances are continuous).
#[inline]
pub fn tau2(cfg: &SensorConfig, x: Point2) -> TauPair {
    let d0 = x.dist(cfg.m[0]);
    TauPair { tau1: x.dist(cfg.m[1]) - d0, tau2: x.dist(cfg.m[2]) - d0 }
}

/// The complete TDOA map: (τ₁₀, τ₂₀, τ₂₁) with τ₂₁ = d₂ − d₁.
#[inline]
pub fn tau2_star(cfg: &SensorConfig, x: Point2) -> TauTriple {
    let d0 = x.dist(cfg.m[0]);
    let d1 = x.dist(cfg.m[1]);
    let d2 = x.dist(cfg.m[2]);
    TauTriple { tau10: d1 - d0, tau20: d2 - d0, tau21: d2 - d1 }
}

/// Unit vector from sensor toward x, or an error inside the sensor band.
fn unit_from(m: Point2, x: Point2, band: f64) -> Result<EucVec2, AtSensorError> {
    let d = x - m;
    let n = d.norm();
    if n <= band {
        return Err(AtSensorError);
    }
    Ok(d * (1.0 / n))
}

/// Rows ∇τ₁(x) = d̃₁(x) − d̃₀(x) and ∇τ₂(x) = d̃₂(x) − d̃₀(x).
pub fn jacobian(cfg: &SensorConfig, x: Point2) -> Result<Jacobian2, AtSensorError> {
    let band = 1e-12 * max_pair_dist(cfg);
    let u0 = unit_from(cfg.m[0], x, band)?;
    let u1 = unit_from(cfg.m[1], x, band)?;
    let u2 = unit_from(cfg.m[2], x, band)?;
    Ok(Jacobian2 { row1: u1 - u0, row2: u2 - u0 })
}

/// det J(x); vanishes exactly on the degeneracy locus.
pub fn det_jacobian(cfg: &SensorConfig, x: Point2) -> Result<f64, AtSensorError> {
    Ok(jacobian(cfg, x)?.det())
}

/// Rank of J at x, decided *geometrically* (line-part membership), not by
/// numeric rank of the matrix: near the locus singular values are
/// ill-conditioned, while set membership is exact.
///
/// General class: rank 1 exactly on the outer rays r_i⁺ ∪ r_i⁻ of the three
/// sensor lines, rank 2 elsewhere. Collinear class: rank 0 on the outer rays
/// r^c of the common line, rank 1 on the hull segment r⁰, rank 2 off the
/// line. Points within `band` of a receiver report `AtSensor`.
pub fn rank_at(cfg: &SensorConfig, x: Point2, band: f64) -> RankLabel {
    for m in cfg.m {
        if x.dist(m) <= band {
            return RankLabel::AtSensor;
        }
    }
    match cfg.geometry_class {
        GeometryClass::General => {
            let parts = halfline_membership(cfg, x, band);
            let on_ray = parts
                .iter()
                .any(|(_, p)| matches!(p, LinePart::Plus | LinePart::Minus));
            if on_ray {
                RankLabel::Rank1
            } else {
                RankLabel::Rank2
            }
        }
        GeometryClass::Collinear { .. } => {
            let (a, b, _, _) = cfg.collinear_split().expect("collinear class");
            let dir = (b - a) * (1.0 / (b - a).norm());
            let rel = x - a;
            if fmath::abs(wedge2(rel, dir)) > band {
                return RankLabel::Rank2;
            }
            let t = rel.dot(dir);
            if t < 0.0 || t > (b - a).norm() {
                RankLabel::Rank0
            } else {
                RankLabel::Rank1
            }
        }
    }
}

/// Sample the level set A_i(τ) = {x : τ_i(x) = τ} for i ∈ {1, 2}.
///
/// Empty when |τ| > d_{i0}. At |τ| = d_{i0} the set degenerates to the outer
/// ray r_j^± (j the other index); at τ = 0 it is the perpendicular bisector
/// of m₀ m_i; otherwise it is one branch of the hyperbola with foci m₀, m_i,
/// bending around m₀ for τ > 0 and around m_i for τ < 0. `n ≥ 2` points are
/// returned with evenly spaced parameter; the span multiplier is 5.
pub fn sample_level_set(cfg: &SensorConfig, i: usize, tau: f64, n: usize) -> Vec<Point2> {
    assert!(i == 1 || i == 2, "level-set index must be 1 or 2");
    debug_assert!(n >= 2);
    let m0 = cfg.m[0];
    let mi = cfg.m[i];
    let di0 = m0.dist(mi);
    let scale = cfg.scale();
    let snap = 1e-12 * scale;
    let span = 5.0;
    let mut out = Vec::new();

    if fmath::abs(fmath::abs(tau) - di0) <= snap {
        // Degenerate: the outer ray r_j^± of the line through m0 and m_i.
        // τ = +d_{i0} ⇒ the ray beyond m0 (away from m_i); τ = −d_{i0} ⇒
        // the ray beyond m_i.
        let axis = (mi - m0) * (1.0 / di0);
        let (base, dir) = if tau > 0.0 { (m0, -axis) } else { (mi, axis) };
        for k in 0..n {
            let t = span * scale * k as f64 / (n - 1) as f64;
            out.push(base + dir * t);
        }
        return out;
    }
    if fmath::abs(tau) > di0 {
        return out;
    }
    if fmath::abs(tau) <= snap {
        // Bisector of m0 m_i.
        let mid = (m0 + mi) * 0.5;
        let perp = ((mi - m0) * (1.0 / di0)).rot90();
        for k in 0..n {
            let t = span * scale * (2.0 * k as f64 / (n - 1) as f64 - 1.0);
            out.push(mid + perp * t);
        }
        return out;
    }

    // Hyperbola branch in the focal frame.
    let center = (m0 + mi) * 0.5;
    let e_axis = (mi - m0) * (1.0 / di0);
    let e_perp = e_axis.rot90();
    let a = fmath::abs(tau) / 2.0;
    let c = di0 / 2.0;
    let b = fmath::sqrt(c * c - a * a);
    let sgn = if tau > 0.0 { -1.0 } else { 1.0 };
    let tmax = fmath::asinh(span);
    for k in 0..n {
        let t = tmax * (2.0 * k as f64 / (n - 1) as f64 - 1.0);
        let x = center + e_axis * (sgn * a * fmath::cosh(t)) + e_perp * (b * fmath::sinh(t));
        out.push(x);
    }
    out
}
