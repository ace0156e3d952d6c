//! The complete TDOA map τ₂* and its τ*-space geometry.
//!
//! Keeping all three pairwise delays (τ₁₀, τ₂₀, τ₂₁) embeds the measurement
//! in ℝ³, where the noiseless data lie exactly on the plane
//! H = {τ₁₀ − τ₂₀ + τ₂₁ = 0}. That plane is the bridge between the redundant
//! complete measurement and the two-delay map: p₃ (drop the third coordinate)
//! restricts to a bijection H → ℝ², with inverse [`lift`], and the image of
//! τ₂* is exactly the p₃-preimage of the image of τ₂. Inversion of a complete
//! measurement is therefore [`locate`] after projecting down — [`locate_star`]
//! — and a noisy triple, which leaves H, is handled by first projecting
//! orthogonally back onto it ([`project_to_h`]): for independent Gaussian
//! errors that projection is the maximum-likelihood reduction of the
//! measurement.
//!
//! The choice of m₀ as reference sensor is a convention; [`change_reference`]
//! produces the delay pair as seen from m₁ or m₂ instead (the projections p₂
//! and p₁ of the triple), and inverting the re-referenced pair against the
//! re-ordered sensor array gives the same source fiber.
//!
//! [`synthesize_noisy`] is the measurement model for experiments: the exact
//! forward triple plus independent Gaussian noise per component, seeded and
//! deterministic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::fmath;
use crate::localizer::{locate, FiberResult};
use crate::sensor_config::{Point2, SensorConfig};
use crate::tdoa_forward::{tau2_star, TauPair, TauTriple};
use crate::tol;

/// The noiseless-measurement plane H = {τ₁₀ − τ₂₀ + τ₂₁ = 0} in τ*-space.
///
/// Carries no data: the plane is the same for every sensor layout. Every
/// [`tau2_star`] output satisfies the plane equation to machine precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HPlane;

impl HPlane {
    /// The fixed (non-normalized) plane normal.
    pub const NORMAL: TauTriple = TauTriple { tau10: 1.0, tau20: -1.0, tau21: 1.0 };

    /// Signed plane defect τ₁₀ − τ₂₀ + τ₂₁ (zero on H).
    #[inline]
    pub fn defect(t: TauTriple) -> f64 {
        t.h_defect()
    }
}

/// A measured complete triple: not constrained to H.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisyTriple {
    /// The measurement τ* = τ₂*(x) + ε.
    pub tau_star: TauTriple,
    /// Noise standard deviation used per component.
    pub sigma: f64,
    /// Generator seed used.
    pub seed: u64,
}

/// A triple handed to [`locate_star`] or [`change_reference`] was off the
/// plane H by more than the stated tolerance; project it first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OffPlane {
    /// The plane defect τ₁₀ − τ₂₀ + τ₂₁ that was found.
    pub defect: f64,
}

impl core::fmt::Display for OffPlane {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "triple is off the plane H (defect {:e}); apply project_to_h first",
            self.defect
        )
    }
}

impl core::error::Error for OffPlane {}

/// Default relative on-plane tolerance for [`locate_star`] /
/// [`change_reference`] (multiplied by [`star_scale`]).
pub const ON_PLANE_TOL_DEFAULT: f64 = tol::REL_TOL_DEFAULT;

/// Characteristic τ*-space length d₁₀ + d₂₀ + d₂₁: the complete measurement
/// ranges over a polytope whose extent involves all three baselines.
#[inline]
pub fn star_scale(cfg: &SensorConfig) -> f64 {
    cfg.d10_len + cfg.d20_len + cfg.d21_len
}

/// Orthogonal projection of a τ*-triple onto H:
/// t − ((t₁ − t₂ + t₃)/3)·(1, −1, 1).
///
/// Idempotent, distance-minimizing, and the identity on forward outputs.
pub fn project_to_h(t: TauTriple) -> TauTriple {
    let s = t.h_defect() / 3.0;
    TauTriple { tau10: t.tau10 - s, tau20: t.tau20 + s, tau21: t.tau21 - s }
}

/// Projection p₃: drop the third coordinate.
#[inline]
pub fn p3(t: TauTriple) -> TauPair {
    TauPair { tau1: t.tau10, tau2: t.tau20 }
}

/// The unique H-preimage of a pair: τ₂₁ = τ₂₀ − τ₁₀; p₃ ∘ lift = id.
#[inline]
pub fn lift(tau: TauPair) -> TauTriple {
    TauTriple { tau10: tau.tau1, tau20: tau.tau2, tau21: tau.tau2 - tau.tau1 }
}

/// Invert a complete measurement: the fiber τ₂*⁻¹(t) = τ₂⁻¹(p₃(t)).
///
/// # Errors
/// [`OffPlane`] when |τ₁₀ − τ₂₀ + τ₂₁| > on_plane_tol × [`star_scale`]: the
/// triple is not a noiseless complete measurement. Callers with noisy data
/// must [`project_to_h`] first (the MLE reduction).
pub fn locate_star(
    cfg: &SensorConfig,
    t: TauTriple,
    on_plane_tol: f64,
) -> Result<FiberResult, OffPlane> {
    let defect = t.h_defect();
    if fmath::abs(defect) > on_plane_tol * star_scale(cfg) {
        return Err(OffPlane { defect });
    }
    Ok(locate(cfg, p3(t)))
}

/// Re-express an on-H triple as the delay pair of a different reference
/// sensor: `reference` 0 → p₃ = (τ₁₀, τ₂₀); 1 → p₂ = (τ₁₀, τ₂₁);
/// 2 → p₁ = (τ₂₀, τ₂₁).
///
/// The pair for reference k, inverted against the sensor array re-ordered to
/// put m_k in the reference slot, yields the same source fiber (see the
/// module tests for the exact sign bookkeeping).
///
/// # Errors
/// [`OffPlane`] as for [`locate_star`].
///
/// # Panics
/// If `reference > 2`.
pub fn change_reference(
    cfg: &SensorConfig,
    t: TauTriple,
    reference: usize,
) -> Result<TauPair, OffPlane> {
    let defect = t.h_defect();
    if fmath::abs(defect) > ON_PLANE_TOL_DEFAULT * star_scale(cfg) {
        return Err(OffPlane { defect });
    }
    Ok(match reference {
        0 => TauPair { tau1: t.tau10, tau2: t.tau20 },
        1 => TauPair { tau1: t.tau10, tau2: t.tau21 },
        2 => TauPair { tau1: t.tau20, tau2: t.tau21 },
        _ => panic!("reference sensor index must be 0, 1, or 2"),
    })
}

/// The measurement model: τ₂*(x) plus independent Gaussian noise of standard
/// deviation `sigma` on each component, deterministic for a given `seed`.
///
/// # Panics
/// If `sigma < 0` or is not finite.
pub fn synthesize_noisy(cfg: &SensorConfig, x: Point2, sigma: f64, seed: u64) -> NoisyTriple {
    assert!(sigma >= 0.0 && sigma.is_finite(), "sigma must be finite and >= 0");
    let exact = tau2_star(cfg, x);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite sigma >= 0");
    let e1 = normal.sample(&mut rng);
    let e2 = normal.sample(&mut rng);
    let e3 = normal.sample(&mut rng);
    NoisyTriple {
        tau_star: TauTriple {
            tau10: exact.tau10 + e1,
            tau20: exact.tau20 + e2,
            tau21: exact.tau21 + e3,
        },
        sigma,
        seed,
    }
}
