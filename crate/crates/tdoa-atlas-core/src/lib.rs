//! Exact geometry for planar TDOA (time-difference-of-arrival) source
//! localization with three receivers.
//!
//! Everything here is closed-form: the forward maps τ₂ and τ₂* from a source
//! position to its range differences, the classification of a measured pair
//! into the image structure (feasible or not, 1 / 2 / ∞ compatible sources),
//! the inversion through the Minkowski-space cone–plane system, and the loci
//! that organise the τ-plane — the feasibility polygon P₂, the ellipse E, the
//! cubic C, and the bifurcation quintic Ẽ in the source plane.
//!
//! Module layout mirrors the mathematical layering:
//!
//! - [`exterior_algebra`]: wedge, Hodge star, and interior products for the
//!   Euclidean plane and the Minkowski space ℝ^{2,1}.
//! - [`sensor_config`]: validated three-receiver layouts, orientation
//!   normalization, line splits of the degeneracy geometry.
//! - [`tdoa_forward`]: τ₂, τ₂*, the Jacobian and its rank classification,
//!   level-set samplers.
//! - [`tau_domain`]: P₂, the coefficients a, b̄, c of the inversion quadratic,
//!   distinguished points, and the region/fiber-count classifier.
//! - [`localizer`]: the line L₂₁(τ), the quadratic in λ, admissible-root
//!   filtering, and an independent brute-force oracle.
//! - [`bifurcation`]: the curve Ẽ by its rational parametrization, x-plane
//!   region classification, numeric quintic implicitization.
//! - [`complete_map`]: the complete map τ₂*, the plane H, reference changes,
//!   and the noisy-measurement projection pipeline.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature is
//! on by default. All transcendental functions go through `libm`, so results
//! are bit-identical across platforms.
#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bifurcation;
pub mod complete_map;
pub mod exterior_algebra;
mod fmath;
pub mod localizer;
pub mod sensor_config;
pub mod tau_domain;
pub mod tdoa_forward;
pub mod tol;

pub use bifurcation::{
    bifurcation_samples, classify_x, implicitize_quintic, quintic_map, sample_e, BifurcationRun,
    CurveSample, QuinticFit, XClass,
};
pub use complete_map::{
    change_reference, lift, locate_star, p3, project_to_h, synthesize_noisy, star_scale, HPlane,
    NoisyTriple, OffPlane, ON_PLANE_TOL_DEFAULT,
};
pub use exterior_algebra::{EucVec2, MinkBivec3, MinkTrivec3, MinkVec3};
pub use localizer::{
    l21_line, locate, oracle_locate, solve_lambda, FiberPoint, FiberResult, Line3, LocalizeError,
    QuadraticCase, RootSet,
};
pub use sensor_config::{build_config, GeometryClass, HalfLine, LinePart, Point2, SensorConfig};
pub use tau_domain::{
    build_p2, classify_tau, coeff_a, coeff_b, coeff_c, default_tau_tol, discriminant,
    label_u_component, tangency_points, DistinguishedPoints, FiberCount, NotInImageSub, PolygonP2,
    RegionLabel, UComponent, UniqueSub,
};
pub use tdoa_forward::{
    at_sensor_band, det_jacobian, jacobian, rank_at, tau2, tau2_star, Jacobian2, RankLabel,
    TauPair, TauTriple,
};
