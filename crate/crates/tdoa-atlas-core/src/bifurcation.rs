//! The bifurcation curve Ẽ in the source plane.
//!
//! The ellipse E = {a = 0} is the τ-plane locus where the inversion quadratic
//! degenerates; its in-image arcs separate measurements with two compatible
//! sources from measurements with one. Pulling those arcs back through the
//! unique admissible root λ = −c/(2b) traces a curve Ẽ in the x-plane: the
//! locus where a moving source gains or loses a phantom twin. Ẽ is a rational
//! curve of degree 5 with three unbounded real arcs, one adjacent to each
//! double-cover component U_i.
//!
//! This module materializes Ẽ three ways:
//!
//! - [`sample_e`] walks E exactly by the pencil of lines through the τ-plane
//!   origin: along direction μ the ellipse is met at t = ±‖d₁₀∧d₂₀‖ / ‖μ₂d₁₀ −
//!   μ₁d₂₀‖, so samples are closed-form and antipodally paired.
//! - [`bifurcation_samples`] pushes the in-image samples through the rational
//!   parametrization x(τ) = π(L₀) − (c/2b)·∗((τ₂d₁₀ − τ₁d₂₀)∧e₃), tagging
//!   each output with the adjacent U_i. Near the tangency points T_i± the
//!   denominator b vanishes and Ẽ runs to infinity; a guard on |b| skips that
//!   neighbourhood and the skip count is part of the result.
//! - [`implicitize_quintic`] fits the 21-coefficient implicit degree-5
//!   equation F(x, y) = 0 to curve samples by an SVD null-vector, with
//!   residuals reported on a held-out third of the samples.
//!
//! [`classify_x`] sorts source positions into the preimage regions: Ẽ⁻ (the
//! unique-source side, mapping inside E) and the Ũ_i (the two-source side).
//! It delegates entirely to the τ-plane classifier — the fitted F is a
//! reporting artifact, never an authority.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::exterior_algebra::{wedge2, EucVec2};
use crate::fmath;
use crate::localizer;
use crate::sensor_config::{Point2, SensorConfig};
use crate::tau_domain::{
    self, classify_tau, NotInImageSub, RegionLabel, UComponent, UniqueSub,
};
use crate::tdoa_forward::{tau2, TauPair};
use crate::tol;

/// Default |b| guard for [`bifurcation_samples`]: balances arc coverage
/// against blow-up near the tangency points.
pub const GUARD_DEFAULT: f64 = 1e-6;

/// One point of the bifurcation curve, carrying both its τ-plane source and
/// its x-plane image.
///
/// Invariants: |a(tau_on_e)| ≤ 1e−9 × scale² and τ₂(x) = tau_on_e within
/// 1e−7 × scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    /// Pencil direction parameter: the angle of tau_on_e in [0, 2π).
    pub mu: f64,
    /// The sampled point of E.
    pub tau_on_e: TauPair,
    /// Its image on Ẽ under the rational parametrization.
    pub x: Point2,
    /// Which of the three arcs the sample lies on, tagged by the adjacent
    /// double-cover component U_i.
    pub branch: UComponent,
}

/// Output of [`bifurcation_samples`]: the mapped samples (sorted by `mu`) and
/// the number of in-image samples dropped by the |b| guard.
#[derive(Clone, Debug, PartialEq)]
pub struct BifurcationRun {
    pub samples: Vec<CurveSample>,
    /// In-image samples with |b| ≤ guard × scale³, near a tangency point.
    pub skipped: usize,
}

/// x-plane region of a source position, by where its measurement falls in the
/// τ-plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XClass {
    /// Maps inside E: unique-source region Ẽ⁻.
    EMinusPre,
    /// Maps into a double-cover component: two-source region Ũ_i.
    UtildePre(UComponent),
    /// Measurement within snap tolerance of E — the position is on (or
    /// numerically indistinguishable from) the curve Ẽ.
    NearCurve,
    /// Measurement within snap tolerance of ∂P₂ — the position is on the
    /// degeneracy locus (a sensor-line ray) or at infinity-adjacent range.
    NearDegeneracy,
    /// Within snap tolerance of a receiver position.
    AtSensor,
}

impl XClass {
    /// Stable snake_case name (CLI/CSV vocabulary).
    pub fn as_str(&self) -> &'static str {
        match self {
            XClass::EMinusPre => "e_minus_pre",
            XClass::UtildePre(UComponent::U0) => "utilde_pre_u0",
            XClass::UtildePre(UComponent::U1) => "utilde_pre_u1",
            XClass::UtildePre(UComponent::U2) => "utilde_pre_u2",
            XClass::NearCurve => "near_curve",
            XClass::NearDegeneracy => "near_degeneracy",
            XClass::AtSensor => "at_sensor",
        }
    }
}

/// The implicit degree-5 equation of Ẽ, fitted numerically.
///
/// `coeffs` holds the 21 coefficients of F(x, y) in graded lexicographic
/// order (1, x, y, x², xy, y², x³, …, y⁵), normalized to a unit vector with
/// the largest-magnitude coefficient positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuinticFit {
    pub coeffs: [f64; 21],
    /// max |F| over the held-out third of the samples.
    pub max_heldout: f64,
    /// Root-mean-square |F| over the held-out third.
    pub rms_heldout: f64,
}

impl QuinticFit {
    /// Evaluate the fitted polynomial at a point.
    pub fn eval(&self, x: Point2) -> f64 {
        let mono = monomials5(x);
        let mut acc = 0.0;
        for k in 0..21 {
            acc += self.coeffs[k] * mono[k];
        }
        acc
    }
}

/// Fit failure: the two smallest singular values of the design matrix are not
/// separated, so the samples do not determine a unique curve (insufficient
/// spread — typically all samples on one arc, or duplicated points).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IllConditioned;

impl core::fmt::Display for IllConditioned {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("quintic fit is ill-conditioned: sample spread does not determine a unique curve")
    }
}

impl core::error::Error for IllConditioned {}

/// Exact sampler of the ellipse E = {a = 0} by the pencil of lines through
/// the τ-plane origin.
///
/// Uses ⌈n/2⌉ evenly spaced angles θ ∈ [0, π); each line meets E at the
/// antipodal pair ±t(θ)·(cos θ, sin θ) with t = ‖d₁₀∧d₂₀‖ / ‖μ₂d₁₀ − μ₁d₂₀‖,
/// and the output is truncated to exactly `n` points. Every output satisfies
/// |a| ≤ 1e−10 × scale² (closed form, so in practice far tighter) and lies
/// inside P₂.
///
/// # Panics
/// If `cfg` is collinear (E degenerates) or `n < 8`.
pub fn sample_e(cfg: &SensorConfig, n: usize) -> Vec<TauPair> {
    tau_domain::assert_general(cfg, "sample_e");
    assert!(n >= 8, "sample_e needs n >= 8");
    let d10 = cfg.m[1] - cfg.m[0];
    let d20 = cfg.m[2] - cfg.m[0];
    let w_abs = fmath::abs(wedge2(d10, d20));
    let angles = n.div_ceil(2);
    let mut out = Vec::with_capacity(2 * angles);
    for j in 0..angles {
        let theta = core::f64::consts::PI * (j as f64) / (angles as f64);
        let (mu1, mu2) = (fmath::cos(theta), fmath::sin(theta));
        let p0 = (d10 * mu2 - d20 * mu1).norm();
        let t = w_abs / p0;
        out.push(TauPair::new(t * mu1, t * mu2));
        out.push(TauPair::new(-(t * mu1), -(t * mu2)));
    }
    out.truncate(n);
    out
}

/// The rational parametrization x(τ) = π(L₀) − (c/2b)·∗((τ₂d₁₀ − τ₁d₂₀)∧e₃)
/// of Ẽ, defined for τ ∈ E away from the cubic (b ≠ 0).
///
/// Satisfies x(−τ) = x(τ): the parametrization is 2-to-1 from E onto Ẽ. At
/// b = 0 the curve runs to infinity and the result is non-finite.
///
/// # Panics
/// If `cfg` is collinear.
pub fn quintic_map(cfg: &SensorConfig, tau: TauPair) -> Point2 {
    tau_domain::assert_general(cfg, "quintic_map");
    let b = tau_domain::coeff_b(cfg, tau);
    map_with_b(cfg, tau, b)
}

fn map_with_b(cfg: &SensorConfig, tau: TauPair, b: f64) -> Point2 {
    let line = localizer::l21_line(cfg, tau)
        .expect("general-position L21 line is always defined");
    let c = tau_domain::coeff_c(cfg, tau);
    localizer::general_candidate(&line, -c / (2.0 * b))
}

/// Angle of τ as a vector, normalized to [0, 2π).
fn angle_of(tau: TauPair) -> f64 {
    let a = fmath::atan2(tau.tau2, tau.tau1);
    if a < 0.0 {
        a + 2.0 * core::f64::consts::PI
    } else {
        a
    }
}

/// Tag an in-image E point with the double-cover component on its outer
/// (a > 0) side, probing along the outward ellipse normal.
fn branch_of(cfg: &SensorConfig, tau: TauPair, tol_tau: f64) -> UComponent {
    let s = cfg.scale();
    let d10 = cfg.m[1] - cfg.m[0];
    let d20 = cfg.m[2] - cfg.m[0];
    // ∇a = 2(−⟨p, d₂₀⟩, ⟨p, d₁₀⟩) with p = τ₂d₁₀ − τ₁d₂₀ points out of E.
    let p = d10 * tau.tau2 - d20 * tau.tau1;
    let g = EucVec2::new(-d20.dot(p), d10.dot(p));
    let gn = g.norm();
    let dir = if gn > 0.0 { g * (1.0 / gn) } else { EucVec2::new(1.0, 0.0) };
    let mut fallback = tau;
    for eps in [1e-3, 3e-3, 1e-2, 3e-4] {
        let probe = TauPair::new(tau.tau1 + eps * s * dir.u1, tau.tau2 + eps * s * dir.u2);
        if let RegionLabel::InImageDouble { component } = classify_tau(cfg, probe, tol_tau) {
            return component;
        }
        fallback = probe;
    }
    tau_domain::u_component_nearest(cfg, fallback)
}

/// Sample the bifurcation curve Ẽ.
///
/// Runs [`sample_e`], keeps the τ that classify onto the in-image arcs of E
/// (the other half of the ellipse is the excluded slit), then maps the kept
/// samples with |b| > guard × scale³ through [`quintic_map`]. In-image
/// samples failing the guard sit next to a tangency point T_i± where Ẽ blows
/// up; they are dropped and counted in [`BifurcationRun::skipped`]. Samples
/// come back sorted by the pencil angle `mu`.
///
/// # Panics
/// If `cfg` is collinear, `n < 8`, or `guard ≤ 0`.
pub fn bifurcation_samples(cfg: &SensorConfig, n: usize, guard: f64) -> BifurcationRun {
    assert!(guard > 0.0, "bifurcation_samples needs guard > 0");
    let s = cfg.scale();
    let b_floor = guard * s * s * s;
    let tol_tau = tau_domain::default_tau_tol(cfg);
    let mut samples = Vec::new();
    let mut skipped = 0usize;
    for tau in sample_e(cfg, n) {
        let on_image_arc = matches!(
            classify_tau(cfg, tau, tol_tau),
            RegionLabel::InImageUnique { sub: UniqueSub::EllipseArcBoundary }
        );
        if !on_image_arc {
            continue;
        }
        let b = tau_domain::coeff_b(cfg, tau);
        if fmath::abs(b) <= b_floor {
            skipped += 1;
            continue;
        }
        samples.push(CurveSample {
            mu: angle_of(tau),
            tau_on_e: tau,
            x: map_with_b(cfg, tau, b),
            branch: branch_of(cfg, tau, tol_tau),
        });
    }
    samples.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    BifurcationRun { samples, skipped }
}

/// Classify a source position into the preimage regions of the τ-plane
/// structure: Ẽ⁻ (unique source), Ũ_i (two sources), or the thin exceptional
/// sets.
///
/// Delegates entirely to [`classify_tau`] on τ₂(x): snap verdicts tied to the
/// ellipse map to [`XClass::NearCurve`], verdicts tied to ∂P₂ or the
/// infinite-fiber set map to [`XClass::NearDegeneracy`].
pub fn classify_x(cfg: &SensorConfig, x: Point2) -> XClass {
    let snap = tol::REL_TOL_DEFAULT * cfg.scale();
    for i in 0..3 {
        if x.dist(cfg.m[i]) <= snap {
            return XClass::AtSensor;
        }
    }
    let tau = tau2(cfg, x);
    match classify_tau(cfg, tau, tau_domain::default_tau_tol(cfg)) {
        RegionLabel::InImageUnique { sub: UniqueSub::EMinusInterior } => XClass::EMinusPre,
        RegionLabel::InImageDouble { component } => XClass::UtildePre(component),
        RegionLabel::InImageUnique { sub: UniqueSub::EllipseArcBoundary } => XClass::NearCurve,
        RegionLabel::NotInImage { sub: NotInImageSub::EplusCminus } => XClass::NearCurve,
        RegionLabel::InImageUnique { sub: UniqueSub::FacetBoundary }
        | RegionLabel::InImageUnique { sub: UniqueSub::VertexR(_) }
        | RegionLabel::InImageInfinite
        | RegionLabel::NotInImage { .. } => XClass::NearDegeneracy,
    }
}

/// Monomials of degree ≤ 5 in graded lexicographic order:
/// 1, x, y, x², xy, y², x³, x²y, xy², y³, …, y⁵.
fn monomials5(p: Point2) -> [f64; 21] {
    let (x, y) = (p.x(), p.y());
    let mut out = [0.0; 21];
    let mut k = 0;
    for d in 0..=5u32 {
        for i in (0..=d).rev() {
            let mut m = 1.0;
            for _ in 0..i {
                m *= x;
            }
            for _ in 0..(d - i) {
                m *= y;
            }
            out[k] = m;
            k += 1;
        }
    }
    out
}

/// Fit the implicit degree-5 polynomial F with F(samples) ≈ 0 by the smallest
/// singular direction of the (row-normalized) 21-column design matrix.
///
/// Fits on two thirds of the samples and reports residual statistics on the
/// held-out remaining third (every sample with index ≡ 2 mod 3).
///
/// # Errors
/// [`IllConditioned`] when the gap between the two smallest singular values
/// is below 1e3 × machine epsilon × the largest: the null direction is not
/// unique, so the samples are degenerate or confined to a sub-locus.
///
/// # Panics
/// If `cfg` is collinear or fewer than 63 samples are supplied (three per
/// unknown).
pub fn implicitize_quintic(
    cfg: &SensorConfig,
    samples: &[CurveSample],
) -> Result<QuinticFit, IllConditioned> {
    tau_domain::assert_general(cfg, "implicitize_quintic");
    assert!(
        samples.len() >= 63,
        "implicitize_quintic needs at least 63 samples (got {})",
        samples.len()
    );
    let fit_rows: Vec<&CurveSample> =
        samples.iter().enumerate().filter(|(i, _)| i % 3 != 2).map(|(_, s)| s).collect();
    let mut data = Vec::with_capacity(fit_rows.len() * 21);
    for s in &fit_rows {
        let row = monomials5(s.x);
        let mut norm2 = 0.0;
        for v in row {
            norm2 += v * v;
        }
        let inv = 1.0 / fmath::sqrt(norm2);
        for v in row {
            data.push(v * inv);
        }
    }
    let design = DMatrix::from_row_slice(fit_rows.len(), 21, &data);
    let svd = design.svd(false, true);
    let sv = &svd.singular_values;
    let (mut i_min, mut i_second) = (0usize, 0usize);
    let mut sigma_max = 0.0f64;
    for i in 0..sv.len() {
        sigma_max = fmath::max(sigma_max, sv[i]);
        if sv[i] < sv[i_min] {
            i_min = i;
        }
    }
    let mut second = f64::INFINITY;
    for i in 0..sv.len() {
        if i != i_min && sv[i] < second {
            second = sv[i];
            i_second = i;
        }
    }
    if sv[i_second] - sv[i_min] < 1e3 * f64::EPSILON * sigma_max {
        return Err(IllConditioned);
    }
    let vt = svd.v_t.expect("v_t requested");
    let mut coeffs = [0.0f64; 21];
    let mut norm2 = 0.0;
    for k in 0..21 {
        coeffs[k] = vt[(i_min, k)];
        norm2 += coeffs[k] * coeffs[k];
    }
    let inv = 1.0 / fmath::sqrt(norm2);
    let mut k_big = 0usize;
    for k in 0..21 {
        coeffs[k] *= inv;
        if fmath::abs(coeffs[k]) > fmath::abs(coeffs[k_big]) {
            k_big = k;
        }
    }
    if coeffs[k_big] < 0.0 {
        for c in coeffs.iter_mut() {
            *c = -*c;
        }
    }
    let fit = QuinticFit { coeffs, max_heldout: 0.0, rms_heldout: 0.0 };
    let mut max_h = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut held = 0usize;
    for (i, s) in samples.iter().enumerate() {
        if i % 3 == 2 {
            let r = fmath::abs(fit.eval(s.x));
            max_h = fmath::max(max_h, r);
            sum_sq += r * r;
            held += 1;
        }
    }
    let rms = if held > 0 { fmath::sqrt(sum_sq / held as f64) } else { 0.0 };
    Ok(QuinticFit { coeffs, max_heldout: max_h, rms_heldout: rms })
}
