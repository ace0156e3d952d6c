//! τ-plane loci and the exact classification of a measurement pair.
//!
//! The feasible measurements form the convex polygon P₂ (hexagon in general
//! position, quadrilateral for collinear arrays). Inside it, the fiber
//! structure of the forward map is governed by three polynomial coefficients
//! evaluated at τ — a (the ellipse E), b̄ (a cubic C through eleven
//! distinguished points), and c ≥ 0 — via a Descartes sign analysis of the
//! quadratic a·λ² + 2b·λ + c: one source inside E, two sources in the three
//! components U₀, U₁, U₂ between E and C, none in the remaining pockets.
//! [`classify_tau`] reproduces that case table with explicit snap bands so
//! that measure-zero boundary verdicts survive floating point.
//!
//! Everything user-facing (labels, vertices, distinguished points) is
//! expressed in the caller's sensor order; the internal orientation swap is
//! invisible because a, b̄, c are swap-invariant.

use alloc::vec::Vec;

use crate::exterior_algebra::{wedge2, EucVec2};
use crate::fmath;
use crate::sensor_config::{GeometryClass, SensorConfig};
use crate::tdoa_forward::{tau2, TauPair};
use crate::tol;

/// Sub-variant for measurements with exactly one compatible source.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniqueSub {
    /// Strict interior of the ellipse E.
    EMinusInterior,
    /// On an in-image arc of E (a = 0, b > 0); a second "source at infinity"
    /// exists in the projective sense but no finite one.
    EllipseArcBoundary,
    /// On the in-image part of a facet of ∂P₂ (double root of the quadratic).
    FacetBoundary,
    /// At a vertex R^i = τ₂(m_i); the unique source is the sensor m_i itself.
    VertexR(usize),
}

/// Which two-source component of the image the measurement lies in; R^i lies
/// on the closure of U_i.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UComponent {
    U0,
    U1,
    U2,
}

impl UComponent {
    /// Stable snake_case name used by the CLI and CSV outputs.
    pub fn as_str(self) -> &'static str {
        match self {
            UComponent::U0 => "u0",
            UComponent::U1 => "u1",
            UComponent::U2 => "u2",
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        match self {
            UComponent::U0 => 0,
            UComponent::U1 => 1,
            UComponent::U2 => 2,
        }
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        match i {
            0 => UComponent::U0,
            1 => UComponent::U1,
            2 => UComponent::U2,
            _ => panic!("component index must be 0, 1, or 2"),
        }
    }
}

/// Sub-variant for infeasible measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotInImageSub {
    /// Violates a triangle inequality: outside P₂.
    OutsideP2,
    /// Inside P₂ but in a pocket on the wrong side of E / C (no admissible
    /// root); also used for the non-image side of a collinear array.
    EplusCminus,
    /// At a tangency point T_i± of E with ∂P₂ (a = b = 0, no solution).
    TangencyPoint,
    /// At the excluded vertex −R⁰ of P₂ (the spurious λ = 0 root maps to m₀,
    /// which is not a preimage).
    ExcludedVertex,
    /// Collinear arrays only: on the dependent line τ₂ = k·τ₁, where the two
    /// constraint planes are parallel and distinct.
    DependentLine,
}

/// Exhaustive classification of a τ-plane point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionLabel {
    InImageUnique { sub: UniqueSub },
    InImageDouble { component: UComponent },
    /// Collinear arrays at τ = ±(d₁₀, sgn(k)·d₂₀): a closed half-line of
    /// sources is compatible.
    InImageInfinite,
    NotInImage { sub: NotInImageSub },
}

/// Number of compatible sources implied by a [`RegionLabel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberCount {
    Zero,
    One,
    Two,
    Infinite,
}

impl RegionLabel {
    #[inline]
    pub fn fiber_count(&self) -> FiberCount {
        match self {
            RegionLabel::InImageUnique { .. } => FiberCount::One,
            RegionLabel::InImageDouble { .. } => FiberCount::Two,
            RegionLabel::InImageInfinite => FiberCount::Infinite,
            RegionLabel::NotInImage { .. } => FiberCount::Zero,
        }
    }

    /// Stable snake_case name used by the CLI and CSV outputs.
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::InImageUnique { sub: UniqueSub::EMinusInterior } => "unique_e_minus",
            RegionLabel::InImageUnique { sub: UniqueSub::EllipseArcBoundary } => {
                "unique_ellipse_arc"
            }
            RegionLabel::InImageUnique { sub: UniqueSub::FacetBoundary } => "unique_facet",
            RegionLabel::InImageUnique { sub: UniqueSub::VertexR(0) } => "unique_vertex_r0",
            RegionLabel::InImageUnique { sub: UniqueSub::VertexR(1) } => "unique_vertex_r1",
            RegionLabel::InImageUnique { sub: UniqueSub::VertexR(_) } => "unique_vertex_r2",
            RegionLabel::InImageDouble { component: UComponent::U0 } => "double_u0",
            RegionLabel::InImageDouble { component: UComponent::U1 } => "double_u1",
            RegionLabel::InImageDouble { component: UComponent::U2 } => "double_u2",
            RegionLabel::InImageInfinite => "infinite_fiber",
            RegionLabel::NotInImage { sub: NotInImageSub::OutsideP2 } => "outside_p2",
            RegionLabel::NotInImage { sub: NotInImageSub::EplusCminus } => "eplus_cminus",
            RegionLabel::NotInImage { sub: NotInImageSub::TangencyPoint } => "tangency_point",
            RegionLabel::NotInImage { sub: NotInImageSub::ExcludedVertex } => "excluded_vertex",
            RegionLabel::NotInImage { sub: NotInImageSub::DependentLine } => "dependent_line",
        }
    }
}

impl FiberCount {
    /// CSV value: "0", "1", "2", or "inf".
    pub fn as_str(&self) -> &'static str {
        match self {
            FiberCount::Zero => "0",
            FiberCount::One => "1",
            FiberCount::Two => "2",
            FiberCount::Infinite => "inf",
        }
    }
}

/// One supporting facet F_k^± of P₂, stored as the half-plane
/// normal·τ ≤ offset with a *unit* outward normal, so the residual is a
/// genuine τ-plane distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Facet {
    /// Line index k: the preimage of F_k^± is the half-line r_k^±.
    pub k: usize,
    /// True for F_k⁺, false for F_k⁻.
    pub plus: bool,
    pub normal: EucVec2,
    pub offset: f64,
}

impl Facet {
    /// Signed distance to the facet line: ≤ 0 inside the half-plane.
    #[inline]
    pub fn residual(&self, t: TauPair) -> f64 {
        self.normal.dot(t.as_vec()) - self.offset
    }
}

/// The feasibility polygon P₂, vertices in counter-clockwise order with
/// `facets[i]` supporting the edge from `vertices[i]` to `vertices[i+1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonP2 {
    pub vertices: Vec<TauPair>,
    pub facets: Vec<Facet>,
}

impl PolygonP2 {
    /// Greatest signed facet distance: negative inside, positive outside,
    /// ≈ 0 on the boundary.
    pub fn boundary_residual(&self, t: TauPair) -> f64 {
        let mut r = f64::NEG_INFINITY;
        for f in &self.facets {
            r = fmath::max(r, f.residual(t));
        }
        r
    }

    pub fn contains(&self, t: TauPair, tol: f64) -> bool {
        self.boundary_residual(t) <= tol
    }
}

/// The twelve distinguished τ-plane points of a general-position array:
/// sensor images R⁰ R¹ R², the rectangle vertices R* R⁰₁ R*₁, and the six
/// tangency points T_i^± of the ellipse E with ∂P₂.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistinguishedPoints {
    pub r0: TauPair,
    pub r1: TauPair,
    pub r2: TauPair,
    pub rstar: TauPair,
    pub r0_1: TauPair,
    pub rstar_1: TauPair,
    pub t0p: TauPair,
    pub t0m: TauPair,
    pub t1p: TauPair,
    pub t1m: TauPair,
    pub t2p: TauPair,
    pub t2m: TauPair,
}

impl DistinguishedPoints {
    /// Tangency point T_i^± by index and sign.
    pub fn t(&self, i: usize, plus: bool) -> TauPair {
        match (i, plus) {
            (0, true) => self.t0p,
            (0, false) => self.t0m,
            (1, true) => self.t1p,
            (1, false) => self.t1m,
            (2, true) => self.t2p,
            (2, false) => self.t2m,
            _ => panic!("tangency index must be 0, 1, or 2"),
        }
    }

    /// Sensor image R^i.
    pub fn r(&self, i: usize) -> TauPair {
        match i {
            0 => self.r0,
            1 => self.r1,
            2 => self.r2,
            _ => panic!("vertex index must be 0, 1, or 2"),
        }
    }

    /// The eleven points that lie on the cubic C = {b̄ = 0}: the six
    /// tangency points, the four rectangle vertices, and the origin.
    pub fn eleven_on_cubic(&self) -> [TauPair; 11] {
        [
            self.t0p,
            self.t0m,
            self.t1p,
            self.t1m,
            self.t2p,
            self.t2m,
            self.r0,
            self.rstar,
            self.r0_1,
            self.rstar_1,
            TauPair::new(0.0, 0.0),
        ]
    }
}

/// Error from [`label_u_component`]: the segment test did not single out one
/// component (τ is within tolerance of a region boundary).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmbiguousComponent;

impl core::fmt::Display for AmbiguousComponent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("tau too close to a region boundary to assign a U component")
    }
}

impl core::error::Error for AmbiguousComponent {}

/// Default τ-plane snap tolerance: 1e−9 × (d₁₀ + d₂₀).
#[inline]
pub fn default_tau_tol(cfg: &SensorConfig) -> f64 {
    tol::REL_TOL_DEFAULT * cfg.scale()
}

const INV_SQRT2: f64 = core::f64::consts::FRAC_1_SQRT_2;

fn facet(k: usize, plus: bool, normal: EucVec2, offset: f64) -> Facet {
    Facet { k, plus, normal, offset }
}

/// Caller-frame displacement moduli (d₁₀, d₂₀, d₂₁).
fn caller_lens(cfg: &SensorConfig) -> (f64, f64, f64) {
    if cfg.swapped {
        (cfg.d20_len, cfg.d10_len, cfg.d21_len)
    } else {
        (cfg.d10_len, cfg.d20_len, cfg.d21_len)
    }
}

/// Build the feasibility polygon P₂ in the caller's τ coordinates.
///
/// General position: the hexagon |τ₁| ≤ d₁₀, |τ₂| ≤ d₂₀, |τ₂−τ₁| ≤ d₂₁.
/// Collinear: one inequality pair is implied by the other two and is
/// dropped — the |τ₂−τ₁| pair when m₀ is the middle sensor, the |τ₂| pair
/// when m₁ is, the |τ₁| pair when m₂ is — leaving a quadrilateral.
pub fn build_p2(cfg: &SensorConfig) -> PolygonP2 {
    let (l10, l20, l21) = caller_lens(cfg);
    let f2p = facet(2, true, EucVec2::new(1.0, 0.0), l10);
    let f2m = facet(2, false, EucVec2::new(-1.0, 0.0), l10);
    let f1p = facet(1, true, EucVec2::new(0.0, 1.0), l20);
    let f1m = facet(1, false, EucVec2::new(0.0, -1.0), l20);
    let f0p = facet(0, true, EucVec2::new(-INV_SQRT2, INV_SQRT2), l21 * INV_SQRT2);
    let f0m = facet(0, false, EucVec2::new(INV_SQRT2, -INV_SQRT2), l21 * INV_SQRT2);

    match cfg.geometry_class {
        GeometryClass::General => {
            let vertices = alloc::vec![
                TauPair::new(l10, l20),
                TauPair::new(l20 - l21, l20),
                TauPair::new(-l10, l21 - l10),
                TauPair::new(-l10, -l20),
                TauPair::new(l21 - l20, -l20),
                TauPair::new(l10, l10 - l21),
            ];
            let facets = alloc::vec![f1p, f0p, f2m, f1m, f0m, f2p];
            PolygonP2 { vertices, facets }
        }
        GeometryClass::Collinear { between, .. } => match between {
            0 => PolygonP2 {
                vertices: alloc::vec![
                    TauPair::new(l10, l20),
                    TauPair::new(-l10, l20),
                    TauPair::new(-l10, -l20),
                    TauPair::new(l10, -l20),
                ],
                facets: alloc::vec![f1p, f2m, f1m, f2p],
            },
            1 => PolygonP2 {
                vertices: alloc::vec![
                    TauPair::new(l10, l20),
                    TauPair::new(-l10, l21 - l10),
                    TauPair::new(-l10, -l20),
                    TauPair::new(l10, l10 - l21),
                ],
                facets: alloc::vec![f0p, f2m, f0m, f2p],
            },
            _ => PolygonP2 {
                vertices: alloc::vec![
                    TauPair::new(l10, l20),
                    TauPair::new(l20 - l21, l20),
                    TauPair::new(-l10, -l20),
                    TauPair::new(l21 - l20, -l20),
                ],
                facets: alloc::vec![f1p, f0p, f1m, f0m],
            },
        },
    }
}

pub(crate) fn assert_general(cfg: &SensorConfig, what: &str) {
    assert!(
        cfg.geometry_class == GeometryClass::General,
        "{what} requires a general-position (non-collinear) array"
    );
}

/// Working-frame τ and the two working-frame Minkowski square norms
/// ‖D₁₀(τ)‖² = d₁₀² − τ₁², ‖D₂₀(τ)‖² = d₂₀² − τ₂².
fn work_parts(cfg: &SensorConfig, tau: TauPair) -> (TauPair, f64, f64) {
    let t = cfg.tau_to_work(tau);
    let n10 = cfg.d10_len * cfg.d10_len - t.tau1 * t.tau1;
    let n20 = cfg.d20_len * cfg.d20_len - t.tau2 * t.tau2;
    (t, n10, n20)
}

/// The coefficient a(τ) = ‖τ₂d₁₀ − τ₁d₂₀‖² − (d₁₀∧d₂₀)²; {a = 0} is the
/// ellipse E inscribed in P₂, {a < 0} its interior E⁻.
pub fn coeff_a(cfg: &SensorConfig, tau: TauPair) -> f64 {
    assert_general(cfg, "coeff_a");
    let t = cfg.tau_to_work(tau);
    let p = cfg.d10 * t.tau2 - cfg.d20 * t.tau1;
    let w = wedge2(cfg.d10, cfg.d20);
    p.norm2() - w * w
}

/// The cubic numerator b̄(τ) = ⟨τ₂d₁₀ − τ₁d₂₀, ‖D₂₀‖²d₁₀ − ‖D₁₀‖²d₂₀⟩;
/// {b̄ = 0} is the cubic C through the eleven distinguished points.
pub fn coeff_b_cubic(cfg: &SensorConfig, tau: TauPair) -> f64 {
    assert_general(cfg, "coeff_b_cubic");
    let (t, n10, n20) = work_parts(cfg, tau);
    let p = cfg.d10 * t.tau2 - cfg.d20 * t.tau1;
    let q = cfg.d10 * n20 - cfg.d20 * n10;
    p.dot(q)
}

/// b(τ) = b̄(τ) / (2·d₁₀∧d₂₀) — the middle coefficient of the λ-quadratic.
pub fn coeff_b(cfg: &SensorConfig, tau: TauPair) -> f64 {
    assert_general(cfg, "coeff_b");
    coeff_b_cubic(cfg, tau) / (2.0 * wedge2(cfg.d10, cfg.d20))
}

/// c(τ) = ‖‖D₁₀‖²d₂₀ − ‖D₂₀‖²d₁₀‖² / (2·d₁₀∧d₂₀)² ≥ 0, vanishing exactly at
/// the four rectangle vertices (±d₁₀, ±d₂₀).
pub fn coeff_c(cfg: &SensorConfig, tau: TauPair) -> f64 {
    assert_general(cfg, "coeff_c");
    let (_, n10, n20) = work_parts(cfg, tau);
    let q = cfg.d20 * n10 - cfg.d10 * n20;
    let w = wedge2(cfg.d10, cfg.d20);
    q.norm2() / (4.0 * w * w)
}

/// Δ(τ) = b² − a·c; zero exactly on ∂P₂, positive inside, negative outside.
pub fn discriminant(cfg: &SensorConfig, tau: TauPair) -> f64 {
    let b = coeff_b(cfg, tau);
    b * b - coeff_a(cfg, tau) * coeff_c(cfg, tau)
}

/// All distinguished τ-plane points, in the caller's frame and conventions:
/// T_i uses the unit vector of the displacement between the two sensors
/// *other than* m_i (d̃₂₁, d̃₂₀, d̃₁₀ for i = 0, 1, 2), and
/// T_i^+ = (⟨d₁₀, d̃⟩, ⟨d₂₀, d̃⟩), T_i^− = −T_i^+.
pub fn tangency_points(cfg: &SensorConfig) -> DistinguishedPoints {
    assert_general(cfg, "tangency_points");
    let d10 = cfg.m[1] - cfg.m[0];
    let d20 = cfg.m[2] - cfg.m[0];
    let d21 = cfg.m[2] - cfg.m[1];
    let (l10, l20, _) = caller_lens(cfg);
    let proj = |u: EucVec2| {
        let un = u * (1.0 / u.norm());
        TauPair::new(d10.dot(un), d20.dot(un))
    };
    let t0p = proj(d21);
    let t1p = proj(d20);
    let t2p = proj(d10);
    DistinguishedPoints {
        r0: TauPair::new(l10, l20),
        r1: tau2(cfg, cfg.m[1]),
        r2: tau2(cfg, cfg.m[2]),
        rstar: TauPair::new(-l10, l20),
        r0_1: TauPair::new(-l10, -l20),
        rstar_1: TauPair::new(l10, -l20),
        t0p,
        t0m: -t0p,
        t1p,
        t1m: -t1p,
        t2p,
        t2m: -t2p,
    }
}

/// Numerator and denominator of the collinear admissibility ratio
/// ρ(τ) = (kτ₁² − τ₂² + d₁₀²(k² − k)) / (2(τ₂ − kτ₁)); sources exist on the
/// side where ρ > 0.
pub(crate) fn collinear_rho_parts(cfg: &SensorConfig, tau: TauPair) -> (f64, f64) {
    let k = match cfg.geometry_class {
        GeometryClass::Collinear { k, .. } => k,
        GeometryClass::General => panic!("collinear ratio requires a collinear array"),
    };
    let d = cfg.d10_len;
    let num = k * tau.tau1 * tau.tau1 - tau.tau2 * tau.tau2 + d * d * (k * k - k);
    let den = 2.0 * (tau.tau2 - k * tau.tau1);
    (num, den)
}

/// Classify a τ-plane measurement; `tol` is the boundary snap tolerance in τ
/// units (see [`default_tau_tol`]).
pub fn classify_tau(cfg: &SensorConfig, tau: TauPair, tol: f64) -> RegionLabel {
    debug_assert!(tol >= 0.0);
    match cfg.geometry_class {
        GeometryClass::General => classify_general(cfg, tau, tol),
        GeometryClass::Collinear { .. } => classify_collinear(cfg, tau, tol),
    }
}

fn classify_general(cfg: &SensorConfig, tau: TauPair, tol: f64) -> RegionLabel {
    let dp = tangency_points(cfg);

    // Point snaps first: the c = 0 vertices, the sensor images, the
    // tangency points. Distances are plain τ-plane distances.
    if tau.dist(dp.r0) <= tol {
        return RegionLabel::InImageUnique { sub: UniqueSub::VertexR(0) };
    }
    if tau.dist(dp.r0_1) <= tol {
        return RegionLabel::NotInImage { sub: NotInImageSub::ExcludedVertex };
    }
    if tau.dist(dp.r1) <= tol {
        return RegionLabel::InImageUnique { sub: UniqueSub::VertexR(1) };
    }
    if tau.dist(dp.r2) <= tol {
        return RegionLabel::InImageUnique { sub: UniqueSub::VertexR(2) };
    }
    for i in 0..3 {
        for plus in [true, false] {
            if tau.dist(dp.t(i, plus)) <= tol {
                return RegionLabel::NotInImage { sub: NotInImageSub::TangencyPoint };
            }
        }
    }

    let p2 = build_p2(cfg);
    let r = p2.boundary_residual(tau);
    if r > tol {
        return RegionLabel::NotInImage { sub: NotInImageSub::OutsideP2 };
    }

    let s = cfg.scale();
    let a = coeff_a(cfg, tau);
    let bb = coeff_b_cubic(cfg, tau);
    let a_band = tol * s * s * s;
    let b_band = tol * s * s * s * s;

    if a < -a_band {
        return RegionLabel::InImageUnique { sub: UniqueSub::EMinusInterior };
    }
    let b_pos = bb > b_band;
    let b_neg = bb < -b_band;
    if fmath::abs(a) <= a_band {
        // On the ellipse E.
        if b_pos {
            return RegionLabel::InImageUnique { sub: UniqueSub::EllipseArcBoundary };
        }
        if b_neg {
            return RegionLabel::NotInImage { sub: NotInImageSub::EplusCminus };
        }
        return RegionLabel::NotInImage { sub: NotInImageSub::TangencyPoint };
    }
    // a > 0 strictly.
    if !b_pos {
        // b ≤ 0 with a > 0: Descartes rules out admissible (λ ≤ 0) roots.
        return RegionLabel::NotInImage { sub: NotInImageSub::EplusCminus };
    }
    if r >= -tol {
        // On a facet with a > 0, b > 0: double root, one source on r_k^±.
        return RegionLabel::InImageUnique { sub: UniqueSub::FacetBoundary };
    }
    let b = bb / (2.0 * wedge2(cfg.d10, cfg.d20));
    let c = coeff_c(cfg, tau);
    let delta = b * b - a * c;
    if delta <= 1e-12 * fmath::max(b * b, fmath::abs(a * c)) {
        // Δ snaps to zero: boundary double root (Δ = 0 ⟺ τ ∈ ∂P₂).
        return RegionLabel::InImageUnique { sub: UniqueSub::FacetBoundary };
    }
    RegionLabel::InImageDouble { component: u_component_best(cfg, tau, &dp) }
}

fn classify_collinear(cfg: &SensorConfig, tau: TauPair, tol: f64) -> RegionLabel {
    let (k, between) = match cfg.geometry_class {
        GeometryClass::Collinear { k, between } => (k, between),
        GeometryClass::General => unreachable!(),
    };
    let (l10, l20, _) = caller_lens(cfg);
    let sgn = if k > 0.0 { 1.0 } else { -1.0 };
    let v_plus = TauPair::new(l10, sgn * l20);
    let v_minus = -v_plus;
    if tau.dist(v_plus) <= tol || tau.dist(v_minus) <= tol {
        return RegionLabel::InImageInfinite;
    }
    let r_b = tau2(cfg, cfg.m[between]);
    if tau.dist(r_b) <= tol {
        return RegionLabel::InImageUnique { sub: UniqueSub::VertexR(between) };
    }
    if tau.dist(-r_b) <= tol {
        return RegionLabel::NotInImage { sub: NotInImageSub::ExcludedVertex };
    }

    let p2 = build_p2(cfg);
    let r = p2.boundary_residual(tau);
    if r > tol {
        return RegionLabel::NotInImage { sub: NotInImageSub::OutsideP2 };
    }

    // Dependent line τ₂ = k·τ₁ (perpendicular distance).
    let line_dist =
        fmath::abs(tau.tau2 - k * tau.tau1) / fmath::sqrt(1.0 + k * k);
    if line_dist <= tol {
        return RegionLabel::NotInImage { sub: NotInImageSub::DependentLine };
    }

    let (num, den) = collinear_rho_parts(cfg, tau);
    let rho = num / den;
    if rho <= 0.0 {
        return RegionLabel::NotInImage { sub: NotInImageSub::EplusCminus };
    }
    if r >= -tol {
        return RegionLabel::InImageUnique { sub: UniqueSub::FacetBoundary };
    }
    RegionLabel::InImageDouble { component: UComponent::from_index(between) }
}

/// Segment test: τ belongs to U_i when the straight segment from τ to R^i
/// crosses neither E (a stays positive) nor the cubic C (b̄ stays positive).
/// The endpoint R^i itself is excluded (b̄(R⁰) = 0 exactly).
///
/// Errors with [`AmbiguousComponent`] when zero or several components pass —
/// the sign that τ sits within tolerance of a region boundary.
pub fn label_u_component(cfg: &SensorConfig, tau: TauPair) -> Result<UComponent, AmbiguousComponent> {
    assert_general(cfg, "label_u_component");
    let dp = tangency_points(cfg);
    let mut found: Option<UComponent> = None;
    for i in 0..3 {
        if segment_clear_steps(cfg, tau, dp.r(i)) == SEGMENT_STEPS {
            if found.is_some() {
                return Err(AmbiguousComponent);
            }
            found = Some(UComponent::from_index(i));
        }
    }
    found.ok_or(AmbiguousComponent)
}

const SEGMENT_STEPS: usize = 256;

/// Number of leading segment samples (out of [`SEGMENT_STEPS`], endpoint
/// excluded) on which both a > 0 and b̄ > 0 hold.
fn segment_clear_steps(cfg: &SensorConfig, from: TauPair, to: TauPair) -> usize {
    for k in 0..SEGMENT_STEPS {
        let t = k as f64 / SEGMENT_STEPS as f64;
        let tau = TauPair::new(
            from.tau1 + t * (to.tau1 - from.tau1),
            from.tau2 + t * (to.tau2 - from.tau2),
        );
        if coeff_a(cfg, tau) <= 0.0 || coeff_b_cubic(cfg, tau) <= 0.0 {
            return k;
        }
    }
    SEGMENT_STEPS
}

/// Infallible variant used by [`classify_tau`] and the bifurcation branch
/// tagging: on a tie, prefers the component whose segment stays clear the
/// longest.
pub(crate) fn u_component_nearest(cfg: &SensorConfig, tau: TauPair) -> UComponent {
    let dp = tangency_points(cfg);
    u_component_best(cfg, tau, &dp)
}

fn u_component_best(cfg: &SensorConfig, tau: TauPair, dp: &DistinguishedPoints) -> UComponent {
    let mut best = 0;
    let mut best_steps = 0;
    for i in 0..3 {
        let steps = segment_clear_steps(cfg, tau, dp.r(i));
        if steps > best_steps {
            best_steps = steps;
            best = i;
        }
    }
    UComponent::from_index(best)
}
