//! Closed-form inversion of the two-receiver TDOA map.
//!
//! A measurement τ pins the source to the intersection of two planes Π₁(τ),
//! Π₂(τ) with the light cone C₀ of the reference sensor in Minkowski space
//! ℝ^{2,1}. The planes meet in a line L₂₁(τ) = L₀ + λ·v; substituting into
//! the cone equation gives the quadratic
//!
//!   ‖v‖²·λ² + 2⟨v, D₀(L₀)⟩·λ + ‖D₀(L₀)‖² = 0,
//!
//! whose coefficients coincide with the τ-plane polynomials a, b, c of
//! [`crate::tau_domain`]. Admissible roots (λ ≤ 0 after the orientation
//! normalization of [`SensorConfig`]) project to the source candidates; a
//! final forward-residual check removes the spurious λ = 0 root that appears
//! at the excluded vertex −R⁰.
//!
//! Collinear arrays take a parallel route: the line is horizontal, the
//! linear coefficient vanishes, and the two roots are mirror images across
//! the sensor line. [`oracle_locate`] is an independent brute-force
//! inverter used to cross-check all of this.

use alloc::vec::Vec;

use crate::exterior_algebra::{
    euc_star_vec, hodge_star_bivec, mink_wedge, wedge2, EucVec2, MinkVec3,
};
use crate::fmath;
use crate::sensor_config::{GeometryClass, Point2, SensorConfig};
use crate::tau_domain::{self};
use crate::tdoa_forward::{jacobian, tau2, TauPair};
use crate::tol;

/// The line L₂₁(τ) = Π₁(τ) ∩ Π₂(τ) in absolute Minkowski coordinates.
///
/// For a general-position array the base point is the unique point of the
/// line on the x-plane (third component 0). For a collinear array the line
/// is parallel to the x-plane and the base carries the (nonzero) height at
/// which it runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line3 {
    pub base: MinkVec3,
    pub v: MinkVec3,
}

/// Failure modes of the closed-form path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalizeError {
    /// Collinear array with τ on the dependent line τ₂ = k·τ₁ and
    /// τ₁ ≠ ±d₁₀: the planes are parallel and disjoint.
    DependentPlanes,
    /// Collinear array with τ₂ = k·τ₁ and τ₁ = ±d₁₀: Π₁ = Π₂.
    CoincidentPlanes,
    /// The λ-quadratic has negative discriminant (beyond the snap band);
    /// possible only outside P₂.
    NoRealRoots,
}

impl core::fmt::Display for LocalizeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LocalizeError::DependentPlanes => {
                f.write_str("constraint planes are parallel and distinct (dependent line)")
            }
            LocalizeError::CoincidentPlanes => f.write_str("constraint planes coincide"),
            LocalizeError::NoRealRoots => {
                f.write_str("lambda quadratic has no real roots (tau outside P2)")
            }
        }
    }
}

impl core::error::Error for LocalizeError {}

/// Real roots of the λ-quadratic, with multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RootSet {
    None,
    One { lambda: f64, multiplicity: u8 },
    Two { lambda_lo: f64, lambda_hi: f64 },
}

/// The quadratic a·λ² + 2b·λ + c = 0 restricted to the line L₂₁(τ),
/// together with its solved roots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticCase {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
    pub roots: RootSet,
}

/// A source candidate with the algebraic multiplicity of its root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberPoint {
    pub x: Point2,
    pub multiplicity: u8,
}

/// The preimage of a measurement: finitely many points, or — at the two
/// special vertices of a collinear array — a closed half-line of the sensor
/// line.
#[derive(Clone, Debug, PartialEq)]
pub enum FiberResult {
    Points(Vec<FiberPoint>),
    HalfLine { base: Point2, direction: EucVec2 },
}

impl FiberResult {
    /// Number of isolated points (`None` for the half-line case).
    pub fn num_points(&self) -> Option<usize> {
        match self {
            FiberResult::Points(p) => Some(p.len()),
            FiberResult::HalfLine { .. } => None,
        }
    }

    pub fn points(&self) -> &[FiberPoint] {
        match self {
            FiberResult::Points(p) => p,
            FiberResult::HalfLine { .. } => &[],
        }
    }
}

/// Work-frame lifted displacement covectors D₁₀(τ) = (d₁₀, τ₁),
/// D₂₀(τ) = (d₂₀, τ₂).
fn lifted_pair(cfg: &SensorConfig, tau: TauPair) -> (MinkVec3, MinkVec3, TauPair) {
    let t = cfg.tau_to_work(tau);
    (cfg.d10.lift(t.tau1), cfg.d20.lift(t.tau2), t)
}

/// Minkowski square norms ‖D₁₀‖², ‖D₂₀‖², ‖D₂₁‖² in the work frame.
fn mink_norms(cfg: &SensorConfig, t: TauPair) -> (f64, f64, f64) {
    let n10 = cfg.d10_len * cfg.d10_len - t.tau1 * t.tau1;
    let n20 = cfg.d20_len * cfg.d20_len - t.tau2 * t.tau2;
    let dt = t.tau2 - t.tau1;
    let n21 = cfg.d21_len * cfg.d21_len - dt * dt;
    (n10, n20, n21)
}

fn collinear_k(cfg: &SensorConfig) -> Option<f64> {
    match cfg.geometry_class {
        GeometryClass::Collinear { k, .. } => Some(k),
        GeometryClass::General => None,
    }
}

/// Distance from τ to the dependent line τ₂ = k·τ₁ (collinear arrays).
fn dependent_line_dist(k: f64, tau: TauPair) -> f64 {
    fmath::abs(tau.tau2 - k * tau.tau1) / fmath::sqrt(1.0 + k * k)
}

/// Build the parametric line L₂₁(τ) = base + λ·v.
///
/// General position: v = ∗(D₁₀ ∧ D₂₀) and the base is the x-plane point
/// with D₀(L₀) = ∗(‖D₂₀‖²d₁₀ − ‖D₁₀‖²d₂₀) / (2·d₁₀∧d₂₀).
///
/// Collinear: v = ∗(d₁₀ ∧ e₃) and
/// D₀(L₀) = −∗(v ∧ (‖D₂₀‖²D₁₀ − ‖D₁₀‖²D₂₀)) / (2·d₁₀²·(kτ₁ − τ₂)).
pub fn l21_line(cfg: &SensorConfig, tau: TauPair) -> Result<Line3, LocalizeError> {
    let m0 = cfg.work_m(0);
    match collinear_k(cfg) {
        None => {
            let (u10, u20, _) = lifted_pair(cfg, tau);
            let v = hodge_star_bivec(mink_wedge(u10, u20));
            let (n10, n20, _) = mink_norms(cfg, cfg.tau_to_work(tau));
            let w = wedge2(cfg.d10, cfg.d20);
            let q = cfg.d10 * n20 - cfg.d20 * n10;
            let g = euc_star_vec(q) * (1.0 / (2.0 * w));
            Ok(Line3 { base: (m0 + g).lift(0.0), v })
        }
        Some(k) => {
            let t = cfg.tau_to_work(tau);
            if dependent_line_dist(k, t) <= tau_domain::default_tau_tol(cfg) {
                let l10 = cfg.d10_len;
                if fmath::abs(fmath::abs(t.tau1) - l10) <= tau_domain::default_tau_tol(cfg) {
                    return Err(LocalizeError::CoincidentPlanes);
                }
                return Err(LocalizeError::DependentPlanes);
            }
            let (u10, u20, _) = lifted_pair(cfg, tau);
            let (n10, n20, _) = mink_norms(cfg, t);
            let v = hodge_star_bivec(mink_wedge(cfg.d10.lift(0.0), MinkVec3::E3));
            let u = u10 * n20 - u20 * n10;
            let d2 = cfg.d10_len * cfg.d10_len;
            let scale = -1.0 / (2.0 * d2 * (k * t.tau1 - t.tau2));
            let d0_l0 = hodge_star_bivec(mink_wedge(v, u)) * scale;
            Ok(Line3 { base: MinkVec3::new(m0.u1, m0.u2, 0.0) + d0_l0, v })
        }
    }
}

/// Solve the λ-quadratic for the cone–line intersection.
///
/// General position uses the closed-form coefficients of
/// [`crate::tau_domain`]; when a lies in the snap band of zero the equation
/// degenerates to the linear case λ = −c/(2b). Collinear arrays have
/// a = d₁₀², b = 0, and c given by the product formula
/// c = −‖D₁₀‖²‖D₂₀‖²‖D₂₁‖² / (4d₁₀²(kτ₁−τ₂)²).
pub fn solve_lambda(cfg: &SensorConfig, tau: TauPair) -> Result<QuadraticCase, LocalizeError> {
    let s = cfg.scale();
    match collinear_k(cfg) {
        None => {
            let a = tau_domain::coeff_a(cfg, tau);
            let b = tau_domain::coeff_b(cfg, tau);
            let c = tau_domain::coeff_c(cfg, tau);
            let tol = tau_domain::default_tau_tol(cfg);
            let a_band = tol * s * s * s;
            let b_band = tol * s * s * s * s / (2.0 * wedge2(cfg.d10, cfg.d20));
            if fmath::abs(a) <= a_band {
                let roots = if fmath::abs(b) <= fmath::abs(b_band) {
                    RootSet::None
                } else {
                    RootSet::One { lambda: -c / (2.0 * b), multiplicity: 1 }
                };
                return Ok(QuadraticCase { a, b, c, delta: b * b - a * c, roots });
            }
            let delta = b * b - a * c;
            let snap = tol::DISC_REL * fmath::max(b * b, fmath::abs(a * c));
            if delta < -snap {
                return Err(LocalizeError::NoRealRoots);
            }
            // Double-root band: snap when the two roots would land within
            // 1e−9 × scale of each other in the x-plane (their separation
            // there is 2·√(Δ/a) since ‖v‖ = √a).
            let eps_x = tol::REL_TOL_DEFAULT * s;
            let dbl = a * eps_x * eps_x / 4.0;
            if delta <= fmath::max(snap, dbl) {
                return Ok(QuadraticCase {
                    a,
                    b,
                    c,
                    delta,
                    roots: RootSet::One { lambda: -b / a, multiplicity: 2 },
                });
            }
            // Numerically stable pair: q = −(b + sign(b)·√Δ), roots q/a, c/q.
            let sq = fmath::sqrt(delta);
            let q = -(b + fmath::copysign(sq, b));
            let r1 = q / a;
            let r2 = c / q;
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            Ok(QuadraticCase {
                a,
                b,
                c,
                delta,
                roots: RootSet::Two { lambda_lo: lo, lambda_hi: hi },
            })
        }
        Some(k) => {
            let t = cfg.tau_to_work(tau);
            if dependent_line_dist(k, t) <= tau_domain::default_tau_tol(cfg) {
                let l10 = cfg.d10_len;
                if fmath::abs(fmath::abs(t.tau1) - l10) <= tau_domain::default_tau_tol(cfg) {
                    return Err(LocalizeError::CoincidentPlanes);
                }
                return Err(LocalizeError::DependentPlanes);
            }
            let (n10, n20, n21) = mink_norms(cfg, t);
            let d2 = cfg.d10_len * cfg.d10_len;
            let den = k * t.tau1 - t.tau2;
            let a = d2;
            let c = -(n10 * n20 * n21) / (4.0 * d2 * den * den);
            let delta = -a * c;
            // Root separation in the x-plane is 2·√(−c); snap accordingly.
            let eps_x = tol::REL_TOL_DEFAULT * s;
            let c_band = eps_x * eps_x / 4.0;
            if c > c_band {
                return Err(LocalizeError::NoRealRoots);
            }
            let roots = if c >= -c_band {
                RootSet::One { lambda: 0.0, multiplicity: 2 }
            } else {
                let r = fmath::sqrt(-c) / cfg.d10_len;
                RootSet::Two { lambda_lo: -r, lambda_hi: r }
            };
            Ok(QuadraticCase { a, b: 0.0, c, delta, roots })
        }
    }
}

/// Map a root λ (general position) to its x-plane candidate
/// x = π(L₀) + λ·∗((τ₂d₁₀ − τ₁d₂₀)∧e₃).
pub(crate) fn general_candidate(line: &Line3, lambda: f64) -> Point2 {
    (line.base + line.v * lambda).spatial()
}

/// Invert the measurement τ: the full fiber τ₂⁻¹(τ).
///
/// Every returned point is verified against the forward map to within
/// 1e−7 × scale, so infeasible measurements come back as empty `Points`
/// rather than an error.
pub fn locate(cfg: &SensorConfig, tau: TauPair) -> FiberResult {
    let s = cfg.scale();
    let lambda_snap = tol::REL_TOL_DEFAULT * s;
    let verify = tol::FORWARD_VERIFY_REL * s;
    match collinear_k(cfg) {
        None => {
            let line = match l21_line(cfg, tau) {
                Ok(l) => l,
                Err(_) => return FiberResult::Points(Vec::new()),
            };
            let case = match solve_lambda(cfg, tau) {
                Ok(c) => c,
                Err(_) => return FiberResult::Points(Vec::new()),
            };
            let mut out: Vec<FiberPoint> = Vec::new();
            let push = |lambda: f64, multiplicity: u8, out: &mut Vec<FiberPoint>| {
                if lambda <= lambda_snap {
                    let x = general_candidate(&line, lambda);
                    if tau2(cfg, x).dist(tau) <= verify {
                        out.push(FiberPoint { x, multiplicity });
                    }
                }
            };
            match case.roots {
                RootSet::None => {}
                RootSet::One { lambda, multiplicity } => push(lambda, multiplicity, &mut out),
                RootSet::Two { lambda_lo, lambda_hi } => {
                    push(lambda_lo, 1, &mut out);
                    push(lambda_hi, 1, &mut out);
                }
            }
            sort_points(&mut out);
            FiberResult::Points(out)
        }
        Some(k) => locate_collinear(cfg, tau, k, lambda_snap, verify),
    }
}

fn locate_collinear(
    cfg: &SensorConfig,
    tau: TauPair,
    k: f64,
    _lambda_snap: f64,
    verify: f64,
) -> FiberResult {
    let tol = tau_domain::default_tau_tol(cfg);
    let (l10, l20) = (cfg.d10_len, cfg.d20_len);
    let sgn = if k > 0.0 { 1.0 } else { -1.0 };
    let v_plus = TauPair::new(l10, sgn * l20);

    // Infinite fibers at the two special vertices: the outer part r^c of the
    // sensor line, on the side fixed by the sign of ⟨d₀(x), d₁₀⟩.
    for (vertex, want_negative) in [(v_plus, true), (-v_plus, false)] {
        if tau.dist(vertex) <= tol {
            let (_, _, ray_a, ray_b) = cfg
                .collinear_split()
                .expect("collinear geometry class must split the sensor line");
            let d10 = cfg.m[1] - cfg.m[0];
            for ray in [ray_a, ray_b] {
                let side_negative = ray.dir.dot(d10) < 0.0;
                if side_negative == want_negative {
                    return FiberResult::HalfLine { base: ray.base, direction: ray.dir };
                }
            }
            unreachable!("one outer ray lies on each side of m0");
        }
    }

    let t = cfg.tau_to_work(tau);
    if dependent_line_dist(k, t) <= tol {
        return FiberResult::Points(Vec::new());
    }

    let line = match l21_line(cfg, tau) {
        Ok(l) => l,
        Err(_) => return FiberResult::Points(Vec::new()),
    };
    let case = match solve_lambda(cfg, tau) {
        Ok(c) => c,
        Err(_) => return FiberResult::Points(Vec::new()),
    };
    // Half-cone admissibility: keep the C₀⁻ side.
    let (num, den) = tau_domain::collinear_rho_parts(cfg, tau);
    if num / den <= 0.0 {
        return FiberResult::Points(Vec::new());
    }
    let mut out: Vec<FiberPoint> = Vec::new();
    let push = |lambda: f64, multiplicity: u8, out: &mut Vec<FiberPoint>| {
        let x = (line.base + line.v * lambda).spatial();
        if tau2(cfg, x).dist(tau) <= verify {
            out.push(FiberPoint { x, multiplicity });
        }
    };
    match case.roots {
        RootSet::None => {}
        RootSet::One { lambda, multiplicity } => push(lambda, multiplicity, &mut out),
        RootSet::Two { lambda_lo, lambda_hi } => {
            push(lambda_lo, 1, &mut out);
            push(lambda_hi, 1, &mut out);
        }
    }
    sort_points(&mut out);
    FiberResult::Points(out)
}

fn sort_points(points: &mut [FiberPoint]) {
    points.sort_by(|p, q| {
        (p.x.u1, p.x.u2)
            .partial_cmp(&(q.x.u1, q.x.u2))
            .unwrap_or(core::cmp::Ordering::Equal)
    });
}

/// Independent brute-force inverter: scan a grid over `bounds` for minima of
/// the squared forward residual, polish each candidate with damped
/// Gauss–Newton, and merge duplicates (lexicographic order, radius
/// 1e−5 × box size).
///
/// Never reports `HalfLine`; at the collinear special vertices it returns
/// whatever grid-limited points survive, which callers must treat as a lower
/// bound on the true fiber.
pub fn oracle_locate(
    cfg: &SensorConfig,
    tau: TauPair,
    bounds: (Point2, Point2),
    grid_n: usize,
) -> FiberResult {
    assert!(grid_n >= 64, "oracle grid must be at least 64");
    let (lo, hi) = bounds;
    let (wx, wy) = (hi.u1 - lo.u1, hi.u2 - lo.u2);
    assert!(wx > 0.0 && wy > 0.0, "oracle box must be non-degenerate");
    let box_size = fmath::max(wx, wy);
    let cell = fmath::max(wx / grid_n as f64, wy / grid_n as f64);

    // The forward map is 2-Lipschitz, so a true preimage inside a cell keeps
    // the center residual below 2·cell·√2; take a comfortable margin.
    let detect = 8.0 * cell;
    let detect2 = detect * detect;

    let nv = grid_n + 1;
    let mut vals: Vec<f64> = Vec::with_capacity(nv * nv);
    for j in 0..nv {
        for i in 0..nv {
            let x = Point2::new(
                lo.u1 + wx * i as f64 / grid_n as f64,
                lo.u2 + wy * j as f64 / grid_n as f64,
            );
            let r = tau2(cfg, x);
            let (e1, e2) = (r.tau1 - tau.tau1, r.tau2 - tau.tau2);
            vals.push(e1 * e1 + e2 * e2);
        }
    }

    // Local minima below the detection threshold, best-first.
    let mut seeds: Vec<(f64, usize, usize)> = Vec::new();
    for j in 0..nv {
        for i in 0..nv {
            let v = vals[j * nv + i];
            if v > detect2 {
                continue;
            }
            let mut is_min = true;
            'scan: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= nv as i64 || jj >= nv as i64 {
                        continue;
                    }
                    if vals[jj as usize * nv + ii as usize] < v {
                        is_min = false;
                        break 'scan;
                    }
                }
            }
            if is_min {
                seeds.push((v, i, j));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    seeds.truncate(64);

    let s = cfg.scale();
    let accept = 1e-8 * s;
    // Wide enough to absorb the Gauss-Newton stall floor at fold points on
    // the degeneracy half-lines (observed spread ~ 1e-6 x box there).
    let merge = 1e-5 * box_size;
    let mut found: Vec<Point2> = Vec::new();
    for (_, i, j) in seeds {
        let x0 = Point2::new(
            lo.u1 + wx * i as f64 / grid_n as f64,
            lo.u2 + wy * j as f64 / grid_n as f64,
        );
        if let Some(x) = gauss_newton(cfg, tau, x0, s) {
            if tau2(cfg, x).dist(tau) <= accept {
                found.push(x);
            }
        }
    }
    // Deterministic merge: lexicographic order, then cluster by radius.
    found.sort_by(|p, q| {
        (p.u1, p.u2)
            .partial_cmp(&(q.u1, q.u2))
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut merged: Vec<Point2> = Vec::new();
    for x in found {
        if merged.iter().all(|m| m.dist(x) > merge) {
            merged.push(x);
        }
    }
    FiberResult::Points(
        merged
            .into_iter()
            .map(|x| FiberPoint { x, multiplicity: 1 })
            .collect(),
    )
}

/// Damped Gauss–Newton (here: damped Newton on the square 2×2 system) for
/// tau2(x) = τ; `None` when it stalls without converging.
fn gauss_newton(cfg: &SensorConfig, tau: TauPair, mut x: Point2, s: f64) -> Option<Point2> {
    let target = 1e-12 * s;
    let mut r = tau2(cfg, x).dist(tau);
    for _ in 0..50 {
        if r <= target {
            return Some(x);
        }
        let jac = jacobian(cfg, x).ok()?;
        let f = tau2(cfg, x);
        let (e1, e2) = (f.tau1 - tau.tau1, f.tau2 - tau.tau2);
        let det = jac.det();
        if fmath::abs(det) < 1e-14 {
            return Some(x);
        }
        // Solve J·δ = −e.
        let dx = (-e1 * jac.row2.u2 + e2 * jac.row1.u2) / det;
        let dy = (-e2 * jac.row1.u1 + e1 * jac.row2.u1) / det;
        let mut step = EucVec2::new(dx, dy);
        let mut improved = false;
        for _ in 0..20 {
            let xn = x + step;
            let rn = tau2(cfg, xn).dist(tau);
            if rn < r {
                x = xn;
                r = rn;
                improved = true;
                break;
            }
            step = step * 0.5;
        }
        if !improved {
            return Some(x);
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior_algebra::mink_inner;
    use crate::sensor_config::{build_config, DEFAULT_REL_TOL};
    use crate::tau_domain::{classify_tau, default_tau_tol, FiberCount, NotInImageSub, RegionLabel, UComponent};
    use crate::tdoa_forward::rank_at;
    use crate::tdoa_forward::RankLabel;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn demo() -> SensorConfig {
        build_config(
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 2.0),
            DEFAULT_REL_TOL,
        )
        .unwrap()
    }

    fn mirror_demo() -> SensorConfig {
        build_config(
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(-2.0, 2.0),
            DEFAULT_REL_TOL,
        )
        .unwrap()
    }

    fn swapped_demo() -> SensorConfig {
        build_config(
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(2.0, 0.0),
            DEFAULT_REL_TOL,
        )
        .unwrap()
    }

    fn collinear_demo() -> SensorConfig {
        build_config(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(-1.0, 0.0),
            DEFAULT_REL_TOL,
        )
        .unwrap()
    }

    fn tp(a: f64, b: f64) -> TauPair {
        TauPair::new(a, b)
    }

    /// Minkowski residual of the plane equation ⟨D_i0, D₀(X)⟩ = ½‖D_i0‖² at
    /// an absolute point X.
    fn plane_residual(cfg: &SensorConfig, tau: TauPair, x: MinkVec3, i: usize) -> f64 {
        let t = cfg.tau_to_work(tau);
        let (d, taui) = if i == 1 { (cfg.d10, t.tau1) } else { (cfg.d20, t.tau2) };
        let di0 = d.lift(taui);
        let m0 = cfg.work_m(0);
        let d0x = x - MinkVec3::new(m0.u1, m0.u2, 0.0);
        mink_inner(di0, d0x) - 0.5 * mink_inner(di0, di0)
    }

    #[test]
    fn l21_line_demo_origin() {
        let cfg = demo();
        let line = l21_line(&cfg, tp(0.0, 0.0)).unwrap();
        // Circumcenter of the right triangle: (1,1); third component zero.
        assert_relative_eq!(line.base.u1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(line.base.u2, 1.0, epsilon = 1e-12);
        assert_eq!(line.base.u3, 0.0);
        // Both plane equations hold at base and at base + v.
        for x in [line.base, line.base + line.v] {
            assert!(plane_residual(&cfg, tp(0.0, 0.0), x, 1).abs() <= 1e-10);
            assert!(plane_residual(&cfg, tp(0.0, 0.0), x, 2).abs() <= 1e-10);
        }
    }

    #[test]
    fn l21_line_plane_incidence_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for cfg in [demo(), mirror_demo(), swapped_demo()] {
            for _ in 0..500 {
                let tau = tp(rng.gen_range(-2.0..2.0), rng.gen_range(-2.5..2.5));
                let line = l21_line(&cfg, tau).unwrap();
                assert_eq!(line.base.u3, 0.0);
                for x in [line.base, line.base + line.v, line.base - line.v * 3.0] {
                    assert!(plane_residual(&cfg, tau, x, 1).abs() <= 1e-9);
                    assert!(plane_residual(&cfg, tau, x, 2).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn l21_line_collinear_cases() {
        let cfg = collinear_demo();
        // Dependent line τ₂ = −τ₁: parallel distinct planes.
        assert_eq!(
            l21_line(&cfg, tp(0.5, -0.5)),
            Err(LocalizeError::DependentPlanes)
        );
        // On the line at τ₁ = ±d10: coincident planes.
        assert_eq!(
            l21_line(&cfg, tp(1.0, -1.0)),
            Err(LocalizeError::CoincidentPlanes)
        );
        // Off the line: horizontal line satisfying both plane equations.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let tau = tp(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            if (tau.tau2 + tau.tau1).abs() < 1e-3 {
                continue;
            }
            let line = l21_line(&cfg, tau).unwrap();
            assert_eq!(line.v.u3, 0.0);
            for x in [line.base, line.base + line.v, line.base - line.v] {
                assert!(plane_residual(&cfg, tau, x, 1).abs() <= 1e-9);
                assert!(plane_residual(&cfg, tau, x, 2).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn solve_lambda_cases() {
        let cfg = demo();
        // Origin: a < 0, roots of opposite sign.
        let case = solve_lambda(&cfg, tp(0.0, 0.0)).unwrap();
        assert!(case.a < 0.0);
        match case.roots {
            RootSet::Two { lambda_lo, lambda_hi } => {
                assert!(lambda_lo < 0.0 && lambda_hi > 0.0);
            }
            other => panic!("expected two roots, got {:?}", other),
        }
        // R⁰: double root at λ = 0.
        let case = solve_lambda(&cfg, tp(2.0, 8.0f64.sqrt())).unwrap();
        match case.roots {
            RootSet::One { lambda, multiplicity } => {
                assert!(lambda.abs() <= 1e-12);
                assert_eq!(multiplicity, 2);
            }
            other => panic!("expected a double root, got {:?}", other),
        }
        // (1.9, 2.7): two distinct negative roots.
        let case = solve_lambda(&cfg, tp(1.9, 2.7)).unwrap();
        assert_relative_eq!(case.delta, 0.232596, epsilon = 1e-9);
        match case.roots {
            RootSet::Two { lambda_lo, lambda_hi } => {
                assert!(lambda_lo < lambda_hi && lambda_hi < 0.0);
            }
            other => panic!("expected two negative roots, got {:?}", other),
        }
        // Outside exactly one facet pair: Δ < 0, no real roots.
        assert_eq!(solve_lambda(&cfg, tp(2.5, 2.0)), Err(LocalizeError::NoRealRoots));
    }

    #[test]
    fn quadratic_roots_satisfy_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for cfg in [demo(), mirror_demo()] {
            for _ in 0..2000 {
                let tau = tp(rng.gen_range(-2.0..2.0), rng.gen_range(-2.8..2.8));
                let Ok(case) = solve_lambda(&cfg, tau) else { continue };
                let maxc = case
                    .a
                    .abs()
                    .max(case.b.abs())
                    .max(case.c.abs())
                    .max(1e-300);
                let eval = |l: f64| case.a * l * l + 2.0 * case.b * l + case.c;
                match case.roots {
                    RootSet::None => {}
                    RootSet::One { lambda, multiplicity: 1 } => {
                        // Linear regime: residual scales with the linear part.
                        assert!(eval(lambda).abs() <= 1e-9 * maxc * (1.0 + lambda * lambda));
                    }
                    RootSet::One { lambda, .. } => {
                        assert!(eval(lambda).abs() <= 1e-7 * maxc * (1.0 + lambda * lambda));
                    }
                    RootSet::Two { lambda_lo, lambda_hi } => {
                        for l in [lambda_lo, lambda_hi] {
                            assert!(
                                eval(l).abs() <= 1e-9 * maxc * (1.0 + l * l),
                                "residual {} at λ={} (case {:?})",
                                eval(l),
                                l,
                                case
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn geometric_identities_match_coefficients() {
        // a = ‖v‖², b = ⟨v, D₀(L₀)⟩, c = ‖D₀(L₀)‖² — the line geometry and
        // the closed forms must agree.
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for cfg in [demo(), mirror_demo(), swapped_demo()] {
            let m0 = cfg.work_m(0);
            for _ in 0..1000 {
                let tau = tp(rng.gen_range(-2.0..2.0), rng.gen_range(-2.8..2.8));
                let line = l21_line(&cfg, tau).unwrap();
                let d0_l0 = line.base - MinkVec3::new(m0.u1, m0.u2, 0.0);
                let a = mink_inner(line.v, line.v);
                let b = mink_inner(line.v, d0_l0);
                let c = mink_inner(d0_l0, d0_l0);
                assert_relative_eq!(a, tau_domain::coeff_a(&cfg, tau), epsilon = 1e-9, max_relative = 1e-9);
                assert_relative_eq!(b, tau_domain::coeff_b(&cfg, tau), epsilon = 1e-9, max_relative = 1e-9);
                assert_relative_eq!(c, tau_domain::coeff_c(&cfg, tau), epsilon = 1e-9, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn locate_examples() {
        let cfg = demo();
        // Origin: intersection of the two perpendicular bisectors.
        let fiber = locate(&cfg, tp(0.0, 0.0));
        let pts = fiber.points();
        assert_eq!(pts.len(), 1);
        assert_relative_eq!(pts[0].x.u1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(pts[0].x.u2, 1.0, epsilon = 1e-12);

        // Round trip through a known source.
        let x = Point2::new(5.0, 3.0);
        let fiber = locate(&cfg, tau2(&cfg, x));
        assert!(fiber.points().iter().any(|p| p.x.dist(x) <= 1e-7 * cfg.scale()));

        // R⁰ maps back to the reference sensor with multiplicity 2.
        let fiber = locate(&cfg, tp(2.0, 8.0f64.sqrt()));
        let pts = fiber.points();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].x.dist(Point2::new(0.0, 0.0)) <= 1e-9);
        assert_eq!(pts[0].multiplicity, 2);

        // The excluded vertex −R⁰ has the spurious λ = 0 root killed by
        // forward verification.
        let fiber = locate(&cfg, tp(-2.0, -(8.0f64.sqrt())));
        assert_eq!(fiber.points().len(), 0);

        // R¹ maps back to m1.
        let fiber = locate(&cfg, tp(-2.0, 0.0));
        let pts = fiber.points();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].x.dist(Point2::new(2.0, 0.0)) <= 1e-9);
    }

    #[test]
    fn locate_collinear_halfline() {
        let cfg = collinear_demo();
        match locate(&cfg, tp(1.0, -1.0)) {
            FiberResult::HalfLine { base, direction } => {
                assert_relative_eq!(base.u1, -1.0);
                assert_relative_eq!(base.u2, 0.0);
                assert_relative_eq!(direction.u1, -1.0);
                assert_relative_eq!(direction.u2, 0.0);
            }
            other => panic!("expected half-line, got {:?}", other),
        }
        match locate(&cfg, tp(-1.0, 1.0)) {
            FiberResult::HalfLine { base, direction } => {
                assert_relative_eq!(base.u1, 1.0);
                assert!(direction.u1 > 0.0);
            }
            other => panic!("expected half-line, got {:?}", other),
        }
        // Dependent line inside P₂: empty.
        assert_eq!(locate(&cfg, tp(0.5, -0.5)).points().len(), 0);
        // Wrong side of the dependent line: empty.
        assert_eq!(locate(&cfg, tp(0.2, -0.5)).points().len(), 0);
    }

    #[test]
    fn collinear_round_trip_and_mirror_symmetry() {
        let cfg = collinear_demo();
        let s = cfg.scale();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let mut doubles = 0;
        for _ in 0..2000 {
            let x = Point2::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            if x.u2.abs() < 1e-4 {
                continue; // on the sensor line: boundary cases
            }
            let tau = tau2(&cfg, x);
            let fiber = locate(&cfg, tau);
            let pts = fiber.points();
            assert!(
                pts.iter().any(|p| p.x.dist(x) <= 1e-7 * s),
                "lost source {:?} (fiber {:?})",
                x,
                fiber
            );
            if pts.len() == 2 {
                doubles += 1;
                // Mirror pair across the sensor line (the x-axis here).
                let (p, q) = (pts[0].x, pts[1].x);
                assert_relative_eq!(p.u1, q.u1, epsilon = 1e-9 * s);
                assert_relative_eq!(p.u2, -q.u2, epsilon = 1e-9 * s);
            }
        }
        assert!(doubles > 1500, "mirror pairs should dominate off-line sources");
    }

    #[test]
    fn general_round_trip_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for cfg in [demo(), mirror_demo(), swapped_demo()] {
            let s = cfg.scale();
            let band = 1e-6 * s;
            let mut done = 0;
            while done < 10_000 {
                let x = Point2::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
                if cfg.m.iter().any(|m| x.dist(*m) <= band) {
                    continue;
                }
                if rank_at(&cfg, x, band) != RankLabel::Rank2 {
                    continue;
                }
                if !crate::sensor_config::halfline_membership(&cfg, x, band).is_empty() {
                    continue;
                }
                done += 1;
                let tau = tau2(&cfg, x);
                let fiber = locate(&cfg, tau);
                assert!(
                    fiber.points().iter().any(|p| p.x.dist(x) <= 1e-7 * s),
                    "lost source {:?} in cfg {:?}",
                    x,
                    cfg.m
                );
            }
        }
    }

    #[test]
    fn fiber_count_matches_classification() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let cfg = demo();
        let tol = default_tau_tol(&cfg);
        let s = cfg.scale();
        let p2 = tau_domain::build_p2(&cfg);
        let mut done = 0;
        while done < 10_000 {
            let tau = tp(rng.gen_range(-2.0..2.0), rng.gen_range(-2.9..2.9));
            if p2.boundary_residual(tau) > -1e-6 * s {
                continue;
            }
            if tau_domain::coeff_a(&cfg, tau).abs() < 1e-6 * s * s * s * s {
                continue;
            }
            if tau_domain::coeff_b_cubic(&cfg, tau).abs() < 1e-6 * s * s * s * s * s {
                continue;
            }
            done += 1;
            let label = classify_tau(&cfg, tau, tol);
            let expect = match label.fiber_count() {
                FiberCount::Zero => 0,
                FiberCount::One => 1,
                FiberCount::Two => 2,
                FiberCount::Infinite => continue,
            };
            let got = locate(&cfg, tau).points().len();
            assert_eq!(
                got, expect,
                "fiber mismatch at {:?}: classified {:?}",
                tau, label
            );
        }
    }

    #[test]
    fn cone_membership_of_located_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let cfg = demo();
        let s = cfg.scale();
        let m0 = cfg.work_m(0);
        let mut done = 0;
        while done < 2000 {
            let x = Point2::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
            let tau = tau2(&cfg, x);
            let line = l21_line(&cfg, tau).unwrap();
            let Ok(case) = solve_lambda(&cfg, tau) else { continue };
            let lambdas: Vec<f64> = match case.roots {
                RootSet::None => continue,
                RootSet::One { lambda, .. } => alloc::vec![lambda],
                RootSet::Two { lambda_lo, lambda_hi } => alloc::vec![lambda_lo, lambda_hi],
            };
            done += 1;
            let t = cfg.tau_to_work(tau);
            for lambda in lambdas {
                if lambda > tol::REL_TOL_DEFAULT * s {
                    continue;
                }
                let big_x = line.base + line.v * lambda;
                let d0x = big_x - MinkVec3::new(m0.u1, m0.u2, 0.0);
                // On the cone: ‖D₀(X)‖² = 0.
                assert!(
                    mink_inner(d0x, d0x).abs() <= 1e-9 * s * s,
                    "cone residual {} at {:?}",
                    mink_inner(d0x, d0x),
                    tau
                );
                // Half-cone inequality: X₃ ≤ min(τ₁, τ₂, 0).
                let bound = f64::min(f64::min(t.tau1, t.tau2), 0.0);
                assert!(d0x.u3 <= bound + 1e-9 * s);
            }
        }
    }

    /// Count crossings of the open segment (a, b) with the half-line
    /// base + s·dir, s ≥ 0.
    fn segment_ray_crossings(a: Point2, b: Point2, base: Point2, dir: EucVec2) -> usize {
        let seg = b - a;
        let den = wedge2(seg, dir);
        if den.abs() < 1e-14 {
            return 0;
        }
        let rel = base - a;
        let t = wedge2(rel, dir) / den;
        let u = wedge2(rel, seg) / den;
        // t along the segment, u along the ray (sign matches because
        // wedge2(seg, dir) appears in both denominators).
        if t > 0.0 && t < 1.0 && u >= 0.0 {
            1
        } else {
            0
        }
    }

    #[test]
    fn double_cover_sides_of_u0() {
        // For τ ∈ U₀ the two preimages are separated by r₁⁺ ∪ r₂⁺.
        let cfg = demo();
        let tol = default_tau_tol(&cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let r1 = cfg.line_split(1);
        let r2 = cfg.line_split(2);
        let mut done = 0;
        while done < 500 {
            let tau = tp(rng.gen_range(1.0..2.0), rng.gen_range(1.5..2.8));
            if classify_tau(&cfg, tau, tol)
                != (RegionLabel::InImageDouble { component: UComponent::U0 })
            {
                continue;
            }
            let pts = match locate(&cfg, tau) {
                FiberResult::Points(p) => p,
                _ => continue,
            };
            if pts.len() != 2 {
                continue;
            }
            done += 1;
            let (a, b) = (pts[0].x, pts[1].x);
            assert!(a.dist(b) > 1e-9);
            let crossings = segment_ray_crossings(a, b, r1.plus.base, r1.plus.dir)
                + segment_ray_crossings(a, b, r2.plus.base, r2.plus.dir);
            assert!(
                crossings % 2 == 1,
                "segment {:?}–{:?} crosses r₁⁺∪r₂⁺ {} times for τ = {:?}",
                a,
                b,
                crossings,
                tau
            );
        }
    }

    #[test]
    fn oracle_agrees_with_locate() {
        let cfg = demo();
        let s = cfg.scale();
        let tol = default_tau_tol(&cfg);
        let bounds = (Point2::new(-12.0, -12.0), Point2::new(12.0, 12.0));
        let p2 = tau_domain::build_p2(&cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let mut done = 0;
        while done < 200 {
            let tau = tp(rng.gen_range(-2.0..2.0), rng.gen_range(-2.8..2.8));
            if p2.boundary_residual(tau) > -1e-2 * s {
                continue;
            }
            if tau_domain::coeff_a(&cfg, tau).abs() < 1e-2 {
                continue;
            }
            if tau_domain::coeff_b_cubic(&cfg, tau).abs() < 1e-2 {
                continue;
            }
            let label = classify_tau(&cfg, tau, tol);
            if matches!(label, RegionLabel::NotInImage { sub: NotInImageSub::OutsideP2 }) {
                continue;
            }
            let fiber = locate(&cfg, tau);
            // Keep only fibers comfortably inside the oracle box.
            if fiber
                .points()
                .iter()
                .any(|p| p.x.u1.abs() > 10.0 || p.x.u2.abs() > 10.0)
            {
                continue;
            }
            done += 1;
            let oracle = oracle_locate(&cfg, tau, bounds, 128);
            assert_eq!(
                oracle.points().len(),
                fiber.points().len(),
                "oracle/closed-form mismatch at {:?} ({:?} vs {:?})",
                tau,
                oracle,
                fiber
            );
            for p in fiber.points() {
                assert!(
                    oracle
                        .points()
                        .iter()
                        .any(|q| q.x.dist(p.x) <= 1e-5 * s),
                    "oracle missed {:?} for τ = {:?}",
                    p.x,
                    tau
                );
            }
        }
    }

    #[test]
    fn oracle_outside_p2_is_empty() {
        let cfg = demo();
        let bounds = (Point2::new(-10.0, -10.0), Point2::new(10.0, 10.0));
        let fiber = oracle_locate(&cfg, tp(5.0, -1.0), bounds, 64);
        assert_eq!(fiber.points().len(), 0);
    }

    #[test]
    fn oracle_facet_point_merges_to_one() {
        let cfg = demo();
        // On facet τ₁ = 2 in the in-image arc: the double root collapses to
        // one point on the half-line r₂⁺.
        let fiber = oracle_locate(
            &cfg,
            tp(2.0, 2.5),
            (Point2::new(-16.0, -16.0), Point2::new(16.0, 16.0)),
            192,
        );
        assert_eq!(fiber.points().len(), 1);
        let x = fiber.points()[0].x;
        // r₂⁺ is the negative x-axis (beyond m0 away from m1).
        assert!(x.u1 < 0.0 && x.u2.abs() <= 1e-5);
    }
}
