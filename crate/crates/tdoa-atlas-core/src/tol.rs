//! Tolerance policy shared by the classifier and the localizer.
//!
//! All geometric snap decisions are *relative*: a configuration with
//! characteristic length `s` (here `s = d10 + d20`) uses absolute bands scaled
//! by the appropriate power of `s`, so classification commutes with uniform
//! scaling of the sensor layout.

/// Default relative tolerance for boundary snapping.
pub const REL_TOL_DEFAULT: f64 = 1e-9;

/// Relative band for deciding the sign of the discriminant b² − a·c.
///
/// The discriminant is compared against `DISC_REL * max(b², |a·c|)`, the
/// natural rounding scale of the subtraction itself.
pub const DISC_REL: f64 = 1e-12;

/// Relative tolerance used when verifying a candidate source against the
/// forward map (filters spurious algebraic roots such as λ = 0 ↦ m₀).
pub const FORWARD_VERIFY_REL: f64 = 1e-7;

/// Relative collinearity threshold: the triangle is treated as degenerate
/// when |sin of the angle at m₀| falls below this.
pub const COLLINEAR_REL: f64 = 1e-12;
