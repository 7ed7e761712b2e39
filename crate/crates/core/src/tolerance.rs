//! Tolerances and certification ceilings shared by tests and the CLI.

/// Identity checks: `|lhs - rhs| / max(1, scale) < IDENTITY`.
pub const IDENTITY: f64 = 1e-8;

/// Convolution identities such as `f * d sigma = f * K^ + mean(f)`.
pub const CONVOLUTION_IDENTITY: f64 = 1e-9;

/// Ceiling for `||K^||_inf / q`.
pub const KERNEL_SUP_CEILING: f64 = 2.0;

/// Ceiling for the sup-norm kernel bound constant.
pub const LINF_CEILING: f64 = 2.5;

/// Allowed growth of the regime-matched constant between the smallest and
/// largest q of a sweep.
pub const GROWTH_CEILING: f64 = 1.5;

/// Plancherel-exact proof bounds hold with constant at most `1 + PROOF_SLACK`.
pub const PROOF_SLACK: f64 = 1e-9;

/// Ceiling for the averaging ratio at the critical exponents.
pub const AVERAGING_CEILING: f64 = 4.0;

/// Consecutive-q ratio of battery maxima must lie in this band.
pub const CONSECUTIVE_BAND: (f64, f64) = (0.5, 2.0);

/// Two-sided decay band for normalized `|(d sigma)^v|`.
pub const DECAY_BAND: (f64, f64) = (0.5, 2.0);

/// Accepted fitted slope for the subspace extremizer outside the hull.
pub const SHARPNESS_SLOPE_BAND: (f64, f64) = (0.1, 0.3);

/// Relative closeness with the scale floored at 1.
pub fn close(lhs: f64, rhs: f64, scale: f64, tol: f64) -> bool {
    (lhs - rhs).abs() / scale.max(1.0) < tol
}
