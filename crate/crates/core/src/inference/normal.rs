//! Standard normal tail probabilities.

use std::f64::consts::FRAC_1_SQRT_2;

/// `Φ(x)`, the standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `1 − Φ(x)`, computed without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Two-sided p-value `2(1 − Φ(|z|))`.
pub fn two_sided_p_value(z: f64) -> f64 {
    libm::erfc(z.abs() * FRAC_1_SQRT_2).min(1.0)
}
