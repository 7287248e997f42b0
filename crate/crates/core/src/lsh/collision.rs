//! Collision probability of the Gaussian (2-stable) hash.

use std::f64::consts::{PI, SQRT_2};

/// Probability that two points at distance `c` land in the same bucket of
/// one hash `floor((w.x + b) / width)` with Gaussian `w`.
///
/// Uses the closed form with `t = width / c`:
/// `1 - 2 Phi(-t) - 2 / (sqrt(2 pi) t) (1 - exp(-t^2 / 2))`.
pub fn collision_probability(c: f64, width: f64) -> f64 {
    debug_assert!(width > 0.0);
    if c <= 0.0 {
        return 1.0;
    }
    if c.is_infinite() {
        return 0.0;
    }
    let t = width / c;
    if t < 1e-4 {
        // leading terms of the series; the closed form cancels badly here
        return (2.0 / PI).sqrt() * (t / 2.0 - t * t * t / 24.0);
    }
    let two_phi = libm::erfc(t / SQRT_2); // 2 Phi(-t)
    let p = 1.0 - two_phi - 2.0 / ((2.0 * PI).sqrt() * t) * (-(t * t) / 2.0).exp_m1().abs();
    p.clamp(0.0, 1.0)
}

/// `ln f(1/contrast) / ln f(1)` at a width given in units of the mean
/// distance.
pub fn g_exponent(contrast: f64, width: f64) -> f64 {
    let near = collision_probability(1.0 / contrast, width);
    let far = collision_probability(1.0, width);
    near.ln() / far.ln()
}
