use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Density of the semicircle law on `[-2, 2]`.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// Closed-form distribution function, clamped to 0 and 1 off `[-2, 2]`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        return 0.0;
    }
    if x >= 2.0 {
        return 1.0;
    }
    0.5 + (x * (4.0 - x * x).sqrt() + 4.0 * (x / 2.0).asin()) / (4.0 * PI)
}

/// Inverse of [`semicircle_cdf`] by Newton with a bisection fallback.
pub fn semicircle_quantile(r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain(format!("probability {r} outside [0, 1]")));
    }
    if r == 0.0 {
        return Ok(-2.0);
    }
    if r == 1.0 {
        return Ok(2.0);
    }
    if r == 0.5 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (-2.0f64, 2.0f64);
    let mut x = 0.0;
    for _ in 0..200 {
        let f = semicircle_cdf(x) - r;
        if f == 0.0 {
            return Ok(x);
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = semicircle_density(x);
        let step = x - f / d;
        let next = if d > 0.0 && step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-16 * x.abs().max(1.0) || hi - lo <= 4.0 * f64::EPSILON {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Convergence(format!("semicircle quantile at r = {r}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson;

    #[test]
    fn cdf_landmarks() {
        assert_eq!(semicircle_cdf(0.0), 0.5);
        assert_eq!(semicircle_cdf(2.0), 1.0);
        assert_eq!(semicircle_cdf(-2.0), 0.0);
        assert_eq!(semicircle_cdf(3.0), 1.0);
        assert_eq!(semicircle_cdf(-7.0), 0.0);
    }

    #[test]
    fn cdf_matches_integrated_density() {
        for &x in &[-1.7, -0.3, 0.9, 1.99] {
            let q = adaptive_simpson(semicircle_density, -2.0, x, 1e-12);
            assert!((q - semicircle_cdf(x)).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn quantile_round_trip() {
        for &x in &[-1.5, -0.5, 0.7] {
            let back = semicircle_quantile(semicircle_cdf(x)).unwrap();
            assert!((back - x).abs() < 1e-10, "x={x}: {back}");
        }
        for k in 1..100 {
            let r = k as f64 / 100.0;
            let x = semicircle_quantile(r).unwrap();
            assert!((semicircle_cdf(x) - r).abs() < 1e-14);
        }
        assert!(semicircle_quantile(-0.1).is_err());
        assert!(semicircle_quantile(1.1).is_err());
    }
}
