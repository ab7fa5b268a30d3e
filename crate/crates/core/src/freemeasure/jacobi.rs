use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Law of `q u* p u q` for free Haar `u` and projections of traces
/// `alpha = tr p`, `beta = tr q`: atoms at 0 and 1 plus the density
/// `sqrt((r+ - x)(x - r-)) / (2 pi x (1 - x))` on `[r-, r+]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeJacobiLaw {
    pub alpha: f64,
    pub beta: f64,
    pub atom0: f64,
    pub atom1: f64,
    pub r_minus: f64,
    pub r_plus: f64,
}

const CDF_TOL: f64 = 1e-13;

pub fn free_jacobi_law(alpha: f64, beta: f64) -> Result<FreeJacobiLaw> {
    FreeJacobiLaw::new(alpha, beta)
}

impl FreeJacobiLaw {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::domain(format!("{name} = {v} outside (0, 1)")));
            }
        }
        let centre = alpha + beta - 2.0 * alpha * beta;
        let radius = 2.0 * (alpha * beta * (1.0 - alpha) * (1.0 - beta)).sqrt();
        Ok(FreeJacobiLaw {
            alpha,
            beta,
            atom0: 1.0 - alpha.min(beta),
            atom1: (alpha + beta - 1.0).max(0.0),
            r_minus: (centre - radius).clamp(0.0, 1.0),
            r_plus: (centre + radius).clamp(0.0, 1.0),
        })
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= self.r_minus || x >= self.r_plus || x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        ((self.r_plus - x) * (x - self.r_minus)).sqrt() / (TAU * x * (1.0 - x))
    }

    // Integrand after x = r- + w(1 - cos phi), w = (r+ - r-)/2. The two
    // factors w(1-c)/x and w(1+c)/(1-x) stay bounded even when r- = 0 or
    // r+ = 1, where the original density has 1/sqrt singularities.
    fn substituted(&self, phi: f64) -> f64 {
        let w = 0.5 * (self.r_plus - self.r_minus);
        let one_minus_c = 2.0 * (phi / 2.0).sin().powi(2);
        let one_plus_c = 2.0 * (phi / 2.0).cos().powi(2);
        let ratio = |num: f64, offset: f64| {
            let den = offset + num;
            if den == 0.0 {
                1.0
            } else {
                num / den
            }
        };
        let left = ratio(w * one_minus_c, self.r_minus);
        let right = ratio(w * one_plus_c, 1.0 - self.r_plus);
        left * right / TAU
    }

    fn phi_of(&self, x: f64) -> f64 {
        let w = 0.5 * (self.r_plus - self.r_minus);
        if w <= 0.0 {
            return if x >= self.r_plus { PI } else { 0.0 };
        }
        (1.0 - (x - self.r_minus) / w).clamp(-1.0, 1.0).acos()
    }

    /// Mass of the continuous part on `[r-, x]`.
    pub fn continuous_mass_to(&self, x: f64) -> f64 {
        if x <= self.r_minus {
            return 0.0;
        }
        let phi = self.phi_of(x.min(self.r_plus));
        adaptive_simpson(|p| self.substituted(p), 0.0, phi, CDF_TOL)
    }

    pub fn continuous_mass(&self) -> f64 {
        self.continuous_mass_to(self.r_plus)
    }

    pub fn total_mass(&self) -> f64 {
        self.atom0 + self.atom1 + self.continuous_mass()
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut c = self.continuous_mass_to(x);
        if x >= 0.0 {
            c += self.atom0;
        }
        if x >= 1.0 {
            c += self.atom1;
        }
        c.min(1.0)
    }

    /// `P(X < x)`, the left limit of the CDF; differs from [`cdf`](Self::cdf)
    /// only at the atoms.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let mut c = self.continuous_mass_to(x);
        if x > 0.0 {
            c += self.atom0;
        }
        if x > 1.0 {
            c += self.atom1;
        }
        c.min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_half_case() {
        let law = free_jacobi_law(0.5, 0.5).unwrap();
        assert_eq!(law.atom0, 0.5);
        assert_eq!(law.atom1, 0.0);
        assert!(law.r_minus.abs() < 1e-15);
        assert!((law.r_plus - 1.0).abs() < 1e-15);
        for k in 1..=98 {
            let x = 0.01 * k as f64;
            let arcsine = 1.0 / (TAU * (x * (1.0 - x)).sqrt());
            assert!((law.density(x) - arcsine).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn three_quarters_case() {
        let law = free_jacobi_law(0.75, 0.75).unwrap();
        assert_eq!(law.atom0, 0.25);
        assert_eq!(law.atom1, 0.5);
        assert!(law.r_minus.abs() < 1e-15);
        assert!((law.r_plus - 0.75).abs() < 1e-15);
    }

    #[test]
    fn total_mass_is_one() {
        for &(a, b) in &[(0.5, 0.5), (0.75, 0.25), (0.9, 0.3), (0.75, 0.75), (0.2, 0.6)] {
            let law = free_jacobi_law(a, b).unwrap();
            assert!((law.total_mass() - 1.0).abs() < 1e-6, "({a},{b}): {}", law.total_mass());
            let expect = a.min(b) - (a + b - 1.0).max(0.0);
            assert!((law.continuous_mass() - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn cdf_against_direct_quadrature() {
        // interior support, no endpoint singularities: integrate the density
        let law = free_jacobi_law(0.9, 0.3).unwrap();
        assert!(law.r_minus > 0.0 && law.r_plus < 1.0);
        let x = 0.5 * (law.r_minus + law.r_plus);
        let direct = adaptive_simpson(|y| law.density(y), law.r_minus, x, 1e-12);
        assert!((law.continuous_mass_to(x) - direct).abs() < 1e-8);
        assert!((law.cdf(0.0) - law.atom0).abs() < 1e-15);
        assert_eq!(law.cdf_left(0.0), 0.0);
        assert!((law.cdf(1.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(free_jacobi_law(0.0, 0.5).is_err());
        assert!(free_jacobi_law(0.5, 1.0).is_err());
        assert!(free_jacobi_law(f64::NAN, 0.5).is_err());
    }
}
