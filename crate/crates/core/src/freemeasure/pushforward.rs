use num_complex::Complex64;

use crate::error::{Error, Result};

use super::nu::SpectralMeasureNuT;
use super::semicircle::semicircle_cdf;

/// The monotone transport `f_t = exp(i F_t^{-1} o F_sc)` taking the
/// semicircle law on `[-2, 2]` to the limit law on the arc.
#[derive(Clone, Debug)]
pub struct Pushforward {
    nu: SpectralMeasureNuT,
}

impl Pushforward {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t < 4.0) {
            return Err(Error::domain(format!("pushforward needs 0 < t < 4, got {t}")));
        }
        Ok(Pushforward {
            nu: SpectralMeasureNuT::new(t)?,
        })
    }

    pub fn measure(&self) -> &SpectralMeasureNuT {
        &self.nu
    }

    /// Angle `g_t(x)`; `x` is clamped to `[-2, 2]`.
    pub fn angle(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::domain("pushforward of NaN"));
        }
        self.nu.quantile(semicircle_cdf(x.clamp(-2.0, 2.0)))
    }

    pub fn apply(&self, x: f64) -> Result<Complex64> {
        Ok(Complex64::cis(self.angle(x)?))
    }
}

pub fn pushforward_ft(t: f64, x: f64) -> Result<Complex64> {
    Pushforward::new(t)?.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freemeasure::semicircle::semicircle_quantile;

    #[test]
    fn fixed_points() {
        let f = Pushforward::new(1.0).unwrap();
        let a = f.measure().half_width();
        assert_eq!(f.apply(0.0).unwrap(), Complex64::new(1.0, 0.0));
        assert!((f.apply(2.0).unwrap() - Complex64::cis(a)).norm() < 1e-15);
        assert!((f.apply(5.0).unwrap() - Complex64::cis(a)).norm() < 1e-15);
        assert!((f.apply(-2.0).unwrap() - Complex64::cis(-a)).norm() < 1e-15);
        assert!(Pushforward::new(4.0).is_err());
        assert!(Pushforward::new(0.0).is_err());
    }

    #[test]
    fn argument_is_monotone() {
        let f = Pushforward::new(2.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=400 {
            let x = -2.0 + 4.0 * k as f64 / 400.0;
            let g = f.apply(x).unwrap().arg();
            assert!(g >= prev, "x={x}");
            prev = g;
        }
    }

    // Push a fine semicircle quantile grid through f_t and compare the
    // empirical law of the image angles against the limit CDF.
    #[test]
    fn transports_semicircle_to_limit_law() {
        let t = 1.0;
        let f = Pushforward::new(t).unwrap();
        let m = 100_000;
        let mut angles: Vec<f64> = (0..m)
            .map(|i| {
                let x = semicircle_quantile((i as f64 + 0.5) / m as f64).unwrap();
                f.apply(x).unwrap().arg()
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        let nu = f.measure();
        let sup = angles
            .iter()
            .enumerate()
            .step_by(97)
            .map(|(i, &th)| {
                let c = nu.cdf(th).unwrap();
                ((i + 1) as f64 / m as f64 - c).abs().max((i as f64 / m as f64 - c).abs())
            })
            .fold(0.0, f64::max);
        assert!(sup < 1e-3, "sup error {sup}");
    }
}
