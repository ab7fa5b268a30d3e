use faer::Mat;

use super::rng::RngStream;
use super::{CMat, C64};
use crate::error::{Error, Result};

/// A draw from the GUE normalized so that `E tr X^2 = 1`.
#[derive(Clone, Debug)]
pub struct GueSample {
    pub n: usize,
    pub matrix: CMat,
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Size("matrix dimension must be at least 1".into()));
    }
    Ok(())
}

// Hermitian Gaussian matrix: diagonal N(0, s2), off-diagonal real and
// imaginary parts N(0, s2 / 2), lower triangle filled by conjugation.
fn hermitian_gaussian(n: usize, s2: f64, rng: &mut RngStream) -> CMat {
    let sd = s2.sqrt();
    let sd_off = (0.5 * s2).sqrt();
    let mut m = Mat::<C64>::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = C64::new(sd * rng.normal(), 0.0);
        for i in 0..j {
            let z = C64::new(sd_off * rng.normal(), sd_off * rng.normal());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn sample_gue(n: usize, rng: &mut RngStream) -> Result<GueSample> {
    check_dim(n)?;
    Ok(GueSample {
        n,
        matrix: hermitian_gaussian(n, 1.0 / n as f64, rng),
    })
}

/// Increment of the Hermitian Brownian motion over a step `dt`: a GUE matrix
/// scaled by `sqrt(dt)`.
pub fn gue_bm_increment(n: usize, dt: f64, rng: &mut RngStream) -> Result<CMat> {
    check_dim(n)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain(format!("time step must be positive, got {dt}")));
    }
    Ok(hermitian_gaussian(n, dt / n as f64, rng))
}

/// Haar unitary by QR of a complex Ginibre matrix, with the phases of the
/// diagonal of `R` moved into `Q`.
pub fn haar_unitary(n: usize, rng: &mut RngStream) -> Result<CMat> {
    check_dim(n)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let g = Mat::<C64>::from_fn(n, n, |_, _| C64::new(s * rng.normal(), s * rng.normal()));
    let qr = g.qr();
    let mut q = qr.compute_Q();
    let r = qr.R();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm == 0.0 {
            return Err(Error::Numeric("singular Gaussian draw in QR".into()));
        }
        let phase = d / norm;
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt_sim::unitarity_defect;

    fn trace(m: &CMat) -> C64 {
        (0..m.nrows()).map(|i| m[(i, i)]).sum()
    }

    #[test]
    fn gue_is_hermitian_with_unit_second_moment() {
        let n = 16;
        let trials = 2000;
        let mut rng = RngStream::new(11, 0);
        let mut tr1 = Vec::new();
        let mut tr2 = Vec::new();
        for _ in 0..trials {
            let x = sample_gue(n, &mut rng).unwrap().matrix;
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(x[(i, j)], x[(j, i)].conj());
                }
            }
            tr1.push(trace(&x).re / n as f64);
            let x2 = &x * &x;
            tr2.push(trace(&x2).re / n as f64);
        }
        let (m1, se1) = mean_se(&tr1);
        let (m2, se2) = mean_se(&tr2);
        assert!(m1.abs() < 3.0 * se1, "{m1} {se1}");
        assert!((m2 - 1.0).abs() < 3.0 * se2, "{m2} {se2}");
    }

    #[test]
    fn increment_rejects_zero_step_and_scales() {
        let mut rng = RngStream::new(2, 0);
        assert!(gue_bm_increment(4, 0.0, &mut rng).is_err());
        assert!(gue_bm_increment(4, -1.0, &mut rng).is_err());
        let dt = 0.01;
        let n = 8;
        let v: Vec<f64> = (0..2000)
            .map(|_| {
                let d = gue_bm_increment(n, dt, &mut rng).unwrap();
                trace(&(&d * &d)).re / n as f64
            })
            .collect();
        let (m, se) = mean_se(&v);
        assert!((m - dt).abs() < 3.0 * se);
    }

    #[test]
    fn disjoint_increments_uncorrelated() {
        let mut rng = RngStream::new(3, 0);
        let n = 4;
        let pairs: Vec<f64> = (0..4000)
            .map(|_| {
                let a = trace(&gue_bm_increment(n, 0.1, &mut rng).unwrap()).re;
                let b = trace(&gue_bm_increment(n, 0.1, &mut rng).unwrap()).re;
                a * b
            })
            .collect();
        let (m, se) = mean_se(&pairs);
        assert!(m.abs() < 3.0 * se);
    }

    #[test]
    fn haar_moments() {
        let n = 16;
        let mut rng = RngStream::new(5, 0);
        let mut re = Vec::new();
        let mut sq = Vec::new();
        for _ in 0..2000 {
            let u = haar_unitary(n, &mut rng).unwrap();
            assert!(unitarity_defect(&u) < 1e-12);
            let t = trace(&u);
            re.push(t.re);
            sq.push(t.norm_sqr());
        }
        let (m, se) = mean_se(&re);
        assert!(m.abs() < 3.0 * se);
        let (m, se) = mean_se(&sq);
        assert!((m - 1.0).abs() < 3.0 * se, "{m} {se}");
    }

    #[test]
    fn zero_dimension_rejected() {
        let mut rng = RngStream::new(0, 0);
        assert!(sample_gue(0, &mut rng).is_err());
        assert!(haar_unitary(0, &mut rng).is_err());
    }

    pub(crate) fn mean_se(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (var / n).sqrt())
    }
}
