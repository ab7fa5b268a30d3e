use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::ensembles::gue_bm_increment;
use super::rng::RngStream;
use super::spectrum::unitarity_defect;
use super::{CMat, C64};
use crate::error::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-2;
pub const MAX_STEP: f64 = 0.1;
/// Inputs whose `max |U*U - I|` exceeds this are rejected.
pub const UNITARITY_TOL: f64 = 1e-8;
const REPROJECT_EVERY: usize = 64;

/// One-step update rule for `dU = i U dX - U dt / 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// `U exp(i dX)`, exactly unitary.
    #[default]
    Geodesic,
    /// `U (I + i dX - dt/2)` followed by projection onto the unitary polar
    /// factor.
    EulerPolar,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Geodesic => "geodesic",
            Scheme::EulerPolar => "euler-polar",
        }
    }
}

/// Matrices of one Brownian path at the requested times.
#[derive(Clone, Debug)]
pub struct UnitaryPathSample {
    pub n: usize,
    pub times: Vec<f64>,
    pub matrices: Vec<CMat>,
    pub step: f64,
    pub scheme: Scheme,
}

/// `exp(iH)` for Hermitian `H`, via its eigendecomposition.
pub fn expi_hermitian(h: &CMat) -> Result<CMat> {
    let eig = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numeric(format!("Hermitian eigensolver failed: {e:?}")))?;
    let v = eig.U();
    let s = eig.S();
    let n = h.nrows();
    let mut scaled = v.to_owned();
    for j in 0..n {
        let phase = C64::cis(s[j].re);
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    Ok(&scaled * v.adjoint())
}

// Unitary polar factor of B via the eigendecomposition of B*B.
fn polar_factor(b: &CMat) -> Result<CMat> {
    let g = b.adjoint() * b;
    let eig = g
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numeric(format!("Hermitian eigensolver failed: {e:?}")))?;
    let v = eig.U();
    let s = eig.S();
    let n = b.nrows();
    let mut scaled = v.to_owned();
    for j in 0..n {
        let lam = s[j].re;
        if !(lam > 0.0) {
            return Err(Error::Numeric("singular Euler step in polar projection".into()));
        }
        let w = lam.sqrt().recip();
        for i in 0..n {
            scaled[(i, j)] *= w;
        }
    }
    Ok(b * (&scaled * v.adjoint()))
}

fn step_unchecked(u: &CMat, dt: f64, scheme: Scheme, rng: &mut RngStream) -> Result<CMat> {
    let n = u.nrows();
    let dx = gue_bm_increment(n, dt, rng)?;
    let factor = match scheme {
        Scheme::Geodesic => expi_hermitian(&dx)?,
        Scheme::EulerPolar => {
            let b = Mat::from_fn(n, n, |i, j| {
                let id = if i == j { 1.0 - 0.5 * dt } else { 0.0 };
                C64::new(id, 0.0) + C64::new(0.0, 1.0) * dx[(i, j)]
            });
            polar_factor(&b)?
        }
    };
    Ok(u * factor)
}

fn check_step(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(Error::domain(format!("step {dt} outside (0, {MAX_STEP}]")));
    }
    Ok(())
}

// Checks `u` against UNITARITY_TOL and returns it after one Newton-Schulz
// sweep `U (3I - U*U) / 2`, which squares the defect, so rounding drift does
// not accumulate over long compositions.
fn reproject(u: &CMat) -> Result<CMat> {
    if u.nrows() != u.ncols() || u.nrows() == 0 {
        return Err(Error::contract("expected a nonempty square matrix"));
    }
    let g = u.adjoint() * u;
    let n = u.nrows();
    let mut d = 0.0f64;
    let corr = Mat::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        d = d.max((g[(i, j)] - C64::new(id, 0.0)).norm());
        C64::new(1.5 * id, 0.0) - g[(i, j)] * 0.5
    });
    if !(d <= UNITARITY_TOL) {
        return Err(Error::contract(format!("matrix is not unitary (defect {d:.3e})")));
    }
    if d < 4.0 * f64::EPSILON {
        return Ok(u.clone());
    }
    Ok(u * corr)
}

/// One geodesic step of size `dt` from `u`. The input is first nudged back
/// onto the group by a rounding-level correction.
pub fn ubm_step(u: &CMat, dt: f64, rng: &mut RngStream) -> Result<CMat> {
    ubm_step_with(u, dt, Scheme::Geodesic, rng)
}

pub fn ubm_step_with(u: &CMat, dt: f64, scheme: Scheme, rng: &mut RngStream) -> Result<CMat> {
    check_step(dt)?;
    let u = reproject(u)?;
    step_unchecked(&u, dt, scheme, rng)
}

// Step sizes covering a span: full steps, with a final partial step unless
// the remainder is negligible, in which case it is absorbed by the last step.
fn step_sizes(span: f64, step: f64) -> Vec<f64> {
    if span <= 0.0 {
        return Vec::new();
    }
    let full = (span / step).floor() as usize;
    let rest = span - full as f64 * step;
    let mut sizes = vec![step; full];
    if rest > 1e-9 * step {
        sizes.push(rest);
    } else if let Some(last) = sizes.last_mut() {
        *last += rest;
    } else {
        sizes.push(span);
    }
    sizes
}

/// Samples one path started at the identity and records it at `times`.
pub fn ubm_sample_path(
    n: usize,
    times: &[f64],
    step: f64,
    rng: &mut RngStream,
) -> Result<UnitaryPathSample> {
    ubm_sample_path_with(n, times, step, Scheme::Geodesic, rng)
}

pub fn ubm_sample_path_with(
    n: usize,
    times: &[f64],
    step: f64,
    scheme: Scheme,
    rng: &mut RngStream,
) -> Result<UnitaryPathSample> {
    if n == 0 {
        return Err(Error::Size("matrix dimension must be at least 1".into()));
    }
    check_step(step)?;
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::domain("times must be finite and nonnegative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::contract("times must be sorted ascending"));
    }
    let mut u = Mat::<C64>::identity(n, n);
    let mut now = 0.0;
    let mut matrices = Vec::with_capacity(times.len());
    let mut taken = 0usize;
    for &target in times {
        for h in step_sizes(target - now, step) {
            u = step_unchecked(&u, h, scheme, rng)?;
            taken += 1;
            if taken.is_multiple_of(REPROJECT_EVERY) {
                u = reproject(&u)?;
            }
        }
        now = target.max(now);
        let d = unitarity_defect(&u);
        if !(d < 1e-10) {
            return Err(Error::Numeric(format!("unitarity drift {d:.3e} at t = {target}")));
        }
        matrices.push(u.clone());
    }
    Ok(UnitaryPathSample {
        n,
        times: times.to_vec(),
        matrices,
        step,
        scheme,
    })
}

/// `U_t` alone; the same draws as a one-time path.
pub fn ubm_endpoint(n: usize, t: f64, step: f64, scheme: Scheme, rng: &mut RngStream) -> Result<CMat> {
    let mut path = ubm_sample_path_with(n, &[t], step, scheme, rng)?;
    Ok(path.matrices.pop().expect("one recorded time"))
}

/// Two geodesic approximations of `U_t` driven by the same noise, with
/// `t = coarse_steps * coarse_dt`: the fine path takes two half steps per
/// coarse step, and the coarse path takes one step along their summed
/// increment. Returns `(fine, coarse)`.
pub fn ubm_coupled_endpoints(
    n: usize,
    coarse_steps: usize,
    coarse_dt: f64,
    rng: &mut RngStream,
) -> Result<(CMat, CMat)> {
    if n == 0 {
        return Err(Error::Size("matrix dimension must be at least 1".into()));
    }
    check_step(coarse_dt)?;
    let mut fine = Mat::<C64>::identity(n, n);
    let mut coarse = fine.clone();
    for k in 1..=coarse_steps {
        let a = gue_bm_increment(n, 0.5 * coarse_dt, rng)?;
        let b = gue_bm_increment(n, 0.5 * coarse_dt, rng)?;
        fine = &fine * expi_hermitian(&a)?;
        fine = &fine * expi_hermitian(&b)?;
        coarse = &coarse * expi_hermitian(&(&a + &b))?;
        if k.is_multiple_of(REPROJECT_EVERY) {
            fine = reproject(&fine)?;
            coarse = reproject(&coarse)?;
        }
    }
    Ok((fine, coarse))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_sizes_hit_target() {
        let s = step_sizes(1.0, 0.01);
        assert_eq!(s.len(), 100);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let s = step_sizes(0.025, 0.01);
        assert_eq!(s.len(), 3);
        assert!((s[2] - 0.005).abs() < 1e-15);
        assert!(step_sizes(0.0, 0.01).is_empty());
        assert_eq!(step_sizes(1e-14, 0.01), vec![1e-14]);
    }

    #[test]
    fn tiny_step_moves_by_sqrt_dt() {
        let mut rng = RngStream::new(1, 0);
        let id = Mat::<C64>::identity(6, 6);
        for &dt in &[1e-12, 1e-8] {
            let u = ubm_step(&id, dt, &mut rng).unwrap();
            let diff = &u - &id;
            let worst = (0..6)
                .flat_map(|i| (0..6).map(move |j| (i, j)))
                .map(|(i, j)| diff[(i, j)].norm())
                .fold(0.0, f64::max);
            assert!(worst < 10.0 * dt.sqrt(), "dt={dt}: {worst:e}");
            assert!(worst > 0.01 * dt.sqrt(), "dt={dt}: {worst:e}");
        }
    }

    #[test]
    fn long_composition_stays_unitary() {
        let mut rng = RngStream::new(2, 0);
        let mut u = Mat::<C64>::identity(32, 32);
        for _ in 0..10_000 {
            u = ubm_step(&u, 0.01, &mut rng).unwrap();
        }
        let d = unitarity_defect(&u);
        assert!(d < 1e-12, "defect {d:e}");
    }

    #[test]
    fn bad_inputs() {
        let mut rng = RngStream::new(3, 0);
        let id = Mat::<C64>::identity(3, 3);
        assert!(matches!(ubm_step(&id, 0.0, &mut rng), Err(Error::Domain(_))));
        assert!(matches!(ubm_step(&id, 0.2, &mut rng), Err(Error::Domain(_))));
        let bad = &id * faer::Scale(C64::new(1.1, 0.0));
        assert!(matches!(ubm_step(&bad, 0.01, &mut rng), Err(Error::Contract(_))));
        assert!(matches!(
            ubm_sample_path(3, &[0.5, 0.2], 0.01, &mut rng),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn zero_time_is_identity() {
        let mut rng = RngStream::new(4, 0);
        let p = ubm_sample_path(5, &[0.0], 0.01, &mut rng).unwrap();
        assert_eq!(p.matrices.len(), 1);
        assert_eq!(p.matrices[0], Mat::<C64>::identity(5, 5));
    }

    #[test]
    fn euler_polar_is_unitary() {
        let mut rng = RngStream::new(5, 0);
        let p = ubm_sample_path_with(8, &[0.3, 1.0], 0.01, Scheme::EulerPolar, &mut rng).unwrap();
        for m in &p.matrices {
            assert!(unitarity_defect(m) < 1e-12);
        }
    }

    #[test]
    fn path_is_deterministic() {
        let run = || {
            let mut rng = RngStream::new(9, 2);
            ubm_sample_path(6, &[0.1, 0.35], 0.01, &mut rng).unwrap().matrices
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn expi_of_diagonal() {
        let h = Mat::<C64>::from_fn(2, 2, |i, j| {
            if i == j {
                C64::new([0.5, -1.0][i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let e = expi_hermitian(&h).unwrap();
        assert!((e[(0, 0)] - C64::cis(0.5)).norm() < 1e-15);
        assert!((e[(1, 1)] - C64::cis(-1.0)).norm() < 1e-15);
        assert!(e[(0, 1)].norm() < 1e-15);
    }
}
