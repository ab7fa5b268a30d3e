use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Width of the band next to each support edge where the density is
/// extrapolated instead of solved for.
pub const EDGE_ZONE: f64 = 1e-4;
/// Residual required of every returned solution of the defining equation.
pub const KAPPA_RESIDUAL_TOL: f64 = 1e-12;

const GRID_SEGMENTS: usize = 2048;
const SEGMENT_TOL: f64 = 1e-14;
const MAX_NEWTON: usize = 100;
const MAX_HALVINGS: usize = 60;

/// Half-width `a(t)` of the support arc `{e^{i theta} : |theta| <= a(t)}`:
/// `sqrt(t(4 - t))/2 + arccos(1 - t/2)` for `t < 4`, and `pi` from `t = 4` on.
pub fn support_halfwidth(t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    if t >= 4.0 {
        return Ok(PI);
    }
    Ok(0.5 * (t * (4.0 - t)).sqrt() + (1.0 - t / 2.0).acos())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be finite and positive, got {t}")));
    }
    Ok(())
}

/// `(z - 1)/(z + 1) e^{tz/2} - e^{i theta}`.
pub fn kappa_residual(t: f64, theta: f64, z: Complex64) -> Complex64 {
    (z - 1.0) / (z + 1.0) * (z * (t / 2.0)).exp() - Complex64::cis(theta)
}

fn residual_derivative(t: f64, z: Complex64) -> Complex64 {
    let zp = z + 1.0;
    (z * (t / 2.0)).exp() * (2.0 / (zp * zp) + (z - 1.0) / zp * (t / 2.0))
}

// dz/dtheta along the solution branch, from the logarithmic form
// log((z-1)/(z+1)) + tz/2 = i theta.
fn branch_tangent(t: f64, z: Complex64) -> Complex64 {
    Complex64::i() / (2.0 / (z * z - 1.0) + t / 2.0)
}

/// The real solution `x > 1` of `(x - 1)/(x + 1) e^{tx/2} = 1`, by bisection
/// on the increasing function `log((x-1)/(x+1)) + tx/2`.
fn central_root(t: f64) -> Result<f64> {
    let phi = |x: f64| ((x - 1.0) / (x + 1.0)).ln() + t * x / 2.0;
    let mut lo = 1.0;
    let mut hi = 2.0;
    while phi(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Convergence(format!("no bracket for the central root at t = {t}")));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = newton(t, 0.0, Complex64::new(0.5 * (lo + hi), 0.0))?;
    Ok(z.re)
}

/// Damped Newton iteration for the root near `z0`, kept in the right
/// half-plane. Fails rather than returning a point whose residual exceeds
/// [`KAPPA_RESIDUAL_TOL`].
fn newton(t: f64, theta: f64, z0: Complex64) -> Result<Complex64> {
    let mut z = z0;
    let mut g = kappa_residual(t, theta, z);
    for _ in 0..MAX_NEWTON {
        if g.norm() < 1e-15 {
            break;
        }
        let step = g / residual_derivative(t, z);
        if !step.is_finite() {
            break;
        }
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..MAX_HALVINGS {
            let cand = z - step * lambda;
            if cand.re > 0.0 {
                let gc = kappa_residual(t, theta, cand);
                if gc.norm() < g.norm() {
                    z = cand;
                    g = gc;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            // at the rounding floor
            break;
        }
    }
    if g.norm() < KAPPA_RESIDUAL_TOL && z.re > 0.0 {
        Ok(z)
    } else {
        Err(Error::Convergence(format!(
            "kappa(t = {t}, theta = {theta}): residual {:.3e} at z = {z}",
            g.norm()
        )))
    }
}

fn principal_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// The limit spectral law at time `t > 0`.
///
/// The density is taken with respect to normalized Haar measure on the
/// circle, so it integrates to one against `dtheta / 2pi`. Construction
/// tracks the solution branch on a grid from `theta = 0` out to
/// `a(t) - EDGE_ZONE`, and tabulates the cumulative mass on that grid;
/// evaluation afterwards only reads the tables.
#[derive(Clone, Debug)]
pub struct SpectralMeasureNuT {
    t: f64,
    half_width: f64,
    edge_start: f64,
    grid: Vec<f64>,
    roots: Vec<Complex64>,
    // (1/2pi) * integral of the density over [0, grid[k]]
    cum: Vec<f64>,
    edge_secant: (f64, f64),
    half_mass: f64,
}

impl SpectralMeasureNuT {
    pub fn new(t: f64) -> Result<Self> {
        check_time(t)?;
        let half_width = support_halfwidth(t)?;
        let zone = EDGE_ZONE.min(half_width / 100.0);
        let edge_start = half_width - zone;

        let m = GRID_SEGMENTS;
        let grid: Vec<f64> = (0..=m)
            .map(|k| {
                let u = 1.0 - k as f64 / m as f64;
                edge_start * (1.0 - u * u)
            })
            .collect();
        let mut roots = Vec::with_capacity(m + 1);
        roots.push(Complex64::new(central_root(t)?, 0.0));
        for k in 1..=m {
            let prev = roots[k - 1];
            let dtheta = grid[k] - grid[k - 1];
            let guess = prev + branch_tangent(t, prev) * dtheta;
            let guess = if guess.re > 0.0 { guess } else { prev };
            roots.push(newton(t, grid[k], guess)?);
        }

        let mut nu = SpectralMeasureNuT {
            t,
            half_width,
            edge_start,
            grid,
            roots,
            cum: Vec::new(),
            edge_secant: (0.0, 0.0),
            half_mass: 0.0,
        };
        // Secant in rho^2, which is affine to leading order at a square-root edge.
        let inner = nu.solve(edge_start - zone)?.re;
        let outer = nu.roots[m].re;
        nu.edge_secant = (outer * outer, (outer * outer - inner * inner) / zone);

        let mut cum = Vec::with_capacity(m + 1);
        cum.push(0.0);
        for k in 0..m {
            let seg = nu.segment_integral(k, nu.grid[k + 1], |_| 1.0);
            cum.push(cum[k] + seg);
        }
        nu.half_mass = cum[m] + nu.edge_integral(half_width, |_| 1.0);
        if !nu.half_mass.is_finite() {
            return Err(Error::Convergence(format!(
                "density tabulation failed at t = {t}"
            )));
        }
        nu.cum = cum;
        Ok(nu)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `a(t)`, equal to `pi` once the support is the whole circle.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn full_circle(&self) -> bool {
        self.t >= 4.0
    }

    fn segment_of(&self, x: f64) -> usize {
        let k = self.grid.partition_point(|&g| g <= x);
        k.saturating_sub(1).min(self.grid.len() - 1)
    }

    // Newton solve for 0 <= x, seeded by a tangent step from the grid.
    fn solve(&self, x: f64) -> Result<Complex64> {
        let k = self.segment_of(x);
        let (g, z) = (self.grid[k], self.roots[k]);
        if x == g {
            return Ok(z);
        }
        let guess = z + branch_tangent(self.t, z) * (x - g);
        let guess = if guess.re > 0.0 { guess } else { z };
        newton(self.t, x, guess).or_else(|_| newton(self.t, x, z))
    }

    /// Solution with positive real part of `(z-1)/(z+1) e^{tz/2} = e^{i theta}`
    /// for `theta` strictly inside the support arc.
    pub fn kappa(&self, theta: f64) -> Result<Complex64> {
        if !theta.is_finite() || theta.abs() > PI {
            return Err(Error::domain(format!("angle {theta} outside [-pi, pi]")));
        }
        if !self.full_circle() && theta.abs() >= self.half_width {
            return Err(Error::domain(format!(
                "angle {theta} outside the open support arc |theta| < {}",
                self.half_width
            )));
        }
        let z = self.solve(theta.abs())?;
        Ok(if theta < 0.0 { z.conj() } else { z })
    }

    fn density_abs(&self, x: f64) -> Result<f64> {
        if x >= self.half_width && !self.full_circle() {
            return Ok(0.0);
        }
        if x > self.edge_start {
            let (r2, slope) = self.edge_secant;
            return Ok((r2 + slope * (x - self.edge_start)).max(0.0).sqrt());
        }
        Ok(self.solve(x)?.re)
    }

    /// Density at `e^{i theta}` with respect to normalized Haar measure;
    /// zero off the support. Angles are reduced to `(-pi, pi]`.
    pub fn density(&self, theta: f64) -> Result<f64> {
        if !theta.is_finite() {
            return Err(Error::domain("angle must be finite"));
        }
        self.density_abs(principal_angle(theta).abs())
    }

    /// Density with respect to Lebesgue measure `dtheta` on `(-pi, pi]`.
    pub fn density_per_radian(&self, theta: f64) -> Result<f64> {
        Ok(self.density(theta)? / TAU)
    }

    // (1/2pi) * integral over [grid[k], x] of w(theta) rho(theta), with
    // Newton seeds taken from the left end of the segment.
    fn segment_integral(&self, k: usize, x: f64, w: impl Fn(f64) -> f64) -> f64 {
        let g = self.grid[k];
        let z0 = self.roots[k];
        let t = self.t;
        let f = |th: f64| {
            let guess = z0 + branch_tangent(t, z0) * (th - g);
            let z = newton(t, th, if guess.re > 0.0 { guess } else { z0 })
                .or_else(|_| newton(t, th, z0))
                .map(|z| z.re)
                .unwrap_or(f64::NAN);
            w(th) * z
        };
        adaptive_simpson(f, g, x, SEGMENT_TOL) / TAU
    }

    fn edge_integral(&self, x: f64, w: impl Fn(f64) -> f64) -> f64 {
        let (r2, slope) = self.edge_secant;
        let e = self.edge_start;
        let f = |th: f64| w(th) * (r2 + slope * (th - e)).max(0.0).sqrt();
        adaptive_simpson(f, e, x.min(self.half_width), SEGMENT_TOL) / TAU
    }

    // (1/2pi) * integral over [0, x] of rho, for 0 <= x <= a(t).
    fn partial_mass(&self, x: f64) -> f64 {
        if x > self.edge_start {
            return self.cum[GRID_SEGMENTS] + self.edge_integral(x, |_| 1.0);
        }
        let k = self.segment_of(x);
        self.cum[k] + self.segment_integral(k, x, |_| 1.0)
    }

    /// Total mass from the quadrature tables, `(1/2pi) * integral of rho`.
    /// Equals one up to quadrature and edge-extrapolation error.
    pub fn total_mass(&self) -> f64 {
        2.0 * self.half_mass
    }

    /// Distribution function of the angle on `(-pi, pi]`. The tabulated mass
    /// is renormalized so that the CDF reaches exactly one at `a(t)`.
    pub fn cdf(&self, theta: f64) -> Result<f64> {
        if theta.is_nan() {
            return Err(Error::domain("angle must not be NaN"));
        }
        if theta <= -self.half_width {
            return Ok(0.0);
        }
        if theta >= self.half_width {
            return Ok(1.0);
        }
        let half = self.partial_mass(theta.abs()) / (2.0 * self.half_mass);
        let v = if theta >= 0.0 { 0.5 + half } else { 0.5 - half };
        Ok(v.clamp(0.0, 1.0))
    }

    /// Inverse of [`cdf`](Self::cdf): `quantile(0) = -a(t)`,
    /// `quantile(1/2) = 0`, `quantile(1) = a(t)`.
    pub fn quantile(&self, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::domain(format!("probability {r} outside [0, 1]")));
        }
        if r == 0.0 {
            return Ok(-self.half_width);
        }
        if r == 1.0 {
            return Ok(self.half_width);
        }
        if r == 0.5 {
            return Ok(0.0);
        }
        let target = (r - 0.5).abs() * 2.0 * self.half_mass;
        let x = self.invert_partial(target)?;
        Ok(if r > 0.5 { x } else { -x })
    }

    fn invert_partial(&self, target: f64) -> Result<f64> {
        let m = GRID_SEGMENTS;
        let (mut lo, mut hi, base, k) = if target >= self.cum[m] {
            (self.edge_start, self.half_width, self.cum[m], None)
        } else {
            let k = self.cum.partition_point(|&c| c <= target).saturating_sub(1);
            (self.grid[k], self.grid[k + 1], self.cum[k], Some(k))
        };
        let mass_to = |x: f64| match k {
            Some(k) => base + self.segment_integral(k, x, |_| 1.0),
            None => base + self.edge_integral(x, |_| 1.0),
        };
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = mass_to(x) - target;
            if f.abs() < 1e-15 {
                return Ok(x);
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.density_abs(x)? / TAU;
            let newton = x - f / d;
            x = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 * hi.max(1.0) {
                return Ok(x);
            }
        }
        Err(Error::Convergence(format!(
            "quantile inversion at t = {} did not converge",
            self.t
        )))
    }

    /// `integral of e^{in theta} rho(theta) dtheta/2pi`, which is real by
    /// symmetry, from the quadrature tables.
    pub fn moment(&self, n: u32) -> f64 {
        let w = |th: f64| (n as f64 * th).cos();
        let m = GRID_SEGMENTS;
        let inner: f64 = (0..m)
            .map(|k| self.segment_integral(k, self.grid[k + 1], w))
            .sum();
        2.0 * (inner + self.edge_integral(self.half_width, w))
    }

    /// `exp(i quantile(r))`, the limit position of the eigenvalue of rank `r`
    /// in increasing order of argument.
    pub fn classical_location(&self, r: f64) -> Result<ClassicalLocation> {
        if self.full_circle() {
            return Err(Error::domain(
                "classical locations are defined for t < 4 only",
            ));
        }
        Ok(ClassicalLocation {
            t: self.t,
            r,
            value: Complex64::cis(self.quantile(r)?),
        })
    }
}

/// Deterministic limit position of the `r`-quantile eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLocation {
    pub t: f64,
    pub r: f64,
    pub value: Complex64,
}

/// See [`SpectralMeasureNuT::kappa`].
pub fn kappa(t: f64, theta: f64) -> Result<Complex64> {
    SpectralMeasureNuT::new(t)?.kappa(theta)
}

/// See [`SpectralMeasureNuT::density`].
pub fn density(t: f64, theta: f64) -> Result<f64> {
    SpectralMeasureNuT::new(t)?.density(theta)
}

pub fn cdf(t: f64, theta: f64) -> Result<f64> {
    SpectralMeasureNuT::new(t)?.cdf(theta)
}

pub fn quantile(t: f64, r: f64) -> Result<f64> {
    SpectralMeasureNuT::new(t)?.quantile(r)
}

/// Classical location for `t` in `[0, 4)`; at `t = 0` every eigenvalue sits
/// at one.
pub fn classical_location(t: f64, r: f64) -> Result<ClassicalLocation> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain(format!("probability {r} outside [0, 1]")));
    }
    if t == 0.0 {
        return Ok(ClassicalLocation {
            t,
            r,
            value: Complex64::new(1.0, 0.0),
        });
    }
    if t >= 4.0 {
        return Err(Error::domain(
            "classical locations are defined for t < 4 only",
        ));
    }
    SpectralMeasureNuT::new(t)?.classical_location(r)
}
