//! Adaptive Simpson quadrature.

/// Default absolute tolerance used across the crate.
pub const DEFAULT_TOL: f64 = 1e-9;
const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` by adaptive Simpson with Richardson
/// correction, subdividing until each panel meets its share of `tol`.
///
/// Panels are split without limit near non-smooth points (square-root edges)
/// up to a fixed depth; the endpoints are evaluated, so `f` must be finite
/// there.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&mut f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || (m - a).abs() < f64::EPSILON * a.abs().max(1.0) {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-12);
        assert!((v - (15.0 / 4.0 - 3.0 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn square_root_edge() {
        // int_0^1 sqrt(1 - x) dx = 2/3
        let v = adaptive_simpson(|x| (1.0 - x).max(0.0).sqrt(), 0.0, 1.0, 1e-11);
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn oscillatory() {
        let v = adaptive_simpson(|x| (5.0 * x).cos(), 0.0, std::f64::consts::PI, 1e-12);
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-9), 0.0);
    }
}
