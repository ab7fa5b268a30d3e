use std::f64::consts::PI;

use faer::Side;

use super::{CMat, C64};
use crate::error::{Error, Result};

/// `max |(U* U - I)_ij|`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Arguments of the eigenvalues of a unitary matrix, in `(-pi, pi]`, sorted
/// ascending. Equal angles keep the solver's order.
pub fn eigangles(u: &CMat) -> Result<Vec<f64>> {
    if u.nrows() != u.ncols() {
        return Err(Error::contract("eigangles needs a square matrix"));
    }
    let defect = unitarity_defect(u);
    if !(defect <= 1e-8) {
        return Err(Error::contract(format!(
            "matrix is not unitary (defect {defect:.3e})"
        )));
    }
    let eig = u
        .eigenvalues()
        .map_err(|e| Error::Numeric(format!("eigensolver failed: {e:?}")))?;
    let mut angles: Vec<f64> = eig
        .iter()
        .map(|z| {
            let a = z.arg();
            if a <= -PI {
                PI
            } else {
                a
            }
        })
        .collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    Ok(angles)
}

/// Eigenvalues of a Hermitian matrix in ascending order (lower triangle
/// referenced).
pub fn hermitian_eigenvalues(h: &CMat) -> Result<Vec<f64>> {
    if h.nrows() != h.ncols() {
        return Err(Error::contract("hermitian_eigenvalues needs a square matrix"));
    }
    let mut v = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numeric(format!("Hermitian eigensolver failed: {e:?}")))?;
    v.sort_by(|a, b| a.total_cmp(b));
    Ok(v)
}

/// `[tr U, tr U^2, ..., tr U^n_max]` with `tr = Tr / N`.
pub fn normalized_trace_powers(u: &CMat, n_max: usize) -> Vec<C64> {
    let n = u.nrows() as f64;
    let trace = |m: &CMat| (0..m.nrows()).map(|i| m[(i, i)]).sum::<C64>() / n;
    let mut out = Vec::with_capacity(n_max);
    if n_max == 0 {
        return out;
    }
    let mut power = u.clone();
    out.push(trace(&power));
    for _ in 1..n_max {
        power = &power * u;
        out.push(trace(&power));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::Mat;

    fn diag(angles: &[f64]) -> CMat {
        let n = angles.len();
        Mat::from_fn(n, n, |i, j| if i == j { C64::cis(angles[i]) } else { C64::new(0.0, 0.0) })
    }

    #[test]
    fn identity_angles_are_zero() {
        let a = eigangles(&Mat::identity(5, 5)).unwrap();
        assert_eq!(a.len(), 5);
        assert!(a.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn diagonal_read_off() {
        let a = eigangles(&diag(&[PI / 4.0, -PI / 2.0])).unwrap();
        assert!((a[0] + PI / 2.0).abs() < 1e-14);
        assert!((a[1] - PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn minus_one_maps_to_pi() {
        let a = eigangles(&diag(&[PI, 0.0])).unwrap();
        assert!((a[1] - PI).abs() < 1e-14);
        assert!(a.iter().all(|&x| x > -PI && x <= PI));
    }

    #[test]
    fn trace_identity() {
        let mut rng = crate::rmt_sim::RngStream::new(4, 0);
        let u = crate::rmt_sim::haar_unitary(12, &mut rng).unwrap();
        let a = eigangles(&u).unwrap();
        let s: C64 = a.iter().map(|&x| C64::cis(x)).sum();
        let tr: C64 = (0..12).map(|i| u[(i, i)]).sum();
        assert!((s - tr).norm() < 1e-8);
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_unitary() {
        let m = Mat::<C64>::from_fn(2, 2, |i, j| C64::new((i + j) as f64, 0.0));
        assert!(matches!(eigangles(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn trace_powers_of_diagonal() {
        let u = diag(&[0.3, -1.1, 2.0]);
        let p = normalized_trace_powers(&u, 3);
        for (k, z) in p.iter().enumerate() {
            let m = (k + 1) as f64;
            let expect = (C64::cis(0.3 * m) + C64::cis(-1.1 * m) + C64::cis(2.0 * m)) / 3.0;
            assert!((z - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn hermitian_spectrum_sorted() {
        let h = Mat::<C64>::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new(2.0, 0.0),
            (1, 1) => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 0.0),
        });
        assert_eq!(hermitian_eigenvalues(&h).unwrap(), vec![-1.0, 2.0]);
    }
}
