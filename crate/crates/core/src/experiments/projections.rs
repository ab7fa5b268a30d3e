use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::rmt_sim::{CMat, C64};

const PROJECTION_TOL: f64 = 1e-10;

/// Two orthogonal projections in `M_N`.
#[derive(Clone, Debug)]
pub struct ProjectionPair {
    pub n: usize,
    pub p: CMat,
    pub q: CMat,
    pub rank_p: usize,
    pub rank_q: usize,
}

fn max_abs(m: &CMat) -> f64 {
    let mut w = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            w = w.max(m[(i, j)].norm());
        }
    }
    w
}

fn check_projection(m: &CMat, name: &str) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::contract(format!("{name} is not a nonempty square matrix")));
    }
    let herm = max_abs(&(m - m.adjoint()));
    let idem = max_abs(&(m * m - m));
    if !(herm <= PROJECTION_TOL && idem <= PROJECTION_TOL) {
        return Err(Error::contract(format!(
            "{name} is not an orthogonal projection (|M - M*| = {herm:.2e}, |M^2 - M| = {idem:.2e})"
        )));
    }
    let tr: f64 = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
    let rank = tr.round();
    if (tr - rank).abs() > 1e-8 {
        return Err(Error::contract(format!("{name} has non-integer trace {tr}")));
    }
    Ok(rank as usize)
}

fn real(n: usize, f: impl Fn(usize, usize) -> f64) -> CMat {
    Mat::from_fn(n, n, |i, j| C64::new(f(i, j), 0.0))
}

impl ProjectionPair {
    pub fn new(p: CMat, q: CMat) -> Result<Self> {
        let rank_p = check_projection(&p, "P")?;
        let rank_q = check_projection(&q, "Q")?;
        if p.nrows() != q.nrows() {
            return Err(Error::contract("P and Q have different sizes"));
        }
        Ok(ProjectionPair {
            n: p.nrows(),
            p,
            q,
            rank_p,
            rank_q,
        })
    }

    /// Coordinate projections onto the first `rank_p` and first `rank_q`
    /// basis vectors.
    pub fn diagonal(n: usize, rank_p: usize, rank_q: usize) -> Result<Self> {
        if rank_p > n || rank_q > n {
            return Err(Error::contract("rank exceeds dimension"));
        }
        let p = real(n, |i, j| if i == j && i < rank_p { 1.0 } else { 0.0 });
        let q = real(n, |i, j| if i == j && i < rank_q { 1.0 } else { 0.0 });
        Self::new(p, q)
    }

    /// The rank-two pair in `M_4` with `P = A (x) E11 + B (x) E22` and
    /// `Q = E11 (x) I_2`, where `A = [[.2, .4], [.4, .8]]` and
    /// `B = [[.8, .4], [.4, .2]]`. `QPQ` has eigenvalues `0.2`, `0.8` on the
    /// range of `Q`.
    pub fn four_by_four_example() -> Self {
        let a = [[0.2, 0.4], [0.4, 0.8]];
        let b = [[0.8, 0.4], [0.4, 0.2]];
        let p = real(4, |r, c| {
            let (ra, ri) = (r / 2, r % 2);
            let (ca, ci) = (c / 2, c % 2);
            match (ri, ci) {
                (0, 0) => a[ra][ca],
                (1, 1) => b[ra][ca],
                _ => 0.0,
            }
        });
        let q = real(4, |r, c| if r == c && r < 2 { 1.0 } else { 0.0 });
        Self::new(p, q).expect("example pair is valid")
    }

    /// `(P (x) I_m, Q (x) I_m)`, indexing `(a, i) -> a m + i`.
    pub fn amplify(&self, m: usize) -> Self {
        let kron = |x: &CMat| {
            Mat::from_fn(self.n * m, self.n * m, |r, c| {
                if r % m == c % m {
                    x[(r / m, c / m)]
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        };
        ProjectionPair {
            n: self.n * m,
            p: kron(&self.p),
            q: kron(&self.q),
            rank_p: self.rank_p * m,
            rank_q: self.rank_q * m,
        }
    }

    /// Orthonormal basis of the range of `Q`, as columns.
    pub fn range_basis_q(&self) -> Result<CMat> {
        let eig = self
            .q
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numeric(format!("eigensolver failed: {e:?}")))?;
        let s = eig.S();
        let u = eig.U();
        let cols: Vec<usize> = (0..self.n).filter(|&j| s[j].re > 0.5).collect();
        Ok(Mat::from_fn(self.n, cols.len(), |i, k| u[(i, cols[k])]))
    }
}
