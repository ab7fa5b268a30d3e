//! Exponentials of the class-space generator `A = split + w * merge`.
//!
//! `exp(-tA)` has huge entries when the dimension `N` is smaller than `n`:
//! the class basis carries modes with growth rate up to `n(n-1)/(2N)` that are
//! invisible in the final evaluation only through exact cancellation. All
//! arithmetic here is therefore carried out in binary floating point with a
//! working precision chosen from `t * ||A||_1`, and only the final sums are
//! rounded to `f64`.

use dashu_float::FBig;

use crate::error::{Error, Result};

use super::flow::FlowMatrices;

type Big = FBig;

/// Which generator to exponentiate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coupling {
    /// `split + merge / N^2`, the finite-dimensional flow on `U(N)`.
    Finite(u64),
    /// `split` alone, the large-`N` limit.
    Free,
}

impl Coupling {
    pub fn merge_weight(self) -> f64 {
        match self {
            Coupling::Finite(dim) => 1.0 / (dim as f64 * dim as f64),
            Coupling::Free => 0.0,
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            Coupling::Finite(0) => Err(Error::domain("matrix dimension N must be at least 1")),
            _ => Ok(()),
        }
    }
}

const GUARD_BITS: usize = 96;
// Relative accuracy asked of the evaluated totals.
const REL_TARGET: f64 = 1e-15;
const MAX_REFINEMENTS: usize = 8;

fn big(x: f64, bits: usize) -> Big {
    Big::try_from(x)
        .expect("finite f64")
        .with_precision(bits)
        .value()
}

fn big_int(k: u64, bits: usize) -> Big {
    Big::from(k).with_precision(bits).value()
}

fn to_f64(x: &Big) -> f64 {
    x.to_f64().value()
}

/// Sparse columns of `A` in working precision.
struct Generator {
    cols: Vec<Vec<(usize, Big)>>,
    dim: usize,
    norm1: f64,
}

impl Generator {
    fn new(flow: &FlowMatrices, coupling: Coupling, bits: usize) -> Self {
        let (split, merge) = flow.sparse_columns();
        let dim = flow.dim();
        let weight = match coupling {
            Coupling::Finite(n) => Some(big_int(1, bits) / big_int(n * n, bits)),
            Coupling::Free => None,
        };
        let cols = (0..dim)
            .map(|j| {
                let mut col: Vec<(usize, Big)> = split[j]
                    .iter()
                    .map(|&(i, c)| (i, big_int(c, bits)))
                    .collect();
                if let Some(w) = &weight {
                    col.extend(merge[j].iter().map(|&(i, c)| (i, big_int(c, bits) * w)));
                }
                col
            })
            .collect();
        Generator {
            cols,
            dim,
            norm1: flow.max_column_sum(coupling.merge_weight()),
        }
    }

    fn apply(&self, v: &[Big], bits: usize) -> Vec<Big> {
        let mut out: Vec<Big> = (0..self.dim).map(|_| big(0.0, bits)).collect();
        for (j, col) in self.cols.iter().enumerate() {
            if v[j] == Big::ZERO {
                continue;
            }
            for &(i, ref a) in col {
                out[i] = &out[i] + a * &v[j];
            }
        }
        out
    }
}

fn bits_for(t_norm: f64) -> usize {
    GUARD_BITS + (t_norm * std::f64::consts::LOG2_E).ceil() as usize
}

fn l1_f64(v: &[Big]) -> f64 {
    v.iter().map(|x| to_f64(x).abs()).sum()
}

/// Truncated Taylor series for `exp(-tA) v`. The series is cut once the
/// geometric tail bound `||term_k|| * r / (1 - r)`, with `r = t||A|| / (k+1)`,
/// falls below the rounding floor of the largest term seen.
///
/// Returns the result, the largest term norm, and the number of terms used.
fn series_action(gen: &Generator, t: f64, v0: Vec<Big>, bits: usize) -> (Vec<Big>, f64, usize) {
    let t_norm = t * gen.norm1;
    let neg_t = big(-t, bits);
    let mut sum = v0.clone();
    let mut term = v0;
    let mut peak = l1_f64(&term);
    let floor = 2f64.powi(-(bits as i32 - 8));
    let mut k = 0usize;
    loop {
        k += 1;
        let scale = &neg_t / big_int(k as u64, bits);
        term = gen
            .apply(&term, bits)
            .into_iter()
            .map(|x| x * &scale)
            .collect();
        for (s, x) in sum.iter_mut().zip(&term) {
            *s = &*s + x;
        }
        let norm = l1_f64(&term);
        peak = peak.max(norm);
        if norm == 0.0 {
            break;
        }
        let r = t_norm / (k + 1) as f64;
        if r < 0.5 && norm * r / (1.0 - r) <= floor * peak.max(1.0) {
            break;
        }
    }
    (sum, peak, k)
}

/// `1^T exp(-tA) e_source`: the total class weight after flowing the
/// indicator of `source` for time `t`.
///
/// The working precision is raised until the rounding error bound is below
/// `1e-15` of the result, or the result is an exact zero of the flow.
pub fn flow_total(flow: &FlowMatrices, coupling: Coupling, t: f64, source: usize) -> Result<f64> {
    coupling.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("time must be finite and nonnegative, got {t}")));
    }
    if source >= flow.dim() {
        return Err(Error::contract("source class index out of range"));
    }
    let t_norm = t * flow.max_column_sum(coupling.merge_weight());
    let mut bits = bits_for(t_norm);
    for _ in 0..MAX_REFINEMENTS {
        let gen = Generator::new(flow, coupling, bits);
        let mut v0: Vec<Big> = (0..gen.dim).map(|_| big(0.0, bits)).collect();
        v0[source] = big(1.0, bits);
        let (v, peak, terms) = series_action(&gen, t, v0, bits);
        let total = v.iter().fold(big(0.0, bits), |acc, x| acc + x);
        let value = to_f64(&total);
        let err = peak.max(1.0) * (terms + gen.dim) as f64 * 2f64.powi(-(bits as i32));
        if value == 0.0 || err <= REL_TARGET * value.abs() {
            return Ok(value);
        }
        // With no significant bits the estimate says nothing about the true
        // magnitude, so grow geometrically instead.
        bits = if err >= value.abs() {
            2 * bits
        } else {
            bits + (err / (REL_TARGET * value.abs())).log2().ceil() as usize + 16
        };
    }
    Err(Error::Convergence(format!(
        "class flow at t = {t}: precision refinement did not reach the accuracy target"
    )))
}

/// Dense `exp(-tA)` by term-wise Taylor summation applied to each basis
/// vector, row-major, rounded to `f64` entrywise.
pub fn flow_exp_series(flow: &FlowMatrices, coupling: Coupling, t: f64) -> Result<Vec<f64>> {
    coupling.validate()?;
    let d = flow.dim();
    let bits = bits_for(t * flow.max_column_sum(coupling.merge_weight()));
    let gen = Generator::new(flow, coupling, bits);
    let mut out = vec![0.0; d * d];
    for j in 0..d {
        let mut v0: Vec<Big> = (0..d).map(|_| big(0.0, bits)).collect();
        v0[j] = big(1.0, bits);
        let (v, _, _) = series_action(&gen, t, v0, bits);
        for (i, x) in v.iter().enumerate() {
            out[i * d + j] = to_f64(x);
        }
    }
    Ok(out)
}

/// Dense `exp(-tA)` by scaling and squaring: `exp(-tA/2^s)` from its Taylor
/// series with `t||A||/2^s <= 1/2`, then `s` squarings.
pub fn flow_exp_squaring(flow: &FlowMatrices, coupling: Coupling, t: f64) -> Result<Vec<f64>> {
    coupling.validate()?;
    let d = flow.dim();
    let t_norm = t * flow.max_column_sum(coupling.merge_weight());
    let mut s = 0u32;
    while t_norm / 2f64.powi(s as i32) > 0.5 {
        s += 1;
    }
    let bits = bits_for(t_norm) + s as usize + 2 * (usize::BITS - d.leading_zeros()) as usize;
    let gen = Generator::new(flow, coupling, bits);
    let zero = || big(0.0, bits);

    // M = -(t / 2^s) A, dense
    let scale = big(-t, bits) / big(2f64.powi(s as i32), bits);
    let mut m: Vec<Big> = (0..d * d).map(|_| zero()).collect();
    for (j, col) in gen.cols.iter().enumerate() {
        for &(i, ref a) in col {
            m[i * d + j] = a * &scale;
        }
    }
    let matmul = |a: &[Big], b: &[Big]| -> Vec<Big> {
        let mut c: Vec<Big> = (0..d * d).map(|_| zero()).collect();
        for i in 0..d {
            for k in 0..d {
                let aik = &a[i * d + k];
                if *aik == Big::ZERO {
                    continue;
                }
                for j in 0..d {
                    let bkj = &b[k * d + j];
                    if *bkj != Big::ZERO {
                        c[i * d + j] = &c[i * d + j] + aik * bkj;
                    }
                }
            }
        }
        c
    };

    let mut e: Vec<Big> = (0..d * d)
        .map(|idx| if idx / d == idx % d { big(1.0, bits) } else { zero() })
        .collect();
    let mut term = e.clone();
    let floor = 2f64.powi(-(bits as i32));
    for k in 1..200u64 {
        let kk = big_int(k, bits);
        term = matmul(&term, &m).into_iter().map(|x| x / &kk).collect();
        for (x, y) in e.iter_mut().zip(&term) {
            *x = &*x + y;
        }
        if l1_f64(&term) <= floor {
            break;
        }
    }
    for _ in 0..s {
        e = matmul(&e, &e);
    }
    Ok(e.iter().map(to_f64).collect())
}
