use std::collections::HashMap;

use crate::error::{Error, Result};

use super::partition::{cycle_type, partitions, ClassVector, Partition};

/// Per-column `(row, count)` lists.
pub(crate) type SparseColumns = Vec<Vec<(usize, u64)>>;

/// Largest `n` accepted by [`build_flow_matrices`] and the moment routines.
pub const MAX_FLOW_N: usize = 12;
/// Largest `n` accepted by the brute-force oracle (it walks every
/// transposition of an explicit permutation).
pub const MAX_ORACLE_N: usize = 7;

/// Class-coordinate action of the cycle-splitting and cycle-merging
/// transposition sums on the symmetric group of degree `n`.
///
/// Entry `(target, source)` of `split` counts the transpositions `(i j)` with
/// `i < j` such that `sigma * (i j)` has more cycles than `sigma` and cycle
/// type `target`, where `sigma` is any permutation of cycle type `source`.
/// `merge` is the same count for products with fewer cycles.
#[derive(Clone, Debug)]
pub struct FlowMatrices {
    n: usize,
    classes: Vec<Partition>,
    index: HashMap<Partition, usize>,
    split: Vec<u64>,
    merge: Vec<u64>,
}

impl FlowMatrices {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of classes, `p(n)`.
    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    /// Classes in canonical order; row/column `k` is `classes()[k]`.
    pub fn classes(&self) -> &[Partition] {
        &self.classes
    }

    pub fn index_of(&self, class: &Partition) -> Option<usize> {
        self.index.get(class).copied()
    }

    pub fn split(&self, target: usize, source: usize) -> u64 {
        self.split[target * self.dim() + source]
    }

    pub fn merge(&self, target: usize, source: usize) -> u64 {
        self.merge[target * self.dim() + source]
    }

    pub fn split_column(&self, source: &Partition) -> Result<ClassVector> {
        self.column(source, &self.split)
    }

    pub fn merge_column(&self, source: &Partition) -> Result<ClassVector> {
        self.column(source, &self.merge)
    }

    fn column(&self, source: &Partition, data: &[u64]) -> Result<ClassVector> {
        let j = self.index_of(source).ok_or_else(|| {
            Error::contract(format!("{source} is not a partition of {}", self.n))
        })?;
        let d = self.dim();
        let mut v = ClassVector::zero(self.n);
        for (i, class) in self.classes.iter().enumerate() {
            let c = data[i * d + j];
            if c != 0 {
                v.add_to(class, c as f64)?;
            }
        }
        Ok(v)
    }

    /// Nonzero entries of column `source` of `split` and `merge`, as
    /// `(target, count)` pairs.
    pub(crate) fn sparse_columns(&self) -> (SparseColumns, SparseColumns) {
        let d = self.dim();
        let collect = |data: &[u64]| -> SparseColumns {
            (0..d)
                .map(|j| {
                    (0..d)
                        .filter_map(|i| {
                            let c = data[i * d + j];
                            (c != 0).then_some((i, c))
                        })
                        .collect()
                })
                .collect()
        };
        (collect(&self.split), collect(&self.merge))
    }

    /// Largest column sum of `split + weight * merge`.
    pub(crate) fn max_column_sum(&self, merge_weight: f64) -> f64 {
        let d = self.dim();
        (0..d)
            .map(|j| {
                (0..d)
                    .map(|i| self.split(i, j) as f64 + merge_weight * self.merge(i, j) as f64)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Builds the split and merge matrices combinatorially.
///
/// Splitting a cycle of length `l` into lengths `(d, l - d)` is achieved by
/// `l` internal transpositions when `d < l/2` and by `l/2` when `d = l/2`.
/// Merging two cycles of lengths `a` and `b` is achieved by the `a * b`
/// transpositions with one point in each.
pub fn build_flow_matrices(n: usize) -> Result<FlowMatrices> {
    if n == 0 || n > MAX_FLOW_N {
        return Err(Error::Size(format!(
            "flow matrices: n = {n} outside 1..={MAX_FLOW_N}"
        )));
    }
    let classes = partitions(n)?;
    let index: HashMap<Partition, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let d = classes.len();
    let mut split = vec![0u64; d * d];
    let mut merge = vec![0u64; d * d];

    for (j, source) in classes.iter().enumerate() {
        let parts = source.parts();
        for (k, &len) in parts.iter().enumerate() {
            for small in 1..=len / 2 {
                let count = if 2 * small == len { len / 2 } else { len };
                let target = source.split_part(k, small, len - small);
                split[index[&target] * d + j] += count as u64;
            }
        }
        for a in 0..parts.len() {
            for b in a + 1..parts.len() {
                let target = source.merge_parts(a, b);
                merge[index[&target] * d + j] += (parts[a] * parts[b]) as u64;
            }
        }
    }

    Ok(FlowMatrices {
        n,
        classes,
        index,
        split,
        merge,
    })
}

/// Brute-force split and merge columns for `class`: multiplies the canonical
/// representative by every transposition and tallies the cycle types.
///
/// The representative places cycles on consecutive points, longest first.
pub fn oracle_flow_column(n: usize, class: &Partition) -> Result<(ClassVector, ClassVector)> {
    if n == 0 || n > MAX_ORACLE_N {
        return Err(Error::Size(format!("oracle: n = {n} outside 1..={MAX_ORACLE_N}")));
    }
    if class.n() != n {
        return Err(Error::contract(format!("{class} is not a partition of {n}")));
    }
    let sigma = representative(class);
    let cycles = class.len();
    let mut split = ClassVector::zero(n);
    let mut merge = ClassVector::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            // (sigma * (i j))(x) = sigma((i j)(x))
            let mut product = sigma.clone();
            product.swap(i, j);
            let ty = cycle_type(&product);
            if ty.len() > cycles {
                split.add_to(&ty, 1.0)?;
            } else {
                merge.add_to(&ty, 1.0)?;
            }
        }
    }
    Ok((split, merge))
}

fn representative(class: &Partition) -> Vec<usize> {
    let mut perm = Vec::with_capacity(class.n());
    let mut start = 0;
    for &len in class.parts() {
        for k in 0..len {
            perm.push(start + (k + 1) % len);
        }
        start += len;
    }
    perm
}
