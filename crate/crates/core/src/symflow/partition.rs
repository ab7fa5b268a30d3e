use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` for which [`partitions`] will enumerate.
pub const MAX_PARTITION_N: usize = 16;

/// An integer partition of `n`, stored with parts in nonincreasing order.
///
/// A partition labels a conjugacy class of the symmetric group: the parts are
/// the cycle lengths of any permutation in the class, so `len()` is the cycle
/// count of the class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Builds a partition from parts in any order; zero parts are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::domain("a partition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(Error::domain("partition parts must be positive"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    /// The single-cycle class `[n]`.
    pub fn cycle(n: usize) -> Self {
        Partition(vec![n])
    }

    /// The identity class `[1, ..., 1]`.
    pub fn singletons(n: usize) -> Self {
        Partition(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// The integer being partitioned.
    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of parts, i.e. the number of cycles.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parity of any permutation of this cycle type, `(-1)^(n - #cycles)`.
    pub fn sign(&self) -> f64 {
        if (self.n() - self.len()).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Replace the part at `idx` by the two parts `a` and `b`.
    pub(crate) fn split_part(&self, idx: usize, a: usize, b: usize) -> Self {
        let mut parts = self.0.clone();
        parts.swap_remove(idx);
        parts.push(a);
        parts.push(b);
        parts.sort_unstable_by(|x, y| y.cmp(x));
        Partition(parts)
    }

    /// Replace the parts at `i` and `j` (distinct) by their sum.
    pub(crate) fn merge_parts(&self, i: usize, j: usize) -> Self {
        let merged = self.0[i] + self.0[j];
        let mut parts: Vec<usize> = self
            .0
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .map(|(_, &p)| p)
            .collect();
        parts.push(merged);
        parts.sort_unstable_by(|x, y| y.cmp(x));
        Partition(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

// Canonical order is reverse-lexicographic: [n] < [n-1,1] < ... < [1^n].
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All partitions of `n` in reverse-lexicographic order, starting at `[n]`
/// and ending at `[1, ..., 1]`.
pub fn partitions(n: usize) -> Result<Vec<Partition>> {
    if n == 0 || n > MAX_PARTITION_N {
        return Err(Error::Size(format!(
            "partitions: n = {n} outside 1..={MAX_PARTITION_N}"
        )));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    fill(n, n, &mut prefix, &mut out);
    Ok(out)
}

fn fill(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition(prefix.clone()));
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        prefix.push(part);
        fill(remaining - part, part, prefix, out);
        prefix.pop();
    }
}

/// Cycle type of a permutation given in one-line notation (`perm[i]` is the
/// image of `i`).
pub fn cycle_type(perm: &[usize]) -> Partition {
    let mut seen = vec![false; perm.len()];
    let mut parts = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        parts.push(len);
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Partition(parts)
}

/// An element of the class algebra of the symmetric group in class
/// coordinates: the coefficient attached to each conjugacy class counts the
/// total weight carried by permutations of that cycle type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassVector {
    n: usize,
    coeffs: BTreeMap<Partition, f64>,
}

impl ClassVector {
    pub fn zero(n: usize) -> Self {
        ClassVector {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    /// The indicator of a single class.
    pub fn indicator(class: &Partition) -> Self {
        let mut v = ClassVector::zero(class.n());
        v.coeffs.insert(class.clone(), 1.0);
        v
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, class: &Partition) -> f64 {
        self.coeffs.get(class).copied().unwrap_or(0.0)
    }

    /// Adds `value` to the coefficient of `class`.
    pub fn add_to(&mut self, class: &Partition, value: f64) -> Result<()> {
        if class.n() != self.n {
            return Err(Error::contract(format!(
                "class {class} is not a partition of {}",
                self.n
            )));
        }
        *self.coeffs.entry(class.clone()).or_insert(0.0) += value;
        Ok(())
    }

    /// Nonzero entries in canonical class order.
    pub fn iter(&self) -> impl Iterator<Item = (&Partition, f64)> {
        self.coeffs
            .iter()
            .filter(|(_, &c)| c != 0.0)
            .map(|(p, &c)| (p, c))
    }

    /// Sum of all coefficients. Every permutation has unit normalized trace
    /// at the identity matrix, so this is the evaluation at `M = I`.
    pub fn total(&self) -> f64 {
        self.coeffs.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|&c| c == 0.0)
    }
}

impl Add for &ClassVector {
    type Output = ClassVector;

    fn add(self, rhs: &ClassVector) -> ClassVector {
        assert_eq!(self.n, rhs.n, "class vectors over different n");
        let mut out = self.clone();
        for (p, &c) in &rhs.coeffs {
            *out.coeffs.entry(p.clone()).or_insert(0.0) += c;
        }
        out
    }
}

impl Mul<f64> for &ClassVector {
    type Output = ClassVector;

    fn mul(self, rhs: f64) -> ClassVector {
        ClassVector {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(p, &c)| (p.clone(), c * rhs)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Brute-force partition count via the standard recurrence on the largest
    // part, independent of the enumeration above.
    fn count_partitions(n: usize, max: usize) -> usize {
        if n == 0 {
            return 1;
        }
        (1..=max.min(n)).map(|k| count_partitions(n - k, k)).sum()
    }

    #[test]
    fn small_counts() {
        assert_eq!(partitions(1).unwrap(), vec![Partition::cycle(1)]);
        assert_eq!(partitions(4).unwrap().len(), 5);
        assert_eq!(partitions(8).unwrap().len(), 22);
        for n in 1..=MAX_PARTITION_N {
            assert_eq!(partitions(n).unwrap().len(), count_partitions(n, n), "n={n}");
        }
    }

    #[test]
    fn canonical_order_is_reverse_lex_and_stable() {
        let p4: Vec<Vec<usize>> = partitions(4)
            .unwrap()
            .into_iter()
            .map(|p| p.parts().to_vec())
            .collect();
        assert_eq!(
            p4,
            vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]
        );
        let p = partitions(9).unwrap();
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(p, partitions(9).unwrap());
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(partitions(0), Err(Error::Size(_))));
        assert!(matches!(partitions(17), Err(Error::Size(_))));
    }

    #[test]
    fn partition_invariants() {
        for p in partitions(10).unwrap() {
            assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
            assert!(p.parts().iter().all(|&x| x >= 1));
            assert_eq!(p.n(), 10);
        }
        assert!(Partition::new(vec![1, 0]).is_err());
        assert_eq!(Partition::new(vec![1, 3, 2]).unwrap().parts(), &[3, 2, 1]);
    }

    #[test]
    fn cycle_type_counts_cycles() {
        assert_eq!(cycle_type(&[0, 1, 2]), Partition::singletons(3));
        assert_eq!(cycle_type(&[1, 2, 0]), Partition::cycle(3));
        assert_eq!(cycle_type(&[1, 0, 3, 2, 4]).parts(), &[2, 2, 1]);
    }

    #[test]
    fn class_vector_linear_ops() {
        let a = ClassVector::indicator(&Partition::cycle(3));
        let mut b = ClassVector::zero(3);
        b.add_to(&Partition::singletons(3), 2.0).unwrap();
        assert!(b.add_to(&Partition::cycle(2), 1.0).is_err());
        let c = &(&a + &b) * 0.5;
        assert_eq!(c.get(&Partition::cycle(3)), 0.5);
        assert_eq!(c.get(&Partition::singletons(3)), 1.0);
        assert_eq!(c.total(), 1.5);
    }
}
