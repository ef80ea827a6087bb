//! Sparse tensors over ℚ with slot permutations and pairwise contraction.

use std::collections::{BTreeMap, HashMap};

use std::fmt::Debug;
use std::ops::{AddAssign, Mul, Neg};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::scalar::Scalar;

/// Exact coefficient types a tensor can hold (rationals, or integers when
/// denominators have been cleared).
pub trait Entry: Clone + Debug + PartialEq + Zero + One + AddAssign + Neg<Output = Self> + for<'a> Mul<&'a Self, Output = Self> + Send + Sync {}

impl<T> Entry for T where T: Clone + Debug + PartialEq + Zero + One + AddAssign + Neg<Output = T> + for<'a> Mul<&'a T, Output = T> + Send + Sync {}

/// A tensor stored as a map from multi-index to nonzero entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseTensor<T = Scalar> {
    shape: Vec<usize>,
    entries: BTreeMap<Vec<usize>, T>,
}

impl<T: Entry> SparseTensor<T> {
    pub fn zeros(shape: Vec<usize>) -> Self {
        SparseTensor { shape, entries: BTreeMap::new() }
    }

    /// Order-0 tensor holding `x`.
    pub fn scalar(x: T) -> Self {
        let mut t = Self::zeros(Vec::new());
        t.set(Vec::new(), x);
        t
    }

    /// Builds a tensor from a row-major dense slice.
    pub fn from_dense(shape: Vec<usize>, data: &[T]) -> Result<Self> {
        let size: usize = shape.iter().product();
        if data.len() != size {
            return Err(Error::Shape(format!(
                "dense data of length {} for shape {shape:?}",
                data.len()
            )));
        }
        let mut t = Self::zeros(shape);
        for (flat, x) in data.iter().enumerate() {
            if !x.is_zero() {
                let idx = t.unflatten(flat);
                t.entries.insert(idx, x.clone());
            }
        }
        Ok(t)
    }

    /// Matrix `m[i][j]` as an order-2 tensor.
    pub fn from_matrix(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data: Vec<T> = rows.iter().flat_map(|row| row.iter().cloned()).collect();
        Self::from_dense(vec![r, c], &data)
    }

    /// Kronecker delta on `n`.
    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(vec![n, n]);
        for i in 0..n {
            t.set(vec![i, i], T::one());
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &T)> {
        self.entries.iter()
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.entries.get(idx).cloned().unwrap_or_else(T::zero)
    }

    fn check_index(&self, idx: &[usize]) {
        assert_eq!(idx.len(), self.shape.len(), "index order mismatch");
        for (i, d) in idx.iter().zip(&self.shape) {
            assert!(i < d, "index {idx:?} out of bounds for shape {:?}", self.shape);
        }
    }

    /// Overwrites one entry; zero removes it.
    pub fn set(&mut self, idx: Vec<usize>, x: T) {
        self.check_index(&idx);
        if x.is_zero() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, x);
        }
    }

    /// Adds `x` to one entry.
    pub fn add_at(&mut self, idx: Vec<usize>, x: T) {
        if x.is_zero() {
            return;
        }
        self.check_index(&idx);
        match self.entries.entry(idx) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += x;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(x);
            }
        }
    }

    pub fn scaled(&self, c: &T) -> SparseTensor<T> {
        if c.is_zero() {
            return Self::zeros(self.shape.clone());
        }
        SparseTensor {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v.clone() * c)).collect(),
        }
    }

    pub fn add(&self, other: &SparseTensor<T>) -> Result<SparseTensor<T>> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!("{:?} + {:?}", self.shape, other.shape)));
        }
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.add_at(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SparseTensor<T>) -> Result<SparseTensor<T>> {
        self.add(&other.scaled(&-T::one()))
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (i, d)| acc * d + i)
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for (slot, d) in self.shape.iter().enumerate().rev() {
            idx[slot] = flat % d;
            flat /= d;
        }
        idx
    }

    /// Value of the order-0 tensor.
    pub fn scalar_value(&self) -> T {
        assert!(self.shape.is_empty(), "scalar_value on tensor of order {}", self.order());
        self.get(&[])
    }
}

/// Permutes tensor slots: `τ_σ(v₁⊗…⊗vₙ) = v_{σ(1)}⊗…⊗v_{σ(n)}`.
///
/// Output slot `i` carries input slot `σ(i)`, so the input entry at
/// `(i₁,…,iₙ)` lands at `(i_{σ(1)},…,i_{σ(n)})`.
pub fn tau_apply<T: Entry>(sigma: &Permutation, t: &SparseTensor<T>) -> Result<SparseTensor<T>> {
    let n = t.order();
    if sigma.len() != n {
        return Err(Error::Shape(format!(
            "permutation of {} slots applied to tensor of order {n}",
            sigma.len()
        )));
    }
    let shape: Vec<usize> = (0..n).map(|i| t.shape[sigma.apply(i)]).collect();
    if shape != t.shape {
        // Only slots of equal dimension may be exchanged.
        return Err(Error::Shape(format!(
            "permutation {:?} mixes slots of shape {:?}",
            sigma.images(),
            t.shape
        )));
    }
    let mut out = SparseTensor::zeros(shape);
    for (idx, v) in &t.entries {
        let new_idx: Vec<usize> = (0..n).map(|i| idx[sigma.apply(i)]).collect();
        out.entries.insert(new_idx, v.clone());
    }
    Ok(out)
}

/// Contracts `axes1` of `t1` against `axes2` of `t2` pairwise.
///
/// The result carries the free axes of `t1` (in order) followed by the free
/// axes of `t2`. With empty axis lists this is the outer product.
pub fn contract<T: Entry>(
    t1: &SparseTensor<T>,
    axes1: &[usize],
    t2: &SparseTensor<T>,
    axes2: &[usize],
) -> Result<SparseTensor<T>> {
    if axes1.len() != axes2.len() {
        return Err(Error::Shape(format!("contracting {axes1:?} against {axes2:?}")));
    }
    for (&a, &b) in axes1.iter().zip(axes2) {
        if a >= t1.order() || b >= t2.order() {
            return Err(Error::Shape(format!("axis pair ({a}, {b}) out of range")));
        }
        if t1.shape[a] != t2.shape[b] {
            return Err(Error::Shape(format!(
                "axis {a} has dimension {} but axis {b} has dimension {}",
                t1.shape[a], t2.shape[b]
            )));
        }
    }
    let has_duplicates = |axes: &[usize]| {
        let mut s = axes.to_vec();
        s.sort_unstable();
        s.windows(2).any(|w| w[0] == w[1])
    };
    if has_duplicates(axes1) || has_duplicates(axes2) {
        return Err(Error::Shape("repeated axis in contraction".into()));
    }

    let free1: Vec<usize> = (0..t1.order()).filter(|a| !axes1.contains(a)).collect();
    let free2: Vec<usize> = (0..t2.order()).filter(|a| !axes2.contains(a)).collect();
    let shape: Vec<usize> = free1
        .iter()
        .map(|&a| t1.shape[a])
        .chain(free2.iter().map(|&a| t2.shape[a]))
        .collect();

    let mut by_key: HashMap<Vec<usize>, Vec<(Vec<usize>, &T)>> = HashMap::new();
    for (idx, v) in &t2.entries {
        let key: Vec<usize> = axes2.iter().map(|&a| idx[a]).collect();
        let rest: Vec<usize> = free2.iter().map(|&a| idx[a]).collect();
        by_key.entry(key).or_default().push((rest, v));
    }

    let mut acc: HashMap<Vec<usize>, T> = HashMap::new();
    for (idx, v) in &t1.entries {
        let key: Vec<usize> = axes1.iter().map(|&a| idx[a]).collect();
        if let Some(partners) = by_key.get(&key) {
            let head: Vec<usize> = free1.iter().map(|&a| idx[a]).collect();
            for (rest, w) in partners {
                let mut full = head.clone();
                full.extend_from_slice(rest);
                let x = v.clone() * *w;
                match acc.entry(full) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += x,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(x);
                    }
                }
            }
        }
    }
    Ok(SparseTensor { shape, entries: acc.into_iter().filter(|(_, x)| !x.is_zero()).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, q};

    fn basis_monomial(dims: &[usize], idx: &[usize]) -> SparseTensor {
        let mut t = SparseTensor::zeros(dims.to_vec());
        t.set(idx.to_vec(), int(1));
        t
    }

    #[test]
    fn identity_permutation_is_noop() {
        let t = SparseTensor::from_dense(vec![2, 3, 2], &(0..12).map(int).collect::<Vec<_>>()).unwrap();
        assert_eq!(tau_apply(&Permutation::identity(3), &t).unwrap(), t);
    }

    #[test]
    fn transposition_on_matrix_is_transpose() {
        let t = SparseTensor::from_dense(vec![3, 3], &(1..10).map(int).collect::<Vec<_>>()).unwrap();
        let s = tau_apply(&Permutation::from_cycles(2, &[&[1, 2]]).unwrap(), &t).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s.get(&[i, j]), t.get(&[j, i]));
            }
        }
    }

    #[test]
    fn tau_1324_swaps_pairs_on_all_monomials() {
        // Brute force over every basis monomial e_{i1}⊗e_{i2}⊗e_{i3}⊗e_{i4}
        // in dimension 3: τ_{(13)(24)} must send it to e_{i3}⊗e_{i4}⊗e_{i1}⊗e_{i2}.
        let sigma = Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap();
        let dims = [3, 3, 3, 3];
        for flat in 0..81 {
            let idx = vec![flat / 27, (flat / 9) % 3, (flat / 3) % 3, flat % 3];
            let out = tau_apply(&sigma, &basis_monomial(&dims, &idx)).unwrap();
            let expected = basis_monomial(&dims, &[idx[2], idx[3], idx[0], idx[1]]);
            assert_eq!(out, expected);
        }
    }

    #[test]
    fn tau_rejects_rank_and_dimension_mismatch() {
        let t: SparseTensor = SparseTensor::zeros(vec![2, 3]);
        assert!(tau_apply(&Permutation::identity(3), &t).is_err());
        assert!(tau_apply(&Permutation::from_cycles(2, &[&[1, 2]]).unwrap(), &t).is_err());
    }

    #[test]
    fn delta_contracted_with_vector_is_vector() {
        let v = SparseTensor::from_dense(vec![3], &[q(1, 2), int(0), int(-4)]).unwrap();
        let out = contract(&SparseTensor::identity(3), &[1], &v, &[0]).unwrap();
        assert_eq!(out, v);
    }

    #[test]
    fn antisymmetric_against_symmetric_is_zero() {
        let a = SparseTensor::from_dense(vec![2, 2], &[int(0), int(3), int(-3), int(0)]).unwrap();
        let s = SparseTensor::from_dense(vec![2, 2], &[int(1), q(2, 7), q(2, 7), int(5)]).unwrap();
        let out = contract(&a, &[0, 1], &s, &[0, 1]).unwrap();
        assert!(out.is_zero());
        assert_eq!(out.order(), 0);
    }

    #[test]
    fn inner_axis_contraction_is_matrix_product() {
        let a = [[q(1, 2), int(3)], [int(-1), q(5, 3)]];
        let b = [[int(2), q(-1, 4)], [int(7), int(0)]];
        let ta = SparseTensor::from_matrix(&a.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        let tb = SparseTensor::from_matrix(&b.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        let prod = contract(&ta, &[1], &tb, &[0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut expected = int(0);
                for k in 0..2 {
                    expected += &a[i][k] * &b[k][j];
                }
                assert_eq!(prod.get(&[i, j]), expected);
            }
        }
    }

    #[test]
    fn contraction_rejects_mismatched_axes() {
        let a: SparseTensor = SparseTensor::zeros(vec![2, 3]);
        let b = SparseTensor::zeros(vec![2, 2]);
        assert!(contract(&a, &[1], &b, &[0]).is_err());
        assert!(contract(&a, &[0, 1], &b, &[0]).is_err());
    }
}
