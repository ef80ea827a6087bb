//! Cochains on a Lie subalgebra `h` with values in a tensor product of
//! `q`, `q*`, `E`, `E*` slots, and the shuffle wedge product.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{sort_sign, Permutation};
use crate::scalar::Scalar;

/// What a value slot of a cochain carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Q,
    QDual,
    E,
    EDual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub kind: SlotKind,
    pub dim: usize,
}

impl Slot {
    pub fn q(dim: usize) -> Self {
        Slot { kind: SlotKind::Q, dim }
    }
    pub fn q_dual(dim: usize) -> Self {
        Slot { kind: SlotKind::QDual, dim }
    }
    pub fn e(dim: usize) -> Self {
        Slot { kind: SlotKind::E, dim }
    }
    pub fn e_dual(dim: usize) -> Self {
        Slot { kind: SlotKind::EDual, dim }
    }
}

/// Sparse vector keyed by flat value index.
pub type SparseVec = BTreeMap<usize, Scalar>;

pub(crate) fn vec_add_at(v: &mut SparseVec, i: usize, x: Scalar) {
    if x.is_zero() {
        return;
    }
    match v.entry(i) {
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

/// All strictly increasing `k`-tuples from `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// An element of `Λᵏh* ⊗ V`, stored on strictly increasing index tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainForm {
    dim_h: usize,
    degree: usize,
    slots: Vec<Slot>,
    components: BTreeMap<Vec<usize>, SparseVec>,
}

impl CochainForm {
    pub fn zero(dim_h: usize, degree: usize, slots: Vec<Slot>) -> Self {
        CochainForm { dim_h, degree, slots, components: BTreeMap::new() }
    }

    /// Scalar-valued zero form.
    pub fn zero_scalar(dim_h: usize, degree: usize) -> Self {
        Self::zero(dim_h, degree, Vec::new())
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn value_shape(&self) -> Vec<usize> {
        self.slots.iter().map(|s| s.dim).collect()
    }

    pub fn value_dim(&self) -> usize {
        self.slots.iter().map(|s| s.dim).product()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.components.values().map(BTreeMap::len).sum()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &SparseVec)> {
        self.components.iter()
    }

    pub fn component(&self, tuple: &[usize]) -> Option<&SparseVec> {
        self.components.get(tuple)
    }

    /// Iterates `(tuple, flat value index, entry)`.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, usize, &Scalar)> {
        self.components.iter().flat_map(|(t, v)| v.iter().map(move |(i, x)| (t, *i, x)))
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.slots.len(), "value index order mismatch");
        idx.iter().zip(&self.slots).fold(0, |acc, (i, s)| {
            assert!(*i < s.dim, "value index out of range");
            acc * s.dim + i
        })
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.slots.len()];
        for (pos, s) in self.slots.iter().enumerate().rev() {
            idx[pos] = flat % s.dim;
            flat /= s.dim;
        }
        idx
    }

    fn check_tuple(&self, tuple: &[usize]) {
        assert_eq!(tuple.len(), self.degree, "tuple length differs from form degree");
        assert!(tuple.windows(2).all(|w| w[0] < w[1]), "tuple {tuple:?} not strictly increasing");
        assert!(tuple.iter().all(|&i| i < self.dim_h), "tuple {tuple:?} outside h");
    }

    /// Adds `x` to the entry at an increasing tuple and flat value index.
    pub fn add_at(&mut self, tuple: &[usize], value: usize, x: Scalar) {
        if x.is_zero() {
            return;
        }
        self.check_tuple(tuple);
        assert!(value < self.value_dim(), "value index out of range");
        let comp = self.components.entry(tuple.to_vec()).or_default();
        vec_add_at(comp, value, x);
        if comp.is_empty() {
            self.components.remove(tuple);
        }
    }

    pub fn add_vec_at(&mut self, tuple: &[usize], v: &SparseVec, coef: &Scalar) {
        for (i, x) in v {
            self.add_at(tuple, *i, x * coef);
        }
    }

    pub fn get(&self, tuple: &[usize], value: usize) -> Scalar {
        self.components
            .get(tuple)
            .and_then(|v| v.get(&value))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Value on an arbitrary ordered tuple of basis elements, using
    /// antisymmetry. Repeated indices give zero.
    pub fn eval(&self, tuple: &[usize]) -> SparseVec {
        assert_eq!(tuple.len(), self.degree);
        let mut sorted = tuple.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return SparseVec::new();
        }
        let sign = sort_sign(tuple);
        match self.components.get(&sorted) {
            None => SparseVec::new(),
            Some(v) if sign == 1 => v.clone(),
            Some(v) => v.iter().map(|(i, x)| (*i, -x.clone())).collect(),
        }
    }

    fn check_compatible(&self, other: &CochainForm) -> Result<()> {
        if self.dim_h != other.dim_h || self.degree != other.degree || self.value_shape() != other.value_shape() {
            return Err(Error::Shape(format!(
                "forms of (dim_h, degree, values) = ({}, {}, {:?}) and ({}, {}, {:?})",
                self.dim_h,
                self.degree,
                self.value_shape(),
                other.dim_h,
                other.degree,
                other.value_shape()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &CochainForm) -> Result<CochainForm> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (t, v) in &other.components {
            out.add_vec_at(t, v, &Scalar::from_integer(1.into()));
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CochainForm) -> Result<CochainForm> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (t, v) in &other.components {
            out.add_vec_at(t, v, &-Scalar::from_integer(1.into()));
        }
        Ok(out)
    }

    pub fn scaled(&self, c: &Scalar) -> CochainForm {
        let mut out = Self::zero(self.dim_h, self.degree, self.slots.clone());
        for (t, v) in &self.components {
            out.add_vec_at(t, v, c);
        }
        out
    }

    /// Applies a linear map to the values. `image(i)` lists the image of the
    /// value basis vector `i` in the new value space described by `slots`.
    pub fn map_values<F>(&self, slots: Vec<Slot>, mut image: F) -> CochainForm
    where
        F: FnMut(usize) -> Vec<(usize, Scalar)>,
    {
        let mut out = Self::zero(self.dim_h, self.degree, slots);
        let mut cache: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
        for (t, v) in &self.components {
            for (i, x) in v {
                let img = cache.entry(*i).or_insert_with(|| image(*i));
                for (j, y) in img.iter() {
                    out.add_at(t, *j, x * y);
                }
            }
        }
        out
    }

    /// Permutes value slots with `τ_σ` (output slot `i` is input slot `σ(i)`).
    pub fn permute_slots(&self, sigma: &Permutation) -> Result<CochainForm> {
        if sigma.len() != self.slots.len() {
            return Err(Error::Shape("slot permutation of wrong length".into()));
        }
        let slots: Vec<Slot> = (0..sigma.len()).map(|i| self.slots[sigma.apply(i)]).collect();
        if slots.iter().zip(&self.slots).any(|(a, b)| a.dim != b.dim) {
            return Err(Error::Shape("slot permutation mixes dimensions".into()));
        }
        let target = Self::zero(self.dim_h, self.degree, slots.clone());
        Ok(self.map_values(slots, |i| {
            let idx = self.multi_index(i);
            let new_idx: Vec<usize> = (0..idx.len()).map(|p| idx[sigma.apply(p)]).collect();
            vec![(target.flat_index(&new_idx), Scalar::from_integer(1.into()))]
        }))
    }

    /// Index of each basis element `(tuple, value)` in a flat vector; tuples
    /// enumerated lexicographically.
    pub fn basis_size(dim_h: usize, degree: usize, value_dim: usize) -> usize {
        combinations(dim_h, degree).len() * value_dim
    }

    /// Flat coordinate vector in the basis of [`CochainForm::basis_size`].
    pub fn to_vector(&self) -> Vec<Scalar> {
        let tuples = combinations(self.dim_h, self.degree);
        let vd = self.value_dim();
        let mut out = vec![Scalar::zero(); tuples.len() * vd];
        for (ti, t) in tuples.iter().enumerate() {
            if let Some(v) = self.components.get(t) {
                for (i, x) in v {
                    out[ti * vd + i] = x.clone();
                }
            }
        }
        out
    }

    pub fn from_vector(dim_h: usize, degree: usize, slots: Vec<Slot>, coords: &[Scalar]) -> Result<Self> {
        let tuples = combinations(dim_h, degree);
        let mut f = Self::zero(dim_h, degree, slots);
        let vd = f.value_dim();
        if coords.len() != tuples.len() * vd {
            return Err(Error::Shape(format!(
                "coordinate vector of length {} for {} basis cochains",
                coords.len(),
                tuples.len() * vd
            )));
        }
        for (ti, t) in tuples.iter().enumerate() {
            for i in 0..vd {
                f.add_at(t, i, coords[ti * vd + i].clone());
            }
        }
        Ok(f)
    }
}

/// Shuffle product `(η∧μ)(a₁…a_{p+q}) = Σ_σ sign(σ) η(a_{σ(1)}…a_{σ(p)}) ⊗ μ(…)`
/// over `(p,q)`-shuffles, with no factorial normalization. The value slots
/// of the result are those of `eta` followed by those of `mu`.
pub fn shuffle_wedge(eta: &CochainForm, mu: &CochainForm) -> Result<CochainForm> {
    if eta.dim_h != mu.dim_h {
        return Err(Error::Shape(format!(
            "wedge of forms on algebras of dimension {} and {}",
            eta.dim_h, mu.dim_h
        )));
    }
    let mut slots = eta.slots.clone();
    slots.extend_from_slice(&mu.slots);
    let mut out = CochainForm::zero(eta.dim_h, eta.degree + mu.degree, slots);
    let mu_dim = mu.value_dim();
    for (j, v) in &eta.components {
        for (k, w) in &mu.components {
            if j.iter().any(|x| k.contains(x)) {
                continue;
            }
            let mut joined = j.clone();
            joined.extend_from_slice(k);
            let sign = sort_sign(&joined);
            joined.sort_unstable();
            for (vi, x) in v {
                for (wi, y) in w {
                    let c = x * y;
                    out.add_at(&joined, vi * mu_dim + wi, if sign == 1 { c } else { -c });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, q};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn random_one_form(rng: &mut StdRng, dim_h: usize, vdim: usize) -> CochainForm {
        let slots = if vdim == 1 { vec![] } else { vec![Slot::q(vdim)] };
        let mut f = CochainForm::zero(dim_h, 1, slots);
        for a in 0..dim_h {
            for v in 0..vdim {
                f.add_at(&[a], v, q(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
            }
        }
        f
    }

    #[test]
    fn combinations_in_lex_order() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn wedge_of_one_forms_matches_two_term_expansion() {
        let mut rng = StdRng::seed_from_u64(5);
        let eta = random_one_form(&mut rng, 3, 2);
        let mu = random_one_form(&mut rng, 3, 2);
        let w = shuffle_wedge(&eta, &mu).unwrap();
        for a1 in 0..3 {
            for a2 in 0..3 {
                let lhs = w.eval(&[a1, a2]);
                for i in 0..2 {
                    for j in 0..2 {
                        let expected = eta.get(&[a1], i) * mu.get(&[a2], j) - eta.get(&[a2], i) * mu.get(&[a1], j);
                        assert_eq!(lhs.get(&(i * 2 + j)).cloned().unwrap_or_default(), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn scalar_one_form_squares_to_zero() {
        let mut rng = StdRng::seed_from_u64(9);
        let eta = random_one_form(&mut rng, 4, 1);
        assert!(shuffle_wedge(&eta, &eta).unwrap().is_zero());
    }

    // Expands both triple products by explicit sums over S₃.
    #[test]
    fn wedge_is_associative_on_one_forms() {
        let mut rng = StdRng::seed_from_u64(21);
        let (e, m, n) = (random_one_form(&mut rng, 3, 2), random_one_form(&mut rng, 3, 2), random_one_form(&mut rng, 3, 2));
        let left = shuffle_wedge(&shuffle_wedge(&e, &m).unwrap(), &n).unwrap();
        let right = shuffle_wedge(&e, &shuffle_wedge(&m, &n).unwrap()).unwrap();
        assert_eq!(left, right);
        for p in Permutation::all(3) {
            let a: Vec<usize> = p.images().to_vec();
            let s = Scalar::from_integer(p.sign().into());
            for v in 0..8 {
                let (i, j, k) = (v / 4, (v / 2) % 2, v % 2);
                let direct: Scalar = Permutation::all(3)
                    .iter()
                    .map(|t| {
                        let b: Vec<usize> = t.images().iter().map(|&x| a[x]).collect();
                        Scalar::from_integer(t.sign().into()) * e.get(&[b[0]], i) * m.get(&[b[1]], j) * n.get(&[b[2]], k)
                    })
                    .sum();
                let stored = left.get(&[0, 1, 2], v);
                assert_eq!(&stored * &s, direct);
            }
        }
    }

    #[test]
    fn wedge_rejects_mismatched_base() {
        let a = CochainForm::zero_scalar(3, 1);
        let b = CochainForm::zero_scalar(4, 1);
        assert!(shuffle_wedge(&a, &b).is_err());
    }

    #[test]
    fn vector_roundtrip() {
        let mut f = CochainForm::zero(4, 2, vec![Slot::q(2)]);
        f.add_at(&[0, 3], 1, int(5));
        f.add_at(&[1, 2], 0, q(-1, 2));
        let v = f.to_vector();
        assert_eq!(CochainForm::from_vector(4, 2, vec![Slot::q(2)], &v).unwrap(), f);
        assert_eq!(f.eval(&[3, 0]).get(&1).cloned().unwrap(), int(-5));
    }
}
