//! Lie algebras by structure constants, Lie pairs `(g, h)` with `h`
//! spanned by the first basis vectors, and finite-dimensional
//! `h`-representations.

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forms::{vec_add_at, Slot, SlotKind, SparseVec};
use crate::json;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Structure constants `[e_i, e_j] = Σ_k c_ij^k e_k`, stored per ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    table: Vec<Vec<SparseVec>>,
}

impl LieAlgebra {
    pub fn abelian(dim: usize) -> Self {
        LieAlgebra { dim, table: vec![vec![SparseVec::new(); dim]; dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets `[e_i, e_j] = v` and `[e_j, e_i] = -v`.
    pub fn set_bracket(&mut self, i: usize, j: usize, v: SparseVec) {
        let neg = v.iter().map(|(k, x)| (*k, -x.clone())).collect();
        self.table[i][j] = v;
        self.table[j][i] = neg;
    }

    /// Sets only `[e_i, e_j]`; used to build deliberately broken tables.
    pub fn set_bracket_raw(&mut self, i: usize, j: usize, v: SparseVec) {
        self.table[i][j] = v;
    }

    pub fn bracket(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i][j]
    }

    pub fn bracket_sparse(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, a) in x {
            for (j, b) in y {
                let ab = a * b;
                for (k, c) in &self.table[*i][*j] {
                    vec_add_at(&mut out, *k, &ab * c);
                }
            }
        }
        out
    }

    pub fn bracket_vecs(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let out = self.bracket_sparse(&to_sparse(x), &to_sparse(y));
        to_dense(&out, self.dim)
    }

    /// First `(i, j)` with `[e_i, e_j] ≠ -[e_j, e_i]`.
    pub fn antisymmetry_defect(&self) -> Option<(usize, usize)> {
        for i in 0..self.dim {
            for j in i..self.dim {
                let mut sum = self.table[i][j].clone();
                for (k, x) in &self.table[j][i] {
                    vec_add_at(&mut sum, *k, x.clone());
                }
                if !sum.is_empty() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// First `(i, j, k)` violating `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] = 0`.
    pub fn jacobi_defect(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let mut sum = SparseVec::new();
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (m, x) in &self.table[a][b] {
                            for (n, y) in &self.table[*m][c] {
                                vec_add_at(&mut sum, *n, x * y);
                            }
                        }
                    }
                    if !sum.is_empty() {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// Matrix of `ad_x = [x, ·]`; column `j` holds `[x, e_j]`.
    pub fn ad(&self, x: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let mut ej = vec![Scalar::zero(); self.dim];
            ej[j] = Scalar::one();
            for (r, v) in self.bracket_vecs(x, &ej).into_iter().enumerate() {
                m[(r, j)] = v;
            }
        }
        m
    }

    /// Structure constants of a matrix Lie algebra spanned by `basis`.
    pub fn from_matrices(basis: &[Matrix]) -> Result<Self> {
        let n = basis.len();
        let size = basis.first().map_or(0, |b| b.rows() * b.cols());
        // Columns are the flattened basis matrices.
        let mut span = Matrix::zeros(size, n);
        for (j, b) in basis.iter().enumerate() {
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    span[(r * b.cols() + c, j)] = b[(r, c)].clone();
                }
            }
        }
        if span.rank() != n {
            return Err(Error::InvalidPair("matrix basis is linearly dependent".into()));
        }
        let mut alg = Self::abelian(n);
        for i in 0..n {
            for j in i + 1..n {
                let br = basis[i].commutator(&basis[j])?;
                let flat: Vec<Scalar> = (0..size).map(|t| br[(t / br.cols(), t % br.cols())].clone()).collect();
                let coords = span
                    .solve(&flat)?
                    .ok_or_else(|| Error::InvalidPair(format!("span not closed: [b{i}, b{j}]")))?;
                alg.set_bracket(i, j, to_sparse(&coords));
            }
        }
        Ok(alg)
    }

    /// Structure constants in the basis whose elements are the columns of
    /// `basis` (coordinates in the current basis).
    pub fn change_basis(&self, basis: &Matrix) -> Result<Self> {
        let inv = basis
            .inverse()?
            .ok_or_else(|| Error::Shape("change of basis matrix is singular".into()))?;
        let cols: Vec<Vec<Scalar>> = (0..self.dim).map(|j| (0..self.dim).map(|i| basis[(i, j)].clone()).collect()).collect();
        let mut alg = Self::abelian(self.dim);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let br = self.bracket_vecs(&cols[i], &cols[j]);
                alg.set_bracket(i, j, to_sparse(&inv.mul_vec(&br)?));
            }
        }
        Ok(alg)
    }

    /// Restriction to the span of the first `m` basis vectors, assumed closed.
    pub fn restrict(&self, m: usize) -> Self {
        let mut alg = Self::abelian(m);
        for i in 0..m {
            for j in 0..m {
                alg.table[i][j] = self.table[i][j].iter().filter(|(k, _)| **k < m).map(|(k, x)| (*k, x.clone())).collect();
            }
        }
        alg
    }
}

pub(crate) fn to_sparse(v: &[Scalar]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub(crate) fn to_dense(v: &SparseVec, n: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// Basis of `sl(n)`: the `E_ij` with `i ≠ j` in lexicographic order, then
/// `H_i = E_ii − E_{i+1,i+1}`. Returns the matrices and their brackets.
pub fn sl(n: usize) -> Result<(LieAlgebra, Vec<Matrix>)> {
    let unit = |i: usize, j: usize| {
        let mut m = Matrix::zeros(n, n);
        m[(i, j)] = Scalar::one();
        m
    };
    let mut basis = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                basis.push(unit(i, j));
            }
        }
    }
    for i in 0..n.saturating_sub(1) {
        basis.push(unit(i, i).sub(&unit(i + 1, i + 1))?);
    }
    Ok((LieAlgebra::from_matrices(&basis)?, basis))
}

/// Outcome of [`LiePair::validate`]; each failure carries a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub antisymmetry: Option<(usize, usize)>,
    pub jacobi: Option<(usize, usize, usize)>,
    /// `(i, j, k)` with `i, j` in `h` and `[e_i, e_j]` having a component `k` outside `h`.
    pub closure: Option<(usize, usize, usize)>,
}

impl PairReport {
    pub fn is_valid(&self) -> bool {
        self.antisymmetry.is_none() && self.jacobi.is_none() && self.closure.is_none()
    }

    pub fn to_json(&self) -> Value {
        let entry = |w: Option<Vec<usize>>| match w {
            None => json!({"pass": true}),
            Some(w) => json!({"pass": false, "witness": w}),
        };
        json!({
            "valid": self.is_valid(),
            "antisymmetry": entry(self.antisymmetry.map(|(i, j)| vec![i, j])),
            "jacobi": entry(self.jacobi.map(|(i, j, k)| vec![i, j, k])),
            "closure": entry(self.closure.map(|(i, j, k)| vec![i, j, k])),
        })
    }
}

/// A Lie algebra `g` with the subalgebra `h` spanned by its first `dim_h`
/// basis vectors. The quotient `q = g/h` has basis the images of the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiePair {
    algebra: LieAlgebra,
    dim_h: usize,
}

impl LiePair {
    pub fn new(algebra: LieAlgebra, dim_h: usize) -> Result<Self> {
        if dim_h > algebra.dim() {
            return Err(Error::Shape(format!("sub_dim {dim_h} exceeds dim {}", algebra.dim())));
        }
        Ok(LiePair { algebra, dim_h })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_q(&self) -> usize {
        self.dim() - self.dim_h
    }

    pub fn bracket(&self, i: usize, j: usize) -> &SparseVec {
        self.algebra.bracket(i, j)
    }

    /// Quotient part of `[e_i, e_j]`, indexed by quotient basis.
    pub fn bracket_bar(&self, i: usize, j: usize) -> SparseVec {
        self.algebra
            .bracket(i, j)
            .iter()
            .filter(|(k, _)| **k >= self.dim_h)
            .map(|(k, x)| (k - self.dim_h, x.clone()))
            .collect()
    }

    pub fn validate(&self) -> PairReport {
        let antisymmetry = self.algebra.antisymmetry_defect();
        let jacobi = self.algebra.jacobi_defect();
        let mut closure = None;
        'outer: for i in 0..self.dim_h {
            for j in 0..self.dim_h {
                if let Some((k, _)) = self.algebra.bracket(i, j).iter().find(|(k, _)| **k >= self.dim_h) {
                    closure = Some((i, j, *k));
                    break 'outer;
                }
            }
        }
        PairReport { antisymmetry, jacobi, closure }
    }

    pub fn require_valid(&self) -> Result<()> {
        let r = self.validate();
        if let Some((i, j)) = r.antisymmetry {
            return Err(Error::InvalidPair(format!("bracket not antisymmetric at ({i}, {j})")));
        }
        if let Some((i, j, k)) = r.jacobi {
            return Err(Error::InvalidPair(format!("Jacobi identity fails at ({i}, {j}, {k})")));
        }
        if let Some((i, j, k)) = r.closure {
            return Err(Error::InvalidPair(format!("h not closed: [e{i}, e{j}] has component {k}")));
        }
        Ok(())
    }

    /// The subalgebra `h` with its own structure constants.
    pub fn h_algebra(&self) -> LieAlgebra {
        self.algebra.restrict(self.dim_h)
    }

    /// Matrix of `l̄ ↦ [e_a, l]‾` on `q`; column `β` is the image of `ē_β`.
    pub fn quotient_action(&self, a: usize) -> Matrix {
        let n = self.dim_q();
        let mut m = Matrix::zeros(n, n);
        for b in 0..n {
            for (g, x) in self.bracket_bar(a, self.dim_h + b) {
                m[(g, b)] = x;
            }
        }
        m
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = json::object(v, "")?;
        let dim = json::usize_at(json::field(obj, "dim", "")?, "/dim")?;
        let sub = json::usize_at(json::field(obj, "sub_dim", "")?, "/sub_dim")?;
        if sub > dim {
            return Err(json::err("/sub_dim", format!("{sub} exceeds dim {dim}")));
        }
        let mut alg = LieAlgebra::abelian(dim);
        let brackets = match obj.get("brackets") {
            None => &[][..],
            Some(b) => &json::array(b, "/brackets")?[..],
        };
        for (n, b) in brackets.iter().enumerate() {
            let path = format!("/brackets/{n}");
            let bo = json::object(b, &path)?;
            let i = json::usize_at(json::field(bo, "i", &path)?, &format!("{path}/i"))?;
            let j = json::usize_at(json::field(bo, "j", &path)?, &format!("{path}/j"))?;
            if i >= j || j >= dim {
                return Err(json::err(&path, format!("need 0 <= i < j < {dim}, found i={i}, j={j}")));
            }
            let cpath = format!("{path}/coeffs");
            let coeffs = json::object(json::field(bo, "coeffs", &path)?, &cpath)?;
            let mut v = SparseVec::new();
            for (k, x) in coeffs {
                let kp = format!("{cpath}/{k}");
                let k: usize = k.parse().map_err(|_| json::err(&kp, "key is not an index"))?;
                if k >= dim {
                    return Err(json::err(&kp, format!("index {k} out of range")));
                }
                vec_add_at(&mut v, k, json::scalar_at(x, &kp)?);
            }
            if !alg.bracket(i, j).is_empty() {
                return Err(json::err(&path, format!("bracket ({i}, {j}) listed twice")));
            }
            alg.set_bracket(i, j, v);
        }
        LiePair::new(alg, sub)
    }

    pub fn to_json(&self) -> Value {
        let mut brackets = Vec::new();
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                let b = self.algebra.bracket(i, j);
                if !b.is_empty() {
                    let coeffs: serde_json::Map<String, Value> =
                        b.iter().map(|(k, x)| (k.to_string(), json::scalar_to_json(x))).collect();
                    brackets.push(json!({"i": i, "j": j, "coeffs": coeffs}));
                }
            }
        }
        json!({"dim": self.dim(), "sub_dim": self.dim_h, "brackets": brackets})
    }
}

/// Sparse operator stored by columns: `cols[j]` lists `(i, M_ij)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Op {
    cols: Vec<Vec<(usize, Scalar)>>,
}

impl Op {
    fn from_matrix(m: &Matrix) -> Self {
        let cols = (0..m.cols())
            .map(|j| (0..m.rows()).filter(|&i| !m[(i, j)].is_zero()).map(|i| (i, m[(i, j)].clone())).collect())
            .collect();
        Op { cols }
    }

    fn to_matrix(&self) -> Matrix {
        let n = self.cols.len();
        let mut m = Matrix::zeros(n, n);
        for (j, col) in self.cols.iter().enumerate() {
            for (i, x) in col {
                m[(*i, j)] = x.clone();
            }
        }
        m
    }

    /// `-Mᵀ`.
    fn neg_transpose(&self) -> Self {
        let mut cols = vec![Vec::new(); self.cols.len()];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, x) in col {
                cols[*i].push((j, -x.clone()));
            }
        }
        Op { cols }
    }
}

/// A representation of `h` on a vector space of dimension `dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleRep {
    h: LieAlgebra,
    dim: usize,
    actions: Vec<Op>,
    slots: Vec<Slot>,
}

impl ModuleRep {
    /// Builds a module from one `dim × dim` matrix per basis element of `h`,
    /// checking flatness.
    pub fn new(h: LieAlgebra, actions: Vec<Matrix>, slots: Vec<Slot>) -> Result<Self> {
        let rep = Self::new_unchecked(h, actions, slots)?;
        if let Some((i, j)) = rep.flatness_defect() {
            return Err(Error::InvalidModule(format!("action not flat on ({i}, {j})")));
        }
        Ok(rep)
    }

    /// Shape checks only; flatness is not verified.
    pub fn new_unchecked(h: LieAlgebra, actions: Vec<Matrix>, slots: Vec<Slot>) -> Result<Self> {
        if actions.len() != h.dim() {
            return Err(Error::InvalidModule(format!("{} action matrices for dim h = {}", actions.len(), h.dim())));
        }
        let dim: usize = slots.iter().map(|s| s.dim).product();
        if let Some(m) = actions.iter().find(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::InvalidModule(format!("action matrix {}x{} on a {dim}-dim module", m.rows(), m.cols())));
        }
        let actions = actions.iter().map(Op::from_matrix).collect();
        Ok(ModuleRep { h, dim, actions, slots })
    }

    pub fn trivial(h: LieAlgebra, slots: Vec<Slot>) -> Self {
        let dim: usize = slots.iter().map(|s| s.dim).product();
        let actions = vec![Op { cols: vec![Vec::new(); dim] }; h.dim()];
        ModuleRep { h, dim, actions, slots }
    }

    /// Trivial one-dimensional coefficients.
    pub fn scalars(h: LieAlgebra) -> Self {
        Self::trivial(h, Vec::new())
    }

    /// `q = g/h` with `a · l̄ = [a, l]‾`.
    pub fn quotient(pair: &LiePair) -> Result<Self> {
        pair.require_valid()?;
        let actions = (0..pair.dim_h()).map(|a| pair.quotient_action(a)).collect();
        Self::new_unchecked(pair.h_algebra(), actions, vec![Slot::q(pair.dim_q())])
    }

    pub fn h(&self) -> &LieAlgebra {
        &self.h
    }

    pub fn dim_h(&self) -> usize {
        self.h.dim()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn action_matrix(&self, a: usize) -> Matrix {
        self.actions[a].to_matrix()
    }

    pub fn is_trivial(&self) -> bool {
        self.actions.iter().all(|op| op.cols.iter().all(Vec::is_empty))
    }

    /// `e_a · v`.
    pub fn act(&self, a: usize, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, x) in v {
            for (i, m) in &self.actions[a].cols[*j] {
                vec_add_at(&mut out, *i, x * m);
            }
        }
        out
    }

    /// First `(i, j)` where `ρ([e_i, e_j]) ≠ [ρ(e_i), ρ(e_j)]`.
    pub fn flatness_defect(&self) -> Option<(usize, usize)> {
        let mats: Vec<Matrix> = (0..self.dim_h()).map(|a| self.action_matrix(a)).collect();
        for i in 0..self.dim_h() {
            for j in i + 1..self.dim_h() {
                let mut lhs = Matrix::zeros(self.dim, self.dim);
                for (k, c) in self.h.bracket(i, j) {
                    lhs = lhs.add(&mats[*k].scaled(c)).expect("same shape");
                }
                let rhs = mats[i].commutator(&mats[j]).expect("square");
                if lhs != rhs {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Contragredient module: `⟨a·ε, e⟩ = −⟨ε, a·e⟩`.
    pub fn dual(&self) -> Self {
        let slots = self.slots.iter().map(|s| Slot { kind: dual_kind(s.kind), dim: s.dim }).collect();
        ModuleRep {
            h: self.h.clone(),
            dim: self.dim,
            actions: self.actions.iter().map(Op::neg_transpose).collect(),
            slots,
        }
    }

    /// Tensor product of the given modules (each possibly dualized), with
    /// `h` acting by derivations. Flat index is row-major over the factors.
    pub fn tensor(parts: &[(&ModuleRep, bool)]) -> Result<Self> {
        let Some((first, _)) = parts.first() else {
            return Err(Error::Shape("empty tensor product".into()));
        };
        let h = first.h.clone();
        if parts.iter().any(|(p, _)| p.h != h) {
            return Err(Error::InvalidModule("tensor factors over different algebras".into()));
        }
        let factors: Vec<ModuleRep> = parts.iter().map(|(p, d)| if *d { p.dual() } else { (*p).clone() }).collect();
        let dims: Vec<usize> = factors.iter().map(|f| f.dim).collect();
        let dim: usize = dims.iter().product();
        let mut strides = vec![1usize; dims.len()];
        for p in (0..dims.len().saturating_sub(1)).rev() {
            strides[p] = strides[p + 1] * dims[p + 1];
        }
        let mut actions = Vec::with_capacity(h.dim());
        for a in 0..h.dim() {
            let mut cols = Vec::with_capacity(dim);
            for j in 0..dim {
                let mut col = SparseVec::new();
                for (p, f) in factors.iter().enumerate() {
                    let jp = (j / strides[p]) % dims[p];
                    let base = j - jp * strides[p];
                    for (i, x) in &f.actions[a].cols[jp] {
                        vec_add_at(&mut col, base + i * strides[p], x.clone());
                    }
                }
                cols.push(col.into_iter().collect());
            }
            actions.push(Op { cols });
        }
        let slots = factors.iter().flat_map(|f| f.slots.iter().copied()).collect();
        Ok(ModuleRep { h, dim, actions, slots })
    }

    /// `E^⊗k ⊗ (E*)^⊗l`.
    pub fn extend(&self, k: usize, l: usize) -> Result<Self> {
        if k + l == 0 {
            return Ok(Self::scalars(self.h.clone()));
        }
        let mut parts = vec![(self, false); k];
        parts.extend(std::iter::repeat((self, true)).take(l));
        Self::tensor(&parts)
    }

    /// JSON: `{"dim": n, "action": [matrix per h basis element]}`.
    pub fn from_json(v: &Value, h: &LieAlgebra) -> Result<Self> {
        let obj = json::object(v, "")?;
        let dim = json::usize_at(json::field(obj, "dim", "")?, "/dim")?;
        let arr = json::array(json::field(obj, "action", "")?, "/action")?;
        if arr.len() != h.dim() {
            return Err(json::err("/action", format!("expected {} matrices, found {}", h.dim(), arr.len())));
        }
        let mats = arr
            .iter()
            .enumerate()
            .map(|(a, m)| json::matrix_at(m, &format!("/action/{a}"), dim, dim))
            .collect::<Result<Vec<_>>>()?;
        Self::new(h.clone(), mats, vec![Slot::e(dim)])
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "action": (0..self.dim_h()).map(|a| json::matrix_to_json(&self.action_matrix(a))).collect::<Vec<_>>(),
        })
    }
}

fn dual_kind(k: SlotKind) -> SlotKind {
    match k {
        SlotKind::Q => SlotKind::QDual,
        SlotKind::QDual => SlotKind::Q,
        SlotKind::E => SlotKind::EDual,
        SlotKind::EDual => SlotKind::E,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, q};

    fn sv(pairs: &[(usize, i64)]) -> SparseVec {
        pairs.iter().map(|(k, x)| (*k, int(*x))).collect()
    }

    fn heisenberg() -> LiePair {
        // Basis (z, x, y), [x, y] = z, h = span{z}.
        let mut alg = LieAlgebra::abelian(3);
        alg.set_bracket(1, 2, sv(&[(0, 1)]));
        LiePair::new(alg, 1).unwrap()
    }

    #[test]
    fn heisenberg_is_valid_by_brute_force_jacobi() {
        let p = heisenberg();
        assert!(p.validate().is_valid());
        // Every double bracket lands in [g, z] = 0.
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let ij = p.algebra().bracket(i, j).clone();
                    let mut ek = SparseVec::new();
                    ek.insert(k, int(1));
                    assert!(p.algebra().bracket_sparse(&ij, &ek).is_empty());
                }
            }
        }
        let q = ModuleRep::quotient(&p).unwrap();
        assert!(q.is_trivial());
    }

    #[test]
    fn tampered_antisymmetry_reports_witness() {
        let mut alg = LieAlgebra::abelian(2);
        alg.set_bracket(0, 1, sv(&[(0, 1)]));
        alg.set_bracket_raw(1, 0, sv(&[(0, 1)]));
        let p = LiePair::new(alg, 1).unwrap();
        assert_eq!(p.validate().antisymmetry, Some((0, 1)));
        assert!(p.require_valid().is_err());
    }

    #[test]
    fn closure_failure_is_reported() {
        let mut alg = LieAlgebra::abelian(3);
        alg.set_bracket(0, 1, sv(&[(2, 1)]));
        let p = LiePair::new(alg, 2).unwrap();
        assert_eq!(p.validate().closure, Some((0, 1, 2)));
    }

    #[test]
    fn sl3_brackets_satisfy_jacobi() {
        let (alg, basis) = sl(3).unwrap();
        assert_eq!(alg.dim(), 8);
        assert_eq!(basis.len(), 8);
        assert!(alg.antisymmetry_defect().is_none());
        assert!(alg.jacobi_defect().is_none());
    }

    #[test]
    fn change_basis_preserves_brackets() {
        let (alg, _) = sl(2).unwrap();
        let mut b = Matrix::identity(3);
        b[(0, 1)] = q(1, 2);
        b[(2, 0)] = int(3);
        let alg2 = alg.change_basis(&b).unwrap();
        assert!(alg2.jacobi_defect().is_none());
        let col = |j: usize| (0..3).map(|i| b[(i, j)].clone()).collect::<Vec<_>>();
        for i in 0..3 {
            for j in 0..3 {
                let lhs = alg.bracket_vecs(&col(i), &col(j));
                let mut rhs = vec![Scalar::zero(); 3];
                for (k, c) in alg2.bracket(i, j) {
                    for (r, x) in col(*k).iter().enumerate() {
                        rhs[r] += c * x;
                    }
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn dual_is_negative_transpose_and_tensor_is_flat() {
        let (alg, _) = sl(2).unwrap();
        // sl(2) acting on itself, viewed as the quotient of the pair (g, g)…
        // use the adjoint representation directly instead.
        let mats: Vec<Matrix> = (0..3)
            .map(|a| {
                let mut e = vec![Scalar::zero(); 3];
                e[a] = int(1);
                alg.ad(&e)
            })
            .collect();
        let rep = ModuleRep::new(alg.clone(), mats.clone(), vec![Slot::e(3)]).unwrap();
        let d = rep.extend(0, 1).unwrap();
        for a in 0..3 {
            assert_eq!(d.action_matrix(a), mats[a].transpose().scaled(&int(-1)));
        }
        assert_eq!(rep.extend(1, 0).unwrap().action_matrix(1), mats[1]);
        let t = rep.extend(1, 1).unwrap();
        assert_eq!(t.dim(), 9);
        assert!(t.flatness_defect().is_none());
    }

    #[test]
    fn non_flat_action_is_rejected() {
        let (alg, _) = sl(2).unwrap();
        let mats = vec![Matrix::identity(2), Matrix::zeros(2, 2), Matrix::zeros(2, 2)];
        // Every bracket of sl(2) is nonzero, so a commuting but nonzero image fails.
        assert!(ModuleRep::new(alg, mats, vec![Slot::e(2)]).is_err());
    }

    #[test]
    fn json_roundtrip_and_errors() {
        let p = heisenberg();
        let v = p.to_json();
        assert_eq!(LiePair::from_json(&v).unwrap(), p);
        let bad = serde_json::json!({"dim": 3, "sub_dim": 1, "brackets": [{"i": 1, "j": 2, "coeffs": {"0": "1/0"}}]});
        let e = LiePair::from_json(&bad).unwrap_err().to_string();
        assert!(e.contains("/brackets/0/coeffs/0"), "{e}");
        let bad = serde_json::json!({"dim": 3, "sub_dim": 5});
        assert!(LiePair::from_json(&bad).unwrap_err().to_string().contains("/sub_dim"));
    }
}
