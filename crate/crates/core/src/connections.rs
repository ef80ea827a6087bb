//! Symplectic forms on `q`, `g`-connections on `q` (or on an `h`-module
//! `E`), torsion and curvature, the Atiyah cocycle and the identities it
//! satisfies.

use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::ce;
use crate::error::{Error, Result};
use crate::forms::{CochainForm, Slot, SlotKind};
use crate::json;
use crate::liepair::{to_dense, LieAlgebra, LiePair, ModuleRep};
use crate::linalg::Matrix;
use crate::perm::Permutation;
use crate::scalar::{self, Scalar};

/// Nondegenerate antisymmetric form `ω` on `q`, with `P = Ω⁻¹` cached.
///
/// Conventions: `ω♭(v) = ι_v ω`, so `(ω♭v)_j = Σ_i v_i ω_ij`; the bivector
/// `ω⁻¹` pairs covectors by `ω⁻¹(ξ, η) = Σ P_ij ξ_i η_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticForm {
    omega: Matrix,
    inverse: Matrix,
}

impl SymplecticForm {
    pub fn new(omega: Matrix) -> Result<Self> {
        let n = omega.rows();
        if omega.cols() != n {
            return Err(Error::Symplectic(format!("{}x{} matrix is not square", n, omega.cols())));
        }
        if n % 2 == 1 {
            return Err(Error::Symplectic(format!("odd dimension {n}")));
        }
        if let Some((i, j)) = antisymmetry_defect(&omega) {
            return Err(Error::Symplectic(format!("not antisymmetric at ({i}, {j})")));
        }
        let inverse = omega.inverse()?.ok_or_else(|| Error::Symplectic("degenerate form".into()))?;
        Ok(SymplecticForm { omega, inverse })
    }

    pub fn dim(&self) -> usize {
        self.omega.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.omega
    }

    /// `P = Ω⁻¹`, the matrix of the bivector `ω⁻¹`.
    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn eval(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        let mut s = Scalar::zero();
        for i in 0..self.dim() {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..self.dim() {
                s += &u[i] * &self.omega[(i, j)] * &v[j];
            }
        }
        s
    }

    /// `ω♭(v)`.
    pub fn flat(&self, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.dim())
            .map(|j| (0..self.dim()).fold(Scalar::zero(), |acc, i| acc + &v[i] * &self.omega[(i, j)]))
            .collect()
    }

    /// `(ω♭)⁻¹(ξ)`, i.e. the `v` with `ι_v ω = ξ`.
    pub fn sharp(&self, xi: &[Scalar]) -> Vec<Scalar> {
        (0..self.dim())
            .map(|i| (0..self.dim()).fold(Scalar::zero(), |acc, j| acc + &xi[j] * &self.inverse[(j, i)]))
            .collect()
    }

    pub fn from_json(v: &Value, dim_q: usize) -> Result<Self> {
        let obj = json::object(v, "")?;
        let m = json::matrix_at(json::field(obj, "omega", "")?, "/omega", dim_q, dim_q)?;
        Self::new(m)
    }

    pub fn to_json(&self) -> Value {
        json!({"omega": json::matrix_to_json(&self.omega)})
    }
}

fn antisymmetry_defect(m: &Matrix) -> Option<(usize, usize)> {
    for i in 0..m.rows() {
        for j in i..m.cols() {
            if m[(i, j)] != -m[(j, i)].clone() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Outcome of [`check_symplectic`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticReport {
    pub antisymmetry: Option<(usize, usize)>,
    pub nondegenerate: bool,
    /// Basis triple of `g` where `d_L(p*ω)` is nonzero.
    pub closedness: Option<(usize, usize, usize)>,
}

impl SymplecticReport {
    pub fn passes(&self) -> bool {
        self.antisymmetry.is_none() && self.nondegenerate && self.closedness.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.passes(),
            "antisymmetric": {"pass": self.antisymmetry.is_none(), "witness": self.antisymmetry.map(|(i, j)| vec![i, j])},
            "nondegenerate": {"pass": self.nondegenerate},
            "closed": {"pass": self.closedness.is_none(), "witness": self.closedness.map(|(i, j, k)| vec![i, j, k])},
        })
    }
}

/// First basis triple where `(dΩ)(l₁,l₂,l₃) = −Ω([l₁,l₂],l₃) + Ω([l₁,l₃],l₂) − Ω([l₂,l₃],l₁)`
/// is nonzero, for a 2-form `Ω` on `g`.
fn closedness_defect(alg: &LieAlgebra, big: &Matrix) -> Option<(usize, usize, usize)> {
    let n = alg.dim();
    let pair_with = |v: &crate::forms::SparseVec, k: usize| {
        v.iter().fold(Scalar::zero(), |acc, (i, x)| acc + x * &big[(*i, k)])
    };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let d = -pair_with(alg.bracket(i, j), k) + pair_with(alg.bracket(i, k), j) - pair_with(alg.bracket(j, k), i);
                if !d.is_zero() {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// Pullback `p*ω` to `g`.
fn pullback(pair: &LiePair, omega: &Matrix) -> Matrix {
    let (n, m) = (pair.dim(), pair.dim_h());
    let mut big = Matrix::zeros(n, n);
    for i in m..n {
        for j in m..n {
            big[(i, j)] = omega[(i - m, j - m)].clone();
        }
    }
    big
}

/// Checks antisymmetry, nondegeneracy and `d_L(p*ω) = 0` on all basis triples.
pub fn check_symplectic(pair: &LiePair, omega: &Matrix) -> Result<SymplecticReport> {
    let n = pair.dim_q();
    if omega.rows() != n || omega.cols() != n {
        return Err(Error::Shape(format!("{}x{} form on a {n}-dim quotient", omega.rows(), omega.cols())));
    }
    let antisymmetry = antisymmetry_defect(omega);
    let nondegenerate = !omega.determinant()?.is_zero();
    let closedness = closedness_defect(pair.algebra(), &pullback(pair, omega));
    Ok(SymplecticReport { antisymmetry, nondegenerate, closedness })
}

/// A symplectic pair together with the basis used for it.
#[derive(Debug, Clone)]
pub struct ReducedPair {
    pub pair: LiePair,
    pub omega: SymplecticForm,
    /// Columns are the new basis vectors in the coordinates of the input.
    pub basis: Matrix,
}

/// Columns `vectors`, completed by standard basis vectors to a basis.
fn complete_basis(n: usize, vectors: &[Vec<Scalar>]) -> Matrix {
    let mut chosen: Vec<Vec<Scalar>> = vectors.to_vec();
    for e in 0..n {
        if chosen.len() == n {
            break;
        }
        let mut cand = chosen.clone();
        let mut v = vec![Scalar::zero(); n];
        v[e] = Scalar::one();
        cand.push(v);
        let rows: Vec<Vec<Scalar>> = cand.clone();
        if Matrix::from_rows(rows).expect("rectangular").rank() == cand.len() {
            chosen = cand;
        }
    }
    let mut b = Matrix::zeros(n, n);
    for (j, v) in chosen.iter().enumerate() {
        for i in 0..n {
            b[(i, j)] = v[i].clone();
        }
    }
    b
}

/// From a closed 2-form `Ω` on `g`: `h = ker Ω` placed first, `ω` the
/// descended form on `g/h`.
pub fn presymplectic_to_pair(alg: &LieAlgebra, big_omega: &Matrix) -> Result<ReducedPair> {
    let n = alg.dim();
    if big_omega.rows() != n || big_omega.cols() != n {
        return Err(Error::Shape("2-form does not match the algebra".into()));
    }
    if let Some((i, j)) = antisymmetry_defect(big_omega) {
        return Err(Error::Symplectic(format!("Omega not antisymmetric at ({i}, {j})")));
    }
    if let Some((i, j, k)) = closedness_defect(alg, big_omega) {
        return Err(Error::NotClosed(format!("d Omega is nonzero on ({i}, {j}, {k})")));
    }
    let kernel = big_omega.kernel_basis();
    let basis = complete_basis(n, &kernel);
    let new_alg = alg.change_basis(&basis)?;
    let pair = LiePair::new(new_alg, kernel.len())?;
    pair.require_valid()?;
    let full = basis.transpose().mul(big_omega)?.mul(&basis)?;
    let m = kernel.len();
    let mut small = Matrix::zeros(n - m, n - m);
    for i in 0..n - m {
        for j in 0..n - m {
            small[(i, j)] = full[(m + i, m + j)].clone();
        }
    }
    Ok(ReducedPair { pair, omega: SymplecticForm::new(small)?, basis })
}

/// `K_ij = tr(B_i B_j)` for a matrix basis.
pub fn trace_form(basis: &[Matrix]) -> Result<Matrix> {
    let n = basis.len();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let p = basis[i].mul(&basis[j])?;
            k[(i, j)] = (0..p.rows()).fold(Scalar::zero(), |acc, r| acc + &p[(r, r)]);
        }
    }
    Ok(k)
}

/// The pair `(g, g_x)` with `ω(ā, b̄) = K(x, [a, b])`.
pub fn coadjoint_pair(alg: &LieAlgebra, x: &[Scalar], pairing: &Matrix) -> Result<ReducedPair> {
    let n = alg.dim();
    if x.len() != n || pairing.rows() != n || pairing.cols() != n {
        return Err(Error::Shape("element or pairing does not match the algebra".into()));
    }
    if pairing != &pairing.transpose() {
        return Err(Error::Symplectic("pairing is not symmetric".into()));
    }
    let unit = |i: usize| {
        let mut v = vec![Scalar::zero(); n];
        v[i] = Scalar::one();
        v
    };
    for i in 0..n {
        for j in 0..n {
            let bij = alg.bracket_vecs(&unit(i), &unit(j));
            for k in 0..n {
                let bjk = alg.bracket_vecs(&unit(j), &unit(k));
                let lhs = (0..n).fold(Scalar::zero(), |acc, t| acc + &bij[t] * &pairing[(t, k)]);
                let rhs = (0..n).fold(Scalar::zero(), |acc, t| acc + &pairing[(i, t)] * &bjk[t]);
                if lhs != rhs {
                    return Err(Error::Symplectic(format!("pairing not invariant on ({i}, {j}, {k})")));
                }
            }
        }
    }
    let centralizer = alg.ad(x).kernel_basis();
    let basis = complete_basis(n, &centralizer);
    let pair = LiePair::new(alg.change_basis(&basis)?, centralizer.len())?;
    let m = centralizer.len();
    let col = |j: usize| (0..n).map(|i| basis[(i, j)].clone()).collect::<Vec<_>>();
    let kx: Vec<Scalar> = (0..n).map(|j| (0..n).fold(Scalar::zero(), |acc, i| acc + &x[i] * &pairing[(i, j)])).collect();
    let mut omega = Matrix::zeros(n - m, n - m);
    for a in 0..n - m {
        for b in 0..n - m {
            let br = alg.bracket_vecs(&col(m + a), &col(m + b));
            omega[(a, b)] = (0..n).fold(Scalar::zero(), |acc, t| acc + &kx[t] * &br[t]);
        }
    }
    let report = check_symplectic(&pair, &omega)?;
    if !report.passes() {
        return Err(Error::Symplectic("induced form is degenerate or not closed".into()));
    }
    Ok(ReducedPair { pair, omega: SymplecticForm::new(omega)?, basis })
}

/// A `g`-connection on `q` or on an `h`-module `E`.
///
/// `gamma[i]` is the matrix `A_i` of `∇_{e_i}`: column `β` holds
/// `∇_{e_i} ē_β`, so `(A_i)_{γβ} = Γ_{i,β}^γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pair: LiePair,
    module: ModuleRep,
    on_quotient: bool,
    gamma: Vec<Matrix>,
}

impl Connection {
    pub fn new(pair: LiePair, module: ModuleRep, on_quotient: bool, gamma: Vec<Matrix>) -> Result<Self> {
        let m = module.dim();
        if gamma.len() != pair.dim() {
            return Err(Error::Shape(format!("{} matrices for dim g = {}", gamma.len(), pair.dim())));
        }
        if gamma.iter().any(|a| a.rows() != m || a.cols() != m) {
            return Err(Error::Shape(format!("connection matrices must be {m}x{m}")));
        }
        if module.dim_h() != pair.dim_h() {
            return Err(Error::Shape("module lives over a different h".into()));
        }
        if on_quotient && m != pair.dim_q() {
            return Err(Error::Shape("quotient connection of the wrong size".into()));
        }
        Ok(Connection { pair, module, on_quotient, gamma })
    }

    /// Connection on `q` with `∇_a` the quotient action on `h` and zero on
    /// the remaining basis vectors.
    pub fn extend_action(pair: &LiePair) -> Result<Self> {
        let q = ModuleRep::quotient(pair)?;
        Self::extend_module_action(pair, &q, true)
    }

    /// Same for an arbitrary `h`-module.
    pub fn extend_module_action(pair: &LiePair, module: &ModuleRep, on_quotient: bool) -> Result<Self> {
        let m = module.dim();
        let gamma = (0..pair.dim())
            .map(|i| if i < pair.dim_h() { module.action_matrix(i) } else { Matrix::zeros(m, m) })
            .collect();
        Self::new(pair.clone(), module.clone(), on_quotient, gamma)
    }

    pub fn on_quotient(pair: &LiePair, gamma: Vec<Matrix>) -> Result<Self> {
        Self::new(pair.clone(), ModuleRep::quotient(pair)?, true, gamma)
    }

    pub fn pair(&self) -> &LiePair {
        &self.pair
    }

    pub fn module(&self) -> &ModuleRep {
        &self.module
    }

    pub fn is_on_quotient(&self) -> bool {
        self.on_quotient
    }

    pub fn target_dim(&self) -> usize {
        self.module.dim()
    }

    pub fn matrix(&self, i: usize) -> &Matrix {
        &self.gamma[i]
    }

    /// Adds random rational entries on the non-`h` block.
    pub fn randomize_complement<R: Rng>(&self, rng: &mut R) -> Self {
        let mut out = self.clone();
        let m = self.target_dim();
        for i in self.pair.dim_h()..self.pair.dim() {
            for r in 0..m {
                for c in 0..m {
                    let x = scalar::q(rng.gen_range(-3..=3), rng.gen_range(1..=3));
                    out.gamma[i][(r, c)] += x;
                }
            }
        }
        out
    }

    pub fn difference(&self, other: &Connection) -> Result<Vec<Matrix>> {
        self.gamma.iter().zip(&other.gamma).map(|(a, b)| a.sub(b)).collect()
    }

    /// First `a ∈ h` where `∇_a` differs from the module action.
    pub fn action_defect(&self) -> Option<usize> {
        (0..self.pair.dim_h()).find(|&a| self.gamma[a] != self.module.action_matrix(a))
    }

    pub fn extends_action(&self) -> bool {
        self.action_defect().is_none()
    }

    fn require_extends(&self) -> Result<()> {
        match self.action_defect() {
            None => Ok(()),
            Some(a) => Err(Error::NotExtendingAction(format!("∇ along h-basis vector {a} is not the action"))),
        }
    }

    fn require_quotient(&self) -> Result<()> {
        if self.on_quotient {
            Ok(())
        } else {
            Err(Error::Shape("operation needs a connection on q".into()))
        }
    }

    /// `∇_{e_i} v` for a target vector `v`.
    pub fn apply(&self, i: usize, v: &[Scalar]) -> Vec<Scalar> {
        self.gamma[i].mul_vec(v).expect("connection matrix matches target")
    }

    /// `T(e_i, e_j) = ∇_{e_i} ē_j − ∇_{e_j} ē_i − [e_i, e_j]‾` in `q`.
    pub fn torsion(&self, i: usize, j: usize) -> Result<Vec<Scalar>> {
        self.require_quotient()?;
        let (m, n) = (self.pair.dim_h(), self.pair.dim_q());
        let mut t = to_dense(&self.pair.bracket_bar(i, j), n).into_iter().map(|x| -x).collect::<Vec<_>>();
        if j >= m {
            for g in 0..n {
                t[g] += &self.gamma[i][(g, j - m)];
            }
        }
        if i >= m {
            for g in 0..n {
                t[g] -= &self.gamma[j][(g, i - m)];
            }
        }
        Ok(t)
    }

    pub fn is_torsion_free(&self) -> Result<bool> {
        for i in 0..self.pair.dim() {
            for j in i + 1..self.pair.dim() {
                if self.torsion(i, j)?.iter().any(|x| !x.is_zero()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Checks `T(a, l) = 0` for `a ∈ h`, so that `T` descends to `q ⊗ q`.
    pub fn torsion_descends(&self) -> Result<bool> {
        for a in 0..self.pair.dim_h() {
            for l in 0..self.pair.dim() {
                if self.torsion(a, l)?.iter().any(|x| !x.is_zero()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `R(e_i, e_j) = [A_i, A_j] − Σ_k c_ij^k A_k`.
    pub fn curvature(&self, i: usize, j: usize) -> Matrix {
        let mut r = self.gamma[i].commutator(&self.gamma[j]).expect("square");
        for (k, c) in self.pair.bracket(i, j) {
            r = r.sub(&self.gamma[*k].scaled(c)).expect("same shape");
        }
        r
    }

    /// `∇′ = ∇ − ½T`.
    pub fn make_torsion_free(&self) -> Result<Connection> {
        self.require_quotient()?;
        self.require_extends()?;
        let (m, n) = (self.pair.dim_h(), self.pair.dim_q());
        let half = scalar::q(1, 2);
        let mut out = self.clone();
        for i in 0..self.pair.dim() {
            for b in 0..n {
                let t = self.torsion(i, m + b)?;
                for g in 0..n {
                    out.gamma[i][(g, b)] -= &half * &t[g];
                }
            }
        }
        Ok(out)
    }

    /// `(∇_{e_i}ω)(b, c) = −ω(∇_{e_i} b, c) − ω(b, ∇_{e_i} c)` as the matrix `−(A_iᵀΩ + ΩA_i)`.
    pub fn nabla_omega(&self, i: usize, w: &SymplecticForm) -> Result<Matrix> {
        self.require_quotient()?;
        let a = &self.gamma[i];
        let o = w.matrix();
        Ok(a.transpose().mul(o)?.add(&o.mul(a)?)?.scaled(&-Scalar::one()))
    }

    pub fn is_symplectic(&self, w: &SymplecticForm) -> Result<bool> {
        for i in 0..self.pair.dim() {
            if !self.nabla_omega(i, w)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `∇′ = ∇ + S` with `S(l̄₁, l̄₂) = ⅓(ω♭)⁻¹(ι_{l̄₂}∇_{l₁}ω + ι_{l̄₁}∇_{l₂}ω)`.
    pub fn make_symplectic(&self, w: &SymplecticForm) -> Result<Connection> {
        self.require_quotient()?;
        self.require_extends()?;
        if !self.is_torsion_free()? {
            return Err(Error::Shape("make_symplectic needs a torsion-free connection".into()));
        }
        let report = check_symplectic(&self.pair, w.matrix())?;
        if !report.passes() {
            return Err(Error::Symplectic("ω is not a symplectic structure on the pair".into()));
        }
        let (m, n) = (self.pair.dim_h(), self.pair.dim_q());
        let nablas: Vec<Matrix> = (0..self.pair.dim()).map(|i| self.nabla_omega(i, w)).collect::<Result<_>>()?;
        let third = scalar::q(1, 3);
        let mut out = self.clone();
        for i in 0..self.pair.dim() {
            for b in 0..n {
                let mut xi: Vec<Scalar> = nablas[i].row(b).to_vec();
                if i >= m {
                    for (c, x) in nablas[m + b].row(i - m).iter().enumerate() {
                        xi[c] += x;
                    }
                }
                let s = w.sharp(&xi);
                for g in 0..n {
                    out.gamma[i][(g, b)] += &third * &s[g];
                }
            }
        }
        Ok(out)
    }

    /// Value slots of the Atiyah cocycle: `q* ⊗ E* ⊗ E`.
    fn atiyah_slots(&self) -> Vec<Slot> {
        let (n, d) = (self.pair.dim_q(), self.target_dim());
        if self.on_quotient {
            vec![Slot::q_dual(n), Slot::q_dual(n), Slot::q(n)]
        } else {
            vec![Slot::q_dual(n), Slot::e_dual(d), Slot::e(d)]
        }
    }

    /// Module for `q* ⊗ E* ⊗ E`, the coefficients of the Atiyah cocycle.
    pub fn atiyah_module(&self) -> Result<ModuleRep> {
        let q = ModuleRep::quotient(&self.pair)?;
        ModuleRep::tensor(&[(&q, true), (&self.module, true), (&self.module, false)])
    }

    /// `R^∇(a)(l̄, e) = R(a, l)e`, stored with value index `(l̄, e, out)`.
    pub fn atiyah_cocycle(&self) -> Result<CochainForm> {
        self.require_extends()?;
        let (m, n, d) = (self.pair.dim_h(), self.pair.dim_q(), self.target_dim());
        for a in 0..m {
            for b in 0..m {
                if !self.curvature(a, b).is_zero() {
                    return Err(Error::NotExtendingAction(format!("curvature nonzero on h at ({a}, {b})")));
                }
            }
        }
        let mut form = CochainForm::zero(m, 1, self.atiyah_slots());
        for a in 0..m {
            for l in 0..n {
                let r = self.curvature(a, m + l);
                for e in 0..d {
                    for out in 0..d {
                        form.add_at(&[a], (l * d + e) * d + out, r[(out, e)].clone());
                    }
                }
            }
        }
        Ok(form)
    }

    /// Solves for a connection on `q` with `∇_a` the action and `R(a, l) = 0`
    /// for all `a ∈ h`, `l ∈ g`.
    pub fn compatible(pair: &LiePair) -> Result<Option<Connection>> {
        pair.require_valid()?;
        let base = Connection::extend_action(pair)?;
        let (m, n, dg) = (pair.dim_h(), pair.dim_q(), pair.dim());
        let nq = dg - m;
        // Unknown (j, r, c) ↦ (A_{m+j})_{rc}.
        let var = |j: usize, r: usize, c: usize| (j * n + r) * n + c;
        let nvars = nq * n * n;
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        let mut rhs: Vec<Scalar> = Vec::new();
        for a in 0..m {
            let aa = &base.gamma[a];
            for j in 0..nq {
                let l = m + j;
                // [A_a, A_l] − Σ_{k∉h} c_al^k A_k = Σ_{k∈h} c_al^k A_k
                let mut known = Matrix::zeros(n, n);
                for (k, c) in pair.bracket(a, l) {
                    if *k < m {
                        known = known.add(&base.gamma[*k].scaled(c))?;
                    }
                }
                for r in 0..n {
                    for c in 0..n {
                        let mut row = vec![Scalar::zero(); nvars];
                        for t in 0..n {
                            // (A_a A_l)_{rc} = Σ_t (A_a)_{rt} (A_l)_{tc}
                            row[var(j, t, c)] += &aa[(r, t)];
                            // −(A_l A_a)_{rc} = −Σ_t (A_l)_{rt} (A_a)_{tc}
                            row[var(j, r, t)] -= &aa[(t, c)];
                        }
                        for (k, coef) in pair.bracket(a, l) {
                            if *k >= m {
                                row[var(*k - m, r, c)] -= coef;
                            }
                        }
                        rows.push(row);
                        rhs.push(known[(r, c)].clone());
                    }
                }
            }
        }
        if rows.is_empty() {
            return Ok(Some(base));
        }
        let system = Matrix::from_rows(rows)?;
        let Some(x) = system.solve(&rhs)? else {
            return Ok(None);
        };
        let mut out = base;
        for j in 0..nq {
            for r in 0..n {
                for c in 0..n {
                    out.gamma[m + j][(r, c)] = x[var(j, r, c)].clone();
                }
            }
        }
        Ok(Some(out))
    }

    /// JSON `{"gamma": [g][β][γ]}` with entry `Γ_{i,β}^γ`.
    pub fn to_json(&self) -> Value {
        json!({"gamma": self.gamma.iter().map(|a| json::matrix_to_json(&a.transpose())).collect::<Vec<_>>()})
    }

    pub fn from_json(v: &Value, pair: &LiePair, module: Option<&ModuleRep>) -> Result<Self> {
        let obj = json::object(v, "")?;
        let arr = json::array(json::field(obj, "gamma", "")?, "/gamma")?;
        let (module, on_quotient) = match module {
            Some(e) => (e.clone(), false),
            None => (ModuleRep::quotient(pair)?, true),
        };
        let d = module.dim();
        if arr.len() != pair.dim() {
            return Err(json::err("/gamma", format!("expected {} matrices, found {}", pair.dim(), arr.len())));
        }
        let gamma = arr
            .iter()
            .enumerate()
            .map(|(i, m)| json::matrix_at(m, &format!("/gamma/{i}"), d, d).map(|m| m.transpose()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pair.clone(), module, on_quotient, gamma)
    }
}

/// `R̃(a)(b₁, b₂, b₃) = ω(R(a)(b₁, b₂), b₃)`.
pub fn tilde_cocycle(r: &CochainForm, w: &SymplecticForm) -> Result<CochainForm> {
    let n = w.dim();
    let expected = [Slot::q_dual(n), Slot::q_dual(n), Slot::q(n)];
    if r.slots() != expected {
        return Err(Error::Shape(format!("expected values in q*⊗q*⊗q of dim {n}, got {:?}", r.slots())));
    }
    let o = w.matrix();
    Ok(r.map_values(vec![Slot::q_dual(n); 3], |idx| {
        let (b12, m) = (idx / n, idx % n);
        (0..n).filter(|&k| !o[(m, k)].is_zero()).map(|k| (b12 * n + k, o[(m, k)].clone())).collect()
    }))
}

/// Degree-0 form `b₁ ⊗ b₂ ⊗ b₃ ↦ (∇_{b₁}ω)(b₂, b₃)` on `q`.
pub fn nabla_omega_form(c: &Connection, w: &SymplecticForm) -> Result<CochainForm> {
    let (m, n) = (c.pair.dim_h(), c.pair.dim_q());
    let mut f = CochainForm::zero(m, 0, vec![Slot::q_dual(n); 3]);
    for b in 0..n {
        let nab = c.nabla_omega(m + b, w)?;
        for i in 0..n {
            for j in 0..n {
                f.add_at(&[], (b * n + i) * n + j, nab[(i, j)].clone());
            }
        }
    }
    Ok(f)
}

/// Degree-0 form `b₁ ⊗ b₂ ↦ T̄(b₁, b₂)` valued in `q* ⊗ q* ⊗ q`.
pub fn torsion_form(c: &Connection) -> Result<CochainForm> {
    let (m, n) = (c.pair.dim_h(), c.pair.dim_q());
    let mut f = CochainForm::zero(m, 0, vec![Slot::q_dual(n), Slot::q_dual(n), Slot::q(n)]);
    for i in 0..n {
        for j in 0..n {
            for (g, x) in c.torsion(m + i, m + j)?.into_iter().enumerate() {
                f.add_at(&[], (i * n + j) * n + g, x);
            }
        }
    }
    Ok(f)
}

/// Both sides of `R̃ − τ₍₂₃₎R̃ = ∂(−∇ω)` and `R − τ₍₁₂₎R = ∂T̄`.
#[derive(Debug, Clone)]
pub struct SymmetryDefects {
    pub lhs23: CochainForm,
    pub rhs23: CochainForm,
    pub lhs12: CochainForm,
    pub rhs12: CochainForm,
}

impl SymmetryDefects {
    pub fn hold(&self) -> bool {
        self.lhs23 == self.rhs23 && self.lhs12 == self.rhs12
    }
}

pub fn symmetry_defects(c: &Connection, w: &SymplecticForm) -> Result<SymmetryDefects> {
    c.require_quotient()?;
    let q = ModuleRep::quotient(&c.pair)?;
    let r = c.atiyah_cocycle()?;
    let rt = tilde_cocycle(&r, w)?;
    let t23 = Permutation::from_cycles(3, &[&[2, 3]])?;
    let t12 = Permutation::from_cycles(3, &[&[1, 2]])?;
    let lhs23 = rt.sub(&rt.permute_slots(&t23)?)?;
    let lhs12 = r.sub(&r.permute_slots(&t12)?)?;
    let q3 = q.extend(0, 3)?;
    let q21 = ModuleRep::tensor(&[(&q, true), (&q, true), (&q, false)])?;
    let rhs23 = ce::ce_differential(&q3, &nabla_omega_form(c, w)?.scaled(&-Scalar::one()))?;
    let rhs12 = ce::ce_differential(&q21, &torsion_form(c)?)?;
    Ok(SymmetryDefects { lhs23, rhs23, lhs12, rhs12 })
}

/// True when the values of `f` are invariant under every permutation of its
/// (equal-dimension) value slots.
pub fn is_totally_symmetric(f: &CochainForm) -> Result<bool> {
    for p in Permutation::all(f.slots().len()) {
        if f.permute_slots(&p)? != *f {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dense `R(a)(x, y)` tensors of a cocycle valued in `q*⊗q*⊗q`.
fn dense_cocycle(r: &CochainForm, n: usize) -> Vec<Vec<Scalar>> {
    (0..r.dim_h())
        .map(|a| {
            let mut v = vec![Scalar::zero(); n * n * n];
            if let Some(comp) = r.component(&[a]) {
                for (i, x) in comp {
                    v[*i] = x.clone();
                }
            }
            v
        })
        .collect()
}

/// `ψ(b₁,b₂,b₃) = ⌈R₂(b₁,R₂(b₂,b₃))⌋ + ⌈R₂(R₂(b₁,b₂),b₃)⌋ + ⌈R₂(b₂,R₂(b₁,b₃))⌋`,
/// a 2-form valued in `q*⊗q*⊗q*⊗q`, where
/// `⌈R₂(x, R₂(y, z))⌋(a₁, a₂) = R(a₁)(x, R(a₂)(y, z)) − R(a₂)(x, R(a₁)(y, z))`.
/// With `tilde` the last slot is lowered by `ω♭`.
pub fn bianchi_psi(c: &Connection, w: Option<&SymplecticForm>) -> Result<CochainForm> {
    c.require_quotient()?;
    let r = c.atiyah_cocycle()?;
    let (m, n) = (c.pair.dim_h(), c.pair.dim_q());
    let rd = dense_cocycle(&r, n);
    let idx = |x: usize, y: usize, z: usize| (x * n + y) * n + z;
    // R(a)(x, v) for a vector v.
    let apply_right = |a: usize, x: usize, v: &[Scalar]| -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); n];
        for (y, vy) in v.iter().enumerate() {
            if vy.is_zero() {
                continue;
            }
            for z in 0..n {
                out[z] += vy * &rd[a][idx(x, y, z)];
            }
        }
        out
    };
    let apply_left = |a: usize, v: &[Scalar], z: usize| -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); n];
        for (x, vx) in v.iter().enumerate() {
            if vx.is_zero() {
                continue;
            }
            for t in 0..n {
                out[t] += vx * &rd[a][idx(x, z, t)];
            }
        }
        out
    };
    let inner = |a: usize, x: usize, y: usize| -> Vec<Scalar> { (0..n).map(|t| rd[a][idx(x, y, t)].clone()).collect() };
    let mut psi = CochainForm::zero(m, 2, vec![Slot::q_dual(n), Slot::q_dual(n), Slot::q_dual(n), Slot::q(n)]);
    for a1 in 0..m {
        for a2 in a1 + 1..m {
            for b1 in 0..n {
                for b2 in 0..n {
                    for b3 in 0..n {
                        let mut total = vec![Scalar::zero(); n];
                        for (s, t) in [(a1, a2), (a2, a1)] {
                            let sign = if s == a1 { Scalar::one() } else { -Scalar::one() };
                            let v1 = apply_right(s, b1, &inner(t, b2, b3));
                            let v2 = apply_left(s, &inner(t, b1, b2), b3);
                            let v3 = apply_right(s, b2, &inner(t, b1, b3));
                            for o in 0..n {
                                total[o] += &sign * (&v1[o] + &v2[o] + &v3[o]);
                            }
                        }
                        for (o, x) in total.into_iter().enumerate() {
                            psi.add_at(&[a1, a2], idx(b1, b2, b3) * n + o, x);
                        }
                    }
                }
            }
        }
    }
    match w {
        None => Ok(psi),
        Some(w) => Ok(lower_last(&psi, w)),
    }
}

/// Applies `ω♭` to the last value slot (which must be `q`).
pub fn lower_last(f: &CochainForm, w: &SymplecticForm) -> CochainForm {
    let n = w.dim();
    let mut slots = f.slots().to_vec();
    let last = slots.last_mut().expect("form has value slots");
    assert_eq!(last.kind, SlotKind::Q, "last slot must carry q");
    last.kind = SlotKind::QDual;
    let o = w.matrix();
    f.map_values(slots, |idx| {
        let (rest, m) = (idx / n, idx % n);
        (0..n).filter(|&k| !o[(m, k)].is_zero()).map(|k| (rest * n + k, o[(m, k)].clone())).collect()
    })
}

/// Module `(q*)^⊗k ⊗ q^⊗l` in that slot order.
pub fn quotient_tensor(pair: &LiePair, duals: usize, plain: usize) -> Result<ModuleRep> {
    let q = ModuleRep::quotient(pair)?;
    let mut parts = vec![(&q, true); duals];
    parts.extend(std::iter::repeat((&q, false)).take(plain));
    ModuleRep::tensor(&parts)
}

/// `∂φ = ψ`, solved exactly.
pub fn psi_primitive(c: &Connection, psi: &CochainForm) -> Result<Option<CochainForm>> {
    let rep = quotient_tensor(&c.pair, 3, 1)?;
    ce::is_coboundary(&rep, psi)
}
