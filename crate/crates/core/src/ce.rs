//! Chevalley–Eilenberg differential on `Λ•h* ⊗ E` and the resulting
//! cohomology computations: dimensions, bases, coboundary solving.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forms::{combinations, CochainForm, SparseVec};
use crate::json;
use crate::liepair::ModuleRep;
use crate::linalg::{Matrix, SparseMatrix};
use crate::scalar::Scalar;

/// Cochain spaces above this size are refused for dense basis computations.
pub const DENSE_LIMIT: usize = 4000;

fn check_form(rep: &ModuleRep, eta: &CochainForm) -> Result<()> {
    if rep.dim_h() != eta.dim_h() || rep.dim() != eta.value_dim() {
        return Err(Error::Shape(format!(
            "module over {}-dim h on a {}-dim space, form over {}-dim h with {}-dim values",
            rep.dim_h(),
            rep.dim(),
            eta.dim_h(),
            eta.value_dim()
        )));
    }
    Ok(())
}

/// `(∂η)(a₀…a_k) = Σ_i (−1)^i a_i·η(…â_i…) + Σ_{i<j} (−1)^{i+j} η([a_i,a_j], …â_i…â_j…)`.
pub fn ce_differential(rep: &ModuleRep, eta: &CochainForm) -> Result<CochainForm> {
    check_form(rep, eta)?;
    let k = eta.degree();
    let dim_h = rep.dim_h();
    let mut out = CochainForm::zero(dim_h, k + 1, eta.slots().to_vec());
    if eta.is_zero() {
        return Ok(out);
    }
    for tuple in combinations(dim_h, k + 1) {
        let mut acc = SparseVec::new();
        for p in 0..=k {
            let mut rest = tuple.clone();
            let a = rest.remove(p);
            if let Some(v) = eta.component(&rest) {
                let image = rep.act(a, v);
                add_scaled(&mut acc, &image, sign(p));
            }
        }
        for p in 0..=k {
            for r in p + 1..=k {
                let rest: Vec<usize> =
                    tuple.iter().enumerate().filter(|(i, _)| *i != p && *i != r).map(|(_, x)| *x).collect();
                for (m, c) in rep.h().bracket(tuple[p], tuple[r]) {
                    if rest.contains(m) {
                        continue;
                    }
                    let before = rest.iter().filter(|x| *x < m).count();
                    let mut sorted = rest.clone();
                    sorted.insert(before, *m);
                    if let Some(v) = eta.component(&sorted) {
                        add_scaled(&mut acc, v, c * sign(p + r + before));
                    }
                }
            }
        }
        for (i, x) in acc {
            out.add_at(&tuple, i, x);
        }
    }
    Ok(out)
}

fn sign(n: usize) -> Scalar {
    Scalar::from_integer(if n % 2 == 0 { 1.into() } else { (-1).into() })
}

fn add_scaled(acc: &mut SparseVec, v: &SparseVec, c: Scalar) {
    for (i, x) in v {
        crate::forms::vec_add_at(acc, *i, x * &c);
    }
}

/// Matrix of `∂ : Ω^k → Ω^{k+1}` in the lexicographic cochain bases of
/// [`CochainForm::to_vector`].
pub fn differential_matrix(rep: &ModuleRep, k: usize) -> Result<SparseMatrix> {
    let dim_h = rep.dim_h();
    let vd = rep.dim();
    let src = combinations(dim_h, k);
    let tgt = combinations(dim_h, k + 1);
    let tgt_index: BTreeMap<&Vec<usize>, usize> = tgt.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let slots = rep.slots().to_vec();
    let mut m = SparseMatrix::new(tgt.len() * vd, src.len() * vd);
    for (si, s) in src.iter().enumerate() {
        for v in 0..vd {
            let mut basis = CochainForm::zero(dim_h, k, slots.clone());
            basis.add_at(s, v, Scalar::from_integer(1.into()));
            let image = ce_differential(rep, &basis)?;
            for (t, i, x) in image.entries() {
                m.add_at(tgt_index[t] * vd + i, si * vd + v, x.clone());
            }
        }
    }
    Ok(m)
}

pub fn is_closed(rep: &ModuleRep, z: &CochainForm) -> Result<bool> {
    Ok(ce_differential(rep, z)?.is_zero())
}

/// Solves `∂φ = z` exactly. Errors if `z` is not closed. A degree-0 class
/// is exact only when zero; the primitive returned then is `z` itself.
pub fn is_coboundary(rep: &ModuleRep, z: &CochainForm) -> Result<Option<CochainForm>> {
    if !is_closed(rep, z)? {
        return Err(Error::NotClosed(format!("degree-{} form has nonzero differential", z.degree())));
    }
    if z.is_zero() {
        let deg = z.degree().saturating_sub(1);
        return Ok(Some(CochainForm::zero(z.dim_h(), deg, z.slots().to_vec())));
    }
    if z.degree() == 0 {
        return Ok(None);
    }
    let m = differential_matrix(rep, z.degree() - 1)?;
    Ok(match m.solve(&z.to_vector())? {
        None => None,
        Some(x) => Some(CochainForm::from_vector(z.dim_h(), z.degree() - 1, z.slots().to_vec(), &x)?),
    })
}

pub fn class_equal(rep: &ModuleRep, c1: &CochainForm, c2: &CochainForm) -> Result<bool> {
    Ok(is_coboundary(rep, &c1.sub(c2)?)?.is_some())
}

/// `H^k(h, E)` with a basis of representatives.
#[derive(Debug, Clone)]
pub struct Cohomology {
    pub degree: usize,
    pub cochain_dim: usize,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub basis: Vec<CochainForm>,
    // Columns spanning the coboundaries, kept for coordinate solves.
    coboundaries: Vec<Vec<Scalar>>,
}

impl Cohomology {
    pub fn dim(&self) -> usize {
        self.cocycle_dim - self.coboundary_dim
    }

    /// Coordinates of the class of the closed form `z` in [`Cohomology::basis`].
    pub fn coordinates(&self, z: &CochainForm) -> Result<Vec<Scalar>> {
        if z.degree() != self.degree {
            return Err(Error::Shape(format!("degree {} form in H^{}", z.degree(), self.degree)));
        }
        let target = z.to_vector();
        if target.len() != self.cochain_dim {
            return Err(Error::Shape("form has the wrong value space".into()));
        }
        let ncols = self.basis.len() + self.coboundaries.len();
        let mut m = Matrix::zeros(self.cochain_dim, ncols);
        for (j, b) in self.basis.iter().enumerate() {
            for (i, x) in b.to_vector().into_iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        for (j, col) in self.coboundaries.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, self.basis.len() + j)] = x.clone();
            }
        }
        let x = m
            .solve(&target)?
            .ok_or_else(|| Error::NotClosed("form is not a cocycle".into()))?;
        Ok(x[..self.basis.len()].to_vec())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "dim": self.dim(),
            "cochains": self.cochain_dim,
            "cocycles": self.cocycle_dim,
            "coboundaries": self.coboundary_dim,
        })
    }
}

/// Dimension of `H^k` from sparse ranks.
pub fn cohomology_dim(rep: &ModuleRep, k: usize) -> Result<usize> {
    let n = CochainForm::basis_size(rep.dim_h(), k, rep.dim());
    let rank_out = differential_matrix(rep, k)?.rank();
    let rank_in = if k == 0 { 0 } else { differential_matrix(rep, k - 1)?.rank() };
    Ok(n - rank_out - rank_in)
}

/// Dimensions and a basis of representatives for `H^k(h, E)`.
pub fn cohomology(rep: &ModuleRep, k: usize) -> Result<Cohomology> {
    let n = CochainForm::basis_size(rep.dim_h(), k, rep.dim());
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge(format!("{n} cochains in degree {k}; use cohomology_dim")));
    }
    let d_out = differential_matrix(rep, k)?.to_dense();
    let cocycles = d_out.kernel_basis();
    let coboundaries: Vec<Vec<Scalar>> = if k == 0 {
        Vec::new()
    } else {
        // The pivot columns of the previous differential span its image.
        let d_in = differential_matrix(rep, k - 1)?.to_dense();
        let (_, pivots) = d_in.rref();
        pivots.iter().map(|&c| (0..d_in.rows()).map(|r| d_in[(r, c)].clone()).collect()).collect()
    };
    // Extend the coboundaries to a basis of the cocycles.
    let mut stacked = Matrix::zeros(n, coboundaries.len() + cocycles.len());
    for (j, col) in coboundaries.iter().chain(cocycles.iter()).enumerate() {
        for (i, x) in col.iter().enumerate() {
            stacked[(i, j)] = x.clone();
        }
    }
    let (_, pivots) = stacked.rref();
    let basis = pivots
        .iter()
        .filter(|&&p| p >= coboundaries.len())
        .map(|&p| CochainForm::from_vector(rep.dim_h(), k, rep.slots().to_vec(), &cocycles[p - coboundaries.len()]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cohomology {
        degree: k,
        cochain_dim: n,
        cocycle_dim: cocycles.len(),
        coboundary_dim: coboundaries.len(),
        basis,
        coboundaries,
    })
}

/// JSON for a cochain: `{"degree", "values", "entries": [{"args", "value", "x"}]}`.
pub fn form_to_json(f: &CochainForm) -> Value {
    let entries: Vec<Value> = f
        .entries()
        .map(|(t, i, x)| json!({"args": t, "value": f.multi_index(i), "x": json::scalar_to_json(x)}))
        .collect();
    json!({
        "dim_h": f.dim_h(),
        "degree": f.degree(),
        "values": f.slots(),
        "entries": entries,
    })
}

pub fn form_is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Slot;
    use crate::liepair::{sl, LieAlgebra};
    use crate::scalar::{int, q};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn affine2() -> LieAlgebra {
        // [a₁, a₂] = a₁
        let mut alg = LieAlgebra::abelian(2);
        alg.set_bracket(0, 1, [(0, int(1))].into_iter().collect());
        alg
    }

    #[test]
    fn differential_of_dual_covector_on_affine_algebra() {
        let rep = ModuleRep::scalars(affine2());
        let mut xi = CochainForm::zero_scalar(2, 1);
        xi.add_at(&[0], 0, int(1));
        let d = ce_differential(&rep, &xi).unwrap();
        assert_eq!(d.get(&[0, 1], 0), int(-1));
    }

    #[test]
    fn degree_zero_trivial_action_is_closed() {
        let rep = ModuleRep::trivial(affine2(), vec![Slot::e(3)]);
        let mut e = CochainForm::zero(2, 0, vec![Slot::e(3)]);
        e.add_at(&[], 1, q(2, 3));
        assert!(ce_differential(&rep, &e).unwrap().is_zero());
    }

    #[test]
    fn affine_algebra_has_one_dimensional_h1() {
        let rep = ModuleRep::scalars(affine2());
        assert_eq!(cohomology(&rep, 1).unwrap().dim(), 1);
        assert_eq!(cohomology_dim(&rep, 1).unwrap(), 1);
        assert_eq!(cohomology(&rep, 2).unwrap().dim(), 0);
    }

    #[test]
    fn abelian_cohomology_is_binomial() {
        let rep = ModuleRep::scalars(LieAlgebra::abelian(4));
        let expected = [1, 4, 6, 4, 1];
        for k in 0..=4 {
            assert_eq!(cohomology(&rep, k).unwrap().dim(), expected[k]);
        }
    }

    #[test]
    fn one_dimensional_h_has_no_higher_cohomology() {
        let rep = ModuleRep::scalars(LieAlgebra::abelian(1));
        assert_eq!(cohomology(&rep, 2).unwrap().dim(), 0);
        assert_eq!(cohomology(&rep, 3).unwrap().dim(), 0);
    }

    #[test]
    fn differential_squares_to_zero_on_sl3_adjoint() {
        let (alg, _) = sl(3).unwrap();
        let mats: Vec<Matrix> = (0..8)
            .map(|a| {
                let mut e = vec![Scalar::zero(); 8];
                e[a] = int(1);
                alg.ad(&e)
            })
            .collect();
        let rep = ModuleRep::new(alg, mats, vec![Slot::e(8)]).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        let mut eta = CochainForm::zero(8, 1, vec![Slot::e(8)]);
        for _ in 0..20 {
            eta.add_at(&[rng.gen_range(0..8)], rng.gen_range(0..8), int(rng.gen_range(-3..=3)));
        }
        let d = ce_differential(&rep, &eta).unwrap();
        assert!(!d.is_zero());
        assert!(ce_differential(&rep, &d).unwrap().is_zero());
    }

    #[test]
    fn coboundary_solve_recovers_a_primitive() {
        let (alg, _) = sl(2).unwrap();
        let rep = ModuleRep::scalars(alg);
        // sl(2) has H¹ = H² = 0, so every closed 2-form is exact.
        let mut z = CochainForm::zero_scalar(3, 2);
        z.add_at(&[0, 2], 0, int(2));
        z.add_at(&[1, 2], 0, int(5));
        z.add_at(&[0, 1], 0, int(-1));
        let phi = is_coboundary(&rep, &z).unwrap().unwrap();
        assert_eq!(ce_differential(&rep, &phi).unwrap(), z);
        let mut not_closed = CochainForm::zero_scalar(3, 1);
        not_closed.add_at(&[2], 0, int(1));
        assert!(matches!(is_coboundary(&rep, &not_closed), Err(Error::NotClosed(_))));
    }

    #[test]
    fn class_coordinates_detect_nonzero_classes() {
        let rep = ModuleRep::scalars(LieAlgebra::abelian(2));
        let h1 = cohomology(&rep, 1).unwrap();
        let mut z = CochainForm::zero_scalar(2, 1);
        z.add_at(&[1], 0, int(3));
        let c = h1.coordinates(&z).unwrap();
        assert_eq!(c.len(), 2);
        assert!(!form_is_zero_vector(&c));
        assert!(!class_equal(&rep, &z, &CochainForm::zero_scalar(2, 1)).unwrap());
    }
}
