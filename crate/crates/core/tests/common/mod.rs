#![allow(dead_code)]

use rand::{rngs::StdRng, SeedableRng};
use rwpair::catalog::{self, Example};
use rwpair::connections::Connection;
use rwpair::diagrams::{admissible_permutation, theta, AdmissibleChoices};
use rwpair::forms::CochainForm;
use rwpair::Scalar;

pub fn symplectic_from(ex: &Example, seed: Option<u64>) -> Connection {
    let mut c = Connection::extend_action(&ex.pair).unwrap();
    if let Some(s) = seed {
        c = c.randomize_complement(&mut StdRng::seed_from_u64(s));
    }
    c.make_torsion_free().unwrap().make_symplectic(&ex.omega).unwrap()
}

pub fn setup(name: &str, seed: Option<u64>) -> (Example, Connection) {
    let ex = catalog::get(name).unwrap();
    let c = symplectic_from(&ex, seed);
    (ex, c)
}

pub fn zero() -> Scalar {
    Scalar::from_integer(0.into())
}

pub fn int(x: i64) -> Scalar {
    Scalar::from_integer(x.into())
}

/// `∇' − ∇` along the quotient directions as a 0-cochain valued in
/// `q* ⊗ E* ⊗ E`, indexed like the Atiyah cocycle.
pub fn difference_cochain(new: &Connection, old: &Connection) -> CochainForm {
    let m = new.pair().dim_h();
    let n = new.pair().dim_q();
    let d = new.target_dim();
    let diff = new.difference(old).unwrap();
    let slots = new.atiyah_cocycle().unwrap().slots().to_vec();
    let mut phi = CochainForm::zero(m, 0, slots);
    for l in 0..n {
        for e in 0..d {
            for out in 0..d {
                phi.add_at(&[], (l * d + e) * d + out, diff[m + l][(out, e)].clone());
            }
        }
    }
    phi
}

/// `w(theta)` by materializing `R̃(a₁) ⊗ R̃(a₂)` on all of `(q*)^⊗6`,
/// moving the flags into edge order and pairing consecutive slots with
/// `ω⁻¹`, then antisymmetrizing by hand.
pub fn dense_theta_weight(ex: &Example, c: &Connection, ch: &AdmissibleChoices) -> CochainForm {
    let d = theta();
    let sigma = admissible_permutation(&d, ch).unwrap();
    let n = ex.pair.dim_q();
    let m = ex.pair.dim_h();
    let r = c.atiyah_cocycle().unwrap();
    let omega = ex.omega.matrix();
    let p = ex.omega.inverse();
    // R̃(a)(x, y, z) = ω(R(a)(x, y), z).
    let rt = |a: usize, x: usize, y: usize, z: usize| -> Scalar {
        let mut s = zero();
        for o in 0..n {
            s += r.get(&[a], (x * n + y) * n + o) * &omega[(o, z)];
        }
        s
    };
    let dense: Vec<Vec<Scalar>> = (0..m)
        .map(|a| (0..n * n * n).map(|i| rt(a, i / (n * n), (i / n) % n, i % n)).collect())
        .collect();
    // The vertex at position j of the vertex order receives a_j.
    let value = |a1: usize, a2: usize| -> Scalar {
        let mut total = zero();
        for flat in 0..n.pow(6) {
            // y[s] is the index in edge-grouped slot s.
            let y: Vec<usize> = (0..6).map(|s| (flat / n.pow(5 - s as u32)) % n).collect();
            let x: Vec<usize> = (0..6).map(|q| y[sigma.apply(q)]).collect();
            let f = &dense[a1][(x[0] * n + x[1]) * n + x[2]] * &dense[a2][(x[3] * n + x[4]) * n + x[5]];
            if f == zero() {
                continue;
            }
            total += f * &p[(y[0], y[1])] * &p[(y[2], y[3])] * &p[(y[4], y[5])];
        }
        total
    };
    let mut out = CochainForm::zero_scalar(m, 2);
    for i in 0..m {
        for j in i + 1..m {
            out.add_at(&[i, j], 0, value(i, j) - value(j, i));
        }
    }
    out
}
