use rand::{rngs::StdRng, SeedableRng};
use rwpair::catalog;
use rwpair::ce::{ce_differential, class_equal, is_closed};
use rwpair::connections::{
    bianchi_psi, is_totally_symmetric, psi_primitive, quotient_tensor, symmetry_defects, tilde_cocycle, Connection,
};

fn symplectic(name: &str) -> (catalog::Example, Connection) {
    let ex = catalog::get(name).unwrap();
    let c = Connection::extend_action(&ex.pair)
        .unwrap()
        .make_torsion_free()
        .unwrap()
        .make_symplectic(&ex.omega)
        .unwrap();
    (ex, c)
}

#[test]
fn symplectic_connections_for_every_example() {
    for name in catalog::names() {
        let (ex, c) = symplectic(name);
        assert!(c.extends_action(), "{name}");
        assert!(c.is_torsion_free().unwrap(), "{name}");
        assert!(c.is_symplectic(&ex.omega).unwrap(), "{name}");
    }
}

#[test]
fn sl3_extend_action_connection_has_descending_torsion() {
    let ex = catalog::sl3_min().unwrap();
    let c = Connection::extend_action(&ex.pair).unwrap();
    assert!(!c.is_torsion_free().unwrap());
    assert!(c.torsion_descends().unwrap());
    for a in 0..4 {
        assert_eq!(c.matrix(a), &ex.pair.quotient_action(a));
    }
}

#[test]
fn atiyah_cocycle_closed_for_random_connections() {
    let mut rng = StdRng::seed_from_u64(11);
    for name in catalog::names() {
        let ex = catalog::get(name).unwrap();
        let base = Connection::extend_action(&ex.pair).unwrap();
        let rep = base.atiyah_module().unwrap();
        let r0 = base.atiyah_cocycle().unwrap();
        for _ in 0..3 {
            let c = base.randomize_complement(&mut rng);
            let r = c.atiyah_cocycle().unwrap();
            assert!(is_closed(&rep, &r).unwrap(), "{name}");
            assert!(class_equal(&rep, &r, &r0).unwrap(), "{name}");
        }
    }
}

#[test]
fn sl3_atiyah_nonzero_and_not_exact() {
    let ex = catalog::sl3_min().unwrap();
    assert!(Connection::compatible(&ex.pair).unwrap().is_none());
    let c = Connection::extend_action(&ex.pair).unwrap();
    assert!(!c.atiyah_cocycle().unwrap().is_zero());
}

#[test]
fn compatible_connection_on_sl2_and_heisenberg() {
    for name in ["sl2-nilp", "heisenberg", "abelian4"] {
        let ex = catalog::get(name).unwrap();
        let c = Connection::compatible(&ex.pair).unwrap().expect(name);
        assert!(c.atiyah_cocycle().unwrap().is_zero(), "{name}");
    }
}

#[test]
fn tilde_cocycle_totally_symmetric_for_symplectic_connections() {
    for name in catalog::names() {
        let (ex, c) = symplectic(name);
        let rt = tilde_cocycle(&c.atiyah_cocycle().unwrap(), &ex.omega).unwrap();
        assert!(is_totally_symmetric(&rt).unwrap(), "{name}");
    }
}

#[test]
fn symmetry_defect_identities() {
    let ex = catalog::sl3_min().unwrap();
    let zero_block = Connection::extend_action(&ex.pair).unwrap();
    // With a zero non-h block, ∇ω vanishes in the quotient directions.
    let d = symmetry_defects(&zero_block, &ex.omega).unwrap();
    assert!(d.lhs23.is_zero() && d.rhs23.is_zero());
    assert_eq!(d.lhs12, d.rhs12);
    let c = zero_block.randomize_complement(&mut StdRng::seed_from_u64(4));
    let d = symmetry_defects(&c, &ex.omega).unwrap();
    assert!(!d.lhs23.is_zero());
    assert_eq!(d.lhs23, d.rhs23);
    assert!(!d.lhs12.is_zero());
    assert_eq!(d.lhs12, d.rhs12);
    let tf = c.make_torsion_free().unwrap();
    let d = symmetry_defects(&tf, &ex.omega).unwrap();
    assert!(d.lhs12.is_zero() && d.rhs12.is_zero());
    assert_eq!(d.lhs23, d.rhs23);
}

#[test]
fn psi_is_exact_on_sl3() {
    let (ex, c) = symplectic("sl3-min");
    let psi = bianchi_psi(&c, None).unwrap();
    assert!(!psi.is_zero());
    let phi = psi_primitive(&c, &psi).unwrap().expect("psi is a coboundary");
    let rep = quotient_tensor(&ex.pair, 3, 1).unwrap();
    assert_eq!(ce_differential(&rep, &phi).unwrap(), psi);
}

