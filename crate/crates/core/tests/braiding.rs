use std::sync::Arc;

use gkm::cartan::{int_matrix, CartanDatum, Weight};
use gkm::classical::{classical_irreducible_full, casimir_full, int_weight, ClassicalSide};
use gkm::kz::{drinfeld_kohno_compare, to_complex, DkSetup, KzSystem, Tolerance};
use gkm::qmodules::irreducible_full;
use gkm::qpairing::PairingEngine;
use gkm::rmatrix::{
    block_determinants, check_intertwiner, check_ybe, highest_pair_eigenvalue, truncated_r, ModuleAction, SlotOrder,
};
use num_complex::Complex64;

struct Setting {
    engine: PairingEngine,
    side: ClassicalSide,
    highest: Weight,
}

fn setting(rows: &[&[i64]], weight: &[i64]) -> Setting {
    let cd = Arc::new(CartanDatum::from_matrix(&int_matrix(rows)).unwrap());
    let highest = int_weight(&cd, weight).unwrap();
    let den = cd.session_denominator(std::slice::from_ref(&highest)).unwrap();
    Setting {
        engine: PairingEngine::with_denominator(cd.clone(), den).unwrap(),
        side: ClassicalSide::new(cd),
        highest,
    }
}

fn action(s: &Setting) -> ModuleAction {
    let module = irreducible_full(&s.engine, s.highest.clone(), 8).unwrap();
    ModuleAction::new(&module, s.engine.denominator()).unwrap()
}

#[test]
fn braid_relation_on_higher_sl2_modules() {
    for top in 2..=3 {
        let s = setting(&[&[2]], &[top]);
        let v = action(&s);
        assert_eq!(v.dim(), top as usize + 1);
        let report = check_ybe(&s.engine, &v).unwrap();
        assert!(report.holds(), "V({}) {:?}", top, report.blocks);
        assert!(highest_pair_eigenvalue(&s.engine, &v, &v).unwrap().1);
    }
}

#[test]
fn r_matrix_is_invertible_on_every_block() {
    let s = setting(&[&[2, -1], &[-1, 2]], &[1, 1]);
    let v = action(&s);
    assert_eq!(v.dim(), 8);
    let r = truncated_r(&s.engine, &v, &v).unwrap();
    for (m, det) in block_determinants(&r, &v, &v) {
        assert!(!det.is_zero(), "singular block {}", m);
    }
}

#[test]
fn mixed_modules_intertwine() {
    let s = setting(&[&[2, -1], &[-1, 2]], &[1, 0]);
    let v = action(&s);
    let cd = s.engine.cartan_arc();
    let dual = irreducible_full(&s.engine, int_weight(&cd, &[0, 1]).unwrap(), 8).unwrap();
    let w = ModuleAction::new(&dual, s.engine.denominator()).unwrap();
    let report = check_intertwiner(&s.engine, &v, &w, SlotOrder::EFirst).unwrap();
    assert!(report.holds(), "{:?}", report.failures);
    assert!(highest_pair_eigenvalue(&s.engine, &v, &w).unwrap().1);
}

#[test]
fn kz_monodromy_satisfies_braid_relation() {
    let s = setting(&[&[2]], &[2]);
    let module = classical_irreducible_full(&s.side, s.highest.clone(), 4).unwrap();
    let omega = to_complex(&casimir_full(&s.side, &module, &module).unwrap());
    let system = KzSystem::new(&omega, module.total_dim(), 3, Complex64::new(0.1, 0.05)).unwrap();
    assert!(system.integrability_defect() < 1e-12);
    let m = system.all_monodromies(&Tolerance::default()).unwrap();
    let lhs = &m[0] * &m[1] * &m[0];
    let rhs = &m[1] * &m[0] * &m[1];
    assert!((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-7);
}

#[test]
fn drinfeld_kohno_sl3_fundamental() {
    let s = setting(&[&[2, -1], &[-1, 2]], &[1, 0]);
    let setup = DkSetup {
        word_len: 3,
        ..DkSetup::default()
    };
    let report = drinfeld_kohno_compare(&s.engine, &s.side, &s.highest, &setup).unwrap();
    assert!(report.max_deviation() < 1e-6, "{}", report.max_deviation());
}

#[test]
fn drinfeld_kohno_non_simply_laced_two_strands() {
    let s = setting(&[&[2, -2], &[-1, 2]], &[1, 0]);
    let setup = DkSetup {
        strands: 2,
        ..DkSetup::default()
    };
    let report = drinfeld_kohno_compare(&s.engine, &s.side, &s.highest, &setup).unwrap();
    assert!(report.max_deviation() < 1e-6, "{}", report.max_deviation());
}
