use std::sync::Arc;

use qetale_core::aut::{automorphism_group, DEFAULT_AUT_ORDER_CAP};
use qetale_core::catalog::bundled_catalog;
use qetale_core::mixed_structures;

#[test]
fn class_equation_and_inner_automorphisms() {
    for e in bundled_catalog() {
        let g = e.build().unwrap();
        let n = g.order();
        assert!(g.check_axioms(), "{}", e.name);
        let cs = g.class_structure();
        let mut total = 0;
        for class in cs.classes() {
            let x = class[0];
            assert_eq!(cs.class_size(x) * cs.centralizer_order(x), n, "{}", e.name);
            total += class.len();
        }
        assert_eq!(total, n);
        let inner = (n / g.center().order()) as u128;
        let aut = automorphism_group(&g, DEFAULT_AUT_ORDER_CAP).unwrap();
        assert_eq!(aut.order() % inner, 0, "{}", e.name);
    }
}

#[test]
fn every_bundled_group_has_an_unsplit_index_two_subgroup() {
    for e in bundled_catalog() {
        let g = Arc::new(e.build().unwrap());
        let structures = mixed_structures(&g);
        assert!(!structures.is_empty(), "{}", e.name);
        for mx in &structures {
            assert!(mx.verify(), "{}", e.name);
            assert_eq!(mx.g0.order() * 2, g.order());
        }
    }
}
