use num_integer::Integer;
use proptest::prelude::*;

use qetale_fpgroup::{
    abelian_invariants, coset_strategy, coset_strategy_names, reidemeister_schreier, simplify, simplify_tracked,
    todd_coxeter, AbelianInvariants, Presentation, Word,
};

/// `< r, s | r^n, s^2, (s r)^2 >`, of order `2n`.
fn dihedral(n: u32) -> Presentation {
    Presentation::new(
        2,
        vec![
            Word::power(0, n as i64),
            Word::power(1, 2),
            Word::from_letters([2, 1, 2, 1]),
        ],
    )
    .unwrap()
}

/// `< x, y | x^a, y^b, [x, y] >`.
fn abelian2(a: u32, b: u32) -> Presentation {
    Presentation::new(
        2,
        vec![
            Word::power(0, a as i64),
            Word::power(1, b as i64),
            Word::from_letters([1, 2, -1, -2]),
        ],
    )
    .unwrap()
}

/// Invariant factors of `Z_a x Z_b` from gcd and lcm.
fn abelian2_oracle(a: u64, b: u64) -> AbelianInvariants {
    let v: Vec<u64> = [a.gcd(&b), a.lcm(&b)].into_iter().filter(|&d| d > 1).collect();
    AbelianInvariants::finite(v)
}

fn order(p: &Presentation) -> Option<usize> {
    todd_coxeter(p, &[], 100_000).index()
}

#[test]
fn von_dyck_orders() {
    // spherical triangle groups: 2 / (1/l + 1/m + 1/n - 1)
    for (sig, n) in [([2, 3, 3], 12), ([2, 3, 4], 24), ([2, 3, 5], 60), ([2, 2, 7], 14)] {
        assert_eq!(order(&Presentation::polygonal(&sig)), Some(n), "{sig:?}");
    }
}

#[test]
fn every_strategy_agrees_on_small_groups() {
    let groups = [dihedral(9), abelian2(4, 6), Presentation::polygonal(&[2, 3, 5])];
    for name in coset_strategy_names() {
        let s = coset_strategy(name).unwrap();
        let got: Vec<Option<usize>> = groups.iter().map(|p| s.enumerate(p, &[], 100_000).index()).collect();
        assert_eq!(got, vec![Some(18), Some(24), Some(60)], "{name}");
    }
}

#[test]
fn presentation_text_round_trip() {
    let p = dihedral(5);
    let q = Presentation::parse(&p.to_string()).unwrap();
    assert_eq!(order(&q), Some(10));
    assert_eq!(abelian_invariants(&q), abelian_invariants(&p));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dihedral_order_and_rotation_subgroup(n in 2u32..40, k in 1u32..40) {
        let p = dihedral(n);
        prop_assert_eq!(order(&p), Some(2 * n as usize));
        // < r^k > has index 2n / (n / gcd(n, k))
        let sub = Word::power(0, k as i64);
        let t = todd_coxeter(&p, &[sub], 100_000).into_table().unwrap();
        let expected_order = n / n.gcd(&k);
        prop_assert_eq!(t.index(), (2 * n / expected_order) as usize);
        // a cyclic subgroup is presented as such
        let h = reidemeister_schreier(&p, &t);
        let inv = abelian_invariants(&h);
        prop_assert_eq!(inv.order(), Some(expected_order as u64));
        prop_assert!(inv.torsion.len() <= 1);
        prop_assert_eq!(order(&simplify(&h)), Some(expected_order as usize));
    }

    #[test]
    fn two_generator_abelian_groups(a in 1u64..30, b in 1u64..30) {
        let p = abelian2(a as u32, b as u32);
        prop_assert_eq!(abelian_invariants(&p), abelian2_oracle(a, b));
        prop_assert_eq!(order(&p), Some((a * b) as usize));
    }

    #[test]
    fn tietze_preserves_abelianization(
        rels in proptest::collection::vec(proptest::collection::vec(prop_oneof![-3i32..=-1, 1i32..=3], 1..7), 1..5)
    ) {
        let p = Presentation::new(3, rels.into_iter().map(Word::from_letters).collect()).unwrap();
        let s = simplify_tracked(&p);
        prop_assert_eq!(abelian_invariants(&s.presentation), abelian_invariants(&p));
        prop_assert!(s.presentation.total_length() <= p.total_length().max(1) * 64);
        // finite groups keep their order
        if let Some(n) = todd_coxeter(&p, &[], 20_000).index() {
            prop_assert_eq!(todd_coxeter(&s.presentation, &[], 200_000).index(), Some(n));
        }
    }

    #[test]
    fn index_times_subgroup_order_is_group_order(n in 3u32..16) {
        // < s > in D_n has order 2
        let p = dihedral(n);
        let t = todd_coxeter(&p, &[Word::power(1, 1)], 100_000).into_table().unwrap();
        prop_assert_eq!(t.index(), n as usize);
        let h = simplify(&reidemeister_schreier(&p, &t));
        prop_assert_eq!(order(&h).map(|o| o * t.index()), Some(2 * n as usize));
    }
}
