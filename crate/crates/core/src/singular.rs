//! Nodes of `Y = (C x C)/G0` and the `A1`/`A3` points of `X = (C x C)/G`
//! from a mixed structure and a spherical system.

use num_rational::Ratio;
use serde::Serialize;

use crate::enumerate::Basket;
use crate::group::ClassStructure;
use crate::mixed::MixedStructure;
use crate::spherical::SphericalSystem;
use crate::CoreError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SingularityCount {
    /// Nodes on `Y`.
    pub n: u64,
    /// `A3` points on `X`.
    pub t: u64,
    /// `A1` points on `X`.
    pub s: u64,
}

impl SingularityCount {
    fn from_n_t(n: u64, t: u64) -> Result<Self, CoreError> {
        if t > n || !(n - t).is_multiple_of(2) {
            return Err(CoreError::Inconsistent(format!("n = {n}, t = {t}")));
        }
        Ok(SingularityCount { n, t, s: (n - t) / 2 })
    }
}

fn integral(q: Ratio<i64>, what: &str) -> Result<u64, CoreError> {
    if q.is_integer() && q >= Ratio::from_integer(0) {
        Ok(q.to_integer() as u64)
    } else {
        Err(CoreError::Inconsistent(format!(
            "{what} = {q} is not a nonnegative integer"
        )))
    }
}

/// Counts via class sizes and conjugacy tests in `G0`.
pub fn count_singularities(mx: &MixedStructure, sys: &SphericalSystem) -> Result<SingularityCount, CoreError> {
    let classes = mx.g0.class_structure();
    count_with_classes(mx, sys, &classes)
}

pub fn count_with_classes(
    mx: &MixedStructure,
    sys: &SphericalSystem,
    classes: &ClassStructure,
) -> Result<SingularityCount, CoreError> {
    let g0 = &mx.g0;
    let g = &mx.g;
    let order = g0.order() as i64;
    // (position, m_i, h_i^{d_i}) for even m_i
    let halves: Vec<(i64, usize)> = sys
        .tuple
        .iter()
        .zip(&sys.signature)
        .filter(|(_, &m)| m % 2 == 0)
        .map(|(&h, &m)| (m as i64, g0.pow(h, (m / 2) as i64)))
        .collect();

    let mut n = Ratio::from_integer(0);
    for &(mi, xi) in &halves {
        let ei = classes.class_size(xi) as i64;
        for &(mj, xj) in &halves {
            let yj = mx.phi_inv[xj];
            if classes.class_of(xi) != classes.class_of(yj) {
                continue;
            }
            let ej = classes.class_size(yj) as i64;
            if ei != ej {
                return Err(CoreError::Inconsistent(format!("class sizes {ei} and {ej} differ")));
            }
            n += Ratio::new(2 * order, mi * mj * ei);
        }
    }

    // class in G0 of (tau' eta)^2 for every eta in G0
    let square_class: Vec<usize> = (0..g0.order())
        .map(|eta| {
            let x = g.mul(mx.tau_prime, mx.embed[eta]);
            classes.class_of(mx.project[g.mul(x, x)])
        })
        .collect();
    let mut t = Ratio::from_integer(0);
    for &(mi, xi) in &halves {
        let ci = classes.class_of(xi);
        let fi = square_class.iter().filter(|&&c| c == ci).count() as i64;
        t += Ratio::new(fi, mi * classes.class_size(xi) as i64);
    }
    SingularityCount::from_n_t(integral(n, "n")?, integral(t, "t")?)
}

/// Whether every point of `C x C` with nontrivial `G0`-stabilizer has a
/// stabilizer of order 2.
pub fn nodal_check(mx: &MixedStructure, sys: &SphericalSystem) -> bool {
    let g0 = &mx.g0;
    let classes = g0.class_structure();
    let powers = |h: usize| -> Vec<usize> {
        let m = g0.elem_order(h);
        (1..m).map(|a| g0.pow(h, a as i64)).collect()
    };
    let all: Vec<Vec<usize>> = sys.tuple.iter().map(|&h| powers(h)).collect();
    for pi in &all {
        for pj in &all {
            for &x in pi {
                let cx = classes.class_of(x);
                if g0.elem_order(x) != 2 && pj.iter().any(|&y| classes.class_of(mx.phi_inv[y]) == cx) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn matches_basket(count: &SingularityCount, basket: &Basket) -> bool {
    count.s == basket.s as u64 && count.t == basket.t as u64
}

/// Result of enumerating the points of `C x C` with nontrivial stabilizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedPointCensus {
    /// Points whose `G0`-stabilizer has order exactly 2.
    pub order_two_points: u64,
    /// Those among them also fixed by some element of `G \ G0`.
    pub exchanged_points: u64,
    /// Largest `G0`-stabilizer order seen.
    pub max_stabilizer: usize,
}

impl FixedPointCensus {
    /// `(n, t)` from the point counts: every orbit of such points has
    /// `|G0|/2` elements.
    pub fn n_t(&self, order_g0: usize) -> Option<(u64, u64)> {
        let orbit = (order_g0 / 2) as u64;
        if orbit == 0 || !self.order_two_points.is_multiple_of(orbit) || !self.exchanged_points.is_multiple_of(orbit) {
            return None;
        }
        Some((self.order_two_points / orbit, self.exchanged_points / orbit))
    }
}

/// Direct enumeration over pairs of cosets `(g K_i, g' K_j)`, `K_i = <h_i>`,
/// with `G0` acting by `(x, y) -> (h x, phi(h) y)` and
/// `tau' eta (x, y) = (phi(eta) y, tau eta x)`.
pub fn fixed_point_census(mx: &MixedStructure, sys: &SphericalSystem) -> FixedPointCensus {
    let g0 = &mx.g0;
    let order = g0.order();
    struct Cosets {
        /// element -> coset id
        coset_of: Vec<usize>,
        /// per coset: its representative and the stabilizer g K g^-1
        reps: Vec<usize>,
        stabs: Vec<Vec<usize>>,
    }
    let cosets: Vec<Cosets> = sys
        .tuple
        .iter()
        .map(|&h| {
            let k: Vec<usize> = (0..g0.elem_order(h)).map(|a| g0.pow(h, a as i64)).collect();
            let mut coset_of = vec![usize::MAX; order];
            let mut reps = Vec::new();
            let mut stabs = Vec::new();
            for x in 0..order {
                if coset_of[x] != usize::MAX {
                    continue;
                }
                let id = reps.len();
                for &y in &k {
                    coset_of[g0.mul(x, y)] = id;
                }
                reps.push(x);
                let mut s: Vec<usize> = k.iter().map(|&y| g0.conj(y, x)).collect();
                s.sort_unstable();
                stabs.push(s);
            }
            Cosets { coset_of, reps, stabs }
        })
        .collect();

    let mut census = FixedPointCensus {
        order_two_points: 0,
        exchanged_points: 0,
        max_stabilizer: 1,
    };
    let mut in_second = vec![false; order];
    for (i, ci) in cosets.iter().enumerate() {
        for (j, cj) in cosets.iter().enumerate() {
            for (b, sb) in cj.stabs.iter().enumerate() {
                for &y in sb {
                    in_second[mx.phi_inv[y]] = true;
                }
                for (a, sa) in ci.stabs.iter().enumerate() {
                    let size = sa.iter().filter(|&&x| in_second[x]).count();
                    census.max_stabilizer = census.max_stabilizer.max(size);
                    if size != 2 {
                        continue;
                    }
                    census.order_two_points += 1;
                    if i == j {
                        let (g1, g2) = (ci.reps[a], cj.reps[b]);
                        let fixed = (0..order).any(|eta| {
                            ci.coset_of[g0.mul(mx.phi[eta], g2)] == a
                                && ci.coset_of[g0.mul(g0.mul(mx.tau, eta), g1)] == b
                        });
                        if fixed {
                            census.exchanged_points += 1;
                        }
                    }
                }
                for &y in sb {
                    in_second[mx.phi_inv[y]] = false;
                }
            }
        }
    }
    census
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::group::FiniteGroup;
    use crate::mixed::mixed_structures;
    use crate::spherical::spherical_systems;

    fn grp(gens: &[&str], deg: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::build(gens, deg).unwrap())
    }

    fn check_all(g: &Arc<FiniteGroup>, sig: &[u32]) -> usize {
        let mut checked = 0;
        for mx in mixed_structures(g) {
            for sys in spherical_systems(&mx.g0, sig) {
                let census = fixed_point_census(&mx, &sys);
                assert_eq!(nodal_check(&mx, &sys), census.max_stabilizer <= 2);
                if census.max_stabilizer > 2 {
                    continue;
                }
                let c = count_singularities(&mx, &sys).unwrap();
                assert_eq!(census.n_t(mx.g0.order()), Some((c.n, c.t)));
                checked += 1;
            }
        }
        checked
    }

    #[test]
    fn formula_matches_enumeration_on_small_groups() {
        assert!(check_all(&grp(&["(1 2 3 4 5 6 7 8)"], 8), &[4, 4]) == 0);
        let q8 = grp(&["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"], 8);
        check_all(&q8, &[2, 2, 4, 4]);
        let z4z2 = grp(&["(1 2 3 4)", "(5 6)"], 6);
        assert!(check_all(&z4z2, &[2, 2, 2, 2]) > 0);
        let g16 = grp(&["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 6 4 8)", "(9 10)"], 10);
        assert!(check_all(&g16, &[2, 2, 2, 2, 2]) > 0);
    }

    #[test]
    fn odd_orders_give_nothing() {
        let g = grp(&["(1 2 3 4 5 6 7 8)", "(9 10 11)"], 11);
        let mx = &mixed_structures(&g)[0];
        let c = (0..mx.g0.order()).find(|&x| mx.g0.elem_order(x) == 3).unwrap();
        let sys = SphericalSystem {
            group: mx.g0.clone(),
            tuple: vec![c, c, c],
            signature: vec![3, 3, 3],
        };
        let count = count_singularities(mx, &sys).unwrap();
        assert_eq!((count.n, count.t, count.s), (0, 0, 0));
        // the point (K, K) is fixed by all of K = Z3
        assert!(!nodal_check(mx, &sys));
        assert_eq!(fixed_point_census(mx, &sys).max_stabilizer, 3);
    }

    #[test]
    fn order_four_coincidence_is_not_nodal() {
        // G0 = Z4 in Z8, phi trivial: h and h^-1 = h^3 give a Z4 stabilizer
        let z8 = grp(&["(1 2 3 4 5 6 7 8)"], 8);
        let mx = &mixed_structures(&z8)[0];
        let h = (0..mx.g0.order()).find(|&x| mx.g0.elem_order(x) == 4).unwrap();
        let sys = SphericalSystem {
            group: mx.g0.clone(),
            tuple: vec![h, mx.g0.inv(h)],
            signature: vec![4, 4],
        };
        assert!(!nodal_check(mx, &sys));
        assert_eq!(fixed_point_census(mx, &sys).max_stabilizer, 4);
    }

    #[test]
    fn basket_matching() {
        let c = SingularityCount { n: 6, t: 2, s: 2 };
        assert!(matches_basket(&c, &Basket { s: 2, t: 2 }));
        let c = SingularityCount { n: 12, t: 0, s: 6 };
        assert!(!matches_basket(&c, &Basket { s: 2, t: 2 }));
        let c = SingularityCount { n: 0, t: 0, s: 0 };
        assert!(matches_basket(&c, &Basket { s: 0, t: 0 }));
    }
}
