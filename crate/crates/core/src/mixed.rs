//! Unsplit index-2 extensions `1 -> G0 -> G -> Z2 -> 1`.

use std::sync::Arc;

use crate::group::{FiniteGroup, Subgroup};

/// `G` with an index-2 subgroup `G0` such that no element outside `G0` is
/// an involution, together with `tau' in G \ G0`, `tau = tau'^2` and
/// `phi = conjugation by tau'` restricted to `G0`.
///
/// `G0` is also materialized as a group of its own; its elements are
/// indexed independently and `embed` / `project` translate.
#[derive(Clone, Debug)]
pub struct MixedStructure {
    pub g: Arc<FiniteGroup>,
    pub g0_sub: Subgroup,
    pub g0: Arc<FiniteGroup>,
    /// `G0` index -> `G` index.
    pub embed: Vec<usize>,
    /// `G` index -> `G0` index, `usize::MAX` outside `G0`.
    pub project: Vec<usize>,
    /// In `G` indices.
    pub tau_prime: usize,
    /// In `G0` indices.
    pub tau: usize,
    /// On `G0` indices.
    pub phi: Vec<usize>,
    pub phi_inv: Vec<usize>,
}

impl MixedStructure {
    /// The structure for `g0_sub`, or `None` if the extension splits.
    pub fn new(g: Arc<FiniteGroup>, g0_sub: Subgroup) -> Option<MixedStructure> {
        let n = g.order();
        assert_eq!(g0_sub.order() * 2, n, "not an index-2 subgroup");
        // unsplit: nothing outside G0 squares to the identity
        if (0..n).any(|x| !g0_sub.contains(x) && g.mul(x, x) == 0) {
            return None;
        }
        let (g0, embed) = g.subgroup_group(&g0_sub);
        let mut project = vec![usize::MAX; n];
        for (i, &x) in embed.iter().enumerate() {
            project[x] = i;
        }
        let tau_prime = (0..n).find(|&x| !g0_sub.contains(x)).expect("index 2");
        let tau = project[g.mul(tau_prime, tau_prime)];
        let phi: Vec<usize> = embed.iter().map(|&h| project[g.conj(h, tau_prime)]).collect();
        let mut phi_inv = vec![0; phi.len()];
        for (i, &y) in phi.iter().enumerate() {
            phi_inv[y] = i;
        }
        Some(MixedStructure {
            g,
            g0_sub,
            g0: Arc::new(g0),
            embed,
            project,
            tau_prime,
            tau,
            phi,
            phi_inv,
        })
    }

    pub fn in_g0(&self, x: usize) -> bool {
        self.g0_sub.contains(x)
    }

    /// Elements of `G \ G0` in index order.
    pub fn outside(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.g.order()).filter(|&x| !self.in_g0(x))
    }

    /// Checks the defining identities exhaustively.
    pub fn verify(&self) -> bool {
        let g0 = &self.g0;
        let hom = (0..g0.order())
            .all(|a| (0..g0.order()).all(|b| self.phi[g0.mul(a, b)] == g0.mul(self.phi[a], self.phi[b])));
        let tau_ok = self.embed[self.tau] == self.g.mul(self.tau_prime, self.tau_prime);
        hom && tau_ok
            && self.phi[self.tau] == self.tau
            && !self.in_g0(self.tau_prime)
            && self.outside().all(|x| self.g.mul(x, x) != 0)
    }
}

/// One structure per index-2 subgroup over which `G` does not split.
pub fn mixed_structures(g: &Arc<FiniteGroup>) -> Vec<MixedStructure> {
    g.index_two_subgroups()
        .into_iter()
        .filter_map(|s| MixedStructure::new(g.clone(), s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(gens: &[&str], deg: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::build(gens, deg).unwrap())
    }

    #[test]
    fn cyclic_four() {
        let ms = mixed_structures(&grp(&["(1 2 3 4)"], 4));
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].g0.order(), 2);
        assert!(ms[0].verify());
    }

    #[test]
    fn klein_four_splits() {
        assert!(mixed_structures(&grp(&["(1 2)", "(3 4)"], 4)).is_empty());
    }

    #[test]
    fn quaternion() {
        let q8 = grp(&["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"], 8);
        let ms = mixed_structures(&q8);
        assert_eq!(ms.len(), 3);
        for m in &ms {
            assert!(m.verify());
            assert_eq!(m.g0.abelian_invariants(), vec![4]);
        }
    }

    /// Brute-force criterion: a structure exists for an index-2 subgroup
    /// exactly when no involution lies outside it.
    #[test]
    fn agrees_with_involution_scan() {
        for (gens, deg) in [
            (vec!["(1 2 3 4 5 6 7 8)"], 8),
            (vec!["(1 2 3 4)", "(1 3)"], 4),
            (vec!["(1 2 3 4)", "(5 6)"], 6),
            (vec!["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)", "(9 10)"], 10),
            (vec!["(1 2 3 4)(5 6)", "(1 3)"], 6),
        ] {
            let g = grp(&gens, deg);
            let subs = g.index_two_subgroups();
            let expected = subs
                .iter()
                .filter(|s| (0..g.order()).all(|x| s.contains(x) || g.elem_order(x) != 2))
                .count();
            let ms = mixed_structures(&g);
            assert_eq!(ms.len(), expected, "{gens:?}");
            assert!(ms.iter().all(MixedStructure::verify));
        }
    }
}
