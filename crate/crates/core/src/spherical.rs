//! Spherical systems of generators: tuples `(h_1, .., h_r)` in `G0` with
//! product 1, generating `G0`, with `ord(h_i) = m_i`.
//!
//! Tuples are searched in the nondecreasing arrangement of the signature.

use std::sync::Arc;

use bitvec::vec::BitVec;
use num_rational::Ratio;
use qetale_fpgroup::{abelian_invariants, AbelianInvariants, Presentation};

use crate::enumerate::theta;
use crate::group::{prime_factors, FiniteGroup};
use crate::CoreError;

#[derive(Clone, Debug)]
pub struct SphericalSystem {
    pub group: Arc<FiniteGroup>,
    pub tuple: Vec<usize>,
    pub signature: Vec<u32>,
}

impl SphericalSystem {
    /// Re-checks product, generation and orders.
    pub fn verify(&self) -> bool {
        let g = &self.group;
        let mut orders: Vec<u32> = self.tuple.iter().map(|&h| g.elem_order(h)).collect();
        orders.sort_unstable();
        let mut sig = self.signature.clone();
        sig.sort_unstable();
        g.product(&self.tuple) == 0 && g.closure(&self.tuple).order() == g.order() && orders == sig
    }
}

/// Whether `G0^ab` is a quotient of `T(m)^ab`. `false` rules out spherical
/// systems of this signature.
pub fn ab_quotient_test(signature: &[u32], g0: &FiniteGroup) -> bool {
    let t = abelian_invariants(&Presentation::polygonal(signature));
    AbelianInvariants::finite(g0.abelian_invariants()).is_quotient_of(&t)
}

/// `g = 1 + |G0| Theta / 2`.
pub fn hurwitz_genus(signature: &[u32], order_g0: u64) -> Result<i64, CoreError> {
    let g = Ratio::from_integer(1) + theta(signature) * order_g0 as i64 / 2;
    if g.is_integer() {
        Ok(g.to_integer())
    } else {
        Err(CoreError::NonIntegralGenus {
            signature: signature.to_vec(),
            order: order_g0,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Every tuple.
    Full,
    /// `h_1` restricted to conjugacy-class representatives.
    ClassReps,
}

/// All spherical systems with the signature (in nondecreasing order).
pub fn spherical_systems(g0: &Arc<FiniteGroup>, signature: &[u32]) -> Vec<SphericalSystem> {
    search(g0, signature, SearchMode::Full)
}

/// Elementary abelian `p`-quotient `G0 / G0^p [G0, G0]`, as coordinates of
/// every element.
struct FrattiniQuotient {
    p: u32,
    dim: usize,
    coords: Vec<Vec<u32>>,
}

impl FrattiniQuotient {
    fn new(g: &FiniteGroup, p: u32) -> Self {
        let mut gens: Vec<usize> = (0..g.order()).map(|x| g.pow(x, p as i64)).collect();
        gens.sort_unstable();
        gens.dedup();
        let d = g.derived_subgroup();
        gens.extend(d.elements().iter().copied());
        let n = g.normal_closure(&gens);
        // coset id: smallest element of x N
        let coset: Vec<usize> = (0..g.order())
            .map(|x| n.elements().iter().map(|&y| g.mul(x, y)).min().expect("nonempty"))
            .collect();
        // basis of the quotient, greedily from the generators
        let mut span = vec![0usize];
        let mut basis = Vec::new();
        let mut in_span: BitVec = BitVec::repeat(false, g.order());
        in_span.set(0, true);
        for x in g.generators().iter().copied().chain(0..g.order()) {
            if in_span[coset[x]] {
                continue;
            }
            basis.push(x);
            let mut next = span.clone();
            for &s in &span {
                let mut y = s;
                for _ in 1..p {
                    y = coset[g.mul(y, x)];
                    if !in_span[y] {
                        in_span.set(y, true);
                        next.push(y);
                    }
                }
            }
            span = next;
        }
        let dim = basis.len();
        // coordinates of each coset: enumerate combinations
        let mut coord_of_coset: Vec<Option<Vec<u32>>> = vec![None; g.order()];
        let total = (p as usize).pow(dim as u32);
        for code in 0..total {
            let mut c = code;
            let mut v = Vec::with_capacity(dim);
            let mut x = 0usize;
            for &b in &basis {
                let e = (c % p as usize) as u32;
                c /= p as usize;
                v.push(e);
                x = g.mul(x, g.pow(b, e as i64));
            }
            coord_of_coset[coset[x]] = Some(v);
        }
        let coords = (0..g.order())
            .map(|x| coord_of_coset[coset[x]].clone().expect("every coset reached"))
            .collect();
        FrattiniQuotient { p, dim, coords }
    }

    fn rank(&self, xs: &[usize]) -> usize {
        let p = self.p as u64;
        let mut rows: Vec<Vec<u64>> = xs
            .iter()
            .map(|&x| self.coords[x].iter().map(|&c| c as u64).collect())
            .collect();
        let mut rank = 0;
        for col in 0..self.dim {
            let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][col].is_multiple_of(p)) else {
                continue;
            };
            rows.swap(rank, piv);
            let inv = mod_inv(rows[rank][col], p);
            for i in 0..rows.len() {
                if i != rank && !rows[i][col].is_multiple_of(p) {
                    let f = rows[i][col] * inv % p;
                    for c in 0..self.dim {
                        rows[i][c] = (rows[i][c] + p * p - f * rows[rank][c] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    (1..p).find(|&x| a * x % p == 1).expect("p is prime")
}

struct Searcher<'a> {
    g: &'a FiniteGroup,
    sig: Vec<u32>,
    /// candidates for each position
    cands: Vec<Vec<usize>>,
    /// `suffix[j]`: products `x_j .. x_{r-1}` with the right orders
    suffix: Vec<BitVec>,
    frattini: Vec<FrattiniQuotient>,
    out: Vec<Vec<usize>>,
}

impl Searcher<'_> {
    fn go(&mut self, tuple: &mut Vec<usize>, prod: usize) {
        let g = self.g;
        let j = tuple.len();
        let r = self.sig.len();
        if j == r - 1 {
            let last = g.inv(prod);
            if g.elem_order(last) != self.sig[r - 1] {
                return;
            }
            if g.closure(tuple).order() != g.order() {
                return;
            }
            let mut t = tuple.clone();
            t.push(last);
            self.out.push(t);
            return;
        }
        for ci in 0..self.cands[j].len() {
            let h = self.cands[j][ci];
            let q = g.mul(prod, h);
            // q * (x_{j+1} .. x_{r-1}) = 1 must be solvable
            if !self.suffix[j + 1][g.inv(q)] {
                continue;
            }
            tuple.push(h);
            // the r - 2 - j free positions left must make up the rank
            let free = r - 2 - j;
            let ok = self.frattini.iter().all(|f| f.rank(tuple) + free >= f.dim);
            if ok {
                self.go(tuple, q);
            }
            tuple.pop();
        }
    }
}

pub fn search(g0: &Arc<FiniteGroup>, signature: &[u32], mode: SearchMode) -> Vec<SphericalSystem> {
    let g = g0.as_ref();
    let mut sig = signature.to_vec();
    sig.sort_unstable();
    let r = sig.len();
    if r == 0 {
        return Vec::new();
    }
    let of_order = |m: u32| -> Vec<usize> { (0..g.order()).filter(|&x| g.elem_order(x) == m).collect() };
    let mut cands: Vec<Vec<usize>> = sig.iter().map(|&m| of_order(m)).collect();
    if mode == SearchMode::ClassReps {
        let cs = g.class_structure();
        cands[0] = cs
            .representatives()
            .into_iter()
            .filter(|&x| g.elem_order(x) == sig[0])
            .collect();
    }
    let mut suffix: Vec<BitVec> = vec![BitVec::repeat(false, g.order()); r + 1];
    suffix[r].set(0, true);
    for j in (0..r).rev() {
        let mut set: BitVec = BitVec::repeat(false, g.order());
        let all_j = of_order(sig[j]);
        for y in suffix[j + 1].iter_ones() {
            for &x in &all_j {
                set.set(g.mul(x, y), true);
            }
        }
        suffix[j] = set;
    }
    if r == 1 {
        // a single generator of order m with product 1 is the identity
        return if g.order() == 1 && sig[0] == 1 {
            vec![SphericalSystem {
                group: g0.clone(),
                tuple: vec![0],
                signature: sig,
            }]
        } else {
            Vec::new()
        };
    }
    let frattini = prime_factors(g.order() as u64)
        .into_iter()
        .map(|p| FrattiniQuotient::new(g, p as u32))
        .collect();
    let mut s = Searcher {
        g,
        sig: sig.clone(),
        cands,
        suffix,
        frattini,
        out: Vec::new(),
    };
    s.go(&mut Vec::with_capacity(r), 0);
    s.out
        .into_iter()
        .map(|tuple| SphericalSystem {
            group: g0.clone(),
            tuple,
            signature: sig.clone(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(gens: &[&str], deg: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::build(gens, deg).unwrap())
    }

    /// Plain enumeration of every tuple, no pruning.
    fn brute(g: &FiniteGroup, sig: &[u32]) -> Vec<Vec<usize>> {
        let r = sig.len();
        let mut out = Vec::new();
        let mut idx = vec![0usize; r - 1];
        'outer: loop {
            let ok_orders = idx.iter().zip(sig).all(|(&x, &m)| g.elem_order(x) == m);
            if ok_orders {
                let last = g.inv(g.product(&idx));
                if g.elem_order(last) == sig[r - 1] && g.closure(&idx).order() == g.order() {
                    let mut t = idx.clone();
                    t.push(last);
                    out.push(t);
                }
            }
            for d in (0..r - 1).rev() {
                idx[d] += 1;
                if idx[d] < g.order() {
                    continue 'outer;
                }
                idx[d] = 0;
            }
            return out;
        }
    }

    #[test]
    fn small_cases() {
        let z4 = grp(&["(1 2 3 4)"], 4);
        assert!(spherical_systems(&z4, &[2, 2]).is_empty());
        let v4 = grp(&["(1 2)", "(3 4)"], 4);
        let sys = spherical_systems(&v4, &[2, 2, 2, 2]);
        assert!(!sys.is_empty());
        let (a, b) = (v4.generators()[0], v4.generators()[1]);
        assert!(sys.iter().any(|s| s.tuple == vec![a, b, a, b]));
        assert!(sys.iter().all(SphericalSystem::verify));
    }

    #[test]
    fn matches_unpruned_enumeration() {
        let cases: Vec<(Arc<FiniteGroup>, Vec<u32>)> = vec![
            (grp(&["(1 2 3 4)", "(1 3)", "(5 6)"], 6), vec![2, 2, 2, 4]),
            (grp(&["(1 2)", "(3 4)", "(5 6)"], 6), vec![2, 2, 2, 2, 2]),
            (grp(&["(1 2 3)", "(1 2)"], 3), vec![2, 2, 3]),
            (grp(&["(1 2 3)", "(4 5 6)", "(1 2)(4 5)"], 6), vec![2, 2, 3, 3]),
            (grp(&["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"], 8), vec![4, 4, 4]),
        ];
        for (g, sig) in cases {
            let found: Vec<Vec<usize>> = spherical_systems(&g, &sig).into_iter().map(|s| s.tuple).collect();
            assert_eq!(found, brute(&g, &sig), "{sig:?}");
        }
    }

    #[test]
    fn class_reps_are_a_subset() {
        let g = grp(&["(1 2 3 4)", "(1 3)", "(5 6)"], 6);
        let full = spherical_systems(&g, &[2, 2, 2, 4]);
        let reps = search(&g, &[2, 2, 2, 4], SearchMode::ClassReps);
        assert!(!reps.is_empty() && reps.len() < full.len());
        assert!(reps.iter().all(|s| full.iter().any(|f| f.tuple == s.tuple)));
    }

    #[test]
    fn abelianization_test() {
        let d4z2 = grp(&["(1 2 3 4)", "(1 3)", "(5 6)"], 6);
        assert!(ab_quotient_test(&[2, 2, 2, 4], &d4z2));
        assert!(!ab_quotient_test(&[4, 4, 4], &d4z2));
        let z2 = grp(&["(1 2)"], 2);
        assert!(!ab_quotient_test(&[2, 3, 7], &z2));
        let trivial = grp(&["()"], 1);
        assert!(ab_quotient_test(&[2, 3, 7], &trivial));
    }

    #[test]
    fn genus() {
        assert_eq!(hurwitz_genus(&[2, 2, 2, 4], 16).unwrap(), 3);
        assert_eq!(hurwitz_genus(&[2, 2, 3, 3], 18).unwrap(), 4);
        assert_eq!(hurwitz_genus(&[2, 2, 2, 2], 4).unwrap(), 1);
        assert!(hurwitz_genus(&[2, 3, 7], 1).is_err());
    }
}
