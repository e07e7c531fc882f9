//! Finite groups as dense multiplication tables.
//!
//! Elements are indices `0..order` with `0` the identity. The element order
//! is the breadth-first closure from the identity, multiplying on the right
//! by the generators in input order, so it only depends on the generators.

use std::collections::HashMap;
use std::hash::Hash;

use bitvec::vec::BitVec;

use crate::perm::Perm;
use crate::GroupError;

pub const DEFAULT_ORDER_CAP: usize = 4096;

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
    gens: Vec<usize>,
    elem_order: Vec<u32>,
    /// Permutation realizing each element, when the group came from one.
    perms: Option<Vec<Perm>>,
}

impl FiniteGroup {
    /// Closure of `gens` under `mul`, breadth-first from `identity`.
    /// Returns the group and the element behind each index.
    pub fn from_closure<T, F>(identity: T, gens: &[T], mul: F, cap: usize) -> Result<(FiniteGroup, Vec<T>), GroupError>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let k = gens.len();
        let mut index: HashMap<T, usize> = HashMap::new();
        let mut elems = vec![identity.clone()];
        index.insert(identity, 0);
        // right[x * k + g] = x * gens[g]
        let mut right: Vec<u16> = Vec::new();
        let mut parent: Vec<(usize, usize)> = vec![(0, 0)];
        let mut i = 0;
        while i < elems.len() {
            for (g, s) in gens.iter().enumerate() {
                let y = mul(&elems[i], s);
                let j = match index.get(&y) {
                    Some(&j) => j,
                    None => {
                        let j = elems.len();
                        if j >= cap {
                            return Err(GroupError::Capacity {
                                what: "group order",
                                limit: cap,
                            });
                        }
                        index.insert(y.clone(), j);
                        elems.push(y);
                        parent.push((i, g));
                        j
                    }
                };
                right.push(j as u16);
            }
            i += 1;
        }
        let n = elems.len();
        let mut mul_t = vec![0u16; n * n];
        for a in 0..n {
            mul_t[a * n] = a as u16;
            for b in 1..n {
                let (pb, g) = parent[b];
                let ap = mul_t[a * n + pb] as usize;
                mul_t[a * n + b] = right[ap * k + g];
            }
        }
        let gen_idx: Vec<usize> = gens.iter().map(|s| index[s]).collect();
        Ok((FiniteGroup::from_table(n, mul_t, gen_idx), elems))
    }

    fn from_table(n: usize, mul: Vec<u16>, gens: Vec<usize>) -> FiniteGroup {
        let mut inv = vec![0u16; n];
        for a in 0..n {
            let row = &mul[a * n..(a + 1) * n];
            inv[a] = row.iter().position(|&x| x == 0).expect("group has inverses") as u16;
        }
        let mut g = FiniteGroup {
            order: n,
            mul,
            inv,
            gens,
            elem_order: Vec::new(),
            perms: None,
        };
        g.elem_order = (0..n).map(|x| g.compute_order(x)).collect();
        g
    }

    /// Group generated by permutations of a common degree.
    pub fn from_perms(gens: &[Perm], cap: usize) -> Result<FiniteGroup, GroupError> {
        let degree = gens.first().map_or(1, Perm::degree);
        if gens.iter().any(|p| p.degree() != degree) {
            return Err(GroupError::Parse {
                line: 0,
                message: "generators of different degrees".into(),
            });
        }
        let (mut g, elems) = FiniteGroup::from_closure(Perm::identity(degree), gens, |a, b| a.then(b), cap)?;
        g.perms = Some(elems);
        Ok(g)
    }

    /// Parses cycle-notation generators and builds their group.
    pub fn build(generators: &[&str], degree: usize) -> Result<FiniteGroup, GroupError> {
        let perms = generators
            .iter()
            .map(|s| Perm::parse(s, degree))
            .collect::<Result<Vec<_>, _>>()?;
        FiniteGroup::from_perms(&perms, DEFAULT_ORDER_CAP)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    pub fn perms(&self) -> Option<&[Perm]> {
        self.perms.as_deref()
    }

    pub fn perm(&self, x: usize) -> Option<&Perm> {
        self.perms.as_ref().map(|p| &p[x])
    }

    /// Cycle notation of `x` when permutations are known, else `g<index>`.
    pub fn label(&self, x: usize) -> String {
        match self.perm(x) {
            Some(p) => p.to_string(),
            None => format!("g{x}"),
        }
    }

    #[inline]
    pub fn elem_order(&self, x: usize) -> u32 {
        self.elem_order[x]
    }

    fn compute_order(&self, x: usize) -> u32 {
        let mut y = x;
        let mut k = 1;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn pow(&self, x: usize, e: i64) -> usize {
        let m = self.elem_order(x) as i64;
        let mut e = e.rem_euclid(m);
        let mut base = x;
        let mut y = 0;
        while e > 0 {
            if e & 1 == 1 {
                y = self.mul(y, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        y
    }

    /// `g x g^-1`.
    #[inline]
    pub fn conj(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// `a b a^-1 b^-1`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn product(&self, xs: &[usize]) -> usize {
        xs.iter().fold(0, |acc, &x| self.mul(acc, x))
    }

    pub fn is_abelian(&self) -> bool {
        self.gens
            .iter()
            .all(|&a| self.gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Exhaustive check of the group axioms on the table.
    pub fn check_axioms(&self) -> bool {
        let n = self.order;
        let ident = (0..n).all(|a| self.mul(0, a) == a && self.mul(a, 0) == a);
        let invs = (0..n).all(|a| self.mul(a, self.inv(a)) == 0 && self.mul(self.inv(a), a) == 0);
        let assoc = (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = self.mul(a, b);
                (0..n).all(|c| self.mul(ab, c) == self.mul(a, self.mul(b, c)))
            })
        });
        ident && invs && assoc && self.closure(&self.gens).order() == n
    }

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Subgroup {
        let mut sub = Subgroup::trivial(self.order);
        for &g in gens {
            if !sub.contains(g) {
                self.extend_closure(&mut sub, g);
            }
        }
        sub
    }

    /// Enlarges `sub` to `<sub, g>`.
    pub fn extend_closure(&self, sub: &mut Subgroup, g: usize) {
        if sub.contains(g) {
            return;
        }
        sub.gens.push(g);
        let gens = sub.gens.clone();
        let mut i = 0;
        while i < sub.elements.len() {
            let x = sub.elements[i];
            for &s in &gens {
                let y = self.mul(x, s);
                if !sub.member[y] {
                    sub.member.set(y, true);
                    sub.elements.push(y);
                }
            }
            i += 1;
        }
        sub.elements.sort_unstable();
    }

    /// Smallest normal subgroup containing `gens`.
    pub fn normal_closure(&self, gens: &[usize]) -> Subgroup {
        let mut sub = self.closure(gens);
        loop {
            let mut grew = false;
            for h in sub.gens.clone() {
                for &g in &self.gens {
                    let c = self.conj(h, g);
                    if !sub.contains(c) {
                        self.extend_closure(&mut sub, c);
                        grew = true;
                    }
                }
            }
            if !grew {
                return sub;
            }
        }
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let comms: Vec<usize> = self
            .gens
            .iter()
            .flat_map(|&a| self.gens.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.commutator(a, b))
            .collect();
        self.normal_closure(&comms)
    }

    pub fn center(&self) -> Subgroup {
        let elems: Vec<usize> = (0..self.order)
            .filter(|&z| self.gens.iter().all(|&g| self.mul(z, g) == self.mul(g, z)))
            .collect();
        Subgroup::from_elements(self.order, elems)
    }

    pub fn is_normal(&self, sub: &Subgroup) -> bool {
        sub.elements
            .iter()
            .all(|&h| self.gens.iter().all(|&g| sub.contains(self.conj(h, g))))
    }

    pub fn class_structure(&self) -> ClassStructure {
        let n = self.order;
        let mut class_of = vec![u32::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            if class_of[x] != u32::MAX {
                continue;
            }
            let id = classes.len() as u32;
            let mut members = vec![x];
            class_of[x] = id;
            let mut i = 0;
            while i < members.len() {
                let y = members[i];
                for &g in &self.gens {
                    let z = self.conj(y, g);
                    if class_of[z] == u32::MAX {
                        class_of[z] = id;
                        members.push(z);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            classes.push(members);
        }
        ClassStructure {
            order: n,
            class_of,
            classes,
        }
    }

    /// Kernels of the surjections onto the group of order 2.
    pub fn index_two_subgroups(&self) -> Vec<Subgroup> {
        let n = self.order;
        if !n.is_multiple_of(2) {
            return Vec::new();
        }
        let k = self.gens.len();
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for mask in 1u64..(1u64 << k) {
            if let Some(sign) = self.sign_map(|g| (mask >> g) & 1 == 1) {
                let elems: Vec<usize> = (0..n).filter(|&x| !sign[x]).collect();
                if elems.len() * 2 == n && seen.insert(elems.clone()) {
                    out.push(Subgroup::from_elements(n, elems));
                }
            }
        }
        out.sort_by(|a, b| a.elements.cmp(&b.elements));
        out
    }

    /// Extends an assignment generator -> Z2 to a homomorphism, if possible.
    fn sign_map(&self, odd: impl Fn(usize) -> bool) -> Option<Vec<bool>> {
        let n = self.order;
        let mut val: Vec<Option<bool>> = vec![None; n];
        val[0] = Some(false);
        let mut queue = vec![0usize];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            let vx = val[x].expect("visited");
            for (gi, &g) in self.gens.iter().enumerate() {
                let y = self.mul(x, g);
                let vy = vx ^ odd(gi);
                match val[y] {
                    None => {
                        val[y] = Some(vy);
                        queue.push(y);
                    }
                    Some(v) if v != vy => return None,
                    _ => {}
                }
            }
            i += 1;
        }
        Some(val.into_iter().map(|v| v.expect("generated")).collect())
    }

    /// Invariant factors of the abelianization.
    pub fn abelian_invariants(&self) -> Vec<u64> {
        let d = self.derived_subgroup();
        abelian_quotient_invariants(self, &d)
    }

    /// A generating set built greedily from `candidates`, each element
    /// enlarging the subgroup generated so far.
    pub fn irredundant_generators(&self, candidates: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut sub = Subgroup::trivial(self.order);
        let mut out = Vec::new();
        for c in candidates {
            if sub.order() == self.order {
                break;
            }
            if !sub.contains(c) {
                self.extend_closure(&mut sub, c);
                out.push(c);
            }
        }
        out
    }

    /// The subgroup as a group in its own right, generated by an
    /// irredundant subset of its elements taken in index order. Returns the
    /// group and the index in `self` of each of its elements.
    pub fn subgroup_group(&self, sub: &Subgroup) -> (FiniteGroup, Vec<usize>) {
        let gens = self.irredundant_generators(sub.elements.iter().copied());
        self.generated_group(&gens)
    }

    /// `<gens>` as a group on its own indices, with the embedding.
    pub fn generated_group(&self, gens: &[usize]) -> (FiniteGroup, Vec<usize>) {
        let (mut h, elems) = FiniteGroup::from_closure(0usize, gens, |&a, &b| self.mul(a, b), self.order + 1)
            .expect("subgroup order bounded by group order");
        if let Some(p) = &self.perms {
            h.perms = Some(elems.iter().map(|&x| p[x].clone()).collect());
        }
        (h, elems)
    }

    /// Number of `y` with `y^2 = x`, for every `x`.
    pub fn square_root_counts(&self) -> Vec<u32> {
        let mut c = vec![0u32; self.order];
        for y in 0..self.order {
            c[self.mul(y, y)] += 1;
        }
        c
    }

    /// Regular permutation representation (right multiplication).
    pub fn regular_perms(&self, xs: &[usize]) -> Vec<Perm> {
        xs.iter()
            .map(|&x| Perm((0..self.order).map(|y| self.mul(y, x) as u16).collect()))
            .collect()
    }
}

/// Invariant factors of `G/N` for a normal subgroup `N` with abelian
/// quotient, from the sizes of its `p^k`-torsion subgroups.
pub fn abelian_quotient_invariants(g: &FiniteGroup, n: &Subgroup) -> Vec<u64> {
    let q = (g.order() / n.order()) as u64;
    let mut per_prime: Vec<Vec<u64>> = Vec::new();
    for p in prime_factors(q) {
        // ranks[k] = log_p |{x : x^(p^k) in N}| - log_p |N|
        let mut ranks = vec![0u32];
        let mut pk = 1u64;
        loop {
            pk *= p;
            let count = (0..g.order()).filter(|&x| n.contains(g.pow(x, pk as i64))).count() / n.order();
            let r = ilog(count as u64, p);
            if r == *ranks.last().expect("nonempty") {
                break;
            }
            ranks.push(r);
        }
        // number of cyclic factors of order >= p^k is ranks[k] - ranks[k-1]
        let at_least: Vec<u32> = (1..ranks.len()).map(|k| ranks[k] - ranks[k - 1]).collect();
        let mut powers = Vec::new();
        for k in 0..at_least.len() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..at_least[k] - next {
                powers.push(p.pow(k as u32 + 1));
            }
        }
        powers.sort_unstable_by(|a, b| b.cmp(a));
        per_prime.push(powers);
    }
    let len = per_prime.iter().map(Vec::len).max().unwrap_or(0);
    let mut out: Vec<u64> = (0..len)
        .map(|i| per_prime.iter().map(|v| v.get(i).copied().unwrap_or(1)).product())
        .collect();
    out.reverse();
    out
}

fn ilog(mut x: u64, p: u64) -> u32 {
    let mut r = 0;
    while x > 1 {
        debug_assert_eq!(x % p, 0);
        x /= p;
        r += 1;
    }
    r
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A subgroup as a sorted element list with a membership bitset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    elements: Vec<usize>,
    member: BitVec,
    /// Generators the closure was built from.
    gens: Vec<usize>,
}

impl Subgroup {
    pub fn trivial(group_order: usize) -> Self {
        let mut member = BitVec::repeat(false, group_order);
        member.set(0, true);
        Subgroup {
            elements: vec![0],
            member,
            gens: Vec::new(),
        }
    }

    pub fn from_elements(group_order: usize, mut elements: Vec<usize>) -> Self {
        elements.sort_unstable();
        let mut member = BitVec::repeat(false, group_order);
        for &x in &elements {
            member.set(x, true);
        }
        Subgroup {
            gens: elements.clone(),
            elements,
            member,
        }
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.member[x]
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }
}

#[derive(Clone, Debug)]
pub struct ClassStructure {
    order: usize,
    class_of: Vec<u32>,
    classes: Vec<Vec<usize>>,
}

impl ClassStructure {
    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x] as usize
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_size(&self, x: usize) -> usize {
        self.classes[self.class_of(x)].len()
    }

    pub fn centralizer_order(&self, x: usize) -> usize {
        self.order / self.class_size(x)
    }

    pub fn conjugate(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    /// Smallest element of each class, in class order.
    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym3() -> FiniteGroup {
        FiniteGroup::build(&["(1 2 3)", "(1 2)"], 3).unwrap()
    }

    #[test]
    fn build_small_groups() {
        let g = FiniteGroup::build(&["(1 2)"], 2).unwrap();
        assert_eq!(g.order(), 2);
        let s3 = sym3();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.class_structure().classes().len(), 3);
        assert!(s3.check_axioms());
        let d4z2 = FiniteGroup::build(&["(1 2 3 4)", "(1 3)", "(5 6)"], 6).unwrap();
        assert_eq!(d4z2.order(), 16);
        assert!(d4z2.check_axioms());
    }

    #[test]
    fn capacity_error() {
        let perms = vec![
            Perm::parse("(1 2 3 4 5 6 7)", 7).unwrap(),
            Perm::parse("(1 2)", 7).unwrap(),
        ];
        assert!(matches!(
            FiniteGroup::from_perms(&perms, 100),
            Err(GroupError::Capacity { .. })
        ));
    }

    #[test]
    fn element_order_is_breadth_first() {
        let g = FiniteGroup::build(&["(1 2 3 4)"], 4).unwrap();
        let p = g.perms().unwrap();
        assert!(p[0].is_identity());
        assert_eq!(p[1].to_string(), "(1 2 3 4)");
        assert_eq!(p[2].to_string(), "(1 3)(2 4)");
        assert_eq!(g.generators(), &[1]);
    }

    #[test]
    fn classes() {
        let z4 = FiniteGroup::build(&["(1 2 3 4)"], 4).unwrap();
        assert_eq!(z4.class_structure().classes().len(), 4);
        let mut sizes: Vec<usize> = sym3().class_structure().classes().iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
        let d4 = FiniteGroup::build(&["(1 2 3 4)", "(1 3)"], 4).unwrap();
        let cs = d4.class_structure();
        let mut sizes: Vec<usize> = cs.classes().iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 2, 2, 2]);
        for x in 0..8 {
            assert_eq!(cs.class_size(x) * cs.centralizer_order(x), 8);
        }
    }

    #[test]
    fn index_two() {
        let z4 = FiniteGroup::build(&["(1 2 3 4)"], 4).unwrap();
        assert_eq!(z4.index_two_subgroups().len(), 1);
        let v4 = FiniteGroup::build(&["(1 2)", "(3 4)"], 4).unwrap();
        assert_eq!(v4.index_two_subgroups().len(), 3);
        let s3 = sym3();
        let subs = s3.index_two_subgroups();
        assert_eq!(subs.len(), 1);
        assert!(subs[0].elements().iter().all(|&x| s3.elem_order(x) != 2));
        let z3 = FiniteGroup::build(&["(1 2 3)"], 3).unwrap();
        assert!(z3.index_two_subgroups().is_empty());
    }

    #[test]
    fn abelianization() {
        let z6 = FiniteGroup::build(&["(1 2 3 4 5 6)"], 6).unwrap();
        assert_eq!(z6.abelian_invariants(), vec![6]);
        assert_eq!(sym3().abelian_invariants(), vec![2]);
        let d4z2 = FiniteGroup::build(&["(1 2 3 4)", "(1 3)", "(5 6)"], 6).unwrap();
        assert_eq!(d4z2.derived_subgroup().order(), 2);
        assert_eq!(d4z2.abelian_invariants(), vec![2, 2, 2]);
        let z2z4z3 = FiniteGroup::build(&["(1 2)", "(3 4 5 6)", "(7 8 9)"], 9).unwrap();
        assert_eq!(z2z4z3.abelian_invariants(), vec![2, 12]);
        let trivial = FiniteGroup::build(&["()"], 1).unwrap();
        assert!(trivial.abelian_invariants().is_empty());
    }

    #[test]
    fn subgroup_as_group() {
        let d4 = FiniteGroup::build(&["(1 2 3 4)", "(1 3)"], 4).unwrap();
        for sub in d4.index_two_subgroups() {
            let (h, emb) = d4.subgroup_group(&sub);
            assert_eq!(h.order(), 4);
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(emb[h.mul(a, b)], d4.mul(emb[a], emb[b]));
                }
            }
        }
    }
}
