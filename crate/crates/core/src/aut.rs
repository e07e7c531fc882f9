//! Automorphism groups and isomorphisms by backtracking over images of a
//! base of generators.
//!
//! A homomorphism is fixed by the images of a generating tuple
//! `(b_1, .., b_k)`. Candidates for the image of `b_j` are restricted to
//! elements with the same fingerprint (order, class size, number of square
//! roots), and every partial assignment is checked to be an injective
//! homomorphism on `<b_1, .., b_j>` before going deeper.
//!
//! The automorphism group is stored as a stabilizer chain: level `j` holds
//! the orbit of `b_j` under the automorphisms fixing `b_1 .. b_{j-1}` and
//! one automorphism per orbit point.

use std::collections::{HashMap, HashSet};

use crate::group::{FiniteGroup, Subgroup};
use crate::GroupError;

pub const DEFAULT_AUT_ORDER_CAP: usize = 512;

/// An automorphism as the image of every element index.
pub type Automorphism = Vec<u16>;

type Fingerprint = (u32, u32, u32);

fn fingerprints(g: &FiniteGroup) -> Vec<Fingerprint> {
    let cs = g.class_structure();
    let roots = g.square_root_counts();
    (0..g.order())
        .map(|x| (g.elem_order(x), cs.class_size(x) as u32, roots[x]))
        .collect()
}

/// Short generating tuple: each step takes the element enlarging the
/// subgroup most, preferring rare fingerprints among those.
fn choose_base(g: &FiniteGroup, fp: &[Fingerprint]) -> Vec<usize> {
    let mut freq: HashMap<Fingerprint, usize> = HashMap::new();
    for f in fp {
        *freq.entry(*f).or_default() += 1;
    }
    let mut base = Vec::new();
    let mut sub = Subgroup::trivial(g.order());
    while sub.order() < g.order() {
        let mut best: Option<(usize, usize, Subgroup)> = None;
        for x in 1..g.order() {
            if sub.contains(x) {
                continue;
            }
            let mut s = sub.clone();
            g.extend_closure(&mut s, x);
            let better = match &best {
                None => true,
                Some((bx, _, bs)) => {
                    s.order() > bs.order() || (s.order() == bs.order() && freq[&fp[x]] < freq[&fp[*bx]])
                }
            };
            if better {
                best = Some((x, s.order(), s));
            }
        }
        let (x, _, s) = best.expect("a proper subgroup misses some element");
        base.push(x);
        sub = s;
    }
    base
}

/// Backtracking search for homomorphisms `src -> dst` extending fixed
/// images of a base.
struct Search<'a> {
    src: &'a FiniteGroup,
    dst: &'a FiniteGroup,
    base: Vec<usize>,
    candidates: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(src: &'a FiniteGroup, dst: &'a FiniteGroup) -> Option<Self> {
        if src.order() != dst.order() {
            return None;
        }
        let fs = fingerprints(src);
        let fd = fingerprints(dst);
        let mut a = fs.clone();
        let mut b = fd.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return None;
        }
        let base = choose_base(src, &fs);
        let candidates = base
            .iter()
            .map(|&b| (0..dst.order()).filter(|&y| fd[y] == fs[b]).collect())
            .collect();
        Some(Search {
            src,
            dst,
            base,
            candidates,
        })
    }

    /// Extends the images of `base[..j]` over `<base[..j]>`. Returns the
    /// partial map, or `None` if it is not an injective homomorphism.
    fn partial_map(&self, images: &[usize]) -> Option<Vec<u32>> {
        const NONE: u32 = u32::MAX;
        let j = images.len();
        let mut map = vec![NONE; self.src.order()];
        let mut used = vec![false; self.dst.order()];
        map[0] = 0;
        used[0] = true;
        let mut queue = vec![0usize];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            let fx = map[x] as usize;
            for k in 0..j {
                let y = self.src.mul(x, self.base[k]);
                let fy = self.dst.mul(fx, images[k]);
                if map[y] == NONE {
                    if used[fy] {
                        return None;
                    }
                    used[fy] = true;
                    map[y] = fy as u32;
                    queue.push(y);
                } else if map[y] as usize != fy {
                    return None;
                }
            }
            i += 1;
        }
        Some(map)
    }

    /// Depth-first search from a fixed prefix of images. Calls `found` on
    /// every complete isomorphism; stops when it returns `false`.
    fn run(&self, prefix: &mut Vec<usize>, found: &mut dyn FnMut(Vec<u16>) -> bool) -> bool {
        let j = prefix.len();
        if j == self.base.len() {
            let map = self.partial_map(prefix).expect("checked on the way down");
            return found(map.into_iter().map(|x| x as u16).collect());
        }
        for &y in &self.candidates[j] {
            prefix.push(y);
            let ok = self.partial_map(prefix).is_some();
            let go_on = if ok { self.run(prefix, found) } else { true };
            prefix.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    fn first(&self, prefix: &mut Vec<usize>) -> Option<Vec<u16>> {
        let mut out = None;
        self.run(prefix, &mut |m| {
            out = Some(m);
            false
        });
        out
    }
}

/// An isomorphism `g -> h` as images of the element indices of `g`.
pub fn find_isomorphism(g: &FiniteGroup, h: &FiniteGroup) -> Option<Vec<u16>> {
    let s = Search::new(g, h)?;
    s.first(&mut Vec::new())
}

pub fn are_isomorphic(g: &FiniteGroup, h: &FiniteGroup) -> bool {
    find_isomorphism(g, h).is_some()
}

#[derive(Clone, Debug)]
struct Level {
    orbit: Vec<usize>,
    /// `transversal[i]` maps the base point of this level to `orbit[i]` and
    /// fixes the earlier base points.
    transversal: Vec<Automorphism>,
}

#[derive(Clone, Debug)]
pub struct AutomorphismGroup {
    base: Vec<usize>,
    levels: Vec<Level>,
}

fn compose(a: &Automorphism, b: &Automorphism) -> Automorphism {
    // a after b
    b.iter().map(|&x| a[x as usize]).collect()
}

impl AutomorphismGroup {
    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    /// Strong generating set: all non-identity transversal elements.
    pub fn generators(&self) -> Vec<&Automorphism> {
        self.levels.iter().flat_map(|l| l.transversal.iter().skip(1)).collect()
    }

    /// Every automorphism, refusing beyond `limit`.
    pub fn elements(&self, limit: usize) -> Result<Vec<Automorphism>, GroupError> {
        if self.order() > limit as u128 {
            return Err(GroupError::Capacity {
                what: "automorphism group order",
                limit,
            });
        }
        let n = self.levels.first().map_or(0, |l| l.transversal[0].len());
        let mut out: Vec<Automorphism> = vec![(0..n as u16).collect()];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for t in &level.transversal {
                for a in &out {
                    next.push(compose(t, a));
                }
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }
}

/// Stabilizer chain of `Aut(g)`. Groups larger than `order_cap` are refused.
pub fn automorphism_group(g: &FiniteGroup, order_cap: usize) -> Result<AutomorphismGroup, GroupError> {
    if g.order() > order_cap {
        return Err(GroupError::Capacity {
            what: "group order for automorphisms",
            limit: order_cap,
        });
    }
    let s = Search::new(g, g).expect("a group matches itself");
    let k = s.base.len();
    let identity: Automorphism = (0..g.order() as u16).collect();
    let mut levels: Vec<Level> = vec![
        Level {
            orbit: Vec::new(),
            transversal: Vec::new(),
        };
        k
    ];
    // bottom-up: level j is acted on by everything found at levels >= j
    for j in (0..k).rev() {
        let b = s.base[j];
        let mut orbit = vec![b];
        let mut trans = vec![identity.clone()];
        let mut in_orbit: HashSet<usize> = HashSet::from([b]);
        let mut gens: Vec<Automorphism> = levels[j + 1..]
            .iter()
            .flat_map(|l| l.transversal.iter().skip(1).cloned())
            .collect();
        let close = |orbit: &mut Vec<usize>,
                     trans: &mut Vec<Automorphism>,
                     in_orbit: &mut HashSet<usize>,
                     gens: &[Automorphism]| {
            let mut i = 0;
            while i < orbit.len() {
                for a in gens {
                    let y = a[orbit[i]] as usize;
                    if in_orbit.insert(y) {
                        let t = compose(a, &trans[i]);
                        orbit.push(y);
                        trans.push(t);
                    }
                }
                i += 1;
            }
        };
        close(&mut orbit, &mut trans, &mut in_orbit, &gens);
        for &y in &s.candidates[j] {
            if in_orbit.contains(&y) {
                continue;
            }
            let mut prefix: Vec<usize> = s.base[..j].to_vec();
            prefix.push(y);
            if s.partial_map(&prefix).is_none() {
                continue;
            }
            if let Some(a) = s.first(&mut prefix) {
                gens.push(a.clone());
                in_orbit.insert(y);
                orbit.push(y);
                trans.push(a);
                close(&mut orbit, &mut trans, &mut in_orbit, &gens);
            }
        }
        levels[j] = Level {
            orbit,
            transversal: trans,
        };
    }
    Ok(AutomorphismGroup {
        base: s.base.clone(),
        levels,
    })
}

fn aut_order(a: &Automorphism) -> usize {
    let mut x = a.clone();
    let mut k = 1;
    while x.iter().enumerate().any(|(i, &v)| i != v as usize) {
        x = compose(a, &x);
        k += 1;
    }
    k
}

/// One representative per `Aut(g)`-conjugacy class of automorphisms of
/// order exactly `p`, followed by the identity.
pub fn automorphism_conjclasses_of_order(
    g: &FiniteGroup,
    p: usize,
    order_cap: usize,
    element_limit: usize,
) -> Result<Vec<Automorphism>, GroupError> {
    let aut = automorphism_group(g, order_cap)?;
    let all = aut.elements(element_limit)?;
    let gens: Vec<Automorphism> = aut.generators().into_iter().cloned().collect();
    let inverse = |a: &Automorphism| {
        let mut v = vec![0u16; a.len()];
        for (i, &x) in a.iter().enumerate() {
            v[x as usize] = i as u16;
        }
        v
    };
    let gen_pairs: Vec<(Automorphism, Automorphism)> = gens.iter().map(|s| (s.clone(), inverse(s))).collect();
    let mut seen: HashSet<Automorphism> = HashSet::new();
    let mut reps = Vec::new();
    for a in all {
        if seen.contains(&a) || aut_order(&a) != p {
            continue;
        }
        reps.push(a.clone());
        seen.insert(a.clone());
        let mut queue = vec![a];
        while let Some(x) = queue.pop() {
            for (s, si) in &gen_pairs {
                let c = compose(s, &compose(&x, si));
                if seen.insert(c.clone()) {
                    queue.push(c);
                }
            }
        }
    }
    reps.push((0..g.order() as u16).collect());
    Ok(reps)
}

/// Inner automorphism `x -> h x h^-1`.
pub fn inner(g: &FiniteGroup, h: usize) -> Automorphism {
    (0..g.order()).map(|x| g.conj(x, h) as u16).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(gens: &[&str], deg: usize) -> FiniteGroup {
        FiniteGroup::build(gens, deg).unwrap()
    }

    fn brute_force_aut_count(g: &FiniteGroup) -> usize {
        // images of the generators over all tuples of elements
        let gens = g.generators().to_vec();
        let n = g.order();
        let mut count = 0;
        let mut idx = vec![0usize; gens.len()];
        loop {
            // build the map by words and check it is a bijective hom
            let mut map = vec![usize::MAX; n];
            map[0] = 0;
            let mut q = vec![0];
            let mut ok = true;
            let mut i = 0;
            while ok && i < q.len() {
                let x = q[i];
                for (k, &s) in gens.iter().enumerate() {
                    let y = g.mul(x, s);
                    let fy = g.mul(map[x], idx[k]);
                    if map[y] == usize::MAX {
                        map[y] = fy;
                        q.push(y);
                    } else if map[y] != fy {
                        ok = false;
                    }
                }
                i += 1;
            }
            if ok {
                let mut seen = vec![false; n];
                ok = map.iter().all(|&v| !std::mem::replace(&mut seen[v], true));
            }
            if ok {
                count += 1;
            }
            let mut d = 0;
            loop {
                if d == idx.len() {
                    return count;
                }
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    #[test]
    fn small_automorphism_groups() {
        let v4 = grp(&["(1 2)", "(3 4)"], 4);
        assert_eq!(automorphism_group(&v4, 512).unwrap().order(), 6);
        let z4 = grp(&["(1 2 3 4)"], 4);
        assert_eq!(automorphism_group(&z4, 512).unwrap().order(), 2);
        let d4 = grp(&["(1 2 3 4)", "(1 3)"], 4);
        let a = automorphism_group(&d4, 512).unwrap();
        assert_eq!(a.order(), 8);
        assert_eq!(a.elements(100).unwrap().len(), 8);
        assert_eq!(brute_force_aut_count(&d4), 8);
    }

    #[test]
    fn matches_brute_force() {
        for (gens, deg) in [
            (vec!["(1 2 3)", "(1 2)"], 3),
            (vec!["(1 2 3 4)", "(1 3)", "(5 6)"], 6),
            (vec!["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"], 8),
            (vec!["(1 2)", "(3 4)", "(5 6)"], 6),
            (vec!["(1 2 3 4 5 6 7 8)", "(2 8)(3 7)(4 6)"], 8),
        ] {
            let g = grp(&gens, deg);
            let a = automorphism_group(&g, 512).unwrap();
            assert_eq!(a.order() as usize, brute_force_aut_count(&g), "{gens:?}");
            let elems = a.elements(100_000).unwrap();
            let set: HashSet<_> = elems.iter().cloned().collect();
            assert_eq!(set.len(), elems.len());
            for x in &elems {
                for y in a.generators() {
                    assert!(set.contains(&compose(x, y)));
                }
            }
        }
    }

    #[test]
    fn isomorphism_detection() {
        let q8a = grp(&["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"], 8);
        let d4 = grp(&["(1 2 3 4)", "(1 3)"], 4);
        let z8 = grp(&["(1 2 3 4 5 6 7 8)"], 8);
        let z2z4 = grp(&["(1 2)", "(3 4 5 6)"], 6);
        assert!(!are_isomorphic(&q8a, &d4));
        assert!(!are_isomorphic(&z8, &z2z4));
        let d4b = grp(&["(1 3)(2 4)", "(1 2)(3 4)", "(1 3)"], 4);
        let iso = find_isomorphism(&d4, &d4b).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(iso[d4.mul(a, b)] as usize, d4b.mul(iso[a] as usize, iso[b] as usize));
            }
        }
    }

    #[test]
    fn conjugacy_classes_of_automorphisms() {
        let z3 = grp(&["(1 2 3)"], 3);
        assert_eq!(automorphism_conjclasses_of_order(&z3, 2, 512, 1000).unwrap().len(), 2);
        let v4 = grp(&["(1 2)", "(3 4)"], 4);
        let reps = automorphism_conjclasses_of_order(&v4, 3, 512, 1000).unwrap();
        assert_eq!(reps.len(), 2);
        assert_eq!(aut_order(&reps[0]), 3);
        let z5 = grp(&["(1 2 3 4 5)"], 5);
        assert_eq!(automorphism_conjclasses_of_order(&z5, 2, 512, 1000).unwrap().len(), 2);
    }

    #[test]
    fn inner_automorphisms_divide_order() {
        let d8 = grp(&["(1 2 3 4 5 6 7 8)", "(2 8)(3 7)(4 6)"], 8);
        let a = automorphism_group(&d8, 512).unwrap();
        let z = d8.center().order();
        assert_eq!(a.order() as usize % (d8.order() / z), 0);
        let set: HashSet<_> = a.elements(1000).unwrap().into_iter().collect();
        for h in 0..d8.order() {
            assert!(set.contains(&inner(&d8, h)));
        }
    }
}
