//! Equivalence classes of spherical systems under Hurwitz moves and
//! automorphisms of `G`.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::aut::{automorphism_group, Automorphism, DEFAULT_AUT_ORDER_CAP};
use crate::group::{FiniteGroup, Subgroup};
use crate::mixed::MixedStructure;
use crate::spherical::SphericalSystem;
use crate::CoreError;

pub const DEFAULT_ORBIT_CAP: usize = 10_000_000;

/// `(.., h_i, h_{i+1}, ..) -> (.., h_{i+1}, h_{i+1}^-1 h_i h_{i+1}, ..)`,
/// with `i` counted from 1.
pub fn hurwitz_move(g: &FiniteGroup, tuple: &[usize], i: usize) -> Result<Vec<usize>, CoreError> {
    if i == 0 || i >= tuple.len() {
        return Err(CoreError::MoveOutOfRange { i, len: tuple.len() });
    }
    let mut t = tuple.to_vec();
    let (a, b) = (tuple[i - 1], tuple[i]);
    t[i - 1] = b;
    t[i] = g.conj(a, g.inv(b));
    Ok(t)
}

/// Inverse of [`hurwitz_move`]: `(.., h_i, h_{i+1}, ..) -> (.., h_i h_{i+1} h_i^-1, h_i, ..)`.
pub fn hurwitz_move_inverse(g: &FiniteGroup, tuple: &[usize], i: usize) -> Result<Vec<usize>, CoreError> {
    if i == 0 || i >= tuple.len() {
        return Err(CoreError::MoveOutOfRange { i, len: tuple.len() });
    }
    let mut t = tuple.to_vec();
    let (a, b) = (tuple[i - 1], tuple[i]);
    t[i - 1] = g.conj(b, a);
    t[i] = a;
    Ok(t)
}

/// A member of an orbit: the index-2 subgroup (as its structure) and the
/// tuple in `G0` indices of that structure.
#[derive(Clone, Debug)]
pub struct OrbitMember {
    pub structure: Arc<MixedStructure>,
    pub system: SphericalSystem,
}

#[derive(Clone, Debug)]
pub struct OrbitClass {
    /// Lexicographically least member whose orders are nondecreasing.
    pub representative: OrbitMember,
    /// Another member with the same `G0` and nondecreasing orders, if any.
    pub witness: Option<OrbitMember>,
    pub size: usize,
    /// Sorted hashes of all members.
    pub member_hashes: Vec<u64>,
}

/// Orbit state: subgroup id followed by the tuple in `G` indices.
type State = Vec<u16>;
/// Orbit key of a state: its subgroup ids and tuple.
type Key<'a> = (&'a [usize], &'a [u16]);

struct Pools {
    g: Arc<FiniteGroup>,
    /// index-2 subgroups met so far, keyed by their sorted element list
    ids: HashMap<Vec<usize>, u16>,
    structures: Vec<Arc<MixedStructure>>,
}

impl Pools {
    fn id_of(&mut self, sub: &Subgroup) -> u16 {
        if let Some(&id) = self.ids.get(sub.elements()) {
            return id;
        }
        let mx = MixedStructure::new(self.g.clone(), sub.clone()).expect("automorphisms preserve unsplit subgroups");
        let id = self.structures.len() as u16;
        self.ids.insert(sub.elements().to_vec(), id);
        self.structures.push(Arc::new(mx));
        id
    }

    fn register(&mut self, mx: &MixedStructure) -> u16 {
        if let Some(&id) = self.ids.get(mx.g0_sub.elements()) {
            return id;
        }
        let id = self.structures.len() as u16;
        self.ids.insert(mx.g0_sub.elements().to_vec(), id);
        self.structures.push(Arc::new(mx.clone()));
        id
    }

    /// Sort key independent of discovery order.
    fn key<'a>(&'a self, s: &'a State) -> Key<'a> {
        (self.structures[s[0] as usize].g0_sub.elements(), &s[1..])
    }

    fn member(&self, s: &State, signature: &[u32]) -> OrbitMember {
        let mx = self.structures[s[0] as usize].clone();
        let tuple: Vec<usize> = s[1..].iter().map(|&x| mx.project[x as usize]).collect();
        let mut sig = signature.to_vec();
        sig.sort_unstable();
        OrbitMember {
            system: SphericalSystem {
                group: mx.g0.clone(),
                tuple,
                signature: sig,
            },
            structure: mx,
        }
    }
}

fn hash_state(key: &(&[usize], &[u16])) -> u64 {
    let mut h = DefaultHasher::new();
    key.hash(&mut h);
    h.finish()
}

/// The hash under which a system appears in [`OrbitClass::member_hashes`].
pub fn member_hash(mx: &MixedStructure, sys: &SphericalSystem) -> u64 {
    let tuple: Vec<u16> = sys.tuple.iter().map(|&h| mx.embed[h] as u16).collect();
    hash_state(&(mx.g0_sub.elements(), &tuple))
}

/// Orbits of `systems` (all living in `mx.g0`) under Hurwitz moves and
/// `Aut(G)`. Automorphisms that move `G0` carry systems into the pool of
/// the image subgroup; such pools are merged.
pub fn orbit_decompose(systems: &[SphericalSystem], mx: &MixedStructure) -> Result<Vec<OrbitClass>, CoreError> {
    let aut = automorphism_group(&mx.g, DEFAULT_AUT_ORDER_CAP)?;
    let gens: Vec<Automorphism> = aut.generators().into_iter().cloned().collect();
    orbit_decompose_with(systems, mx, &gens, DEFAULT_ORBIT_CAP)
}

pub fn orbit_decompose_with(
    systems: &[SphericalSystem],
    mx: &MixedStructure,
    aut_generators: &[Automorphism],
    cap: usize,
) -> Result<Vec<OrbitClass>, CoreError> {
    let g = mx.g.clone();
    let mut pools = Pools {
        g: g.clone(),
        ids: HashMap::new(),
        structures: Vec::new(),
    };
    let home = pools.register(mx);
    // (generator, subgroup id) -> id of the image subgroup
    let mut moved: HashMap<(usize, u16), u16> = HashMap::new();
    let mut seen: HashSet<State> = HashSet::new();
    let mut classes = Vec::new();
    let mut total = 0usize;
    for sys in systems {
        let mut seed: State = vec![home];
        seed.extend(sys.tuple.iter().map(|&h| mx.embed[h] as u16));
        if seen.contains(&seed) {
            continue;
        }
        let orders: Vec<u32> = sys.tuple.iter().map(|&h| mx.g0.elem_order(h)).collect();
        let mut members: Vec<State> = Vec::new();
        let mut queue = VecDeque::from([seed.clone()]);
        seen.insert(seed);
        while let Some(s) = queue.pop_front() {
            total += 1;
            if total > cap {
                return Err(CoreError::OrbitOverflow(cap));
            }
            let tuple: Vec<usize> = s[1..].iter().map(|&x| x as usize).collect();
            let mut next: Vec<State> = Vec::new();
            for i in 1..tuple.len() {
                for t in [hurwitz_move(&g, &tuple, i)?, hurwitz_move_inverse(&g, &tuple, i)?] {
                    debug_assert_eq!(g.product(&t), 0);
                    let mut n = vec![s[0]];
                    n.extend(t.iter().map(|&x| x as u16));
                    next.push(n);
                }
            }
            for (ai, a) in aut_generators.iter().enumerate() {
                let id = match moved.get(&(ai, s[0])) {
                    Some(&id) => id,
                    None => {
                        let src = &pools.structures[s[0] as usize];
                        let image: Vec<usize> = src.g0_sub.elements().iter().map(|&x| a[x] as usize).collect();
                        let id = pools.id_of(&Subgroup::from_elements(g.order(), image));
                        moved.insert((ai, s[0]), id);
                        id
                    }
                };
                let mut n = vec![id];
                n.extend(tuple.iter().map(|&x| a[x]));
                next.push(n);
            }
            for n in next {
                if seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
            members.push(s);
        }
        let key_orders = |s: &State| -> bool {
            let o: Vec<u32> = s[1..].iter().map(|&x| g.elem_order(x as usize)).collect();
            o.windows(2).all(|w| w[0] <= w[1])
        };
        let keyed: Vec<(Key, &State)> = members.iter().map(|s| (pools.key(s), s)).collect();
        let rep = keyed
            .iter()
            .filter(|(_, s)| key_orders(s))
            .min_by(|a, b| a.0.cmp(&b.0))
            .map(|(_, s)| (*s).clone())
            .expect("the seed has nondecreasing orders");
        // same G0 and ordering as the representative, so it is a system of
        // the same signature
        let witness = keyed
            .iter()
            .filter(|(_, s)| **s != rep && s[0] == rep[0] && key_orders(s))
            .min_by(|a, b| a.0.cmp(&b.0))
            .map(|(_, s)| pools.member(s, &orders));
        let mut member_hashes: Vec<u64> = keyed.iter().map(|(k, _)| hash_state(k)).collect();
        member_hashes.sort_unstable();
        classes.push(OrbitClass {
            representative: pools.member(&rep, &orders),
            witness,
            size: members.len(),
            member_hashes,
        });
    }
    classes.sort_by(|a, b| {
        let ka = (a.representative.structure.g0_sub.elements(), rep_tuple(a));
        let kb = (b.representative.structure.g0_sub.elements(), rep_tuple(b));
        ka.cmp(&kb)
    });
    Ok(classes)
}

fn rep_tuple(c: &OrbitClass) -> Vec<usize> {
    let m = &c.representative;
    m.system.tuple.iter().map(|&h| m.structure.embed[h]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed::mixed_structures;
    use crate::spherical::spherical_systems;

    fn grp(gens: &[&str], deg: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::build(gens, deg).unwrap())
    }

    #[test]
    fn moves() {
        let v4 = grp(&["(1 2)", "(3 4)"], 4);
        let (a, b) = (v4.generators()[0], v4.generators()[1]);
        assert_eq!(hurwitz_move(&v4, &[a, b], 1).unwrap(), vec![b, a]);
        assert!(hurwitz_move(&v4, &[a, b], 2).is_err());
        assert!(hurwitz_move(&v4, &[a, b], 0).is_err());

        let s3 = FiniteGroup::build(&["(1 2)", "(2 3)"], 3).unwrap();
        let find = |p: &str| (0..6).find(|&x| s3.perm(x).unwrap().to_string() == p).unwrap();
        let (x, y, z) = (find("(1 2)"), find("(2 3)"), find("(1 3)"));
        assert_eq!(hurwitz_move(&s3, &[x, y], 1).unwrap(), vec![y, z]);
        for i in 1..3 {
            let t = vec![x, y, z];
            let back = hurwitz_move(&s3, &hurwitz_move_inverse(&s3, &t, i).unwrap(), i).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn abelian_swap_is_one_orbit() {
        // Z4 x Z2 over Z2 x Z2
        let g = grp(&["(1 2 3 4)", "(5 6)"], 6);
        let mx = mixed_structures(&g).into_iter().next().unwrap();
        let sys = spherical_systems(&mx.g0, &[2, 2, 2, 2]);
        let orbits = orbit_decompose(&sys, &mx).unwrap();
        let total: usize = orbits.iter().map(|o| o.size).sum();
        assert!(total >= sys.len());
        // (a, b, a, b) and (b, a, b, a) together
        let s = &sys[0].tuple;
        let swapped = hurwitz_move(&mx.g0, &hurwitz_move(&mx.g0, s, 1).unwrap(), 3).unwrap();
        let holder = |t: &[usize]| {
            let sys = SphericalSystem {
                group: mx.g0.clone(),
                tuple: t.to_vec(),
                signature: vec![2; 4],
            };
            let h = member_hash(&mx, &sys);
            orbits.iter().position(|o| o.member_hashes.binary_search(&h).is_ok())
        };
        assert!(holder(s).is_some());
        assert_eq!(holder(s), holder(&swapped));
    }

    #[test]
    fn partition_is_input_order_independent() {
        let q8z2 = grp(&["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 6 4 8)", "(9 10)"], 10);
        for mx in mixed_structures(&q8z2) {
            let mut sys = spherical_systems(&mx.g0, &[2, 2, 2, 2, 2]);
            if sys.is_empty() {
                continue;
            }
            let a = orbit_decompose(&sys, &mx).unwrap();
            sys.reverse();
            let b = orbit_decompose(&sys, &mx).unwrap();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.member_hashes, y.member_hashes);
                assert_eq!(rep_tuple(x), rep_tuple(y));
                assert_eq!(x.size, x.member_hashes.len());
            }
            // pairwise disjoint
            let mut all: Vec<u64> = a.iter().flat_map(|o| o.member_hashes.clone()).collect();
            let n = all.len();
            all.sort_unstable();
            all.dedup();
            assert_eq!(all.len(), n);
        }
    }

    #[test]
    fn single_system() {
        let z8 = grp(&["(1 2 3 4 5 6 7 8)"], 8);
        let mx = &mixed_structures(&z8)[0];
        let h = (0..4).find(|&x| mx.g0.elem_order(x) == 4).unwrap();
        let sys = SphericalSystem {
            group: mx.g0.clone(),
            tuple: vec![h, mx.g0.inv(h)],
            signature: vec![4, 4],
        };
        let orbits = orbit_decompose(&[sys], mx).unwrap();
        assert_eq!(orbits.len(), 1);
        assert!(orbits[0].size >= 1);
    }
}
