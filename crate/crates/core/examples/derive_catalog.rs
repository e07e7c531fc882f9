//! Derives candidate groups for a catalog from first principles.
//!
//! For a signature `m` and a 2-power order `N`, every quotient of `T(m)` of
//! order `N` is reached from the trivial quotient by central extensions by
//! `Z2`: if `Q = T/K`, the quotients `T/M` with `M` of index 2 in `K` and
//! `K/M` central are the hyperplanes of `K / K^2 [K, T]`. Keeping the
//! quotients where every `c_i` has order exactly `m_i` gives all `G0` with a
//! spherical system of that signature. For each `G0` the unsplit
//! extensions `G` are built from pairs `(phi, tau)` with `phi^2 = inn(tau)`,
//! `phi(tau) = tau`.
//!
//! Each `G` found this way is run through the classification pipeline; the
//! groups that carry at least one record are written out as a catalog with
//! small faithful permutation representations.
//!
//! Usage: `cargo run --release -p qetale-core --example derive_catalog -- crates/core/data/groups.catalog`

use std::collections::{HashMap, HashSet};
use std::sync::Arc;
use std::time::Instant;

use qetale_core::aut::{are_isomorphic, automorphism_group, inner, Automorphism};
use qetale_core::catalog::{family, semidirect, CatalogEntry};
use qetale_core::pipeline::{run_on_groups, PipelineConfig};
use qetale_core::{FiniteGroup, Perm, Subgroup};
use qetale_fpgroup::{CosetTable, Presentation, SchreierRewriter, Word};

/// Dense vectors over F2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn zero(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    fn xor(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a ^= b;
        }
    }
}

/// Basis of `{f : f . r = 0 for every row r}`.
fn nullspace(rows: Vec<Bits>, n: usize) -> Vec<Bits> {
    let mut rows = rows;
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pr = rows[rank].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && r.get(col) {
                r.xor(&pr);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let is_pivot: HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !is_pivot.contains(c)) {
        let mut f = Bits::zero(n);
        f.flip(free);
        for (i, &pc) in pivots.iter().enumerate() {
            if rows[i].get(free) {
                f.flip(pc);
            }
        }
        basis.push(f);
    }
    basis
}

fn exponent_parity(w: &Word, n: usize) -> Bits {
    let mut b = Bits::zero(n);
    for &l in w.letters() {
        b.flip(l.unsigned_abs() as usize - 1);
    }
    b
}

/// A quotient of `T` as the regular action of the generators.
#[derive(Clone, Debug)]
struct Quotient {
    perms: Vec<Vec<u32>>,
}

impl Quotient {
    fn order(&self) -> usize {
        self.perms[0].len()
    }

    fn key(&self) -> Vec<Vec<u32>> {
        let mut t = CosetTable::from_permutations(self.order(), &self.perms);
        t.standardize();
        t.permutations()
    }

    /// All central extensions by `Z2` that are still quotients of `T`.
    fn lifts(&self, t: &Presentation) -> Vec<Quotient> {
        let n = self.order();
        let k = self.perms.len();
        let rw = SchreierRewriter::new(CosetTable::from_permutations(n, &self.perms));
        let m = rw.n_generators();
        let mut rows = Vec::new();
        for c in 0..n {
            for r in &t.relators {
                rows.push(exponent_parity(&rw.rewrite_from(c, r).0, m));
            }
        }
        for i in 0..m {
            let w = rw.generator_word(i);
            for g in 0..k {
                let x = Word::power(g, 1);
                let conj = x.concat(&w).concat(&x.inverse());
                let mut row = exponent_parity(&rw.rewrite(&conj).expect("normal subgroup"), m);
                row.flip(i);
                rows.push(row);
            }
        }
        let basis = nullspace(rows, m);
        // Schreier generator at each (coset, generator), if any
        let mut sgen = vec![None; n * k];
        for i in 0..m {
            let (c, g) = rw.pair(i);
            sgen[c * k + g] = Some(i);
        }
        let mut out = Vec::new();
        for mask in 1u64..(1 << basis.len()) {
            let mut f = Bits::zero(m);
            for (j, b) in basis.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    f.xor(b);
                }
            }
            let perms: Vec<Vec<u32>> = (0..k)
                .map(|g| {
                    let mut p = vec![0u32; 2 * n];
                    for c in 0..n {
                        let d = self.perms[g][c] as usize;
                        let bit = sgen[c * k + g].is_some_and(|i| f.get(i)) as usize;
                        for e in 0..2 {
                            p[2 * c + e] = (2 * d + (e ^ bit)) as u32;
                        }
                    }
                    p
                })
                .collect();
            out.push(Quotient { perms });
        }
        out
    }
}

fn perm_order(p: &[u32]) -> usize {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut l = 1usize;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x] as usize;
            len += 1;
        }
        l = num_lcm(l, len);
    }
    l
}

fn num_lcm(a: usize, b: usize) -> usize {
    let mut x = a;
    let mut y = b;
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// Every 2-power quotient of `T(sig)` of order `target` in which each
/// generator keeps its full order.
fn two_quotients(sig: &[u32], target: usize) -> Vec<Quotient> {
    let t = Presentation::polygonal(sig);
    let mut level = vec![Quotient {
        perms: vec![vec![0]; sig.len()],
    }];
    let mut order = 1;
    while order < target {
        let start = Instant::now();
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for q in &level {
            for l in q.lifts(&t) {
                if seen.insert(l.key()) {
                    next.push(l);
                }
            }
        }
        order *= 2;
        eprintln!("order {order}: {} quotients ({:.1?})", next.len(), start.elapsed());
        level = next;
    }
    level
        .into_iter()
        .filter(|q| q.perms.iter().zip(sig).all(|(p, &m)| perm_order(p) == m as usize))
        .collect()
}

fn from_table_perms(perms: &[Vec<u32>]) -> FiniteGroup {
    let ps: Vec<Perm> = perms
        .iter()
        .map(|p| Perm(p.iter().map(|&x| x as u16).collect()))
        .collect();
    FiniteGroup::from_perms(&ps, 4096).expect("small group")
}

type Fingerprint = (usize, Vec<u64>, Vec<u32>, Vec<usize>, Vec<Vec<u64>>);

fn fingerprint(g: &FiniteGroup) -> Fingerprint {
    let mut orders: Vec<u32> = (0..g.order()).map(|x| g.elem_order(x)).collect();
    orders.sort_unstable();
    let mut sizes: Vec<usize> = g.class_structure().classes().iter().map(Vec::len).collect();
    sizes.sort_unstable();
    let mut subs: Vec<Vec<u64>> = g
        .index_two_subgroups()
        .iter()
        .map(|s| g.subgroup_group(s).0.abelian_invariants())
        .collect();
    subs.sort();
    (g.order(), g.abelian_invariants(), orders, sizes, subs)
}

/// One group per isomorphism class, in input order.
fn dedupe(groups: Vec<FiniteGroup>) -> Vec<FiniteGroup> {
    let mut buckets: HashMap<Fingerprint, Vec<usize>> = HashMap::new();
    let mut out: Vec<FiniteGroup> = Vec::new();
    for g in groups {
        let fp = fingerprint(&g);
        let bucket = buckets.entry(fp).or_default();
        if bucket.iter().any(|&i| are_isomorphic(&out[i], &g)) {
            continue;
        }
        bucket.push(out.len());
        out.push(g);
    }
    out
}

fn compose(a: &Automorphism, b: &Automorphism) -> Automorphism {
    // a after b
    b.iter().map(|&x| a[x as usize]).collect()
}

fn invert(a: &Automorphism) -> Automorphism {
    let mut v = vec![0u16; a.len()];
    for (i, &x) in a.iter().enumerate() {
        v[x as usize] = i as u16;
    }
    v
}

/// Elements `(h, e)`, `e` in `{0, 1}`, with `(1, 1)` acting by `phi` and
/// squaring to `tau`.
fn extension(g0: &FiniteGroup, phi: &Automorphism, tau: usize) -> FiniteGroup {
    let n = g0.order();
    let mul = |x: usize, y: usize| -> usize {
        let (a, e) = (x % n, x / n);
        let (b, f) = (y % n, y / n);
        match (e, f) {
            (0, _) => g0.mul(a, b) + f * n,
            (_, 0) => g0.mul(a, phi[b] as usize) + n,
            _ => g0.mul(g0.mul(a, phi[b] as usize), tau),
        }
    };
    let mut gens: Vec<usize> = g0.generators().to_vec();
    gens.push(n);
    let perms: Vec<Perm> = gens
        .iter()
        .map(|&s| Perm((0..2 * n).map(|x| mul(x, s) as u16).collect()))
        .collect();
    FiniteGroup::from_perms(&perms, 4096).expect("order 2|G0|")
}

/// Every `G` with `[G : G0] = 2` over which `G` does not split, up to
/// isomorphism.
fn unsplit_extensions(g0: &FiniteGroup) -> Vec<FiniteGroup> {
    let n = g0.order();
    let aut = automorphism_group(g0, 512).expect("small group");
    let all = aut.elements(20_000_000).expect("automorphism group fits");
    let aut_gens: Vec<(Automorphism, Automorphism)> =
        aut.generators().into_iter().map(|a| (a.clone(), invert(a))).collect();
    let inn: Vec<Automorphism> = g0.generators().iter().map(|&g| inner(g0, g)).collect();
    let gens = g0.generators();
    let mut seen: HashSet<Automorphism> = HashSet::new();
    let mut out = Vec::new();
    for phi in all {
        if seen.contains(&phi) {
            continue;
        }
        let taus: Vec<usize> = (0..n)
            .filter(|&t| phi[t] as usize == t && gens.iter().all(|&b| phi[phi[b] as usize] as usize == g0.conj(b, t)))
            .collect();
        if taus.is_empty() {
            continue;
        }
        // phi up to Aut-conjugation and inner automorphisms
        seen.insert(phi.clone());
        let mut queue = vec![phi.clone()];
        while let Some(x) = queue.pop() {
            let mut next: Vec<Automorphism> = aut_gens.iter().map(|(s, si)| compose(s, &compose(&x, si))).collect();
            next.extend(inn.iter().map(|i| compose(&x, i)));
            for y in next {
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        for tau in taus {
            let unsplit = (0..n).all(|eta| g0.mul(g0.mul(eta, phi[eta] as usize), tau) != 0);
            if unsplit {
                out.push(extension(g0, &phi, tau));
            }
        }
    }
    dedupe(out)
}

fn core_is_trivial(g: &FiniteGroup, h: &Subgroup) -> bool {
    let mut core: Vec<usize> = h.elements().to_vec();
    for x in 0..g.order() {
        core.retain(|&y| h.contains(g.conj(y, x)));
        if core.len() == 1 {
            return true;
        }
    }
    core.len() == 1
}

/// Short generating set: each step adds the element enlarging the subgroup
/// most.
fn short_generators(g: &FiniteGroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut sub = Subgroup::trivial(g.order());
    while sub.order() < g.order() {
        let (x, s) = (1..g.order())
            .filter(|&x| !sub.contains(x))
            .map(|x| {
                let mut s = sub.clone();
                g.extend_closure(&mut s, x);
                (x, s)
            })
            .max_by_key(|(x, s)| (s.order(), std::cmp::Reverse(*x)))
            .expect("proper subgroup");
        gens.push(x);
        sub = s;
    }
    gens
}

/// A faithful action on the cosets of the largest core-free subgroup
/// generated by at most two elements.
fn small_representation(g: &FiniteGroup) -> FiniteGroup {
    let mut cyclic: Vec<Subgroup> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for x in 1..g.order() {
        let c = g.closure(&[x]);
        if seen.insert(c.elements().to_vec()) && core_is_trivial(g, &c) {
            cyclic.push(c);
        }
    }
    let mut h = Subgroup::trivial(g.order());
    for c in &cyclic {
        if c.order() > h.order() {
            h = c.clone();
        }
    }
    for (i, a) in cyclic.iter().enumerate() {
        for b in &cyclic[i + 1..] {
            let ga = a.elements()[1..]
                .iter()
                .max_by_key(|&&x| g.elem_order(x))
                .copied()
                .unwrap_or(0);
            let gb = b.elements()[1..]
                .iter()
                .max_by_key(|&&x| g.elem_order(x))
                .copied()
                .unwrap_or(0);
            let cand = g.closure(&[ga, gb]);
            if cand.order() > h.order() && core_is_trivial(g, &cand) {
                h = cand;
            }
        }
    }
    // right cosets H x
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in 0..g.order() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        for &y in h.elements() {
            coset_of[g.mul(y, x)] = reps.len();
        }
        reps.push(x);
    }
    let perms: Vec<Perm> = short_generators(g)
        .iter()
        .map(|&s| Perm(reps.iter().map(|&x| coset_of[g.mul(x, s)] as u16).collect()))
        .collect();
    let r = FiniteGroup::from_perms(&perms, 4096).expect("faithful");
    assert_eq!(r.order(), g.order());
    r
}

/// The five groups of order 18.
fn order_18() -> Vec<FiniteGroup> {
    let c = |n| family("cyclic", &[n]).unwrap();
    let z3 = c(3);
    let z33 = family("abelian", &[3, 3]).unwrap();
    let c2 = c(2);
    let inv3: Automorphism = (0..3).map(|x| z3.inv(x) as u16).collect();
    let inv9: Automorphism = (0..9).map(|x| z33.inv(x) as u16).collect();
    let s3 = semidirect(&z3, &c2, &[inv3]).unwrap();
    let z9 = c(9);
    let inv_9: Automorphism = (0..9).map(|x| z9.inv(x) as u16).collect();
    let s3z3 = {
        let p3 = s3.perms().unwrap();
        let mut gens: Vec<Perm> = s3.generators().iter().map(|&x| p3[x].clone()).collect();
        let d = gens[0].degree();
        for p in gens.iter_mut() {
            p.0.extend((d..d + 3).map(|x| x as u16));
        }
        let mut cyc: Vec<u16> = (0..d as u16).collect();
        cyc.extend([d as u16 + 1, d as u16 + 2, d as u16]);
        gens.push(Perm(cyc));
        FiniteGroup::from_perms(&gens, 4096).unwrap()
    };
    vec![
        c(18),
        family("abelian", &[3, 6]).unwrap(),
        semidirect(&z9, &c2, &[inv_9]).unwrap(),
        s3z3,
        semidirect(&z33, &c2, &[inv9]).unwrap(),
    ]
}

/// Table label for a group from the records it carries, as
/// `(K^2, type, H1)`.
fn label_for(records: &[(u32, String, String)]) -> &'static str {
    let (k2, ty, _) = &records[0];
    let has_h1 = |h: &str| records.iter().any(|r| r.2 == h);
    match (*k2, ty.as_str()) {
        (1, "2^3,4") => "Z2^3:Z4",
        (2, "2^5") => "Z2^2:Z4",
        (2, "4^3") => "G(64,82)",
        (2, "2^3,4") => "Z2^4:Z4",
        (2, "2^2,3^2") => "Z3^2:Z4",
        (4, "2^5") if has_h1("Z2xZ8") => "D2,8,5:Z2",
        (4, "2^5") => "(Z2^2:Z4)xZ2",
        (4, "4^3") => "G(128,836)",
        (8, "2^5") => "(D2,8,5:Z2)xZ2",
        (8, "4^3") if has_h1("Z4^3") => "G(256,3678)",
        (8, "4^3") => "G(256,3679)",
        _ => "unlabelled",
    }
}

fn main() {
    let out_path = std::env::args().nth(1);
    let start = Instant::now();
    let jobs: [(&[u32], usize, u32); 8] = [
        (&[2, 2, 2, 4], 16, 1),
        (&[2, 2, 2, 2, 2], 8, 2),
        (&[4, 4, 4], 32, 2),
        (&[2, 2, 2, 4], 32, 2),
        (&[2, 2, 2, 2, 2], 16, 4),
        (&[4, 4, 4], 64, 4),
        (&[2, 2, 2, 2, 2], 32, 8),
        (&[4, 4, 4], 128, 8),
    ];
    let mut by_k2: HashMap<u32, Vec<FiniteGroup>> = HashMap::new();
    let mut add = |k2: u32, g0s: Vec<FiniteGroup>| {
        let g0s = dedupe(g0s);
        let mut gs = Vec::new();
        for g0 in &g0s {
            gs.extend(unsplit_extensions(g0));
        }
        eprintln!(
            "K2 = {k2}: {} G0, {} unsplit G ({:.1?})",
            g0s.len(),
            gs.len(),
            start.elapsed()
        );
        by_k2.entry(k2).or_default().extend(gs);
    };
    for (sig, order, k2) in jobs {
        let g0s: Vec<FiniteGroup> = two_quotients(sig, order)
            .iter()
            .map(|q| from_table_perms(&q.perms))
            .collect();
        add(k2, g0s);
    }
    add(2, order_18());

    let mut k2s: Vec<u32> = by_k2.keys().copied().collect();
    k2s.sort_unstable();
    let mut catalog: Vec<(String, FiniteGroup)> = Vec::new();
    for k2 in k2s {
        let groups = dedupe(std::mem::take(by_k2.get_mut(&k2).unwrap()));
        let entries: Vec<CatalogEntry> = groups
            .iter()
            .enumerate()
            .map(|(i, g)| CatalogEntry::from_group(&format!("cand{i}"), g).unwrap())
            .collect();
        let arcs: Vec<Arc<FiniteGroup>> = groups.iter().cloned().map(Arc::new).collect();
        let config = PipelineConfig {
            h1_only: false,
            ..PipelineConfig::default()
        };
        let report = run_on_groups(k2, &entries, &arcs, &config).expect("pipeline");
        for f in &report.failures {
            eprintln!("  failure: {f}");
        }
        let mut per_group: HashMap<String, Vec<(u32, String, String)>> = HashMap::new();
        for r in &report.records {
            eprintln!(
                "  K2={} {} {} |G|={} {} G0 ab {:?} H1={} pi1={} orbit={}",
                r.k2,
                r.sing,
                r.sig_type,
                r.g_order,
                r.g_label,
                r.g0.abelian_invariants,
                r.h1_label,
                r.pi1,
                r.orbit_size
            );
            per_group
                .entry(r.g_label.clone())
                .or_default()
                .push((r.k2, r.sig_type.clone(), r.h1_label.clone()));
        }
        let labels: HashMap<String, &'static str> = per_group.iter().map(|(k, v)| (k.clone(), label_for(v))).collect();
        let mut chosen: Vec<(usize, &'static str)> = labels
            .iter()
            .map(|(k, &v)| (k.trim_start_matches("cand").parse().unwrap(), v))
            .collect();
        chosen.sort_unstable();
        for (i, label) in chosen {
            catalog.push((label.to_string(), small_representation(&groups[i])));
        }
        eprintln!("K2 = {k2} done ({:.1?})", start.elapsed());
    }
    let mut text = String::from("# Groups G carrying a mixed quasi-etale structure with p_g = 0.\n");
    for (name, g) in &catalog {
        text.push('\n');
        text.push_str(&CatalogEntry::from_group(name, g).unwrap().render());
    }
    match out_path {
        Some(p) => std::fs::write(p, text).expect("write catalog"),
        None => print!("{text}"),
    }
}
