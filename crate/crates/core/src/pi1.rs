//! The orbifold group `GG` of a mixed action on `Delta x Delta` and the
//! fundamental group `GG / Tors(GG)`.
//!
//! `HH` is the subgroup of `T x T` of pairs `(t1, t2)` with
//! `psi(t1) = phi^-1(psi(t2))`. It is the stabilizer of the identity under
//! the action of `T x T` on `G0` where `c_i` acts by `x -> x h_i` and the
//! second copy's `c_j` by `x -> phi^-1(h_j)^-1 x`, so its presentation comes
//! from Reidemeister–Schreier on that table. `GG` adjoins `tau~'` with
//! `tau~'^2 = (t, t)` and `tau~' h tau~'^-1 = phi~(h)`, where
//! `phi~(t1, t2) = (t2, t t1 t^-1)`.

use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, OnceLock};

use qetale_fpgroup::{
    abelian_invariants, coset_strategy, reidemeister_schreier, simplify_tracked, AbelianInvariants, CosetTable,
    Enumeration, Presentation, SchreierRewriter, Word, DEFAULT_STRATEGY,
};
use serde::Serialize;

use crate::aut::{are_isomorphic, automorphism_conjclasses_of_order};
use crate::catalog::{family, semidirect};
use crate::group::{FiniteGroup, DEFAULT_ORDER_CAP};
use crate::mixed::MixedStructure;
use crate::spherical::SphericalSystem;
use crate::CoreError;

pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

fn shift(w: &Word, by: usize) -> Word {
    Word(w.0.iter().map(|&l| l.signum() * (l.abs() + by as i32)).collect())
}

/// Splits a word of `T x T` into its two components.
fn split(w: &Word, r: usize) -> (Word, Word) {
    let mut a = Word::new();
    let mut b = Word::new();
    for &l in &w.0 {
        if (l.unsigned_abs() as usize) <= r {
            a.push(l);
        } else {
            b.push(l.signum() * (l.abs() - r as i32));
        }
    }
    (a, b)
}

/// `GG` with its evaluation map onto `G`.
#[derive(Clone, Debug)]
pub struct OrbifoldGroup {
    /// Generators: the Schreier generators of `HH`, then `tau~'`.
    pub presentation: Presentation,
    /// Image in `G` (as a `G` index) of every generator.
    pub theta: Vec<usize>,
    /// Generator index of `tau~'`.
    pub tau_tilde_prime: usize,
    /// Word in the `c_i` lifting `tau`.
    pub t: Word,
    /// Index of `HH` in `T x T`.
    pub index: usize,
    rewriter: SchreierRewriter,
    r: usize,
    /// Shortlex preimage in `T` of every element of `G0`.
    preimage: Vec<Word>,
    mx: MixedStructure,
    sys: SphericalSystem,
}

impl OrbifoldGroup {
    /// The element `(t1, t2)` of `HH` as a word in the generators of `GG`.
    pub fn h_word(&self, t1: &Word, t2: &Word) -> Result<Word, CoreError> {
        let w = t1.concat(&shift(t2, self.r));
        self.rewriter
            .rewrite(&w)
            .ok_or_else(|| CoreError::Internal("pair is not in the fibre product".into()))
    }

    /// `theta` of a word in the generators of `GG`.
    pub fn evaluate(&self, w: &Word) -> usize {
        let g = &self.mx.g;
        w.0.iter().fold(0, |acc, &l| {
            let x = self.theta[l.unsigned_abs() as usize - 1];
            g.mul(acc, if l > 0 { x } else { g.inv(x) })
        })
    }

    /// Every relator maps to the identity and `theta` is onto `G`.
    pub fn verify(&self) -> bool {
        let g = &self.mx.g;
        self.presentation.relators.iter().all(|r| self.evaluate(r) == 0) && g.closure(&self.theta).order() == g.order()
    }

    fn psi(&self, w: &Word) -> usize {
        psi(&self.sys, w)
    }
}

fn psi(sys: &SphericalSystem, w: &Word) -> usize {
    let g0 = &sys.group;
    w.0.iter().fold(0, |acc, &l| {
        let h = sys.tuple[l.unsigned_abs() as usize - 1];
        g0.mul(acc, if l > 0 { h } else { g0.inv(h) })
    })
}

/// Shortlex-least word in the `c_i` for every element of `G0`.
fn shortlex_preimages(sys: &SphericalSystem) -> Vec<Word> {
    let g0 = &sys.group;
    let mut words: Vec<Option<Word>> = vec![None; g0.order()];
    words[0] = Some(Word::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (i, &h) in sys.tuple.iter().enumerate() {
            for (l, y) in [(i as i32 + 1, g0.mul(x, h)), (-(i as i32) - 1, g0.mul(x, g0.inv(h)))] {
                if words[y].is_none() {
                    let mut w = words[x].clone().expect("visited");
                    w.0.push(l);
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
    }
    words.into_iter().map(|w| w.expect("the system generates G0")).collect()
}

pub fn build_gg(mx: &MixedStructure, sys: &SphericalSystem) -> Result<OrbifoldGroup, CoreError> {
    let g0 = &mx.g0;
    let r = sys.tuple.len();
    let n = g0.order();
    let t_pres = Presentation::polygonal(&sys.signature);
    let tt = t_pres.direct_product(&t_pres);
    let mut perms: Vec<Vec<u32>> = Vec::with_capacity(2 * r);
    for &h in &sys.tuple {
        perms.push((0..n).map(|x| g0.mul(x, h) as u32).collect());
    }
    for &h in &sys.tuple {
        let a = g0.inv(mx.phi_inv[h]);
        perms.push((0..n).map(|x| g0.mul(a, x) as u32).collect());
    }
    let table = CosetTable::from_permutations(n, &perms);
    if g0.closure(&sys.tuple).order() != n {
        return Err(CoreError::Internal("fibre product has the wrong index".into()));
    }
    let rewriter = SchreierRewriter::new(table);
    let n_h = rewriter.n_generators();
    let preimage = shortlex_preimages(sys);
    let t = preimage[mx.tau].clone();

    let mut theta = Vec::with_capacity(n_h + 1);
    for i in 0..n_h {
        let (a, _) = split(&rewriter.generator_word(i), r);
        theta.push(mx.embed[psi(sys, &a)]);
    }
    theta.push(mx.tau_prime);

    let mut gg = OrbifoldGroup {
        presentation: Presentation::free(n_h + 1),
        theta,
        tau_tilde_prime: n_h,
        t,
        index: n,
        rewriter,
        r,
        preimage,
        mx: mx.clone(),
        sys: sys.clone(),
    };
    let tp = Word::power(n_h, 1);
    let mut rels = gg.rewriter.presentation(&tt).relators;
    // tau~'^2 (t, t)^-1
    let tau_tilde = gg.h_word(&gg.t, &gg.t)?;
    rels.push(tp.concat(&tp).concat(&tau_tilde.inverse()));
    // phi~(h) tau~' h^-1 tau~'^-1
    for i in 0..n_h {
        let (a, b) = split(&gg.rewriter.generator_word(i), r);
        let image = gg.h_word(&b, &gg.t.concat(&a).concat(&gg.t.inverse()))?;
        let h = Word::power(i, 1);
        rels.push(image.concat(&tp).concat(&h.inverse()).concat(&tp.inverse()));
    }
    gg.presentation = Presentation::new(n_h + 1, rels).map_err(|e| CoreError::Internal(e.to_string()))?;
    debug_assert!(gg.verify());
    Ok(gg)
}

/// Words in the generators of `GG` normally generating `Tors(GG)`.
#[derive(Clone, Debug, Default)]
pub struct TorsionData {
    /// Elements of `HH`.
    pub t1: Vec<Word>,
    /// Elements outside `HH`.
    pub t2: Vec<Word>,
}

impl TorsionData {
    pub fn is_empty(&self) -> bool {
        self.t1.is_empty() && self.t2.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.t1.iter().chain(&self.t2)
    }
}

/// Choices are the lowest element index satisfying each constraint and
/// shortlex preimages under `psi`.
pub fn torsion_generators(gg: &OrbifoldGroup) -> Result<TorsionData, CoreError> {
    let mx = &gg.mx;
    let sys = &gg.sys;
    let g0 = &mx.g0;
    let g = &mx.g;
    let classes = g0.class_structure();
    let powers: Vec<Vec<(u32, usize)>> = sys
        .tuple
        .iter()
        .map(|&h| (1..g0.elem_order(h)).map(|a| (a, g0.pow(h, a as i64))).collect())
        .collect();
    let centralizer = |x: usize| -> Vec<usize> { (0..g0.order()).filter(|&d| g0.mul(d, x) == g0.mul(x, d)).collect() };
    let conjugator = |x: usize, y: usize| -> usize {
        (0..g0.order())
            .find(|&v| g0.conj(x, v) == y)
            .expect("conjugate elements")
    };
    let c_pow = |i: usize, a: u32| Word::power(i, a as i64);

    let mut data = TorsionData::default();
    for (i, pi) in powers.iter().enumerate() {
        for (j, pj) in powers.iter().enumerate() {
            for &(alpha, x) in pi {
                for &(beta, y) in pj {
                    let target = mx.phi_inv[y];
                    if classes.class_of(x) != classes.class_of(target) {
                        continue;
                    }
                    let v = conjugator(x, target);
                    for d in centralizer(x) {
                        let w = &gg.preimage[g0.mul(v, d)];
                        let first = w.concat(&c_pow(i, alpha)).concat(&w.inverse());
                        data.t1.push(gg.h_word(&first, &c_pow(j, beta))?);
                    }
                }
            }
        }
    }
    let tp = Word::power(gg.tau_tilde_prime, 1);
    for eta in 0..g0.order() {
        let x = g.mul(mx.tau_prime, mx.embed[eta]);
        let sq = mx.project[g.mul(x, x)];
        for (i, pi) in powers.iter().enumerate() {
            for &(alpha, h) in pi {
                if classes.class_of(h) != classes.class_of(sq) {
                    continue;
                }
                let v = conjugator(h, sq);
                let g1 = &gg.preimage[eta];
                let g2 = &gg.preimage[mx.phi[eta]];
                let s = g2.concat(&gg.t).concat(g1);
                for d in centralizer(h) {
                    let w = &gg.preimage[g0.mul(v, d)];
                    let k = s.inverse().concat(w).concat(&c_pow(i, alpha)).concat(&w.inverse());
                    debug_assert_eq!(gg.psi(&k), 0);
                    let pair = gg.h_word(g1, &k.concat(g2))?;
                    data.t2.push(tp.concat(&pair));
                }
            }
        }
    }
    Ok(data)
}

/// What is known about `pi_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pi1Status {
    /// Finite, of this order, isomorphic to the named group.
    Finite { order: usize, label: String },
    /// Finite of this order, not in the identification library.
    FiniteUnidentified { order: usize },
    /// A finite-index subgroup has infinite abelianization.
    Infinite,
    /// Coset enumeration ran out of budget.
    Undetermined,
}

impl fmt::Display for Pi1Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pi1Status::Finite { label, .. } => write!(f, "{label}"),
            Pi1Status::FiniteUnidentified { order } => write!(f, "finite of order {order} (unidentified)"),
            Pi1Status::Infinite => write!(f, "infinite (certified H1 only)"),
            Pi1Status::Undetermined => write!(f, "undetermined"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Pi1Config {
    pub max_cosets: usize,
    pub strategy: String,
    /// Skip coset enumeration and the infiniteness test.
    pub h1_only: bool,
}

impl Default for Pi1Config {
    fn default() -> Self {
        Pi1Config {
            max_cosets: DEFAULT_MAX_COSETS,
            strategy: DEFAULT_STRATEGY.to_string(),
            h1_only: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Pi1 {
    /// `GG / Tors(GG)`, simplified.
    pub presentation: Presentation,
    pub h1: AbelianInvariants,
    pub status: Option<Pi1Status>,
    /// The finite group itself when enumeration completed.
    pub group: Option<Arc<FiniteGroup>>,
}

pub fn pi1(mx: &MixedStructure, sys: &SphericalSystem, config: &Pi1Config) -> Result<Pi1, CoreError> {
    let gg = build_gg(mx, sys)?;
    let tors = torsion_generators(&gg)?;
    let mut p = gg.presentation.clone();
    for w in tors.words() {
        p.add_relator(w.clone())
            .map_err(|e| CoreError::Internal(e.to_string()))?;
    }
    let simplified = simplify_tracked(&p);
    let q = simplified.presentation;
    let h1 = abelian_invariants(&q);
    if config.h1_only {
        return Ok(Pi1 {
            presentation: q,
            h1,
            status: None,
            group: None,
        });
    }
    let theta: Vec<usize> = simplified.kept.iter().map(|&k| gg.theta[k]).collect();
    let tors_image: Vec<usize> = tors.words().map(|w| gg.evaluate(w)).collect();
    // Without torsion pi_1 = GG, which contains ker(theta) = pi_1(C x C)
    // with free abelianization of rank 4 g(C) > 0.
    if !h1.is_finite() || tors.is_empty() || kernel_has_infinite_abelianization(&q, &mx.g, &theta, &tors_image) {
        return Ok(Pi1 {
            presentation: q,
            h1,
            status: Some(Pi1Status::Infinite),
            group: None,
        });
    }
    let strategy = coset_strategy(&config.strategy).map_err(|e| CoreError::Internal(e.to_string()))?;
    let (status, group) = match strategy.enumerate(&q, &[], config.max_cosets) {
        Enumeration::Complete(table) => finite_status(&table)?,
        Enumeration::Overflow { .. } => (Pi1Status::Undetermined, None),
    };
    Ok(Pi1 {
        presentation: q,
        h1,
        status: Some(status),
        group,
    })
}

fn finite_status(table: &CosetTable) -> Result<(Pi1Status, Option<Arc<FiniteGroup>>), CoreError> {
    let order = table.index();
    if order > DEFAULT_ORDER_CAP {
        return Ok((Pi1Status::FiniteUnidentified { order }, None));
    }
    let (f, _) = regular_group(table)?;
    let f = Arc::new(f);
    let status = match identify(&f) {
        Some(label) => Pi1Status::Finite { order, label },
        None => Pi1Status::FiniteUnidentified { order },
    };
    Ok((status, Some(f)))
}

/// The group acting regularly on the cosets of the trivial subgroup.
fn regular_group(table: &CosetTable) -> Result<(FiniteGroup, Vec<usize>), CoreError> {
    let perms: Vec<crate::Perm> = table
        .permutations()
        .into_iter()
        .map(|p| crate::Perm(p.into_iter().map(|x| x as u16).collect()))
        .collect();
    if perms.is_empty() {
        let f = FiniteGroup::from_perms(&[crate::Perm::identity(1)], DEFAULT_ORDER_CAP)?;
        return Ok((f, Vec::new()));
    }
    let f = FiniteGroup::from_perms(&perms, DEFAULT_ORDER_CAP)?;
    let gens = f.generators().to_vec();
    Ok((f, gens))
}

/// Letters in the rewritten kernel presentation beyond which the kernel
/// test is skipped.
pub const KERNEL_TEST_LIMIT: usize = 2_000_000;

/// Maps `pi_1` onto `G / N`, `N` the normal closure of the images of the
/// torsion generators, and looks for free rank in the kernel.
fn kernel_has_infinite_abelianization(q: &Presentation, g: &FiniteGroup, theta: &[usize], tors: &[usize]) -> bool {
    let n = g.normal_closure(tors);
    if (g.order() / n.order()).saturating_mul(q.total_length()) > KERNEL_TEST_LIMIT {
        return false;
    }
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in 0..g.order() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        for &y in n.elements() {
            coset_of[g.mul(x, y)] = reps.len();
        }
        reps.push(x);
    }
    let index = reps.len();
    let perms: Vec<Vec<u32>> = theta
        .iter()
        .map(|&s| reps.iter().map(|&x| coset_of[g.mul(x, s)] as u32).collect())
        .collect();
    if perms.is_empty() {
        return false;
    }
    let table = CosetTable::from_permutations(index, &perms);
    debug_assert!(table.is_valid_for(q, &[]));
    let sub = reidemeister_schreier(q, &table);
    !abelian_invariants(&sub).is_finite()
}

/// Compact notation: `Z2^3xZ4`, `1` for the trivial group.
pub fn abelian_label(factors: &[u64]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < factors.len() {
        let j = factors[i..].iter().take_while(|&&x| x == factors[i]).count();
        let base = if factors[i] == 0 {
            "Z".to_string()
        } else {
            format!("Z{}", factors[i])
        };
        parts.push(if j == 1 { base } else { format!("{base}^{j}") });
        i += j;
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("x")
    }
}

/// Labels invariant factors including free rank, e.g. `Z^2xZ2`.
pub fn h1_label(h: &AbelianInvariants) -> String {
    let mut f: Vec<u64> = vec![0; h.free_rank];
    f.extend(&h.torsion);
    if h.free_rank > 0 {
        let free = if h.free_rank == 1 {
            "Z".to_string()
        } else {
            format!("Z^{}", h.free_rank)
        };
        let rest = abelian_label(&h.torsion);
        return if rest == "1" { free } else { format!("{free}x{rest}") };
    }
    abelian_label(&f)
}

struct Named {
    label: String,
    group: FiniteGroup,
}

/// Split extensions `N x| Z_k` of small abelian groups by cyclic groups,
/// one per conjugacy class of action.
fn library() -> &'static [Named] {
    static LIB: OnceLock<Vec<Named>> = OnceLock::new();
    LIB.get_or_init(|| {
        let normals: [&[i64]; 8] = [&[3], &[4], &[8], &[2, 2], &[3, 3], &[2, 4], &[2, 2, 2], &[4, 4]];
        let mut out = Vec::new();
        for nf in normals {
            let nn = family("abelian", nf).expect("valid");
            let n_label = abelian_label(&nf.iter().map(|&x| x as u64).collect::<Vec<_>>());
            for k in [2i64, 4, 8] {
                if nn.order() * k as usize > 64 {
                    continue;
                }
                let c = family("cyclic", &[k]).expect("valid");
                for d in (2..=k).filter(|d| k % d == 0) {
                    let Ok(actions) = automorphism_conjclasses_of_order(&nn, d as usize, 512, 100_000) else {
                        continue;
                    };
                    for a in actions.iter().take(actions.len() - 1) {
                        // a generator of Z_k acting with order d
                        if let Ok(group) = semidirect(&nn, &c, std::slice::from_ref(a)) {
                            out.push(Named {
                                label: format!("{n_label}:Z{k}"),
                                group,
                            });
                        }
                    }
                }
            }
        }
        out
    })
}

/// Label for a small finite group: its invariants when abelian, otherwise
/// a matching split extension from the library.
pub fn identify(f: &FiniteGroup) -> Option<String> {
    if f.is_abelian() {
        return Some(abelian_label(&f.abelian_invariants()));
    }
    let inv = f.abelian_invariants();
    library()
        .iter()
        .filter(|n| n.group.order() == f.order() && n.group.abelian_invariants() == inv)
        .find(|n| are_isomorphic(&n.group, f))
        .map(|n| n.label.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixed::mixed_structures;
    use crate::spherical::spherical_systems;

    #[test]
    fn labels() {
        assert_eq!(abelian_label(&[2, 2, 2, 8]), "Z2^3xZ8");
        assert_eq!(abelian_label(&[]), "1");
        assert_eq!(abelian_label(&[3]), "Z3");
        assert_eq!(
            h1_label(&AbelianInvariants {
                free_rank: 2,
                torsion: vec![2]
            }),
            "Z^2xZ2"
        );
    }

    #[test]
    fn identifies_split_extensions() {
        let c3 = family("cyclic", &[3]).unwrap();
        let c2 = family("cyclic", &[2]).unwrap();
        let inv: Vec<u16> = (0..3).map(|x| c3.inv(x) as u16).collect();
        let s3 = semidirect(&c3, &c2, &[inv]).unwrap();
        assert_eq!(identify(&s3).as_deref(), Some("Z3:Z2"));
        assert_eq!(identify(&family("abelian", &[2, 4]).unwrap()).as_deref(), Some("Z2xZ4"));
        // Q8 is not split over any abelian normal subgroup with cyclic quotient
        let q8 = FiniteGroup::build(&["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"], 8).unwrap();
        assert_eq!(identify(&q8), None);
    }

    /// `G = Z4 x Z2`, `G0 = Z2 x Z2` with four involutions: every relator of
    /// `GG` evaluates trivially and the torsion words land on elements with
    /// fixed points.
    #[test]
    fn orbifold_group_is_consistent() {
        let g = Arc::new(FiniteGroup::build(&["(1 2 3 4)", "(5 6)"], 6).unwrap());
        let mx = mixed_structures(&g).into_iter().next().unwrap();
        let sys = spherical_systems(&mx.g0, &[2, 2, 2, 2]).into_iter().next().unwrap();
        let gg = build_gg(&mx, &sys).unwrap();
        assert_eq!(gg.index, 4);
        assert!(gg.verify());
        let tors = torsion_generators(&gg).unwrap();
        assert!(!tors.is_empty());
        for w in tors.words() {
            let x = gg.evaluate(w);
            // nontrivial stabilizers here have order 2 (in G0) or 4 (outside)
            assert!(g.elem_order(x) <= 4);
        }
        for w in &tors.t2 {
            assert!(!mx.in_g0(gg.evaluate(w)));
        }
    }
}
