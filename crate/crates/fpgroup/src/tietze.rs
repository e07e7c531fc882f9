//! Tietze simplification: drop redundant relators and eliminate generators
//! that occur exactly once in some relator.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use crate::word::{generator, letter, Word};
use crate::Presentation;

/// Relator length may grow to at most this multiple of the input length.
pub const GROWTH_CAP: usize = 64;

/// Simplified presentation plus, for every input generator, an expression
/// in the surviving generators.
#[derive(Clone, Debug)]
pub struct Simplified {
    pub presentation: Presentation,
    pub images: Vec<Word>,
    /// Input index of each surviving generator.
    pub kept: Vec<usize>,
}

pub fn simplify(p: &Presentation) -> Presentation {
    run(p, false).presentation
}

/// Like [`simplify`], also tracking where each input generator went.
pub fn simplify_tracked(p: &Presentation) -> Simplified {
    run(p, true)
}

/// Cyclically reduces, drops trivial and duplicate relators (up to
/// rotation and inversion) and sorts shortest first.
fn normalize(rels: &mut Vec<Word>) {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(rels.len());
    for mut r in rels.drain(..) {
        r.cyclic_reduce();
        if r.is_empty() {
            continue;
        }
        if seen.insert(r.cyclic_canonical()) {
            out.push(r);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    *rels = out;
}

/// Smallest generator occurring exactly once in `r`, among those allowed.
fn single_occurrence(r: &Word, alive: &[bool], blocked: &HashSet<usize>) -> Option<usize> {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &l in &r.0 {
        *counts.entry(generator(l)).or_default() += 1;
    }
    counts
        .into_iter()
        .filter(|&(g, c)| c == 1 && alive[g] && !blocked.contains(&g))
        .map(|(g, _)| g)
        .min()
}

/// Solves relator `r` for the single occurrence of generator `g`.
fn solve(r: &Word, g: usize) -> Word {
    let pos = r.0.iter().position(|&l| generator(l) == g).expect("generator occurs");
    let l = r.0[pos];
    // r = u x^e v = 1, so x^e = u^-1 v^-1
    let u = Word(r.0[..pos].to_vec());
    let v = Word(r.0[pos + 1..].to_vec());
    let mut rhs = u.inverse();
    rhs.append(&v.inverse());
    if l > 0 {
        rhs
    } else {
        rhs.inverse()
    }
}

fn substitute_one(r: &Word, g: usize, expr: &Word) -> Word {
    let inv = expr.inverse();
    let mut w = Word::new();
    for &l in &r.0 {
        if generator(l) == g {
            w.append(if l > 0 { expr } else { &inv });
        } else {
            w.push(l);
        }
    }
    w.cyclic_reduce();
    w
}

/// Relators indexed by the generators they mention; shortest relators are
/// tried first for an elimination.
fn run(p: &Presentation, track: bool) -> Simplified {
    let n = p.n_gens;
    let mut input = p.relators.clone();
    normalize(&mut input);
    let cap = GROWTH_CAP * p.total_length().max(1);
    let mut rels: Vec<Option<Word>> = input.into_iter().map(Some).collect();
    let mut occ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut total = 0usize;
    let mut heap = BinaryHeap::new();
    for (i, r) in rels.iter().enumerate() {
        let r = r.as_ref().expect("fresh");
        total += r.len();
        for &l in &r.0 {
            occ[generator(l)].insert(i);
        }
        heap.push(Reverse((r.len(), i)));
    }
    let mut alive = vec![true; n];
    let mut eliminated: Vec<(usize, Word)> = Vec::new();
    let mut blocked: HashSet<usize> = HashSet::new();
    while let Some(Reverse((len, ri))) = heap.pop() {
        let Some(r) = rels[ri].as_ref() else { continue };
        if r.len() != len {
            continue;
        }
        let mut tried: HashSet<usize> = blocked.clone();
        let choice = loop {
            let Some(g) = single_occurrence(r, &alive, &tried) else {
                break None;
            };
            let expr = solve(r, g);
            let growth: usize = occ[g]
                .iter()
                .filter(|&&j| j != ri)
                .map(|&j| {
                    let w = rels[j].as_ref().expect("indexed relators exist");
                    w.0.iter().filter(|&&l| generator(l) == g).count() * expr.len().saturating_sub(1)
                })
                .sum();
            if total + growth > cap {
                tried.insert(g);
                blocked.insert(g);
                continue;
            }
            break Some((g, expr));
        };
        let Some((g, expr)) = choice else { continue };
        let r = rels[ri].take().expect("present");
        total -= r.len();
        for &l in &r.0 {
            occ[generator(l)].remove(&ri);
        }
        let affected: Vec<usize> = occ[g].iter().copied().collect();
        for j in affected {
            let old = rels[j].take().expect("indexed relators exist");
            total -= old.len();
            for &l in &old.0 {
                occ[generator(l)].remove(&j);
            }
            let new = substitute_one(&old, g, &expr);
            if new.is_empty() {
                continue;
            }
            total += new.len();
            for &l in &new.0 {
                occ[generator(l)].insert(j);
            }
            heap.push(Reverse((new.len(), j)));
            rels[j] = Some(new);
        }
        alive[g] = false;
        eliminated.push((g, expr));
        blocked.clear();
    }
    // renumber the surviving generators
    let mut new_of = vec![0i32; n];
    let mut k = 0;
    let mut kept = Vec::new();
    for g in 0..n {
        if alive[g] {
            k += 1;
            new_of[g] = k;
            kept.push(g);
        }
    }
    let renumber = |w: &Word| Word(w.0.iter().map(|&l| l.signum() * new_of[generator(l)]).collect());
    let mut relators: Vec<Word> = rels.iter().flatten().map(renumber).collect();
    normalize(&mut relators);
    let images = if track {
        // an expression only mentions generators eliminated later or kept
        let mut images: Vec<Word> = (0..n).map(|g| Word(vec![letter(g, false)])).collect();
        for (g, expr) in eliminated.iter().rev() {
            images[*g] = expr.substitute(&images);
        }
        images.iter().map(renumber).collect()
    } else {
        Vec::new()
    };
    Simplified {
        presentation: Presentation {
            n_gens: k as usize,
            relators,
        },
        images,
        kept,
    }
}
