//! Todd–Coxeter coset enumeration.
//!
//! Two strategies share one table engine: HLT (relator-based definitions,
//! with a lookahead pass before giving up) and Felsch (definitions in
//! order, every consequence pursued before the next one). Strategies are
//! looked up by name so callers can choose at runtime.

use std::collections::VecDeque;

use crate::word::{column, Word};
use crate::{FpError, Presentation};

const UNDEF: u32 = u32::MAX;

pub const DEFAULT_MAX_COSETS: usize = 1_000_000;
pub const DEFAULT_STRATEGY: &str = "felsch";

/// A complete coset table: `n_cosets` rows, two columns per generator
/// (`2g` for `g`, `2g + 1` for `g^-1`). Coset 0 is the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    n_gens: usize,
    n_cosets: usize,
    data: Vec<u32>,
}

impl CosetTable {
    /// Builds a table from the permutation action of each generator on
    /// `0..n`. `perms[g][c]` is the image of coset `c` under generator `g`.
    pub fn from_permutations(n: usize, perms: &[Vec<u32>]) -> Self {
        let w = 2 * perms.len();
        let mut data = vec![UNDEF; n * w];
        for (g, p) in perms.iter().enumerate() {
            assert_eq!(p.len(), n);
            for c in 0..n {
                let d = p[c] as usize;
                data[c * w + 2 * g] = d as u32;
                data[d * w + 2 * g + 1] = c as u32;
            }
        }
        CosetTable {
            n_gens: perms.len(),
            n_cosets: n,
            data,
        }
    }

    pub fn n_gens(&self) -> usize {
        self.n_gens
    }

    /// Number of cosets, i.e. the index of the subgroup.
    pub fn index(&self) -> usize {
        self.n_cosets
    }

    /// Image of coset `c` under table column `col`.
    #[inline]
    pub fn entry(&self, c: usize, col: usize) -> usize {
        self.data[c * 2 * self.n_gens + col] as usize
    }

    /// Image of coset `c` under a letter.
    #[inline]
    pub fn act(&self, c: usize, letter: i32) -> usize {
        self.entry(c, column(letter))
    }

    pub fn trace(&self, c: usize, w: &Word) -> usize {
        w.0.iter().fold(c, |c, &l| self.act(c, l))
    }

    /// Whether every relator fixes every coset and every subgroup word fixes
    /// coset 0.
    pub fn is_valid_for(&self, p: &Presentation, subgroup: &[Word]) -> bool {
        if p.n_gens != self.n_gens {
            return false;
        }
        let closed = (0..self.n_cosets).all(|c| {
            (0..2 * self.n_gens).all(|col| {
                let d = self.entry(c, col);
                d < self.n_cosets && self.entry(d, col ^ 1) == c
            })
        });
        closed
            && (0..self.n_cosets).all(|c| p.relators.iter().all(|r| self.trace(c, r) == c))
            && subgroup.iter().all(|w| self.trace(0, w) == 0)
    }

    /// Relabels cosets in breadth-first order from coset 0, scanning
    /// columns in order. Two tables of the same action become equal.
    pub fn standardize(&mut self) {
        let n = self.n_cosets;
        let w = 2 * self.n_gens;
        let mut new_of = vec![UNDEF; n];
        let mut order = Vec::with_capacity(n);
        new_of[0] = 0;
        order.push(0usize);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for col in 0..w {
                let d = self.entry(c, col);
                if new_of[d] == UNDEF {
                    new_of[d] = order.len() as u32;
                    order.push(d);
                }
            }
            i += 1;
        }
        debug_assert_eq!(order.len(), n, "coset table is not connected");
        let mut data = vec![UNDEF; n * w];
        for (new_c, &old_c) in order.iter().enumerate() {
            for col in 0..w {
                data[new_c * w + col] = new_of[self.entry(old_c, col)];
            }
        }
        self.data = data;
    }

    /// Permutation of the cosets induced by each generator.
    pub fn permutations(&self) -> Vec<Vec<u32>> {
        (0..self.n_gens)
            .map(|g| (0..self.n_cosets).map(|c| self.entry(c, 2 * g) as u32).collect())
            .collect()
    }
}

/// Outcome of an enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Complete(CosetTable),
    Overflow { max_cosets: usize },
}

impl Enumeration {
    pub fn index(&self) -> Option<usize> {
        match self {
            Enumeration::Complete(t) => Some(t.index()),
            Enumeration::Overflow { .. } => None,
        }
    }

    pub fn table(&self) -> Option<&CosetTable> {
        match self {
            Enumeration::Complete(t) => Some(t),
            Enumeration::Overflow { .. } => None,
        }
    }

    pub fn into_table(self) -> Option<CosetTable> {
        match self {
            Enumeration::Complete(t) => Some(t),
            Enumeration::Overflow { .. } => None,
        }
    }
}

pub trait CosetStrategy: Sync {
    fn name(&self) -> &'static str;

    /// Enumerates the cosets of `<subgroup>` in the group presented by `p`,
    /// keeping at most `max_cosets` live cosets.
    fn enumerate(&self, p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Enumeration;
}

struct Hlt;
struct Felsch;

static STRATEGIES: &[&dyn CosetStrategy] = &[&Felsch, &Hlt];

pub fn coset_strategy(name: &str) -> Result<&'static dyn CosetStrategy, FpError> {
    STRATEGIES
        .iter()
        .copied()
        .find(|s| s.name() == name)
        .ok_or_else(|| FpError::UnknownStrategy(name.to_string()))
}

pub fn coset_strategy_names() -> Vec<&'static str> {
    STRATEGIES.iter().map(|s| s.name()).collect()
}

/// Coset enumeration with the default strategy.
pub fn todd_coxeter(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Enumeration {
    coset_strategy(DEFAULT_STRATEGY)
        .expect("default strategy registered")
        .enumerate(p, subgroup, max_cosets)
}

struct Full;

struct Engine {
    w: usize,
    table: Vec<u32>,
    /// `rep[c] == c` for live cosets, otherwise a smaller coset `c` was
    /// merged into.
    rep: Vec<u32>,
    live: usize,
    max_live: usize,
    queue: VecDeque<u32>,
    record: bool,
    deductions: Vec<(u32, u32)>,
    deduction_overflow: bool,
}

const DEDUCTION_LIMIT: usize = 1 << 16;

impl Engine {
    fn new(n_gens: usize, max_live: usize, record: bool) -> Self {
        let w = 2 * n_gens;
        Engine {
            w,
            table: vec![UNDEF; w],
            rep: vec![0],
            live: 1,
            max_live,
            queue: VecDeque::new(),
            record,
            deductions: Vec::new(),
            deduction_overflow: false,
        }
    }

    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.table[c as usize * self.w + col]
    }

    #[inline]
    fn set(&mut self, c: u32, col: usize, d: u32) {
        self.table[c as usize * self.w + col] = d;
    }

    #[inline]
    fn alive(&self, c: u32) -> bool {
        self.rep[c as usize] == c
    }

    fn n_allocated(&self) -> usize {
        self.rep.len()
    }

    fn push_deduction(&mut self, c: u32, col: usize) {
        if !self.record {
            return;
        }
        if self.deductions.len() >= DEDUCTION_LIMIT {
            self.deduction_overflow = true;
            self.deductions.clear();
        } else {
            self.deductions.push((c, col as u32));
        }
    }

    fn define(&mut self, c: u32, col: usize) -> Result<u32, Full> {
        if self.live >= self.max_live {
            return Err(Full);
        }
        let d = self.rep.len() as u32;
        self.rep.push(d);
        self.table.extend(std::iter::repeat_n(UNDEF, self.w));
        self.live += 1;
        self.set(c, col, d);
        self.set(d, col ^ 1, c);
        self.push_deduction(c, col);
        Ok(d)
    }

    fn find(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.rep[r as usize] != r {
            r = self.rep[r as usize];
        }
        let mut x = c;
        while self.rep[x as usize] != r {
            let next = self.rep[x as usize];
            self.rep[x as usize] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let a = self.find(a);
        let b = self.find(b);
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.rep[hi as usize] = lo;
        self.live -= 1;
        self.queue.push_back(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(g) = self.queue.pop_front() {
            for col in 0..self.w {
                let d = self.get(g, col);
                if d == UNDEF {
                    continue;
                }
                self.set(d, col ^ 1, UNDEF);
                let mu = self.find(g);
                let nu = self.find(d);
                let mu_x = self.get(mu, col);
                if mu_x != UNDEF {
                    self.merge(nu, mu_x);
                } else {
                    let nu_inv = self.get(nu, col ^ 1);
                    if nu_inv != UNDEF {
                        self.merge(mu, nu_inv);
                    } else {
                        self.set(mu, col, nu);
                        self.set(nu, col ^ 1, mu);
                        self.push_deduction(mu, col);
                    }
                }
            }
        }
    }

    /// Traces `word` (as columns) at `c` from both ends. With `fill`, new
    /// cosets are defined until the scan closes.
    fn scan(&mut self, c: u32, word: &[usize], fill: bool) -> Result<(), Full> {
        if word.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = word.len() as isize - 1;
        loop {
            while (i as isize) <= j {
                let n = self.get(f, word[i]);
                if n == UNDEF {
                    break;
                }
                f = n;
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize {
                let n = self.get(b, word[j as usize] ^ 1);
                if n == UNDEF {
                    break;
                }
                b = n;
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                let col = word[i];
                self.set(f, col, b);
                self.set(b, col ^ 1, f);
                self.push_deduction(f, col);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, word[i])?;
        }
    }

    /// Drops dead cosets, keeping the relative order of the live ones.
    /// Returns the new position of `keep`, or of the next live coset after
    /// it.
    fn compact(&mut self, keep: usize) -> usize {
        let n = self.n_allocated();
        let mut new_of = vec![UNDEF; n];
        let mut next = 0u32;
        let mut keep_new = None;
        for c in 0..n {
            if c >= keep && keep_new.is_none() && self.alive(c as u32) {
                keep_new = Some(next as usize);
            }
            if self.alive(c as u32) {
                new_of[c] = next;
                next += 1;
            }
        }
        let mut table = Vec::with_capacity(next as usize * self.w);
        for c in 0..n {
            if !self.alive(c as u32) {
                continue;
            }
            for col in 0..self.w {
                let d = self.get(c as u32, col);
                table.push(if d == UNDEF {
                    UNDEF
                } else {
                    new_of[self.find(d) as usize]
                });
            }
        }
        self.table = table;
        self.rep = (0..next).collect();
        self.deductions.clear();
        keep_new.unwrap_or(next as usize)
    }

    fn first_gap(&self, from: usize) -> Option<(u32, usize)> {
        (from..self.n_allocated())
            .map(|c| c as u32)
            .filter(|&c| self.alive(c))
            .find_map(|c| (0..self.w).find(|&col| self.get(c, col) == UNDEF).map(|col| (c, col)))
    }

    fn finish(mut self, n_gens: usize) -> CosetTable {
        self.compact(0);
        let mut t = CosetTable {
            n_gens,
            n_cosets: self.rep.len(),
            data: self.table,
        };
        t.standardize();
        t
    }
}

fn relator_columns(p: &Presentation) -> Vec<Vec<usize>> {
    p.relators
        .iter()
        .map(|r| r.0.iter().map(|&l| column(l)).collect())
        .collect()
}

fn subgroup_columns(subgroup: &[Word]) -> Vec<Vec<usize>> {
    subgroup
        .iter()
        .map(|w| w.0.iter().map(|&l| column(l)).collect())
        .collect()
}

/// Every cyclic conjugate of every relator and its inverse, grouped by
/// first column.
fn conjugates_by_column(p: &Presentation) -> Vec<Vec<Vec<usize>>> {
    let w = 2 * p.n_gens;
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new(); w];
    let mut seen = std::collections::HashSet::new();
    for r in &p.relators {
        let mut r = r.clone();
        r.cyclic_reduce();
        for src in [r.clone(), r.inverse()] {
            let cols: Vec<usize> = src.0.iter().map(|&l| column(l)).collect();
            for k in 0..cols.len() {
                let rot: Vec<usize> = cols[k..].iter().chain(cols[..k].iter()).copied().collect();
                if seen.insert(rot.clone()) {
                    out[rot[0]].push(rot);
                }
            }
        }
    }
    out
}

impl CosetStrategy for Hlt {
    fn name(&self) -> &'static str {
        "hlt"
    }

    fn enumerate(&self, p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Enumeration {
        let overflow = Enumeration::Overflow { max_cosets };
        let rels = relator_columns(p);
        let mut e = Engine::new(p.n_gens, max_cosets.max(1), false);
        for w in subgroup_columns(subgroup) {
            if e.scan(0, &w, true).is_err() && !hlt_lookahead(&mut e, &rels) {
                return overflow;
            }
        }
        let mut c = 0usize;
        while c < e.n_allocated() {
            if e.n_allocated() > 2 * e.max_live + 1024 && e.n_allocated() > 2 * e.live {
                c = e.compact(c);
                continue;
            }
            let cc = c as u32;
            if e.alive(cc) {
                for r in &rels {
                    if !e.alive(cc) {
                        break;
                    }
                    while e.scan(cc, r, true).is_err() {
                        if !hlt_lookahead(&mut e, &rels) {
                            return overflow;
                        }
                        if !e.alive(cc) {
                            break;
                        }
                    }
                }
                for col in 0..e.w {
                    if !e.alive(cc) {
                        break;
                    }
                    if e.get(cc, col) == UNDEF && e.define(cc, col).is_err() {
                        if !hlt_lookahead(&mut e, &rels) {
                            return overflow;
                        }
                        if e.alive(cc) && e.get(cc, col) == UNDEF && e.define(cc, col).is_err() {
                            return overflow;
                        }
                    }
                }
            }
            c += 1;
        }
        Enumeration::Complete(e.finish(p.n_gens))
    }
}

/// Scans every live coset under every relator without defining anything.
/// Returns whether room was freed.
fn hlt_lookahead(e: &mut Engine, rels: &[Vec<usize>]) -> bool {
    let before = e.live;
    for c in 0..e.n_allocated() as u32 {
        for r in rels {
            if !e.alive(c) {
                break;
            }
            let _ = e.scan(c, r, false);
        }
    }
    e.live < before
}

impl CosetStrategy for Felsch {
    fn name(&self) -> &'static str {
        "felsch"
    }

    fn enumerate(&self, p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Enumeration {
        let overflow = Enumeration::Overflow { max_cosets };
        let rels = relator_columns(p);
        let by_col = conjugates_by_column(p);
        let mut e = Engine::new(p.n_gens, max_cosets.max(1), true);
        for w in subgroup_columns(subgroup) {
            if e.scan(0, &w, true).is_err() {
                return overflow;
            }
        }
        felsch_deductions(&mut e, &by_col, &rels);
        let mut from = 0usize;
        while let Some((c, col)) = e.first_gap(from) {
            from = c as usize;
            if e.n_allocated() > 2 * e.max_live + 1024 && e.n_allocated() > 2 * e.live {
                from = e.compact(from);
                continue;
            }
            if e.define(c, col).is_err() {
                return overflow;
            }
            felsch_deductions(&mut e, &by_col, &rels);
        }
        Enumeration::Complete(e.finish(p.n_gens))
    }
}

fn felsch_deductions(e: &mut Engine, by_col: &[Vec<Vec<usize>>], rels: &[Vec<usize>]) {
    loop {
        while let Some((c, col)) = e.deductions.pop() {
            let col = col as usize;
            if !e.alive(c) {
                continue;
            }
            for w in &by_col[col] {
                if !e.alive(c) {
                    break;
                }
                let _ = e.scan(c, w, false);
            }
            if !e.alive(c) {
                continue;
            }
            let d = e.get(c, col);
            if d == UNDEF {
                continue;
            }
            for w in &by_col[col ^ 1] {
                if !e.alive(d) {
                    break;
                }
                let _ = e.scan(d, w, false);
            }
        }
        if !e.deduction_overflow {
            return;
        }
        // too many pending deductions: fall back to a full relator pass
        e.deduction_overflow = false;
        for c in 0..e.n_allocated() as u32 {
            for r in rels {
                if !e.alive(c) {
                    break;
                }
                let _ = e.scan(c, r, false);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index_all(p: &Presentation, h: &[Word], max: usize) -> Vec<Option<usize>> {
        coset_strategy_names()
            .into_iter()
            .map(|n| {
                let e = coset_strategy(n).unwrap().enumerate(p, h, max);
                if let Some(t) = e.table() {
                    assert!(t.is_valid_for(p, h), "{n} produced an invalid table");
                }
                e.index()
            })
            .collect()
    }

    #[test]
    fn cyclic_of_order_five() {
        let p = Presentation::parse("gens 1; rel a5;").unwrap();
        assert_eq!(index_all(&p, &[], 100), vec![Some(5), Some(5)]);
    }

    #[test]
    fn free_abelian_overflows() {
        let p = Presentation::parse("gens 2; rel a b A B;").unwrap();
        assert_eq!(index_all(&p, &[], 10_000), vec![None, None]);
    }

    #[test]
    fn triangle_groups() {
        // (2,3,5) is A5, (2,3,4) is S4, (2,2,n) dihedral
        for (sig, order) in [
            (vec![2, 3, 5], 60),
            (vec![2, 3, 4], 24),
            (vec![2, 2, 7], 14),
            (vec![2, 3, 3], 12),
        ] {
            let p = Presentation::polygonal(&sig);
            assert_eq!(index_all(&p, &[], 10_000), vec![Some(order); 2], "{sig:?}");
        }
    }

    #[test]
    fn subgroup_index() {
        // <a> in S4 = T(2,3,4) via c1: index 12
        let p = Presentation::polygonal(&[2, 3, 4]);
        let h = [Word(vec![1])];
        assert_eq!(index_all(&p, &h, 10_000), vec![Some(12), Some(12)]);
    }

    #[test]
    fn larger_finite_group() {
        // T(2,3,7) with [c1, c2]^4 added is PSL(2,7), order 168
        let mut p = Presentation::polygonal(&[2, 3, 7]);
        p.add_relator(Word(vec![1, 2, -1, -2]).pow(4)).unwrap();
        assert_eq!(index_all(&p, &[], 100_000), vec![Some(168), Some(168)]);
    }

    #[test]
    fn unknown_strategy_is_an_error() {
        assert!(matches!(coset_strategy("nope"), Err(FpError::UnknownStrategy(_))));
    }

    #[test]
    fn standardized_tables_agree_across_strategies() {
        let p = Presentation::polygonal(&[2, 3, 4]);
        let a = coset_strategy("hlt").unwrap().enumerate(&p, &[], 1000);
        let b = coset_strategy("felsch").unwrap().enumerate(&p, &[], 1000);
        assert_eq!(a, b);
    }
}
