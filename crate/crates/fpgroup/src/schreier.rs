//! Reidemeister–Schreier rewriting for finite-index subgroups.

use crate::coset::CosetTable;
use crate::word::{column, generator, letter, Word};
use crate::{tietze, Presentation};

/// Schreier transversal of a complete coset table together with the
/// numbering of the nontrivial Schreier generators `s(c, g) = u_c g u_{cg}^-1`.
#[derive(Clone, Debug)]
pub struct SchreierRewriter {
    table: CosetTable,
    /// `schreier[c * n_gens + g]`: index of `s(c, g)`, `None` on tree edges.
    schreier: Vec<Option<usize>>,
    /// Transversal word of each coset.
    reps: Vec<Word>,
    /// `(c, g)` for each Schreier generator.
    pairs: Vec<(usize, usize)>,
}

impl SchreierRewriter {
    pub fn new(table: CosetTable) -> Self {
        let n = table.index();
        let k = table.n_gens();
        let mut reps: Vec<Option<Word>> = vec![None; n];
        let mut tree = vec![false; n * k];
        reps[0] = Some(Word::new());
        let mut order = vec![0usize];
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for col in 0..2 * k {
                let d = table.entry(c, col);
                if reps[d].is_none() {
                    let l = letter(col / 2, col % 2 == 1);
                    let mut w = reps[c].clone().expect("visited");
                    w.push(l);
                    reps[d] = Some(w);
                    order.push(d);
                    // the edge c --g--> d, or d --g--> c for an inverse column
                    if col % 2 == 0 {
                        tree[c * k + col / 2] = true;
                    } else {
                        tree[d * k + col / 2] = true;
                    }
                }
            }
            i += 1;
        }
        let mut schreier = vec![None; n * k];
        let mut pairs = Vec::new();
        for c in 0..n {
            for g in 0..k {
                if !tree[c * k + g] {
                    schreier[c * k + g] = Some(pairs.len());
                    pairs.push((c, g));
                }
            }
        }
        SchreierRewriter {
            table,
            schreier,
            reps: reps.into_iter().map(|r| r.expect("table is connected")).collect(),
            pairs,
        }
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    pub fn n_generators(&self) -> usize {
        self.pairs.len()
    }

    /// Coset and generator defining Schreier generator `i`.
    pub fn pair(&self, i: usize) -> (usize, usize) {
        self.pairs[i]
    }

    /// Transversal word of coset `c`.
    pub fn representative(&self, c: usize) -> &Word {
        &self.reps[c]
    }

    /// Schreier generator `i` as a word in the ambient generators.
    pub fn generator_word(&self, i: usize) -> Word {
        let (c, g) = self.pairs[i];
        let d = self.table.entry(c, 2 * g);
        let mut w = self.reps[c].clone();
        w.push(letter(g, false));
        w.append(&self.reps[d].inverse());
        w
    }

    /// Rewrites `w`, read from coset `start`, as a word in the Schreier
    /// generators. Returns the rewritten word and the coset it ends at.
    pub fn rewrite_from(&self, start: usize, w: &Word) -> (Word, usize) {
        let k = self.table.n_gens();
        let mut out = Word::new();
        let mut c = start;
        for &l in &w.0 {
            let g = generator(l);
            if l > 0 {
                if let Some(s) = self.schreier[c * k + g] {
                    out.push(letter(s, false));
                }
                c = self.table.entry(c, column(l));
            } else {
                let d = self.table.entry(c, column(l));
                if let Some(s) = self.schreier[d * k + g] {
                    out.push(letter(s, true));
                }
                c = d;
            }
        }
        (out, c)
    }

    /// Rewrites a word lying in the subgroup (it must fix coset 0).
    pub fn rewrite(&self, w: &Word) -> Option<Word> {
        let (out, end) = self.rewrite_from(0, w);
        (end == 0).then_some(out)
    }

    /// Unsimplified subgroup presentation: every relator rewritten from
    /// every coset.
    pub fn presentation(&self, p: &Presentation) -> Presentation {
        let mut rels = Vec::with_capacity(p.relators.len() * self.table.index());
        for c in 0..self.table.index() {
            for r in &p.relators {
                let (w, end) = self.rewrite_from(c, r);
                debug_assert_eq!(end, c, "relator does not close at coset {c}");
                rels.push(w);
            }
        }
        Presentation::new(self.n_generators(), rels).expect("Schreier generators in range")
    }
}

/// Presentation of the subgroup stabilizing coset 0 of a complete table,
/// Tietze-simplified.
pub fn reidemeister_schreier(p: &Presentation, table: &CosetTable) -> Presentation {
    let rw = SchreierRewriter::new(table.clone());
    tietze::simplify(&rw.presentation(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{abelian_invariants, todd_coxeter, AbelianInvariants};

    /// Coset table of the kernel of `T -> Z_k` sending generator `g` to
    /// `images[g]`.
    fn cyclic_kernel_table(k: u32, images: &[u32]) -> CosetTable {
        let perms: Vec<Vec<u32>> = images.iter().map(|&a| (0..k).map(|c| (c + a) % k).collect()).collect();
        CosetTable::from_permutations(k as usize, &perms)
    }

    #[test]
    fn trivial_subgroup_of_finite_group() {
        let p = Presentation::polygonal(&[2, 3, 4]);
        let t = todd_coxeter(&p, &[], 1000).into_table().unwrap();
        let h = reidemeister_schreier(&p, &t);
        assert_eq!(abelian_invariants(&h), AbelianInvariants::finite(vec![]));
        assert!(h.n_gens == 0 || todd_coxeter(&h, &[], 10).index() == Some(1));
    }

    #[test]
    fn index_one_keeps_invariants() {
        let p = Presentation::polygonal(&[2, 2, 2, 4]);
        let t = todd_coxeter(&p, &[Word(vec![1]), Word(vec![2]), Word(vec![3])], 100)
            .into_table()
            .unwrap();
        assert_eq!(t.index(), 1);
        let h = reidemeister_schreier(&p, &t);
        assert_eq!(abelian_invariants(&h), abelian_invariants(&p));
    }

    #[test]
    fn commutator_subgroups_of_triangle_groups() {
        // T(2,3,8)^ab = Z2: the kernel of c1 -> 1, c2 -> 0, c3 -> 1
        let p = Presentation::polygonal(&[2, 3, 8]);
        let t = cyclic_kernel_table(2, &[1, 0, 1]);
        assert!(t.is_valid_for(&p, &[]));
        let h = reidemeister_schreier(&p, &t);
        let expected = abelian_invariants(&Presentation::polygonal(&[3, 3, 4]));
        assert_eq!(expected, AbelianInvariants::finite(vec![3]));
        assert_eq!(abelian_invariants(&h), expected);

        // T(3,3,4)^ab = Z3: c1 -> 1, c2 -> 2, c3 -> 0
        let p = Presentation::polygonal(&[3, 3, 4]);
        let t = cyclic_kernel_table(3, &[1, 2, 0]);
        assert!(t.is_valid_for(&p, &[]));
        let h = reidemeister_schreier(&p, &t);
        assert_eq!(abelian_invariants(&h), AbelianInvariants::finite(vec![4, 4]));
    }

    #[test]
    fn schreier_generators_lie_in_subgroup_and_rewrite_back() {
        let t = cyclic_kernel_table(2, &[1, 0, 1]);
        let rw = SchreierRewriter::new(t);
        for i in 0..rw.n_generators() {
            let w = rw.generator_word(i);
            assert_eq!(rw.rewrite(&w), Some(Word(vec![i as i32 + 1])));
        }
        assert_eq!(rw.rewrite(&Word(vec![1])), None);
    }
}
