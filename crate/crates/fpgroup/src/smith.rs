//! Smith normal form over the integers and abelian invariants of
//! presentations.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Presentation;

/// Diagonal data of the Smith normal form of an `m x n` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Nonzero diagonal entries other than 1, in divisibility order.
    pub factors: Vec<BigInt>,
    pub rank: usize,
    /// Diagonal positions (out of `min(m, n)`) that are zero.
    pub zero_diagonal: usize,
}

/// Smith normal form of a dense integer matrix given as rows.
pub fn smith_normal_form(rows: &[Vec<i64>]) -> SmithForm {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let diag = dense_diagonal(&mut a, n);
    let rank = diag.len();
    SmithForm {
        factors: diag.into_iter().filter(|d| !d.is_one()).collect(),
        rank,
        zero_diagonal: m.min(n) - rank,
    }
}

/// Reduces `a` in place and returns the nonzero diagonal in divisibility
/// order.
fn dense_diagonal(a: &mut [Vec<BigInt>], n: usize) -> Vec<BigInt> {
    let m = a.len();
    let mut diag = Vec::new();
    let mut k = 0;
    while k < m.min(n) {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut piv: Option<(usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                if !a[i][j].is_zero() && piv.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs()) {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        loop {
            let mut dirty = false;
            // clear column k
            for i in k + 1..m {
                if a[i][k].is_zero() {
                    continue;
                }
                let q = a[i][k].div_floor(&a[k][k]);
                for j in k..n {
                    let t = &q * &a[k][j];
                    a[i][j] -= t;
                }
                if !a[i][k].is_zero() {
                    dirty = true;
                }
            }
            // clear row k
            for j in k + 1..n {
                if a[k][j].is_zero() {
                    continue;
                }
                let q = a[k][j].div_floor(&a[k][k]);
                for i in k..m {
                    let t = &q * &a[i][k];
                    a[i][j] -= t;
                }
                if !a[k][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility: fold any entry not divisible by the pivot
                // into row k and go again
                let bad = (k + 1..m).find(|&i| (k + 1..n).any(|j| !a[i][j].is_multiple_of(&a[k][k])));
                match bad {
                    Some(i) => {
                        for j in k..n {
                            let t = a[i][j].clone();
                            a[k][j] += t;
                        }
                    }
                    None => break,
                }
            }
            // re-pivot on the smallest nonzero entry in row/column k
            let mut best = (k, k);
            for i in k..m {
                if !a[i][k].is_zero() && a[i][k].abs() < a[best.0][best.1].abs() {
                    best = (i, k);
                }
            }
            for j in k..n {
                if !a[k][j].is_zero() && a[k][j].abs() < a[best.0][best.1].abs() {
                    best = (k, j);
                }
            }
            if best.0 != k {
                a.swap(k, best.0);
            }
            if best.1 != k {
                for row in a.iter_mut() {
                    row.swap(k, best.1);
                }
            }
        }
        diag.push(a[k][k].abs());
        k += 1;
    }
    diag
}

/// Structure of a finitely generated abelian group `Z^free_rank + (+) Z/d_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    /// Invariant factors `d_1 | d_2 | ..`, all `> 1`.
    pub torsion: Vec<u64>,
}

impl AbelianInvariants {
    pub fn finite(torsion: Vec<u64>) -> Self {
        AbelianInvariants { free_rank: 0, torsion }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    /// Invariant factors with free summands written as `0`, largest last.
    pub fn factors_with_zeros(&self) -> Vec<u64> {
        let mut v = self.torsion.clone();
        v.extend(std::iter::repeat_n(0, self.free_rank));
        v
    }

    /// Whether `self` is isomorphic to a quotient of `other`.
    ///
    /// Aligning the invariant factors from the top, each factor of `self`
    /// must divide the corresponding factor of `other`; a free summand
    /// (`0`) is divisible by everything.
    pub fn is_quotient_of(&self, other: &AbelianInvariants) -> bool {
        let a = self.factors_with_zeros();
        let b = other.factors_with_zeros();
        if a.len() > b.len() {
            return false;
        }
        a.iter()
            .rev()
            .zip(b.iter().rev())
            .all(|(&x, &y)| if x == 0 { y == 0 } else { y % x == 0 })
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors_with_zeros()
            .iter()
            .map(|d| if *d == 0 { "Z".to_string() } else { format!("Z{d}") })
            .collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("x"))
        }
    }
}

fn invariants_from_diagonal(n_cols: usize, rank: usize, diag: &[BigInt]) -> AbelianInvariants {
    let mut torsion: Vec<u64> = diag
        .iter()
        .filter(|d| !d.is_one())
        .map(|d| d.to_u64().expect("invariant factor exceeds 64 bits"))
        .collect();
    torsion.sort_unstable();
    AbelianInvariants {
        free_rank: n_cols - rank,
        torsion,
    }
}

/// Abelian invariants of a dense relation matrix with `n_cols` generators.
pub fn abelian_invariants_of_matrix(rows: &[Vec<i64>], n_cols: usize) -> AbelianInvariants {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let diag = dense_diagonal(&mut a, n_cols);
    invariants_from_diagonal(n_cols, diag.len(), &diag)
}

/// Abelian invariants of the group given by a presentation.
///
/// Unit pivots are eliminated on a sparse copy of the relation matrix first;
/// the remaining block is reduced densely with arbitrary precision.
pub fn abelian_invariants(p: &Presentation) -> AbelianInvariants {
    let n = p.n_gens;
    let mut rows: Vec<BTreeMap<usize, i64>> = p
        .relators
        .iter()
        .map(|r| {
            let mut m = BTreeMap::new();
            for &l in &r.0 {
                *m.entry(crate::word::generator(l)).or_insert(0i64) += l.signum() as i64;
            }
            m.retain(|_, v| *v != 0);
            m
        })
        .filter(|m| !m.is_empty())
        .collect();
    match eliminate_unit_pivots(&mut rows, n) {
        Some((rank, live_cols)) => {
            let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let dense: Vec<Vec<BigInt>> = rows
                .iter()
                .filter(|r| !r.is_empty())
                .map(|r| {
                    let mut v = vec![BigInt::zero(); live_cols.len()];
                    for (c, x) in r {
                        v[col_pos[c]] = BigInt::from(*x);
                    }
                    v
                })
                .collect();
            let mut dense = dense;
            let diag = dense_diagonal(&mut dense, live_cols.len());
            invariants_from_diagonal(n, rank + diag.len(), &diag)
        }
        None => abelian_invariants_of_matrix(&p.relation_matrix(), n),
    }
}

/// Eliminates columns that have a `+-1` entry. Returns the number of pivots
/// used and the surviving columns, or `None` on `i64` overflow.
fn eliminate_unit_pivots(rows: &mut [BTreeMap<usize, i64>], n_cols: usize) -> Option<(usize, Vec<usize>)> {
    let mut col_rows: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n_cols];
    for (i, r) in rows.iter().enumerate() {
        for &c in r.keys() {
            col_rows[c].insert(i);
        }
    }
    let mut col_alive = vec![true; n_cols];
    let mut rank = 0;
    loop {
        // pick a unit entry in the shortest row
        let mut best: Option<(usize, usize, usize)> = None; // (len, row, col)
        for (i, r) in rows.iter().enumerate() {
            if r.is_empty() || best.is_some_and(|b| r.len() >= b.0) {
                continue;
            }
            if let Some((&c, _)) = r.iter().find(|(_, v)| v.abs() == 1) {
                best = Some((r.len(), i, c));
            }
        }
        let Some((_, pr, pc)) = best else { break };
        let pivot_row = std::mem::take(&mut rows[pr]);
        let pv = pivot_row[&pc];
        for &c in pivot_row.keys() {
            col_rows[c].remove(&pr);
        }
        let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        for i in targets {
            let f = rows[i][&pc].checked_mul(pv)?; // pv = +-1, so f / pv = f * pv
            for (&c, &v) in &pivot_row {
                let e = rows[i].entry(c).or_insert(0);
                *e = e.checked_sub(f.checked_mul(v)?)?;
                if *e == 0 {
                    rows[i].remove(&c);
                    col_rows[c].remove(&i);
                } else {
                    col_rows[c].insert(i);
                }
            }
        }
        col_alive[pc] = false;
        rank += 1;
    }
    let live: Vec<usize> = (0..n_cols).filter(|&c| col_alive[c]).collect();
    Some((rank, live))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Word;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn diagonal_matrix() {
        let s = smith_normal_form(&[vec![2, 0], vec![0, 4]]);
        assert_eq!(s.factors, big(&[2, 4]));
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn dense_two_by_two() {
        // gcd of entries is 2 and |det| = 8
        let s = smith_normal_form(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(s.factors, big(&[2, 4]));
    }

    #[test]
    fn non_coprime_diagonal_is_normalized() {
        let s = smith_normal_form(&[vec![4, 0], vec![0, 6]]);
        assert_eq!(s.factors, big(&[2, 12]));
    }

    #[test]
    fn zero_matrix() {
        let s = smith_normal_form(&[vec![0, 0, 0], vec![0, 0, 0]]);
        assert!(s.factors.is_empty());
        assert_eq!(s.rank, 0);
        assert_eq!(s.zero_diagonal, 2);
    }

    #[test]
    fn polygonal_abelianizations() {
        let t = |sig: &[u32]| abelian_invariants(&Presentation::polygonal(sig));
        assert_eq!(t(&[2, 2, 2, 4]), AbelianInvariants::finite(vec![2, 2, 2]));
        assert_eq!(t(&[4, 4, 4]), AbelianInvariants::finite(vec![4, 4]));
        assert_eq!(t(&[2, 3, 7]), AbelianInvariants::finite(vec![]));
        assert_eq!(t(&[2, 3, 8]), AbelianInvariants::finite(vec![2]));
        assert_eq!(t(&[3, 3, 4]), AbelianInvariants::finite(vec![3]));
    }

    #[test]
    fn free_abelian_part() {
        let p = Presentation::new(3, vec![Word(vec![1, 2, -1, -2])]).unwrap();
        let a = abelian_invariants(&p);
        assert_eq!(a.free_rank, 3);
        assert!(a.torsion.is_empty());
    }

    #[test]
    fn quotient_test_alignment() {
        let t = AbelianInvariants::finite(vec![4, 4]);
        assert!(!AbelianInvariants::finite(vec![2, 2, 2]).is_quotient_of(&t));
        assert!(AbelianInvariants::finite(vec![2, 4]).is_quotient_of(&t));
        assert!(AbelianInvariants::finite(vec![2, 2, 2]).is_quotient_of(&AbelianInvariants::finite(vec![2, 2, 2])));
        assert!(!AbelianInvariants::finite(vec![8]).is_quotient_of(&t));
        let z = AbelianInvariants {
            free_rank: 1,
            torsion: vec![],
        };
        assert!(AbelianInvariants::finite(vec![12]).is_quotient_of(&z));
    }

    fn oracle_order(rows: &[Vec<i64>]) -> i64 {
        // |det| for square nonsingular integer matrices via fraction-free
        // elimination
        let n = rows.len();
        let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        (sign * a[n - 1][n - 1]).abs() as i64
    }

    proptest::proptest! {
        #[test]
        fn factor_product_is_determinant(entries in proptest::collection::vec(-6i64..=6, 9)) {
            let rows: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
            let s = smith_normal_form(&rows);
            let det = oracle_order(&rows);
            if det != 0 {
                let prod: BigInt = s.factors.iter().product();
                proptest::prop_assert_eq!(prod, BigInt::from(det));
                proptest::prop_assert_eq!(s.rank, 3);
            } else {
                proptest::prop_assert!(s.rank < 3);
            }
            for w in s.factors.windows(2) {
                proptest::prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }

        #[test]
        fn sparse_and_dense_paths_agree(entries in proptest::collection::vec(-3i64..=3, 20)) {
            let rows: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let rels: Vec<Word> = rows.iter().map(|r| {
                let mut w = Word::new();
                for (g, &e) in r.iter().enumerate() { w.append(&Word::power(g, e)); }
                w
            }).collect();
            let p = Presentation::new(4, rels).unwrap();
            proptest::prop_assert_eq!(abelian_invariants(&p), abelian_invariants_of_matrix(&rows, 4));
        }
    }
}
