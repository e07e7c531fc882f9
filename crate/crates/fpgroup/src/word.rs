//! Words in a free group.
//!
//! A letter is a nonzero `i32`: `g + 1` stands for generator `g` and
//! `-(g + 1)` for its inverse.

use std::fmt;

use crate::FpError;

/// Letter for generator `g` raised to `+1` (`inverse == false`) or `-1`.
#[inline]
pub fn letter(g: usize, inverse: bool) -> i32 {
    let l = g as i32 + 1;
    if inverse {
        -l
    } else {
        l
    }
}

/// Generator index of a letter.
#[inline]
pub fn generator(l: i32) -> usize {
    (l.unsigned_abs() - 1) as usize
}

/// Column of a letter in a coset table: `2g` for `g`, `2g + 1` for `g^-1`.
#[inline]
pub fn column(l: i32) -> usize {
    let g = generator(l);
    if l > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

/// Letter of a coset-table column.
#[inline]
pub fn column_letter(col: usize) -> i32 {
    letter(col / 2, col % 2 == 1)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut w = Word(Vec::new());
        for l in letters {
            w.push(l);
        }
        w
    }

    /// `g^e` as a word.
    pub fn power(g: usize, e: i64) -> Self {
        let l = letter(g, e < 0);
        Word(vec![l; e.unsigned_abs() as usize])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    /// Appends a letter, cancelling against the last one if possible.
    pub fn push(&mut self, l: i32) {
        debug_assert!(l != 0);
        if self.0.last() == Some(&-l) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn append(&mut self, other: &Word) {
        for &l in &other.0 {
            self.push(l);
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.append(other);
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    /// `self^e`, `e` possibly negative.
    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::new();
        for _ in 0..e.unsigned_abs() {
            w.append(&base);
        }
        w
    }

    /// `c * self * c^-1`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        let mut w = c.clone();
        w.append(self);
        w.append(&c.inverse());
        w
    }

    pub fn free_reduce(&mut self) {
        let mut out: Vec<i32> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        self.0 = out;
    }

    /// Free and cyclic reduction.
    pub fn cyclic_reduce(&mut self) {
        self.free_reduce();
        let n = self.0.len();
        let mut k = 0;
        while k < n / 2 && self.0[k] == -self.0[n - 1 - k] {
            k += 1;
        }
        if k > 0 {
            self.0 = self.0[k..n - k].to_vec();
        }
    }

    /// Canonical representative of the cyclic class of the word and of its
    /// inverse. Assumes the word is cyclically reduced.
    pub fn cyclic_canonical(&self) -> Word {
        if self.0.is_empty() {
            return Word::new();
        }
        let a = least_rotation(&self.0);
        let inv = self.inverse();
        let b = least_rotation(&inv.0);
        Word(a.min(b))
    }

    /// Replaces each generator `g` by `images[g]` (and inverses accordingly).
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut w = Word::new();
        for &l in &self.0 {
            let img = &images[generator(l)];
            if l > 0 {
                w.append(img);
            } else {
                w.append(&img.inverse());
            }
        }
        w
    }

    /// Exponent sum of every generator.
    pub fn exponent_sums(&self, n_gens: usize) -> Vec<i64> {
        let mut v = vec![0i64; n_gens];
        for &l in &self.0 {
            v[generator(l)] += l.signum() as i64;
        }
        v
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|&l| generator(l)).max()
    }

    /// Parses one word token stream, e.g. `a2 B a-1` or `1 -2 3`.
    ///
    /// Letter tokens are a generator letter (`a` = generator 0) with an
    /// optional signed exponent; an upper-case letter is the inverse.
    /// Integer tokens are signed 1-based generator indices.
    pub fn parse(text: &str) -> Result<Word, FpError> {
        let mut w = Word::new();
        for tok in text.split_whitespace() {
            parse_token(tok, &mut w)?;
        }
        Ok(w)
    }

    /// Renders with letters when there are at most 26 generators, otherwise
    /// with signed indices.
    pub fn render(&self, n_gens: usize) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        let l = &self.0;
        while i < l.len() {
            let mut j = i;
            while j < l.len() && l[j] == l[i] {
                j += 1;
            }
            let run = (j - i) as i64;
            let g = generator(l[i]);
            if n_gens <= 26 {
                let ch = (b'a' + g as u8) as char;
                let e = if l[i] > 0 { run } else { -run };
                if e == 1 {
                    parts.push(ch.to_string());
                } else if e == -1 {
                    parts.push(ch.to_ascii_uppercase().to_string());
                } else {
                    parts.push(format!("{ch}{e}"));
                }
            } else {
                for _ in 0..run {
                    parts.push(format!("{}", l[i]));
                }
            }
            i = j;
        }
        parts.join(" ")
    }
}

fn parse_token(tok: &str, w: &mut Word) -> Result<(), FpError> {
    let bad = || FpError::Parse {
        line: 0,
        message: format!("bad word token `{tok}`"),
    };
    let first = tok.chars().next().ok_or_else(bad)?;
    if first.is_ascii_alphabetic() {
        let g = (first.to_ascii_lowercase() as u8 - b'a') as usize;
        let inverse = first.is_ascii_uppercase();
        let rest = &tok[1..];
        let e: i64 = if rest.is_empty() {
            1
        } else {
            rest.parse().map_err(|_| bad())?
        };
        let e = if inverse { -e } else { e };
        w.append(&Word::power(g, e));
        Ok(())
    } else {
        let v: i32 = tok.parse().map_err(|_| bad())?;
        if v == 0 {
            return Err(bad());
        }
        w.push(v);
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        let n = self.max_generator().map_or(0, |g| g + 1);
        f.write_str(&self.render(n))
    }
}

/// Lexicographically least rotation (Booth's algorithm).
fn least_rotation(s: &[i32]) -> Vec<i32> {
    let n = s.len();
    let at = |i: usize| s[i % n];
    let mut f = vec![usize::MAX; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = f[j - k - 1];
        while i != usize::MAX && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = f[i];
        }
        if i == usize::MAX && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            f[j - k] = usize::MAX;
        } else {
            f[j - k] = if i == usize::MAX { 0 } else { i + 1 };
        }
    }
    (0..n).map(|i| at(k + i)).collect()
}
