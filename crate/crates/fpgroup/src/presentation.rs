use std::fmt;

use crate::word::{generator, Word};
use crate::FpError;

/// A finitely presented group `< x_1, .., x_n | relators >`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub n_gens: usize,
    pub relators: Vec<Word>,
}

impl Presentation {
    /// Builds a presentation, freely reducing the relators and dropping
    /// empty ones.
    pub fn new(n_gens: usize, relators: Vec<Word>) -> Result<Self, FpError> {
        let mut p = Presentation {
            n_gens,
            relators: Vec::with_capacity(relators.len()),
        };
        for r in relators {
            p.add_relator(r)?;
        }
        Ok(p)
    }

    pub fn free(n_gens: usize) -> Self {
        Presentation {
            n_gens,
            relators: Vec::new(),
        }
    }

    pub fn add_relator(&mut self, mut r: Word) -> Result<(), FpError> {
        if let Some(g) = r.max_generator() {
            if g >= self.n_gens {
                return Err(FpError::GeneratorOutOfRange {
                    generator: g,
                    n_gens: self.n_gens,
                });
            }
        }
        r.free_reduce();
        if !r.is_empty() {
            self.relators.push(r);
        }
        Ok(())
    }

    /// Polygonal group `< c_1..c_r | c_i^{m_i}, c_1 c_2 .. c_r >`.
    pub fn polygonal(signature: &[u32]) -> Self {
        let r = signature.len();
        let mut rels: Vec<Word> = signature
            .iter()
            .enumerate()
            .map(|(i, &m)| Word::power(i, m as i64))
            .collect();
        rels.push(Word::from_letters((0..r).map(|i| i as i32 + 1)));
        Presentation::new(r, rels).expect("generators in range")
    }

    /// Direct product: generators of `self` followed by those of `other`,
    /// both relator sets, and all commutators between the two blocks.
    pub fn direct_product(&self, other: &Presentation) -> Presentation {
        let shift = self.n_gens;
        let mut rels = self.relators.clone();
        for r in &other.relators {
            rels.push(Word(
                r.0.iter().map(|&l| l.signum() * (l.abs() + shift as i32)).collect(),
            ));
        }
        for a in 0..self.n_gens {
            for b in 0..other.n_gens {
                let x = a as i32 + 1;
                let y = (b + shift) as i32 + 1;
                rels.push(Word(vec![x, y, -x, -y]));
            }
        }
        Presentation {
            n_gens: self.n_gens + other.n_gens,
            relators: rels,
        }
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    /// Relator exponent-sum matrix (one row per relator).
    pub fn relation_matrix(&self) -> Vec<Vec<i64>> {
        self.relators.iter().map(|r| r.exponent_sums(self.n_gens)).collect()
    }

    /// Parses `gens n; rel <word>; rel <word>; ...`. Statements are separated
    /// by `;`, `#` starts a comment running to the end of the line.
    pub fn parse(text: &str) -> Result<Self, FpError> {
        let mut n_gens: Option<usize> = None;
        let mut rels = Vec::new();
        let mut line_no = 1;
        let mut stmt = String::new();
        let mut stmt_line = 1;
        let mut in_comment = false;
        let mut statements = Vec::new();
        for ch in text.chars() {
            if ch == '\n' {
                line_no += 1;
                in_comment = false;
                stmt.push(' ');
                continue;
            }
            if in_comment {
                continue;
            }
            match ch {
                '#' => in_comment = true,
                ';' => {
                    statements.push((stmt_line, std::mem::take(&mut stmt)));
                    stmt_line = line_no;
                }
                _ => {
                    if stmt.trim().is_empty() {
                        stmt_line = line_no;
                    }
                    stmt.push(ch);
                }
            }
        }
        if !stmt.trim().is_empty() {
            return Err(FpError::Parse {
                line: stmt_line,
                message: "missing `;` after statement".into(),
            });
        }
        for (line, s) in statements {
            let s = s.trim();
            if s.is_empty() {
                continue;
            }
            let (kw, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
            match kw {
                "gens" => {
                    let n = rest.trim().parse().map_err(|_| FpError::Parse {
                        line,
                        message: format!("bad generator count `{}`", rest.trim()),
                    })?;
                    n_gens = Some(n);
                }
                "rel" => {
                    let w = Word::parse(rest).map_err(|e| e.at_line(line))?;
                    rels.push((line, w));
                }
                other => {
                    return Err(FpError::Parse {
                        line,
                        message: format!("unknown statement `{other}`"),
                    })
                }
            }
        }
        let n_gens = n_gens.ok_or(FpError::Parse {
            line: 1,
            message: "missing `gens` statement".into(),
        })?;
        let mut p = Presentation::free(n_gens);
        for (line, w) in rels {
            p.add_relator(w).map_err(|e| e.at_line(line))?;
        }
        Ok(p)
    }

    /// Generators that occur in no relator.
    pub fn unused_generators(&self) -> Vec<usize> {
        let mut used = vec![false; self.n_gens];
        for r in &self.relators {
            for &l in &r.0 {
                used[generator(l)] = true;
            }
        }
        (0..self.n_gens).filter(|&g| !used[g]).collect()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gens {};", self.n_gens)?;
        for r in &self.relators {
            writeln!(f, "rel {};", r.render(self.n_gens))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygonal_2224() {
        let p = Presentation::polygonal(&[2, 2, 2, 4]);
        assert_eq!(p.n_gens, 4);
        assert_eq!(p.relators.len(), 5);
        assert_eq!(p.relators[3], Word(vec![4, 4, 4, 4]));
        assert_eq!(p.relators[4], Word(vec![1, 2, 3, 4]));
    }

    #[test]
    fn polygonal_single_entry_is_trivial_group_presentation() {
        let p = Presentation::polygonal(&[5]);
        assert_eq!(p.relators, vec![Word(vec![1; 5]), Word(vec![1])]);
    }

    #[test]
    fn text_round_trip() {
        let p = Presentation::polygonal(&[2, 3, 7]);
        let text = p.to_string();
        assert!(text.starts_with("gens 3;"));
        assert_eq!(Presentation::parse(&text).unwrap(), p);
    }

    #[test]
    fn parse_reports_line() {
        let err = Presentation::parse("gens 2;\nrel a b;\nrel c;\n").unwrap_err();
        match err {
            FpError::GeneratorOutOfRange { .. } | FpError::Parse { .. } => {}
            other => panic!("unexpected {other:?}"),
        }
        let err = Presentation::parse("gens 2;\nrel a q2x;\n").unwrap_err();
        assert!(matches!(err, FpError::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn direct_product_commutators() {
        let a = Presentation::polygonal(&[2, 2]);
        let p = a.direct_product(&a);
        assert_eq!(p.n_gens, 4);
        assert_eq!(p.relators.len(), 3 + 3 + 4);
    }
}
