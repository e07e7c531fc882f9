//! Permutations of `0..degree`, read and written in 1-based cycle notation.

use std::fmt;

use crate::GroupError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u16>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u16).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    /// `self` followed by `other`: `x -> other(self(x))`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0u16; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            v[x as usize] = i as u16;
        }
        Perm(v)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// Largest moved point plus one (0 for the identity).
    pub fn support_bound(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i != x as usize)
            .map(|(i, _)| i + 1)
            .max()
            .unwrap_or(0)
    }

    /// Parses e.g. `(1 2 3)(4 5)` or `()`. Points are 1-based and must not
    /// exceed `degree`; commas between points are accepted.
    pub fn parse(text: &str, degree: usize) -> Result<Perm, GroupError> {
        let mut images: Vec<u16> = (0..degree as u16).collect();
        let mut seen = vec![false; degree];
        let bad = |m: String| GroupError::Parse { line: 0, message: m };
        let s = text.trim();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| bad(format!("expected `(` in `{s}`")))?;
            let close = open.find(')').ok_or_else(|| bad(format!("unclosed cycle in `{s}`")))?;
            let body = &open[..close];
            let mut cycle = Vec::new();
            for tok in body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
            {
                let p: usize = tok.parse().map_err(|_| bad(format!("bad point `{tok}`")))?;
                if p == 0 || p > degree {
                    return Err(bad(format!("point {p} outside 1..{degree}")));
                }
                if seen[p - 1] {
                    return Err(bad(format!("point {p} repeated in `{s}`")));
                }
                seen[p - 1] = true;
                cycle.push(p - 1);
            }
            for i in 0..cycle.len() {
                images[cycle[i]] = cycle[(i + 1) % cycle.len()] as u16;
            }
            rest = open[close + 1..].trim_start();
        }
        Ok(Perm(images))
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut c = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                c.push(x);
                x = self.apply(x);
            }
            out.push(c);
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p = Perm::parse("(1 2 3)(4 5)", 5).unwrap();
        assert_eq!(p.0, vec![1, 2, 0, 4, 3]);
        assert_eq!(p.to_string(), "(1 2 3)(4 5)");
        assert_eq!(Perm::parse("()", 3).unwrap(), Perm::identity(3));
        assert_eq!(Perm::parse("(1,2)", 2).unwrap().0, vec![1, 0]);
    }

    #[test]
    fn malformed() {
        assert!(Perm::parse("(1 2", 3).is_err());
        assert!(Perm::parse("(1 4)", 3).is_err());
        assert!(Perm::parse("(1 2 1)", 3).is_err());
        assert!(Perm::parse("1 2", 3).is_err());
    }

    #[test]
    fn composition_order() {
        let a = Perm::parse("(1 2)", 3).unwrap();
        let b = Perm::parse("(2 3)", 3).unwrap();
        // 1 -> 2 -> 3
        assert_eq!(a.then(&b).apply(0), 2);
        assert!(a.then(&a.inverse()).is_identity());
    }
}
