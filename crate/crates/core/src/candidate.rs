//! A single candidate surface as text: a catalog group, the position of
//! `G0` among its index-2 subgroups and the tuple as permutations of `G`.
//!
//! ```text
//! group Z2^2:Z4 16 8
//! gen (1 5 3 7)(2 6 4 8)
//! gen (5 6)(7 8)
//! g0 1
//! h (1 3)(2 4)(5 7)(6 8)
//! h ...
//! ```

use std::sync::Arc;

use crate::catalog::{parse_catalog, CatalogEntry};
use crate::mixed::MixedStructure;
use crate::perm::Perm;
use crate::pipeline::ClassificationRecord;
use crate::spherical::SphericalSystem;
use crate::{CoreError, GroupError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateFile {
    pub entry: CatalogEntry,
    pub g0_index: usize,
    pub tuple: Vec<String>,
}

fn parse_err(line: usize, message: impl Into<String>) -> CoreError {
    CoreError::Group(GroupError::Parse {
        line,
        message: message.into(),
    })
}

impl CandidateFile {
    pub fn parse(text: &str) -> Result<CandidateFile, CoreError> {
        let mut group_text = String::new();
        let mut g0_index = None;
        let mut tuple = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match kw {
                "g0" => {
                    let n = rest
                        .trim()
                        .parse()
                        .map_err(|_| parse_err(i + 1, format!("bad index `{}`", rest.trim())))?;
                    g0_index = Some(n);
                }
                "h" => tuple.push(rest.trim().to_string()),
                _ => {
                    // keep line numbers aligned for catalog errors
                    group_text.push_str(raw);
                }
            }
            group_text.push('\n');
        }
        let mut entries = parse_catalog(&group_text)?;
        if entries.len() != 1 {
            return Err(parse_err(0, format!("expected one group, found {}", entries.len())));
        }
        let g0_index = g0_index.ok_or_else(|| parse_err(0, "missing `g0` line"))?;
        if tuple.is_empty() {
            return Err(parse_err(0, "missing `h` lines"));
        }
        Ok(CandidateFile {
            entry: entries.remove(0),
            g0_index,
            tuple,
        })
    }

    /// The candidate behind a record, given the catalog entry it names.
    pub fn from_record(record: &ClassificationRecord, entry: &CatalogEntry) -> CandidateFile {
        CandidateFile {
            entry: entry.clone(),
            g0_index: record.g0.index,
            tuple: record.representative.clone(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = self.entry.render();
        s.push_str(&format!("g0 {}\n", self.g0_index));
        for h in &self.tuple {
            s.push_str(&format!("h {h}\n"));
        }
        s
    }

    /// Builds the structure and checks that the tuple is a spherical system
    /// of `G0` whose orders are nondecreasing.
    pub fn resolve(&self) -> Result<(Arc<MixedStructure>, SphericalSystem), CoreError> {
        let g = Arc::new(self.entry.build()?);
        let subs = g.index_two_subgroups();
        let sub = subs.get(self.g0_index).ok_or_else(|| {
            CoreError::Parameters(format!("no index-2 subgroup #{} (G has {})", self.g0_index, subs.len()))
        })?;
        let mx = MixedStructure::new(g.clone(), sub.clone())
            .ok_or_else(|| CoreError::Parameters(format!("subgroup {} gives a split extension", self.g0_index)))?;
        let perms = g.perms().expect("catalog groups are permutation groups");
        let mut tuple = Vec::new();
        for h in &self.tuple {
            let p = Perm::parse(h, self.entry.degree)?;
            let x = perms
                .iter()
                .position(|q| *q == p)
                .ok_or_else(|| CoreError::Parameters(format!("{h} is not in G")))?;
            let y = mx.project[x];
            if y == usize::MAX {
                return Err(CoreError::Parameters(format!("{h} is not in G0")));
            }
            tuple.push(y);
        }
        let signature: Vec<u32> = tuple.iter().map(|&h| mx.g0.elem_order(h)).collect();
        let sys = SphericalSystem {
            group: mx.g0.clone(),
            tuple,
            signature: signature.clone(),
        };
        if !signature.windows(2).all(|w| w[0] <= w[1]) || !sys.verify() {
            return Err(CoreError::Parameters(
                "the tuple is not a spherical system of G0".into(),
            ));
        }
        Ok((Arc::new(mx), sys))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const C4: &str = "group C4xC2 8 6\ngen (1 2 3 4)\ngen (5 6)\n";

    #[test]
    fn round_trip() {
        let text = format!("{C4}g0 0\nh (1 3)(2 4)\nh (1 3)(2 4)\n");
        let c = CandidateFile::parse(&text).unwrap();
        assert_eq!(c.g0_index, 0);
        assert_eq!(c.tuple.len(), 2);
        assert_eq!(CandidateFile::parse(&c.render()).unwrap(), c);
    }

    #[test]
    fn missing_parts() {
        assert!(CandidateFile::parse(&format!("{C4}h (1 3)(2 4)\n")).is_err());
        assert!(CandidateFile::parse(&format!("{C4}g0 0\n")).is_err());
        assert!(CandidateFile::parse("g0 0\nh ()\n").is_err());
    }

    #[test]
    fn split_and_non_generating_candidates_are_rejected() {
        let g = Arc::new(parse_catalog(C4).unwrap()[0].build().unwrap());
        let subs = g.index_two_subgroups();
        assert_eq!(subs.len(), 3);
        for (i, sub) in subs.iter().enumerate() {
            let c = CandidateFile::parse(&format!("{C4}g0 {i}\nh (1 3)(2 4)\nh (1 3)(2 4)\n")).unwrap();
            let err = c.resolve().unwrap_err().to_string();
            if MixedStructure::new(g.clone(), sub.clone()).is_none() {
                assert!(err.contains("split"), "{err}");
            } else {
                // (1 3)(2 4) generates a proper subgroup of G0
                assert!(err.contains("not a spherical system"), "{err}");
            }
        }
        let c = CandidateFile::parse(&format!("{C4}g0 3\nh ()\n")).unwrap();
        assert!(c.resolve().is_err());
    }
}
