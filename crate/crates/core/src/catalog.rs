//! Group catalogs: a text format for permutation groups, named families and
//! semidirect products.
//!
//! ```text
//! # comment
//! group D4xC2 16 6
//! gen (1 2 3 4)
//! gen (1 3)
//! gen (5 6)
//! ```

use std::collections::{HashMap, HashSet};

use crate::aut::Automorphism;
use crate::group::{FiniteGroup, DEFAULT_ORDER_CAP};
use crate::perm::Perm;
use crate::{CoreError, GroupError};

/// The groups `G` behind the known surfaces with `p_g = 0`, as permutation
/// groups.
pub const BUNDLED_CATALOG: &str = include_str!("../data/groups.catalog");

pub fn bundled_catalog() -> Vec<CatalogEntry> {
    parse_catalog(BUNDLED_CATALOG).expect("bundled catalog parses")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<String>,
    pub claimed_order: usize,
}

impl CatalogEntry {
    pub fn build(&self) -> Result<FiniteGroup, CoreError> {
        let gens: Vec<&str> = self.generators.iter().map(String::as_str).collect();
        let g = FiniteGroup::build(&gens, self.degree)?;
        if g.order() != self.claimed_order {
            return Err(CoreError::OrderMismatch {
                name: self.name.clone(),
                claimed: self.claimed_order,
                actual: g.order(),
            });
        }
        Ok(g)
    }

    /// Entry text for a permutation group.
    pub fn from_group(name: &str, g: &FiniteGroup) -> Option<CatalogEntry> {
        let perms = g.perms()?;
        let gens: Vec<String> = g.generators().iter().map(|&x| perms[x].to_string()).collect();
        Some(CatalogEntry {
            name: name.to_string(),
            degree: perms[0].degree(),
            generators: gens,
            claimed_order: g.order(),
        })
    }

    pub fn render(&self) -> String {
        let mut s = format!("group {} {} {}\n", self.name, self.claimed_order, self.degree);
        for g in &self.generators {
            s.push_str("gen ");
            s.push_str(g);
            s.push('\n');
        }
        s
    }
}

/// Parses a catalog and builds every entry to check its order.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, CoreError> {
    let mut entries: Vec<(usize, CatalogEntry)> = Vec::new();
    let mut names = HashSet::new();
    let err = |line: usize, message: String| CoreError::Group(GroupError::Parse { line, message });
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match kw {
            "group" => {
                let f: Vec<&str> = rest.split_whitespace().collect();
                let [name, order, degree] = f[..] else {
                    return Err(err(line_no, "expected `group <name> <order> <degree>`".into()));
                };
                let claimed_order = order
                    .parse()
                    .map_err(|_| err(line_no, format!("bad order `{order}`")))?;
                let degree = degree
                    .parse()
                    .map_err(|_| err(line_no, format!("bad degree `{degree}`")))?;
                if !names.insert(name.to_string()) {
                    return Err(CoreError::DuplicateName(name.to_string()));
                }
                entries.push((
                    line_no,
                    CatalogEntry {
                        name: name.to_string(),
                        degree,
                        generators: Vec::new(),
                        claimed_order,
                    },
                ));
            }
            "gen" => {
                let Some((_, e)) = entries.last_mut() else {
                    return Err(err(line_no, "`gen` before any `group`".into()));
                };
                Perm::parse(rest.trim(), e.degree).map_err(|e| CoreError::Group(e.at_line(line_no)))?;
                e.generators.push(rest.trim().to_string());
            }
            other => return Err(err(line_no, format!("unknown keyword `{other}`"))),
        }
    }
    for (line_no, e) in &entries {
        if e.generators.is_empty() {
            return Err(err(*line_no, format!("group {} has no generators", e.name)));
        }
        e.build()?;
    }
    Ok(entries.into_iter().map(|(_, e)| e).collect())
}

/// A parametrized family of groups.
pub trait Family: Sync {
    fn name(&self) -> &'static str;
    fn build(&self, params: &[i64]) -> Result<FiniteGroup, CoreError>;
}

struct Cyclic;
struct Abelian;
struct Dihedral;
struct Dpqr;

static FAMILIES: [&dyn Family; 4] = [&Cyclic, &Abelian, &Dihedral, &Dpqr];

pub fn family_names() -> Vec<&'static str> {
    FAMILIES.iter().map(|f| f.name()).collect()
}

pub fn family(kind: &str, params: &[i64]) -> Result<FiniteGroup, CoreError> {
    FAMILIES
        .iter()
        .find(|f| f.name() == kind)
        .ok_or_else(|| CoreError::Parameters(format!("unknown family `{kind}`")))?
        .build(params)
}

fn positive(params: &[i64], what: &str) -> Result<Vec<usize>, CoreError> {
    if params.is_empty() || params.iter().any(|&p| p < 1) {
        return Err(CoreError::Parameters(format!(
            "{what} needs positive parameters, got {params:?}"
        )));
    }
    Ok(params.iter().map(|&p| p as usize).collect())
}

fn cycle(start: usize, len: usize, degree: usize) -> Perm {
    let mut p: Vec<u16> = (0..degree as u16).collect();
    for i in 0..len {
        p[start + i] = (start + (i + 1) % len) as u16;
    }
    Perm(p)
}

impl Family for Cyclic {
    fn name(&self) -> &'static str {
        "cyclic"
    }
    fn build(&self, params: &[i64]) -> Result<FiniteGroup, CoreError> {
        let n = positive(params, "cyclic")?;
        if n.len() != 1 {
            return Err(CoreError::Parameters("cyclic takes one parameter".into()));
        }
        Abelian.build(params)
    }
}

impl Family for Abelian {
    fn name(&self) -> &'static str {
        "abelian"
    }
    /// Direct product of cyclic groups on disjoint points.
    fn build(&self, params: &[i64]) -> Result<FiniteGroup, CoreError> {
        let ns = positive(params, "abelian")?;
        let degree: usize = ns.iter().sum();
        let mut start = 0;
        let mut gens = Vec::new();
        for &n in &ns {
            gens.push(cycle(start, n, degree));
            start += n;
        }
        Ok(FiniteGroup::from_perms(&gens, DEFAULT_ORDER_CAP)?)
    }
}

impl Family for Dihedral {
    fn name(&self) -> &'static str {
        "dihedral"
    }
    /// Order `2n`, as `D_{2,n,-1}`.
    fn build(&self, params: &[i64]) -> Result<FiniteGroup, CoreError> {
        let n = positive(params, "dihedral")?;
        if n.len() != 1 {
            return Err(CoreError::Parameters("dihedral takes one parameter".into()));
        }
        Dpqr.build(&[2, params[0], -1])
    }
}

impl Family for Dpqr {
    fn name(&self) -> &'static str {
        "Dpqr"
    }
    /// `<x, y | x^p, y^q, x y x^-1 y^-r>` of order `pq`, on its elements
    /// `y^b x^a`.
    fn build(&self, params: &[i64]) -> Result<FiniteGroup, CoreError> {
        let [p, q, r] = params[..] else {
            return Err(CoreError::Parameters("Dpqr takes p, q, r".into()));
        };
        if p < 1 || q < 1 {
            return Err(CoreError::Parameters(format!("Dpqr({p},{q},{r}) needs p, q >= 1")));
        }
        let r = r.rem_euclid(q);
        let mut rp = 1 % q;
        for _ in 0..p {
            rp = rp * r % q;
        }
        if rp != 1 % q || num_gcd(r, q) != 1 {
            return Err(CoreError::Parameters(format!(
                "r^p must be 1 mod q and r a unit, got Dpqr({p},{q},{r})"
            )));
        }
        let (p, q) = (p as usize, q as usize);
        let powers: Vec<usize> = (0..p)
            .scan(1usize, |acc, _| {
                let v = *acc;
                *acc = *acc * r as usize % q;
                Some(v)
            })
            .collect();
        let idx = |b: usize, a: usize| b * p + a;
        // (y^b x^a)(y^d x^c) = y^(b + d r^a) x^(a + c)
        let right = |d: usize, c: usize| -> Perm {
            Perm(
                (0..q)
                    .flat_map(|b| (0..p).map(move |a| (b, a)))
                    .map(|(b, a)| idx((b + d * powers[a]) % q, (a + c) % p) as u16)
                    .collect(),
            )
        };
        Ok(FiniteGroup::from_perms(&[right(0, 1), right(1, 0)], DEFAULT_ORDER_CAP)?)
    }
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        num_gcd(b, a % b)
    }
}

/// `N x| H` with `H`'s generator `k` acting on `N` by `action[k]`. The
/// result carries its regular permutation representation; its generators
/// are those of `N` followed by those of `H`.
pub fn semidirect(n: &FiniteGroup, h: &FiniteGroup, action: &[Automorphism]) -> Result<FiniteGroup, CoreError> {
    if action.len() != h.generators().len() {
        return Err(CoreError::Action("one automorphism per generator of H".into()));
    }
    for a in action {
        let ok = a.len() == n.order()
            && (0..n.order())
                .all(|x| (0..n.order()).all(|y| a[n.mul(x, y)] as usize == n.mul(a[x] as usize, a[y] as usize)));
        if !ok {
            return Err(CoreError::Action("not an automorphism of N".into()));
        }
    }
    // theta on all of H, checking consistency along every edge
    let mut theta: Vec<Option<Automorphism>> = vec![None; h.order()];
    theta[0] = Some((0..n.order() as u16).collect());
    let mut queue = vec![0usize];
    while let Some(x) = queue.pop() {
        let tx = theta[x].clone().expect("visited");
        for (k, &s) in h.generators().iter().enumerate() {
            let y = h.mul(x, s);
            // theta(x s) = theta(x) o theta(s)
            let ty: Automorphism = action[k].iter().map(|&v| tx[v as usize]).collect();
            match &theta[y] {
                Some(t) if *t != ty => return Err(CoreError::Action("does not extend to a homomorphism".into())),
                Some(_) => {}
                None => {
                    theta[y] = Some(ty);
                    queue.push(y);
                }
            }
        }
    }
    let theta: Vec<Automorphism> = theta.into_iter().map(|t| t.expect("H is generated")).collect();
    let mul = |a: &(usize, usize), b: &(usize, usize)| -> (usize, usize) {
        (n.mul(a.0, theta[a.1][b.0] as usize), h.mul(a.1, b.1))
    };
    let gens: Vec<(usize, usize)> = n
        .generators()
        .iter()
        .map(|&x| (x, 0))
        .chain(h.generators().iter().map(|&y| (0, y)))
        .collect();
    let (g, _) = FiniteGroup::from_closure((0, 0), &gens, mul, DEFAULT_ORDER_CAP)?;
    let perms = g.regular_perms(g.generators());
    Ok(FiniteGroup::from_perms(&perms, DEFAULT_ORDER_CAP)?)
}

/// Automorphism of `g` given by generator images, if it is one.
pub fn automorphism_from_images(g: &FiniteGroup, images: &[usize]) -> Option<Automorphism> {
    let gens = g.generators();
    if images.len() != gens.len() {
        return None;
    }
    let mut map: HashMap<usize, usize> = HashMap::from([(0, 0)]);
    let mut queue = vec![0usize];
    while let Some(x) = queue.pop() {
        let fx = map[&x];
        for (k, &s) in gens.iter().enumerate() {
            let y = g.mul(x, s);
            let fy = g.mul(fx, images[k]);
            match map.get(&y) {
                Some(&v) if v != fy => return None,
                Some(_) => {}
                None => {
                    map.insert(y, fy);
                    queue.push(y);
                }
            }
        }
    }
    let a: Automorphism = (0..g.order()).map(|x| map[&x] as u16).collect();
    let mut seen = vec![false; g.order()];
    for &v in &a {
        if std::mem::replace(&mut seen[v as usize], true) {
            return None;
        }
    }
    Some(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_simple() {
        let c = parse_catalog("# one group\ngroup C2 2 2\ngen (1 2)\n").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].build().unwrap().order(), 2);
        assert_eq!(parse_catalog(&c[0].render()).unwrap(), c);
    }

    #[test]
    fn parse_errors() {
        let e = parse_catalog("group S3 5 3\ngen (1 2 3)\ngen (1 2)\n").unwrap_err();
        assert!(matches!(
            e,
            CoreError::OrderMismatch {
                claimed: 5,
                actual: 6,
                ..
            }
        ));
        let e = parse_catalog("group A 2 2\ngen (1 2)\n\ngroup A 2 2\ngen (1 2)\n").unwrap_err();
        assert!(matches!(e, CoreError::DuplicateName(_)));
        let e = parse_catalog("group A 2 2\ngen (1 2\n").unwrap_err();
        assert!(matches!(e, CoreError::Group(GroupError::Parse { line: 2, .. })));
        let e = parse_catalog("gen (1 2)\n").unwrap_err();
        assert!(matches!(e, CoreError::Group(GroupError::Parse { line: 1, .. })));
        let e = parse_catalog("group A two 2\n").unwrap_err();
        assert!(matches!(e, CoreError::Group(GroupError::Parse { line: 1, .. })));
    }

    #[test]
    fn families() {
        assert_eq!(family("cyclic", &[4]).unwrap().order(), 4);
        assert!(family("cyclic", &[4]).unwrap().is_abelian());
        let d4 = family("dihedral", &[4]).unwrap();
        assert_eq!(d4.order(), 8);
        let d = family("Dpqr", &[2, 4, -1]).unwrap();
        assert_eq!(d4.perms(), d.perms());
        let d285 = family("Dpqr", &[2, 8, 5]).unwrap();
        assert_eq!(d285.order(), 16);
        assert!(!d285.is_abelian());
        assert!(family("Dpqr", &[2, 8, 3]).is_ok());
        assert!(family("Dpqr", &[2, 8, 2]).is_err());
        assert!(family("Dpqr", &[3, 8, 5]).is_err());
        assert!(family("cyclic", &[0]).is_err());
        assert!(family("klein", &[4]).is_err());
        assert_eq!(family("abelian", &[2, 4]).unwrap().abelian_invariants(), vec![2, 4]);
    }

    fn order_profile(g: &FiniteGroup) -> Vec<u32> {
        let mut v: Vec<u32> = (0..g.order()).map(|x| g.elem_order(x)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn dihedral_matches_dpqr_with_r_minus_one() {
        for n in 2..10 {
            let a = family("dihedral", &[n]).unwrap();
            let b = family("Dpqr", &[2, n, n - 1]).unwrap();
            assert_eq!(a.order(), b.order());
            assert_eq!(order_profile(&a), order_profile(&b));
            assert_eq!(a.abelian_invariants(), b.abelian_invariants());
        }
    }

    #[test]
    fn semidirect_products() {
        let c3 = family("cyclic", &[3]).unwrap();
        let c2 = family("cyclic", &[2]).unwrap();
        let inv: Automorphism = (0..3).map(|x| c3.inv(x) as u16).collect();
        let s3 = semidirect(&c3, &c2, std::slice::from_ref(&inv)).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());

        let id3: Automorphism = (0..3).collect();
        let c4 = family("cyclic", &[4]).unwrap();
        let direct = semidirect(&c3, &c4, &[id3]).unwrap();
        assert_eq!(direct.order(), 12);
        assert_eq!(direct.abelian_invariants(), vec![12]);
        // inversion has order 2, fine for C2 but a C3 generator cannot act by it
        assert!(semidirect(&c3, &family("cyclic", &[3]).unwrap(), &[inv]).is_err());
        let bad: Automorphism = vec![0, 2, 2];
        assert!(semidirect(&c3, &c2, &[bad]).is_err());
    }

    #[test]
    fn order_four_action_on_c3_squared() {
        let n = family("abelian", &[3, 3]).unwrap();
        let (a, b) = (n.generators()[0], n.generators()[1]);
        // (x, y) -> (-y, x)
        let rot = automorphism_from_images(&n, &[b, n.inv(a)]).unwrap();
        let c4 = family("cyclic", &[4]).unwrap();
        let g = semidirect(&n, &c4, &[rot]).unwrap();
        assert_eq!(g.order(), 36);
        let ms = crate::mixed::mixed_structures(&std::sync::Arc::new(g));
        assert!(ms.iter().any(|m| m.g0.abelian_invariants() == vec![2]));
    }

    #[test]
    fn images_that_do_not_extend() {
        let c4 = family("cyclic", &[4]).unwrap();
        let x = c4.generators()[0];
        assert!(automorphism_from_images(&c4, &[c4.inv(x)]).is_some());
        assert!(automorphism_from_images(&c4, &[c4.mul(x, x)]).is_none());
    }
}
