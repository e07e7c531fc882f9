//! Singularity baskets and admissible signatures for a given `K^2`.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::CoreError;

pub type Q = Ratio<i64>;

/// `s` nodes (`A1`) and `t` points of type `A3` on the quotient surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Basket {
    pub s: u32,
    pub t: u32,
}

impl Basket {
    /// Nodes of the intermediate quotient: `n = 2s + t`.
    pub fn nodes_y(&self) -> u32 {
        2 * self.s + self.t
    }

    /// `8 - s - 5t/2`.
    pub fn k2(&self) -> Q {
        Q::from_integer(8) - Q::from_integer(self.s as i64) - Q::new(5 * self.t as i64, 2)
    }

    /// Table-style description, e.g. `2A1,2A3` or `-` when empty.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (k, name) in [(self.s, "A1"), (self.t, "A3")] {
            match k {
                0 => {}
                1 => parts.push(name.to_string()),
                k => parts.push(format!("{k}{name}")),
            }
        }
        if parts.is_empty() {
            "-".into()
        } else {
            parts.join(",")
        }
    }
}

/// All baskets with `s + 5t/2 = 8 - K^2`, `t` even, sorted by `t`.
pub fn baskets(k2: u32) -> Result<Vec<Basket>, CoreError> {
    if !(1..=8).contains(&k2) {
        return Err(CoreError::K2OutOfRange(k2));
    }
    let budget = 2 * (8 - k2); // 2s + 5t
    Ok((0..)
        .step_by(2)
        .take_while(|&t| 5 * t <= budget)
        .filter(|&t| (budget - 5 * t).is_multiple_of(2))
        .map(|t| Basket {
            s: (budget - 5 * t) / 2,
            t,
        })
        .collect())
}

/// `Theta = -2 + sum (m_i - 1) / m_i`.
pub fn theta(m: &[u32]) -> Q {
    m.iter()
        .fold(Q::from_integer(-2), |acc, &x| acc + Q::new(x as i64 - 1, x as i64))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NumericData {
    #[serde(serialize_with = "ser_ratio")]
    pub theta: Q,
    pub beta: u64,
    pub genus: u64,
    pub order_g0: u64,
    pub nodes_y: u32,
}

fn ser_ratio<S: serde::Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub m: Vec<u32>,
    pub data: NumericData,
}

impl Signature {
    /// Type notation, e.g. `2^3,4`.
    pub fn describe(&self) -> String {
        describe_type(&self.m)
    }
}

pub fn describe_type(m: &[u32]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < m.len() {
        let j = m[i..].iter().take_while(|&&x| x == m[i]).count();
        if j == 1 {
            parts.push(m[i].to_string());
        } else {
            parts.push(format!("{}^{}", m[i], j));
        }
        i += j;
    }
    parts.join(",")
}

/// Numerical constraints for signature `m` against `(K^2, basket)`, or
/// `None` if one fails.
pub fn numeric_data(k2: u32, basket: Basket, m: &[u32]) -> Option<NumericData> {
    let th = theta(m);
    if th <= Q::zero() {
        return None;
    }
    let beta = Q::from_integer(k2 as i64) / (th * 2);
    if !beta.is_integer() || beta.to_integer() < 1 {
        return None;
    }
    let beta = beta.to_integer() as u64;
    let num = 4 * beta * beta;
    if !num.is_multiple_of(k2 as u64) {
        return None;
    }
    let order_g0 = num / k2 as u64;
    if m.iter().any(|&x| !(2 * beta).is_multiple_of(x as u64)) {
        return None;
    }
    let n = basket.nodes_y();
    let not_dividing = m.iter().filter(|&&x| !beta.is_multiple_of(x as u64)).count() as u32;
    if 2 * not_dividing > n {
        return None;
    }
    Some(NumericData {
        theta: th,
        beta,
        genus: beta + 1,
        order_g0,
        nodes_y: n,
    })
}

/// Every admissible signature for `(K^2, basket)`, sorted lexicographically.
pub fn signatures(k2: u32, basket: Basket) -> Result<Vec<Signature>, CoreError> {
    if !baskets(k2)?.contains(&basket) {
        return Err(CoreError::InvalidBasket { k2, basket });
    }
    let mut out = Vec::new();
    for r in 3..(k2 as usize + 5) {
        // m_i <= (K^2 + 1) / M with M = max(1/6, (r - 3)/2)
        let big_m = std::cmp::max(Q::new(1, 6), Q::new(r as i64 - 3, 2));
        let bound = (Q::from_integer(k2 as i64 + 1) / big_m).floor().to_u32().unwrap_or(0);
        let mut m = vec![2u32; r];
        nondecreasing(&mut m, 0, 2, bound, &mut |m| {
            if let Some(data) = numeric_data(k2, basket, m) {
                out.push(Signature { m: m.to_vec(), data });
            }
        });
    }
    out.sort_by(|a, b| a.m.cmp(&b.m));
    Ok(out)
}

fn nondecreasing(m: &mut Vec<u32>, i: usize, lo: u32, hi: u32, f: &mut dyn FnMut(&[u32])) {
    if i == m.len() {
        f(m);
        return;
    }
    for x in lo..=hi {
        m[i] = x;
        nondecreasing(m, i + 1, x, hi, f);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceInvariants {
    pub chi: i64,
    pub k2: i64,
    pub e_s: i64,
    pub e_x: i64,
    pub b2: i64,
}

pub fn surface_invariants(k2: u32, basket: Basket) -> SurfaceInvariants {
    let k2 = k2 as i64;
    let e_s = 12 - k2;
    let e_x = e_s - basket.s as i64 - 3 * basket.t as i64;
    SurfaceInvariants {
        chi: 1,
        k2,
        e_s,
        e_x,
        b2: e_x - 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: u32, t: u32) -> Basket {
        Basket { s, t }
    }

    #[test]
    fn basket_lists() {
        assert_eq!(baskets(8).unwrap(), vec![b(0, 0)]);
        assert_eq!(baskets(1).unwrap(), vec![b(7, 0), b(2, 2)]);
        assert_eq!(baskets(2).unwrap(), vec![b(6, 0), b(1, 2)]);
        assert_eq!(baskets(4).unwrap(), vec![b(4, 0)]);
        assert!(baskets(0).is_err());
        assert!(baskets(9).is_err());
        for k2 in 1..=8 {
            for bk in baskets(k2).unwrap() {
                assert_eq!(bk.k2(), Q::from_integer(k2 as i64));
                assert_eq!(bk.t % 2, 0);
            }
        }
    }

    fn find(k2: u32, bk: Basket, m: &[u32]) -> Signature {
        signatures(k2, bk)
            .unwrap()
            .into_iter()
            .find(|s| s.m == m)
            .unwrap_or_else(|| panic!("{m:?} missing"))
    }

    #[test]
    fn known_signatures() {
        let s = find(1, b(2, 2), &[2, 2, 2, 4]);
        assert_eq!((s.data.beta, s.data.order_g0, s.data.nodes_y), (2, 16, 6));
        let s = find(2, b(1, 2), &[2, 2, 3, 3]);
        assert_eq!((s.data.beta, s.data.order_g0), (3, 18));
        let s = find(8, b(0, 0), &[2, 3, 8]);
        assert_eq!((s.data.beta, s.data.order_g0), (96, 4608));
    }

    #[test]
    fn hurwitz_identity_for_all_emitted() {
        for k2 in 1..=8 {
            for bk in baskets(k2).unwrap() {
                let sigs = signatures(k2, bk).unwrap();
                let mut sorted = sigs.iter().map(|s| s.m.clone()).collect::<Vec<_>>();
                sorted.dedup();
                assert_eq!(sorted.len(), sigs.len());
                for s in sigs {
                    let lhs = Q::from_integer(2 * (s.data.genus as i64 - 1));
                    assert_eq!(lhs, s.data.theta * s.data.order_g0 as i64);
                }
            }
        }
    }

    #[test]
    fn invariants() {
        let v = surface_invariants(1, b(2, 2));
        assert_eq!((v.e_s, v.e_x, v.b2), (11, 3, 1));
        let v = surface_invariants(8, b(0, 0));
        assert_eq!((v.e_s, v.e_x, v.b2), (4, 4, 2));
        let v = surface_invariants(2, b(6, 0));
        assert_eq!((v.e_s, v.e_x, v.b2), (10, 4, 2));
    }

    #[test]
    fn type_notation() {
        assert_eq!(describe_type(&[2, 2, 2, 4]), "2^3,4");
        assert_eq!(describe_type(&[4, 4, 4]), "4^3");
        assert_eq!(b(2, 2).describe(), "2A1,2A3");
        assert_eq!(b(1, 2).describe(), "A1,2A3");
        assert_eq!(b(0, 0).describe(), "-");
    }
}
