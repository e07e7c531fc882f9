//! Comparison of classification records with the known list of surfaces.

use serde::Serialize;

use crate::enumerate::Basket;
use crate::pi1::Pi1Status;
use crate::pipeline::ClassificationRecord;

/// What is known about `pi_1` for a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExpectedPi1 {
    /// Finite, of this order and structure label.
    Finite { order: u64, label: &'static str },
    /// Named only through a comparison; the pipeline must not claim an identification.
    Unnamed,
    /// Only `H1` is checked; a finite identification would be wrong.
    H1Only,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedRow {
    pub tag: &'static str,
    pub k2: u32,
    pub basket: Basket,
    pub signature: &'static [u32],
    pub g0_order: usize,
    pub g_order: usize,
    pub b2: i64,
    pub h1: &'static [u64],
    pub pi1: ExpectedPi1,
}

#[allow(clippy::too_many_arguments)]
const fn row(
    tag: &'static str,
    k2: u32,
    (s, t): (u32, u32),
    signature: &'static [u32],
    g0_order: usize,
    b2: i64,
    h1: &'static [u64],
    pi1: ExpectedPi1,
) -> ExpectedRow {
    ExpectedRow {
        tag,
        k2,
        basket: Basket { s, t },
        signature,
        g0_order,
        g_order: 2 * g0_order,
        b2,
        h1,
        pi1,
    }
}

use ExpectedPi1::{Finite, H1Only, Unnamed};

/// The known surfaces with `p_g = q = 0` of this construction.
pub const KNOWN_SURFACES: &[ExpectedRow] = &[
    row(
        "K1-a",
        1,
        (2, 2),
        &[2, 2, 2, 4],
        16,
        1,
        &[4],
        Finite { order: 4, label: "Z4" },
    ),
    row(
        "K2-a",
        2,
        (6, 0),
        &[2, 2, 2, 2, 2],
        8,
        2,
        &[2, 4],
        Finite {
            order: 8,
            label: "Z2xZ4",
        },
    ),
    row(
        "K2-b",
        2,
        (6, 0),
        &[4, 4, 4],
        32,
        2,
        &[2, 2, 2],
        Finite {
            order: 8,
            label: "Z2^3",
        },
    ),
    row(
        "K2-c",
        2,
        (1, 2),
        &[2, 2, 2, 4],
        32,
        1,
        &[4],
        Finite { order: 4, label: "Z4" },
    ),
    row(
        "K2-d",
        2,
        (1, 2),
        &[2, 2, 3, 3],
        18,
        1,
        &[3],
        Finite { order: 3, label: "Z3" },
    ),
    row(
        "K4-a",
        4,
        (4, 0),
        &[2, 2, 2, 2, 2],
        16,
        2,
        &[2, 8],
        Finite {
            order: 32,
            label: "Z2^2:Z8",
        },
    ),
    row("K4-b", 4, (4, 0), &[2, 2, 2, 2, 2], 16, 2, &[2, 2, 2, 4], Unnamed),
    row(
        "K4-c",
        4,
        (4, 0),
        &[4, 4, 4],
        64,
        2,
        &[2, 2, 2],
        Finite {
            order: 32,
            label: "Z4^2:Z2",
        },
    ),
    row("K8-a", 8, (0, 0), &[2, 2, 2, 2, 2], 32, 2, &[2, 2, 2, 8], H1Only),
    row("K8-b", 8, (0, 0), &[4, 4, 4], 128, 2, &[4, 4, 4], H1Only),
    row("K8-c", 8, (0, 0), &[4, 4, 4], 128, 2, &[2, 2, 2, 2, 4], H1Only),
    row("K8-d", 8, (0, 0), &[4, 4, 4], 128, 2, &[2, 2, 4, 4], H1Only),
    row("K8-e", 8, (0, 0), &[4, 4, 4], 128, 2, &[2, 2, 4, 4], H1Only),
];

impl ExpectedRow {
    /// The columns compared exactly: everything except `pi_1`.
    pub fn matches(&self, r: &ClassificationRecord) -> bool {
        r.k2 == self.k2
            && r.basket == self.basket
            && r.signature == self.signature
            && r.g0.order == self.g0_order
            && r.g_order == self.g_order
            && r.b2 == self.b2
            && r.h1_free_rank == 0
            && r.h1 == self.h1
    }

    pub fn pi1_agrees(&self, r: &ClassificationRecord) -> bool {
        match (self.pi1, &r.pi1_status) {
            (Finite { order, label }, Some(Pi1Status::Finite { order: o, label: l })) => {
                *o as u64 == order && l == label
            }
            (Finite { .. }, _) => false,
            (Unnamed | H1Only, Some(Pi1Status::Finite { .. })) => false,
            (Unnamed | H1Only, _) => true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RowOutcome {
    pub tag: &'static str,
    /// Index of the matched record.
    pub record: Option<usize>,
    pub pi1_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableComparison {
    pub rows: Vec<RowOutcome>,
    /// Records that correspond to no row.
    pub extra: Vec<usize>,
}

impl TableComparison {
    pub fn columns_ok(&self) -> bool {
        self.extra.is_empty() && self.rows.iter().all(|r| r.record.is_some())
    }

    pub fn pi1_ok(&self) -> bool {
        self.rows.iter().all(|r| r.pi1_ok)
    }
}

/// Matches records against the rows whose `K^2` is in `k2s`, as multisets.
///
/// Rows that agree on every compared column are interchangeable, so a greedy
/// assignment is exact.
pub fn compare(records: &[ClassificationRecord], k2s: &[u32]) -> TableComparison {
    let mut used = vec![false; records.len()];
    let mut rows = Vec::new();
    for row in KNOWN_SURFACES.iter().filter(|r| k2s.contains(&r.k2)) {
        let found = (0..records.len()).find(|&i| !used[i] && row.matches(&records[i]));
        if let Some(i) = found {
            used[i] = true;
        }
        rows.push(RowOutcome {
            tag: row.tag,
            record: found,
            pi1_ok: found.is_some_and(|i| row.pi1_agrees(&records[i])),
        });
    }
    let extra = (0..records.len()).filter(|&i| !used[i]).collect();
    TableComparison { rows, extra }
}
