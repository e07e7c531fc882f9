//! End-to-end checks over a catalog: the known surfaces, the two singularity
//! counts, the numerical identities, subgroup presentations of triangle
//! groups, pruning and orbit independence.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qetale_fpgroup::{
    abelian_invariants, reidemeister_schreier, simplify, todd_coxeter, AbelianInvariants, Presentation, Word,
};

use crate::catalog::CatalogEntry;
use crate::enumerate::{baskets, signatures, surface_invariants, theta, Basket, Q};
use crate::group::FiniteGroup;
use crate::pi1::Pi1Status;
use crate::pipeline::{member_record, run_on_groups, PipelineConfig, PipelineReport};
use crate::report::emit;
use crate::singular::{count_singularities, fixed_point_census};
use crate::spherical::{spherical_systems, SphericalSystem};
use crate::verify::{compare, KNOWN_SURFACES};
use crate::{mixed_structures, CoreError};

/// Largest `|G0|` for which counts are compared with the point census.
pub const CENSUS_MAX_G0: usize = 64;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub number: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {} [{}] {verdict}: {}",
            self.number, self.name, self.detail
        )
    }
}

/// Pipeline output for every `K^2` over one catalog.
pub struct SuiteRun {
    pub catalog: Vec<CatalogEntry>,
    pub groups: Vec<Arc<FiniteGroup>>,
    pub config: PipelineConfig,
    /// Indexed by `K^2 - 1`.
    pub reports: Vec<PipelineReport>,
    pub elapsed: Duration,
}

impl SuiteRun {
    pub fn new(catalog: Vec<CatalogEntry>, config: PipelineConfig) -> Result<SuiteRun, CoreError> {
        let start = Instant::now();
        let groups = catalog
            .iter()
            .map(|e| e.build().map(Arc::new))
            .collect::<Result<Vec<_>, _>>()?;
        let mut reports = Vec::new();
        for k2 in 1..=8 {
            reports.push(run_on_groups(k2, &catalog, &groups, &config)?);
        }
        Ok(SuiteRun {
            catalog,
            groups,
            config,
            reports,
            elapsed: start.elapsed(),
        })
    }

    pub fn report(&self, k2: u32) -> &PipelineReport {
        &self.reports[k2 as usize - 1]
    }

    fn all_records(&self) -> Vec<crate::pipeline::ClassificationRecord> {
        self.reports.iter().flat_map(|r| r.records.iter().cloned()).collect()
    }
}

pub fn run_all(run: &SuiteRun) -> Vec<CriterionResult> {
    vec![
        known_surfaces(run),
        finite_fundamental_groups(run),
        singularity_census(run),
        enumeration_identities(run),
        triangle_commutators(),
        pruning(run),
        orbit_independence(run),
    ]
}

/// Criterion 1: every known surface appears once, and nothing else does.
pub fn known_surfaces(run: &SuiteRun) -> CriterionResult {
    let records = run.all_records();
    let cmp = compare(&records, &[1, 2, 3, 4, 5, 6, 7, 8]);
    let counts: Vec<usize> = run.reports.iter().map(|r| r.records.len()).collect();
    let failures: usize = run.reports.iter().map(|r| r.failures.len()).sum();
    let missing: Vec<&str> = cmp.rows.iter().filter(|r| r.record.is_none()).map(|r| r.tag).collect();
    let passed = cmp.columns_ok() && records.len() == KNOWN_SURFACES.len() && failures == 0;
    CriterionResult {
        number: 1,
        name: "known surfaces",
        passed,
        detail: format!(
            "{} records (per K^2 {:?}), missing {:?}, unexpected {}, task failures {}, {:.1}s",
            records.len(),
            counts,
            missing,
            cmp.extra.len(),
            failures,
            run.elapsed.as_secs_f64()
        ),
    }
}

/// Criterion 2: identified fundamental groups.
pub fn finite_fundamental_groups(run: &SuiteRun) -> CriterionResult {
    let records = run.all_records();
    let cmp = compare(&records, &[1, 2, 3, 4, 5, 6, 7, 8]);
    let mut lines = Vec::new();
    for row in &cmp.rows {
        let got = row.record.map_or("missing".to_string(), |i| records[i].pi1.clone());
        lines.push(format!("{}={}{}", row.tag, got, if row.pi1_ok { "" } else { " (!)" }));
    }
    CriterionResult {
        number: 2,
        name: "fundamental groups",
        passed: cmp.rows.iter().all(|r| r.record.is_some() && r.pi1_ok),
        detail: lines.join(", "),
    }
}

/// Criterion 3: the class-counting formula against the point census, for
/// every accepted system of every candidate with small `G0`.
pub fn singularity_census(run: &SuiteRun) -> CriterionResult {
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for report in &run.reports {
        for (rec, cand) in report.records.iter().zip(&report.candidates) {
            let mx = &cand.orbit.representative.structure;
            if mx.g0.order() > CENSUS_MAX_G0 {
                continue;
            }
            for sys in &cand.accepted {
                checked += 1;
                let formula = count_singularities(mx, sys).map(|c| (c.n, c.t)).ok();
                let census = fixed_point_census(mx, sys);
                if census.max_stabilizer > 2 || formula != census.n_t(mx.g0.order()) {
                    mismatches.push(format!("{} {}", rec.g_label, rec.sig_type));
                }
            }
        }
    }
    CriterionResult {
        number: 3,
        name: "singularity census",
        passed: checked > 0 && mismatches.is_empty(),
        detail: format!(
            "{checked} systems compared, {} mismatches {:?}",
            mismatches.len(),
            mismatches
        ),
    }
}

/// Criterion 4: the numerical identities behind the enumeration.
pub fn enumeration_identities(run: &SuiteRun) -> CriterionResult {
    let mut problems = Vec::new();
    let mut n_sigs = 0usize;
    for k2 in 1..=8u32 {
        let Ok(bs) = baskets(k2) else {
            problems.push(format!("baskets({k2}) failed"));
            continue;
        };
        for b in bs {
            let k = Q::from_integer(8) - Q::from_integer(b.s as i64) - Q::new(5 * b.t as i64, 2);
            if k != Q::from_integer(k2 as i64) || b.k2() != k {
                problems.push(format!("K^2 identity fails for {b:?} at {k2}"));
            }
            let inv = surface_invariants(k2, b);
            if inv.k2 + inv.e_s != 12 * inv.chi
                || inv.b2 != 10 - k2 as i64 - b.s as i64 - 3 * b.t as i64
                || inv.b2 != inv.e_x - 2
            {
                problems.push(format!("b2 for {b:?} at {k2}"));
            }
            for sig in signatures(k2, b).unwrap_or_default() {
                n_sigs += 1;
                let g = Q::from_integer(sig.data.genus as i64);
                if (g - 1) * 2 != theta(&sig.m) * sig.data.order_g0 as i64 {
                    problems.push(format!("Hurwitz fails for {:?}", sig.m));
                }
            }
        }
    }
    let mut n_acc = 0usize;
    for report in &run.reports {
        for (rec, cand) in report.records.iter().zip(&report.candidates) {
            let mx = &cand.orbit.representative.structure;
            for sys in &cand.accepted {
                n_acc += 1;
                match count_singularities(mx, sys) {
                    Ok(c) if c.t % 2 == 0 && c.s as u32 == rec.basket.s && c.t as u32 == rec.basket.t => {}
                    other => problems.push(format!("{} {}: {other:?}", rec.g_label, rec.sig_type)),
                }
            }
            let inv = surface_invariants(rec.k2, rec.basket);
            if rec.b2 != inv.b2 || inv.k2 + inv.e_s != 12 {
                problems.push(format!("record invariants {} {}", rec.g_label, rec.sig_type));
            }
        }
    }
    let b = |s, t| Basket { s, t };
    if baskets(1).ok() != Some(vec![b(7, 0), b(2, 2)]) || baskets(8).ok() != Some(vec![b(0, 0)]) {
        problems.push("basket lists for K^2 = 1, 8".into());
    }
    CriterionResult {
        number: 4,
        name: "enumeration identities",
        passed: problems.is_empty(),
        detail: format!("{n_sigs} signatures, {n_acc} accepted systems, problems {problems:?}"),
    }
}

/// Presentation of the derived subgroup via the regular action on the
/// abelianization, with its index.
pub fn derived_subgroup_presentation(p: &Presentation, max_cosets: usize) -> Option<(usize, Presentation)> {
    let mut quotient = p.clone();
    for i in 0..p.n_gens {
        for j in i + 1..p.n_gens {
            let (a, b) = (i as i32 + 1, j as i32 + 1);
            quotient.add_relator(Word::from_letters([a, b, -a, -b])).ok()?;
        }
    }
    let table = todd_coxeter(&quotient, &[], max_cosets).into_table()?;
    Some((table.index(), simplify(&reidemeister_schreier(p, &table))))
}

/// Criterion 5: the derived subgroups of `T(2,3,8)` and of that subgroup.
///
/// Each step is compared with the abelianization of the triangle group it
/// should be isomorphic to, computed straight from that group's relators.
pub fn triangle_commutators() -> CriterionResult {
    let t238 = Presentation::polygonal(&[2, 3, 8]);
    let Some((i1, d1)) = derived_subgroup_presentation(&t238, 1000) else {
        return fail5("first enumeration did not complete");
    };
    let Some((i2, d2)) = derived_subgroup_presentation(&d1, 1000) else {
        return fail5("second enumeration did not complete");
    };
    let a1 = abelian_invariants(&d1);
    let a2 = abelian_invariants(&d2);
    let t334 = abelian_invariants(&Presentation::polygonal(&[3, 3, 4]));
    let t444 = abelian_invariants(&Presentation::polygonal(&[4, 4, 4]));
    let stated_first = AbelianInvariants::finite(vec![3, 3]);
    let stated_second = AbelianInvariants::finite(vec![4, 4]);
    let passed = i1 == 2 && i2 == 3 && a1 == t334 && a2 == t444 && a2 == stated_second;
    CriterionResult {
        number: 5,
        name: "triangle group commutators",
        passed,
        detail: format!(
            "index {i1}: {:?} (T(3,3,4)^ab = {:?}; the literal (3,3) {}), index {i2}: {:?} (T(4,4,4)^ab = {:?})",
            a1.torsion,
            t334.torsion,
            if a1 == stated_first { "agrees" } else { "does not hold" },
            a2.torsion,
            t444.torsion
        ),
    }
}

fn fail5(msg: &str) -> CriterionResult {
    CriterionResult {
        number: 5,
        name: "triangle group commutators",
        passed: false,
        detail: msg.to_string(),
    }
}

/// Criterion 6: a failed abelianization test never hides a system, and
/// pruning leaves the reports unchanged.
pub fn pruning(run: &SuiteRun) -> CriterionResult {
    let mut pruned_pairs = 0usize;
    let mut violations = Vec::new();
    for report in &run.reports {
        for log in report.searched.iter().filter(|l| !l.ab_test) {
            pruned_pairs += 1;
            let Some(pos) = run.catalog.iter().position(|e| e.name == log.g_label) else {
                violations.push(format!("{} not in catalog", log.g_label));
                continue;
            };
            let g = &run.groups[pos];
            let sub = &g.index_two_subgroups()[log.g0_index];
            let Some(mx) = mixed_structures(g)
                .into_iter()
                .find(|m| m.g0_sub.elements() == sub.elements())
            else {
                violations.push(format!("{} #{} has no structure", log.g_label, log.g0_index));
                continue;
            };
            let found: Vec<SphericalSystem> = spherical_systems(&mx.g0, &log.signature);
            if !found.is_empty() {
                violations.push(format!("{} #{} {:?}", log.g_label, log.g0_index, log.signature));
            }
        }
    }
    let mut identical = true;
    let mut unpruned_logged = 0usize;
    for k2 in [1u32, 2] {
        let config = PipelineConfig {
            ab_prune: false,
            ..run.config.clone()
        };
        let Ok(unpruned) = run_on_groups(k2, &run.catalog, &run.groups, &config) else {
            identical = false;
            continue;
        };
        for log in &unpruned.searched {
            unpruned_logged += 1;
            if !log.ab_test && log.systems != Some(0) {
                violations.push(format!("{} #{} {:?}", log.g_label, log.g0_index, log.signature));
            }
        }
        let pruned = &run.report(k2).records;
        let same = emit(pruned, "json").ok() == emit(&unpruned.records, "json").ok()
            && emit(pruned, "csv").ok() == emit(&unpruned.records, "csv").ok();
        identical &= same;
    }
    CriterionResult {
        number: 6,
        name: "pruning soundness",
        passed: violations.is_empty() && identical,
        detail: format!(
            "{pruned_pairs} pruned pairs searched anyway, {unpruned_logged} unpruned searches, violations {violations:?}, reports identical: {identical}"
        ),
    }
}

/// Criterion 7: a second orbit member yields the same record.
pub fn orbit_independence(run: &SuiteRun) -> CriterionResult {
    let mut checked = 0usize;
    let mut singletons = 0usize;
    let mut differences = Vec::new();
    for report in &run.reports {
        for (rec, cand) in report.records.iter().zip(&report.candidates) {
            let Some(witness) = &cand.orbit.witness else {
                singletons += 1;
                continue;
            };
            checked += 1;
            let rep = &cand.orbit.representative;
            if witness.system.tuple == rep.system.tuple {
                differences.push(format!(
                    "{} {}: witness equals representative",
                    rec.g_label, rec.sig_type
                ));
            }
            let counts = (
                count_singularities(&rep.structure, &rep.system),
                count_singularities(&witness.structure, &witness.system),
            );
            if counts.0.is_err() || counts.0 != counts.1 {
                differences.push(format!("{} {}: counts {:?}", rec.g_label, rec.sig_type, counts));
            }
            let mut other = member_record(
                rec.k2,
                rec.basket,
                &rec.signature,
                &rec.g_label,
                &cand.group,
                witness,
                rec.orbit_size,
                &run.config,
                &rec.catalog_hash,
            );
            if other.representative == rec.representative {
                differences.push(format!("{} {}: same representative tuple", rec.g_label, rec.sig_type));
            }
            other.representative = rec.representative.clone();
            if &other != rec {
                differences.push(format!(
                    "{} {}: H1 {} vs {}",
                    rec.g_label, rec.sig_type, rec.h1_label, other.h1_label
                ));
            }
            if matches!(other.pi1_status, Some(Pi1Status::Undetermined)) {
                differences.push(format!("{} {}: undetermined", rec.g_label, rec.sig_type));
            }
        }
    }
    CriterionResult {
        number: 7,
        name: "orbit independence",
        passed: checked > 0 && differences.is_empty(),
        detail: format!("{checked} orbits compared, {singletons} singletons, differences {differences:?}"),
    }
}
