//! End-to-end classification over a group catalog.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::aut::{automorphism_group, Automorphism, DEFAULT_AUT_ORDER_CAP};
use crate::catalog::CatalogEntry;
use crate::enumerate::{baskets, describe_type, signatures, surface_invariants, Basket, Signature};
use crate::group::{FiniteGroup, Subgroup};
use crate::mixed::{mixed_structures, MixedStructure};
use crate::orbits::{member_hash, orbit_decompose_with, OrbitClass, OrbitMember, DEFAULT_ORBIT_CAP};
use crate::pi1::{abelian_label, h1_label, pi1, Pi1Config, Pi1Status, DEFAULT_MAX_COSETS};
use crate::singular::{count_with_classes, matches_basket, nodal_check, SingularityCount};
use crate::spherical::{ab_quotient_test, spherical_systems, SphericalSystem};
use crate::CoreError;

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub max_cosets: usize,
    pub strategy: String,
    /// Worker threads; 0 lets the thread pool decide.
    pub jobs: usize,
    /// Skip the search when the abelianization test rules it out.
    pub ab_prune: bool,
    /// Only compute `H1`, not the finite identification of `pi_1`.
    pub h1_only: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_cosets: DEFAULT_MAX_COSETS,
            strategy: qetale_fpgroup::DEFAULT_STRATEGY.to_string(),
            jobs: 0,
            ab_prune: true,
            h1_only: false,
        }
    }
}

/// Which index-2 subgroup of `G` plays `G0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct G0Descriptor {
    /// Position in `G.index_two_subgroups()`.
    pub index: usize,
    pub order: usize,
    pub abelian_invariants: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationRecord {
    pub k2: u32,
    pub basket: Basket,
    pub sing: String,
    pub signature: Vec<u32>,
    #[serde(rename = "type")]
    pub sig_type: String,
    pub g_label: String,
    pub g_order: usize,
    pub g0: G0Descriptor,
    pub b2: i64,
    pub h1: Vec<u64>,
    pub h1_free_rank: usize,
    pub h1_label: String,
    pub pi1: String,
    pub pi1_status: Option<Pi1Status>,
    pub orbit_size: usize,
    /// Representative tuple, as permutations of `G` when available.
    pub representative: Vec<String>,
    pub catalog_hash: String,
    pub diagnostics: Vec<String>,
}

impl ClassificationRecord {
    fn sort_key(&self) -> impl Ord + '_ {
        (
            self.k2,
            self.basket.t,
            &self.signature,
            &self.g_label,
            self.g0.index,
            &self.representative,
        )
    }
}

/// Working data behind a record, for cross-checks.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub group: Arc<FiniteGroup>,
    pub orbit: OrbitClass,
    /// Every accepted system of the representative's structure.
    pub accepted: Vec<SphericalSystem>,
    pub count: SingularityCount,
}

#[derive(Clone, Debug, Default)]
pub struct PipelineReport {
    pub records: Vec<ClassificationRecord>,
    /// Parallel to `records`.
    pub candidates: Vec<Candidate>,
    /// Tasks that failed outright.
    pub failures: Vec<String>,
    /// `(G, signature)` pairs that were searched, with whether the
    /// abelianization test passed and how many systems were found.
    pub searched: Vec<SearchLog>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchLog {
    pub g_label: String,
    pub g0_index: usize,
    pub signature: Vec<u32>,
    pub ab_test: bool,
    pub systems: Option<usize>,
}

pub fn catalog_hash(catalog: &[CatalogEntry]) -> String {
    let mut h = Sha256::new();
    for e in catalog {
        h.update(e.render().as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// `Aut(G)` generators, computed on first use.
type AutCache = OnceLock<Result<Vec<Automorphism>, CoreError>>;

struct Task<'a> {
    entry: &'a CatalogEntry,
    group: Arc<FiniteGroup>,
    aut: &'a AutCache,
    basket: Basket,
    sig: Signature,
}

#[derive(Default)]
struct TaskOutput {
    records: Vec<(ClassificationRecord, Candidate)>,
    failures: Vec<String>,
    searched: Vec<SearchLog>,
}

pub fn run_pipeline(k2: u32, catalog: &[CatalogEntry], config: &PipelineConfig) -> Result<PipelineReport, CoreError> {
    let mut groups = Vec::with_capacity(catalog.len());
    for e in catalog {
        groups.push(Arc::new(e.build()?));
    }
    run_on_groups(k2, catalog, &groups, config)
}

/// As [`run_pipeline`] with the catalog groups already built.
pub fn run_on_groups(
    k2: u32,
    catalog: &[CatalogEntry],
    groups: &[Arc<FiniteGroup>],
    config: &PipelineConfig,
) -> Result<PipelineReport, CoreError> {
    let hash = catalog_hash(catalog);
    let auts: Vec<AutCache> = groups.iter().map(|_| OnceLock::new()).collect();
    let mut tasks = Vec::new();
    for basket in baskets(k2)? {
        for sig in signatures(k2, basket)? {
            for ((entry, group), aut) in catalog.iter().zip(groups).zip(&auts) {
                if group.order() as u64 == 2 * sig.data.order_g0 {
                    tasks.push(Task {
                        entry,
                        group: group.clone(),
                        aut,
                        basket,
                        sig: sig.clone(),
                    });
                }
            }
        }
    }
    let run = || -> Vec<TaskOutput> { tasks.par_iter().map(|t| run_task(k2, t, config, &hash)).collect() };
    let outputs = if config.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| CoreError::Parameters(e.to_string()))?
            .install(run)
    } else {
        run()
    };
    let mut report = PipelineReport::default();
    let mut pairs = Vec::new();
    for o in outputs {
        pairs.extend(o.records);
        report.failures.extend(o.failures);
        report.searched.extend(o.searched);
    }
    pairs.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()));
    for (r, c) in pairs {
        report.records.push(r);
        report.candidates.push(c);
    }
    Ok(report)
}

fn run_task(k2: u32, task: &Task, config: &PipelineConfig, hash: &str) -> TaskOutput {
    let mut out = TaskOutput::default();
    let g = &task.group;
    let subgroups = g.index_two_subgroups();
    let structures = mixed_structures(g);
    let mut covered: HashSet<u64> = HashSet::new();
    for mx in &structures {
        let g0_index = subgroups
            .iter()
            .position(|s| s.elements() == mx.g0_sub.elements())
            .expect("structures come from index-2 subgroups");
        let ab = ab_quotient_test(&task.sig.m, &mx.g0);
        let mut log = SearchLog {
            g_label: task.entry.name.clone(),
            g0_index,
            signature: task.sig.m.clone(),
            ab_test: ab,
            systems: None,
        };
        if config.ab_prune && !ab {
            out.searched.push(log);
            continue;
        }
        let systems = spherical_systems(&mx.g0, &task.sig.m);
        log.systems = Some(systems.len());
        out.searched.push(log);
        let classes = mx.g0.class_structure();
        let mut accepted = Vec::new();
        let mut counts = Vec::new();
        for sys in systems {
            if !nodal_check(mx, &sys) {
                continue;
            }
            match count_with_classes(mx, &sys, &classes) {
                Ok(c) if matches_basket(&c, &task.basket) => {
                    accepted.push(sys);
                    counts.push(c);
                }
                Ok(_) => {}
                Err(e) => out.failures.push(format!("{}: {e}", task.entry.name)),
            }
        }
        if accepted.is_empty() {
            continue;
        }
        // systems already reached from an earlier structure
        let fresh: Vec<SphericalSystem> = accepted
            .iter()
            .filter(|s| !covered.contains(&member_hash(mx, s)))
            .cloned()
            .collect();
        if fresh.is_empty() {
            continue;
        }
        let aut = task.aut.get_or_init(|| {
            let a = automorphism_group(g, DEFAULT_AUT_ORDER_CAP)?;
            Ok(a.generators().into_iter().cloned().collect())
        });
        let orbits = match aut
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|gens| orbit_decompose_with(&fresh, mx, gens, DEFAULT_ORBIT_CAP))
        {
            Ok(o) => o,
            Err(e) => {
                out.failures.push(format!("{} {:?}: {e}", task.entry.name, task.sig.m));
                continue;
            }
        };
        for orbit in orbits {
            // orbits reaching an earlier structure were already reported
            if orbit.member_hashes.iter().any(|h| covered.contains(h)) {
                continue;
            }
            covered.extend(orbit.member_hashes.iter().copied());
            let rep = &orbit.representative;
            let rep_classes = rep.structure.g0.class_structure();
            let count = match count_with_classes(&rep.structure, &rep.system, &rep_classes) {
                Ok(c) => c,
                Err(e) => {
                    out.failures.push(format!("{}: {e}", task.entry.name));
                    continue;
                }
            };
            let ctx = RecordContext {
                k2,
                basket: task.basket,
                signature: &task.sig.m,
                g_label: &task.entry.name,
                group: g,
                subgroups: &subgroups,
                config,
                hash,
            };
            let record = build_record(&ctx, rep, orbit.size);
            let cand_accepted = if Arc::ptr_eq(&rep.structure.g0, &mx.g0) {
                accepted.clone()
            } else {
                accepted_systems(&rep.structure, &task.sig.m, &task.basket)
            };
            out.records.push((
                record,
                Candidate {
                    group: g.clone(),
                    orbit,
                    accepted: cand_accepted,
                    count,
                },
            ));
        }
    }
    out
}

/// Accepted systems of one structure, recomputed from scratch.
pub fn accepted_systems(mx: &MixedStructure, signature: &[u32], basket: &Basket) -> Vec<SphericalSystem> {
    let classes = mx.g0.class_structure();
    spherical_systems(&mx.g0, signature)
        .into_iter()
        .filter(|s| nodal_check(mx, s))
        .filter(|s| count_with_classes(mx, s, &classes).is_ok_and(|c| matches_basket(&c, basket)))
        .collect()
}

/// The record an orbit member would produce if it were the representative.
#[allow(clippy::too_many_arguments)]
pub fn member_record(
    k2: u32,
    basket: Basket,
    signature: &[u32],
    g_label: &str,
    group: &FiniteGroup,
    member: &OrbitMember,
    orbit_size: usize,
    config: &PipelineConfig,
    hash: &str,
) -> ClassificationRecord {
    let subgroups = group.index_two_subgroups();
    let ctx = RecordContext {
        k2,
        basket,
        signature,
        g_label,
        group,
        subgroups: &subgroups,
        config,
        hash,
    };
    build_record(&ctx, member, orbit_size)
}

struct RecordContext<'a> {
    k2: u32,
    basket: Basket,
    signature: &'a [u32],
    g_label: &'a str,
    group: &'a FiniteGroup,
    subgroups: &'a [Subgroup],
    config: &'a PipelineConfig,
    hash: &'a str,
}

fn build_record(ctx: &RecordContext, member: &OrbitMember, orbit_size: usize) -> ClassificationRecord {
    let mx = &member.structure;
    let g0_index = ctx
        .subgroups
        .iter()
        .position(|s| s.elements() == mx.g0_sub.elements())
        .unwrap_or(usize::MAX);
    let inv = surface_invariants(ctx.k2, ctx.basket);
    let pcfg = Pi1Config {
        max_cosets: ctx.config.max_cosets,
        strategy: ctx.config.strategy.clone(),
        h1_only: ctx.config.h1_only,
    };
    let mut diagnostics = Vec::new();
    let (h1, free, label, pi1_text, status) = match pi1(mx, &member.system, &pcfg) {
        Ok(p) => {
            let text = p
                .status
                .as_ref()
                .map_or_else(|| "H1 only".to_string(), |s| s.to_string());
            (p.h1.torsion.clone(), p.h1.free_rank, h1_label(&p.h1), text, p.status)
        }
        Err(e) => {
            diagnostics.push(e.to_string());
            (
                Vec::new(),
                0,
                "?".into(),
                "undetermined".into(),
                Some(Pi1Status::Undetermined),
            )
        }
    };
    ClassificationRecord {
        k2: ctx.k2,
        basket: ctx.basket,
        sing: ctx.basket.describe(),
        signature: ctx.signature.to_vec(),
        sig_type: describe_type(ctx.signature),
        g_label: ctx.g_label.to_string(),
        g_order: ctx.group.order(),
        g0: G0Descriptor {
            index: g0_index,
            order: mx.g0.order(),
            abelian_invariants: mx.g0.abelian_invariants(),
        },
        b2: inv.b2,
        h1,
        h1_free_rank: free,
        h1_label: label,
        pi1: pi1_text,
        pi1_status: status,
        orbit_size,
        representative: member
            .system
            .tuple
            .iter()
            .map(|&h| ctx.group.label(mx.embed[h]))
            .collect(),
        catalog_hash: ctx.hash.to_string(),
        diagnostics,
    }
}

/// Short `G0` description used in tables.
pub fn describe_g0(d: &G0Descriptor) -> String {
    format!(
        "#{} (order {}, ab {})",
        d.index,
        d.order,
        abelian_label(&d.abelian_invariants)
    )
}
