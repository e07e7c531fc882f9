use std::collections::BTreeSet;

use qetale_core::candidate::CandidateFile;
use qetale_core::catalog::{bundled_catalog, CatalogEntry};
use qetale_core::pi1::{h1_label, pi1, Pi1Config, Pi1Status};
use qetale_core::pipeline::{run_pipeline, PipelineConfig, PipelineReport};
use qetale_core::report::emit;

fn run(k2: u32, config: &PipelineConfig) -> PipelineReport {
    run_pipeline(k2, &bundled_catalog(), config).unwrap()
}

fn entry<'a>(catalog: &'a [CatalogEntry], name: &str) -> &'a CatalogEntry {
    catalog.iter().find(|e| e.name == name).unwrap()
}

#[test]
fn bundled_catalog_contents() {
    let c = bundled_catalog();
    let orders: Vec<usize> = c.iter().map(|e| e.claimed_order).collect();
    assert_eq!(orders, vec![32, 16, 64, 64, 36, 32, 32, 128, 64, 256, 256]);
    let names: BTreeSet<&str> = c.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(names.len(), c.len());
    for e in &c {
        assert_eq!(e.build().unwrap().order(), e.claimed_order, "{}", e.name);
    }
}

#[test]
fn record_counts_per_k2() {
    let config = PipelineConfig {
        h1_only: true,
        ..PipelineConfig::default()
    };
    let counts: Vec<usize> = (1..=8).map(|k| run(k, &config).records.len()).collect();
    assert_eq!(counts, vec![1, 4, 0, 3, 0, 0, 0, 5]);
}

#[test]
fn numerical_campedelli_rows() {
    let report = run(2, &PipelineConfig::default());
    assert!(report.failures.is_empty());
    let h1: BTreeSet<Vec<u64>> = report.records.iter().map(|r| r.h1.clone()).collect();
    let expected: BTreeSet<Vec<u64>> = [vec![2, 4], vec![2, 2, 2], vec![4], vec![3]].into_iter().collect();
    assert_eq!(h1, expected);
    for r in &report.records {
        assert_eq!(r.b2, 10 - r.k2 as i64 - r.basket.s as i64 - 3 * r.basket.t as i64);
        assert!(matches!(r.pi1_status, Some(Pi1Status::Finite { .. })), "{}", r.g_label);
    }
    let csv = emit(&report.records, "csv").unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("2,")));
}

#[test]
fn runs_are_reproducible() {
    let a = run(2, &PipelineConfig::default());
    let b = run(
        2,
        &PipelineConfig {
            jobs: 1,
            ..PipelineConfig::default()
        },
    );
    assert_eq!(emit(&a.records, "json").unwrap(), emit(&b.records, "json").unwrap());
    assert_eq!(emit(&a.records, "csv").unwrap(), emit(&b.records, "csv").unwrap());
}

#[test]
fn h1_only_keeps_homology() {
    let full = run(1, &PipelineConfig::default());
    let h1 = run(
        1,
        &PipelineConfig {
            h1_only: true,
            ..PipelineConfig::default()
        },
    );
    assert_eq!(full.records.len(), 1);
    assert_eq!(full.records[0].h1, h1.records[0].h1);
    assert_eq!(full.records[0].pi1, "Z4");
    assert_eq!(h1.records[0].pi1_status, None);
}

#[test]
fn record_round_trips_through_a_candidate_file() {
    let catalog = bundled_catalog();
    let report = run(1, &PipelineConfig::default());
    let rec = &report.records[0];
    let file = CandidateFile::from_record(rec, entry(&catalog, &rec.g_label));
    let parsed = CandidateFile::parse(&file.render()).unwrap();
    assert_eq!(parsed, file);
    let (mx, sys) = parsed.resolve().unwrap();
    assert_eq!(sys.signature, rec.signature);
    let p = pi1(&mx, &sys, &Pi1Config::default()).unwrap();
    assert_eq!(h1_label(&p.h1), rec.h1_label);
    assert_eq!(p.group.map(|g| g.order()), Some(4));
}

#[test]
fn split_extensions_give_nothing() {
    // every element of Z2^4 outside an index-2 subgroup is an involution
    let catalog =
        qetale_core::catalog::parse_catalog("group Z2^4 16 8\ngen (1 2)\ngen (3 4)\ngen (5 6)\ngen (7 8)\n").unwrap();
    for k2 in [1, 2, 4] {
        assert!(run_pipeline(k2, &catalog, &PipelineConfig::default())
            .unwrap()
            .records
            .is_empty());
    }
}
