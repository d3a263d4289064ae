//! End-to-end pipeline checks: determinism across worker counts, JSONL
//! persistence and re-validation, and dedup soundness.

use num_bigint::BigUint;
use std::collections::HashSet;

use abc_core::search::{
    canonical_key, read_record_lines, record_to_json_line, run_search, SearchConfig, SearchMode,
};
use abc_core::triples::{build_triple, parse_factored, AbcTriple, BaseTriple};

fn small_config() -> SearchConfig {
    // prime powers below 3000 over primes < 12: a couple hundred bases,
    // finds real records in well under a second
    let mut cfg = SearchConfig::new(BigUint::from(3000u32), 12);
    cfg.mode = SearchMode::PrimePowers;
    cfg.include_one = true;
    cfg.p_threshold = 1.2;
    cfg.rho_threshold = 3.0;
    cfg
}

#[test]
fn records_are_deterministic_across_worker_counts() {
    let mut one = small_config();
    one.worker_count = 1;
    let (r1, s1) = run_search(&one).unwrap();

    let mut eight = small_config();
    eight.worker_count = 8;
    let (r8, s8) = run_search(&eight).unwrap();

    assert!(!r1.is_empty());
    let lines1: Vec<String> = r1.iter().map(record_to_json_line).collect();
    let lines8: Vec<String> = r8.iter().map(record_to_json_line).collect();
    assert_eq!(lines1, lines8);

    // stats agree except wall time
    assert_eq!(s1.bases_examined, s8.bases_examined);
    assert_eq!(s1.candidates_built, s8.candidates_built);
    assert_eq!(s1.factorization_skips, s8.factorization_skips);
    assert_eq!(s1.duplicates_removed, s8.duplicates_removed);
    assert_eq!(s1.good_abc_found, s8.good_abc_found);
    assert_eq!(s1.good_szpiro_found, s8.good_szpiro_found);
}

#[test]
fn no_two_records_share_a_key_and_stats_are_consistent() {
    let cfg = small_config();
    let (records, stats) = run_search(&cfg).unwrap();
    let mut keys = HashSet::new();
    for rec in &records {
        assert!(keys.insert(canonical_key(&rec.triple)), "duplicate record");
    }
    assert!(stats.good_abc_found <= stats.candidates_built);
    assert!(stats.good_szpiro_found <= stats.candidates_built);
    assert!(records.len() as u64 <= stats.candidates_built);
    let k = cfg.member_set().unwrap().len() as u64;
    assert_eq!(stats.bases_examined, k * (k - 1) * (k - 2) / 6);
}

#[test]
fn every_record_relation_rebuilds_its_triple() {
    let cfg = small_config();
    let (records, _) = run_search(&cfg).unwrap();
    assert!(!records.is_empty());
    for rec in &records {
        let rebuilt = build_triple(&rec.relation, &rec.base, &cfg.factor_effort).unwrap();
        assert_eq!(rebuilt, rec.triple);
    }
}

#[test]
fn jsonl_round_trip_revalidates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    let mut cfg = small_config();
    cfg.output_path = Some(path.clone());
    let (records, _) = run_search(&cfg).unwrap();
    assert!(!records.is_empty());

    let lines = read_record_lines(&path).unwrap();
    assert_eq!(lines.len(), records.len());
    for line in &lines {
        let t = AbcTriple::new(
            parse_factored(&line.a).unwrap(),
            parse_factored(&line.b).unwrap(),
            parse_factored(&line.c).unwrap(),
        )
        .unwrap();
        assert!(((t.power() - line.p) / t.power()).abs() < 1e-9);
        assert!(((t.szpiro() - line.rho) / t.szpiro()).abs() < 1e-9);
        assert!(((t.size_log10() - line.size_log10) / t.size_log10()).abs() < 1e-9);

        // the stored relation annihilates the stored base
        let base = BaseTriple::new(
            parse_factored(&line.base_a0).unwrap(),
            parse_factored(&line.base_b0).unwrap(),
            parse_factored(&line.base_c0).unwrap(),
        )
        .unwrap();
        let rel = abc_core::lattice::RelationVector::new(
            line.alpha.parse().unwrap(),
            line.beta.parse().unwrap(),
            line.gamma.parse().unwrap(),
        )
        .unwrap();
        assert!(rel.annihilates(base.a0().value(), base.b0().value(), base.c0().value()));
    }

    // appending a second run keeps the first intact
    run_search(&cfg).unwrap();
    let twice = read_record_lines(&path).unwrap();
    assert_eq!(twice.len(), 2 * records.len());
}

#[test]
fn threshold_infinity_yields_no_records() {
    let mut cfg = small_config();
    cfg.p_threshold = f64::MAX;
    cfg.rho_threshold = f64::MAX;
    let (records, stats) = run_search(&cfg).unwrap();
    assert!(records.is_empty());
    assert!(stats.candidates_built > 0);
}

#[test]
fn unwritable_output_is_reported() {
    let mut cfg = small_config();
    cfg.output_path = Some("/nonexistent-dir/records.jsonl".into());
    match run_search(&cfg) {
        Err(abc_core::search::SearchError::OutputUnwritable { .. }) => {}
        other => panic!("expected OutputUnwritable, got {other:?}"),
    }
}
