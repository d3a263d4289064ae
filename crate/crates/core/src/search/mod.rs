//! The full pipeline: enumerate base triples from a smooth set, reduce
//! their relation lattices, combine generators, build and score triples,
//! filter, deduplicate, persist. Deterministic for a fixed config
//! regardless of worker count.

mod store;
mod tables;

pub use store::{read_record_lines, record_to_json_line, RecordLine};
pub use tables::{verify_tables, TableKind, TableReport, TableRowResult};

use num_bigint::BigUint;
use std::io;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};
use thiserror::Error;

use crate::lattice::{combine_candidates, relation_basis};
use crate::numtheory::{
    prime_power_products_2, prime_powers_capped, smooth_numbers_capped, FactorEffort,
    NumTheoryError, SmoothSet, DEFAULT_MEMBER_CAP,
};
use crate::triples::{
    build_triple, format_factored, AbcTriple, BaseTriple, TripleError, DEFAULT_P_THRESHOLD,
    DEFAULT_RHO_THRESHOLD,
};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search needs at least 3 set members, found {0}")]
    SetTooSmall(usize),
    #[error(transparent)]
    Bounds(#[from] NumTheoryError),
    #[error("cannot write output {path}: {source}")]
    OutputUnwritable {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("fixture line {line}: {msg}")]
    Fixture { line: usize, msg: String },
    #[error("cannot read fixture {path}: {source}")]
    FixtureUnreadable {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

/// Which family of numbers populates the candidate list L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// All N-smooth numbers below M.
    Smooth,
    /// Powers of a single prime.
    PrimePowers,
    /// Products of exactly two prime powers.
    PrimePowerProducts2,
}

impl SearchMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchMode::Smooth => "smooth",
            SearchMode::PrimePowers => "prime-powers",
            SearchMode::PrimePowerProducts2 => "pp-products-2",
        }
    }
}

/// Declarative description of one search run.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub value_bound: BigUint,
    pub prime_bound: u64,
    pub mode: SearchMode,
    pub include_one: bool,
    pub p_threshold: f64,
    pub rho_threshold: f64,
    pub cf_depth: usize,
    pub box_bound: u64,
    pub factor_effort: FactorEffort,
    pub worker_count: usize,
    pub output_path: Option<PathBuf>,
    pub member_cap: usize,
}

impl SearchConfig {
    pub fn new(value_bound: BigUint, prime_bound: u64) -> Self {
        SearchConfig {
            value_bound,
            prime_bound,
            mode: SearchMode::PrimePowers,
            include_one: true,
            p_threshold: DEFAULT_P_THRESHOLD,
            rho_threshold: DEFAULT_RHO_THRESHOLD,
            cf_depth: 16,
            box_bound: 8,
            factor_effort: FactorEffort::default(),
            worker_count: 1,
            output_path: None,
            member_cap: DEFAULT_MEMBER_CAP,
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.value_bound < BigUint::from(2u32) || self.prime_bound < 2 {
            return Err(SearchError::InvalidConfig(
                "value and prime bounds must be at least 2".into(),
            ));
        }
        if self.worker_count == 0 {
            return Err(SearchError::InvalidConfig(
                "worker count must be at least 1".into(),
            ));
        }
        if !self.p_threshold.is_finite() || !self.rho_threshold.is_finite() {
            return Err(SearchError::InvalidConfig(
                "thresholds must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Enumerate the member set for this config's mode.
    pub fn member_set(&self) -> Result<SmoothSet, SearchError> {
        let set = match self.mode {
            SearchMode::Smooth => {
                // 1 is vacuously smooth and always enumerated; the flag
                // decides whether the search admits it as a base value.
                let set =
                    smooth_numbers_capped(&self.value_bound, self.prime_bound, self.member_cap)?;
                if self.include_one {
                    set
                } else {
                    set.without_one()
                }
            }
            SearchMode::PrimePowers => prime_powers_capped(
                &self.value_bound,
                self.prime_bound,
                self.include_one,
                self.member_cap,
            )?,
            SearchMode::PrimePowerProducts2 => prime_power_products_2(
                &self.value_bound,
                self.prime_bound,
                self.include_one,
                self.member_cap,
            )?,
        };
        Ok(set)
    }
}

/// One persisted discovery.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchRecord {
    pub triple: AbcTriple,
    pub base: BaseTriple,
    pub relation: crate::lattice::RelationVector,
}

/// Aggregate counters for a run. wall_time is excluded from the
/// determinism contract.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub bases_examined: u64,
    pub candidates_built: u64,
    pub factorization_skips: u64,
    pub duplicates_removed: u64,
    pub good_abc_found: u64,
    pub good_szpiro_found: u64,
    pub wall_time: Duration,
}

/// Dedup identity: "A+B=C" in canonical factored text.
pub fn canonical_key(t: &AbcTriple) -> String {
    format!(
        "{}+{}={}",
        format_factored(t.a()),
        format_factored(t.b()),
        format_factored(t.c())
    )
}

/// Every unordered 3-subset of distinct member values, ascending
/// lexicographically by value, each exactly once.
pub fn enumerate_bases(
    set: &SmoothSet,
) -> Result<impl Iterator<Item = BaseTriple> + '_, SearchError> {
    let k = set.len();
    if k < 3 {
        return Err(SearchError::SetTooSmall(k));
    }
    Ok(combination_range(set, 0, n_choose_3(k)))
}

fn n_choose_3(k: usize) -> u64 {
    let k = k as u64;
    k * (k - 1) * (k - 2) / 6
}

/// Bases with combination ranks in [start, end), in rank order. Rank is
/// the position in the lexicographic (i, j, l) order over member indices.
fn combination_range(
    set: &SmoothSet,
    start: u64,
    end: u64,
) -> impl Iterator<Item = BaseTriple> + '_ {
    let k = set.len();
    let mut state = unrank_combination(k, start);
    let mut rank = start;
    std::iter::from_fn(move || {
        if rank >= end {
            return None;
        }
        let (i, j, l) = state;
        let m = set.members();
        let base = BaseTriple::new(m[i].clone(), m[j].clone(), m[l].clone())
            .expect("smooth-set members are distinct");
        rank += 1;
        state = next_combination(k, (i, j, l));
        Some(base)
    })
}

/// Index triple (i < j < l) at the given lexicographic rank.
fn unrank_combination(k: usize, mut rank: u64) -> (usize, usize, usize) {
    let choose2 = |x: u64| x * x.saturating_sub(1) / 2;
    let mut i = 0usize;
    loop {
        let after = k as u64 - i as u64 - 1;
        let block = choose2(after);
        if rank < block {
            break;
        }
        rank -= block;
        i += 1;
    }
    let mut j = i + 1;
    loop {
        let after = k as u64 - j as u64 - 1;
        if rank < after {
            break;
        }
        rank -= after;
        j += 1;
    }
    let l = j + 1 + rank as usize;
    (i, j, l)
}

fn next_combination(k: usize, (i, j, l): (usize, usize, usize)) -> (usize, usize, usize) {
    if l + 1 < k {
        (i, j, l + 1)
    } else if j + 2 < k {
        (i, j + 1, j + 2)
    } else {
        (i + 1, i + 2, i + 3)
    }
}

/// Relation lattice -> candidate combinations -> built triples, keeping
/// those whose power or Szpiro quotient clears its threshold.
pub fn evaluate_base(base: &BaseTriple, cfg: &SearchConfig) -> Vec<SearchRecord> {
    evaluate_base_counted(base, cfg).0
}

/// Counters: (records, candidates_built, factorization_skips).
pub fn evaluate_base_counted(
    base: &BaseTriple,
    cfg: &SearchConfig,
) -> (Vec<SearchRecord>, u64, u64) {
    let mut records = Vec::new();
    let mut built = 0u64;
    let mut skips = 0u64;
    let Ok((v1, v2)) = relation_basis(base.a0().value(), base.b0().value(), base.c0().value())
    else {
        return (records, 0, 0);
    };
    // Scalar multiples of a relation reduce to the same triple; build
    // each primitive candidate once.
    let mut distinct = std::collections::HashSet::new();
    for rel in combine_candidates(&v1, &v2, cfg.cf_depth, cfg.box_bound) {
        let rel = rel.primitive();
        if !distinct.insert(rel.clone()) {
            continue;
        }
        match build_triple(&rel, base, &cfg.factor_effort) {
            Ok(triple) => {
                built += 1;
                let (good_abc, good_szpiro) = triple.classify(cfg.p_threshold, cfg.rho_threshold);
                if good_abc || good_szpiro {
                    records.push(SearchRecord {
                        triple,
                        base: base.clone(),
                        relation: rel,
                    });
                }
            }
            Err(TripleError::DegenerateRelation) => {}
            Err(TripleError::Factor(NumTheoryError::IncompleteFactorization { .. })) => {
                skips += 1;
            }
            Err(err) => unreachable!("candidate construction failed structurally: {err}"),
        }
    }
    (records, built, skips)
}

/// Run the whole search described by `cfg`. The record list is a pure
/// function of the config: base chunks are processed by whichever worker
/// owns them but merged back in canonical order.
pub fn run_search(cfg: &SearchConfig) -> Result<(Vec<SearchRecord>, SearchStats), SearchError> {
    run_search_with_progress(cfg, &|_, _| {})
}

const CHUNK_SIZE: u64 = 256;

pub fn run_search_with_progress(
    cfg: &SearchConfig,
    progress: &(dyn Fn(u64, u64) + Sync),
) -> Result<(Vec<SearchRecord>, SearchStats), SearchError> {
    cfg.validate()?;
    let start = Instant::now();
    let set = cfg.member_set()?;
    if set.len() < 3 {
        return Err(SearchError::SetTooSmall(set.len()));
    }
    let total = n_choose_3(set.len());
    let chunk_count = total.div_ceil(CHUNK_SIZE);
    let workers = cfg.worker_count.min(chunk_count.max(1) as usize).max(1);

    let done = AtomicU64::new(0);
    // chunk index -> (records, built, skips); round-robin ownership
    let mut chunk_results: Vec<(u64, Vec<SearchRecord>, u64, u64)> = if workers == 1 {
        let mut out = Vec::with_capacity(chunk_count as usize);
        for chunk in 0..chunk_count {
            out.push(process_chunk(&set, cfg, chunk, total));
            let n = done.fetch_add(chunk_len(chunk, total), Ordering::Relaxed);
            progress(n + chunk_len(chunk, total), total);
        }
        out
    } else {
        std::thread::scope(|scope| {
            let mut handles = Vec::with_capacity(workers);
            for w in 0..workers {
                let set = &set;
                let done = &done;
                handles.push(scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut chunk = w as u64;
                    while chunk < chunk_count {
                        out.push(process_chunk(set, cfg, chunk, total));
                        let n = done.fetch_add(chunk_len(chunk, total), Ordering::Relaxed);
                        progress(n + chunk_len(chunk, total), total);
                        chunk += workers as u64;
                    }
                    out
                }));
            }
            let mut all: Vec<(u64, Vec<SearchRecord>, u64, u64)> = Vec::new();
            for h in handles {
                all.extend(h.join().expect("search worker panicked"));
            }
            all
        })
    };
    chunk_results.sort_by_key(|(idx, ..)| *idx);

    let mut stats = SearchStats {
        bases_examined: total,
        ..SearchStats::default()
    };
    let mut seen = std::collections::HashSet::new();
    let mut records = Vec::new();
    for (_, chunk_records, built, skips) in chunk_results {
        stats.candidates_built += built;
        stats.factorization_skips += skips;
        for rec in chunk_records {
            let key = canonical_key(&rec.triple);
            if seen.insert(key) {
                records.push(rec);
            } else {
                stats.duplicates_removed += 1;
            }
        }
    }

    // Rank by how far past its threshold each record lands.
    let score = |r: &SearchRecord| {
        (r.triple.power() - cfg.p_threshold).max(r.triple.szpiro() - cfg.rho_threshold)
    };
    records.sort_by(|x, y| {
        score(y)
            .total_cmp(&score(x))
            .then_with(|| canonical_key(&x.triple).cmp(&canonical_key(&y.triple)))
    });

    for rec in &records {
        let (good_abc, good_szpiro) = rec.triple.classify(cfg.p_threshold, cfg.rho_threshold);
        stats.good_abc_found += good_abc as u64;
        stats.good_szpiro_found += good_szpiro as u64;
    }

    if let Some(path) = &cfg.output_path {
        store::append_run(path, cfg, &records).map_err(|source| SearchError::OutputUnwritable {
            path: path.clone(),
            source,
        })?;
    }

    stats.wall_time = start.elapsed();
    Ok((records, stats))
}

fn chunk_len(chunk: u64, total: u64) -> u64 {
    let start = chunk * CHUNK_SIZE;
    (start + CHUNK_SIZE).min(total) - start
}

fn process_chunk(
    set: &SmoothSet,
    cfg: &SearchConfig,
    chunk: u64,
    total: u64,
) -> (u64, Vec<SearchRecord>, u64, u64) {
    let start = chunk * CHUNK_SIZE;
    let end = (start + CHUNK_SIZE).min(total);
    let mut records = Vec::new();
    let mut built = 0;
    let mut skips = 0;
    for base in combination_range(set, start, end) {
        let (recs, b, s) = evaluate_base_counted(&base, cfg);
        records.extend(recs);
        built += b;
        skips += s;
    }
    (chunk, records, built, skips)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::smooth_numbers;
    use crate::triples::parse_factored;

    #[test]
    fn base_enumeration_counts_and_order() {
        let set = smooth_numbers(&BigUint::from(9u32), 4).unwrap(); // {1,2,3,4,6,8}
        assert_eq!(set.len(), 6);
        let bases: Vec<BaseTriple> = enumerate_bases(&set).unwrap().collect();
        assert_eq!(bases.len() as u64, n_choose_3(6));
        // ascending lexicographic by value, first and last known
        assert_eq!(bases[0].a0().value(), &BigUint::from(1u32));
        assert_eq!(bases[0].b0().value(), &BigUint::from(2u32));
        assert_eq!(bases[0].c0().value(), &BigUint::from(3u32));
        let last = bases.last().unwrap();
        assert_eq!(last.a0().value(), &BigUint::from(4u32));
        assert_eq!(last.b0().value(), &BigUint::from(6u32));
        assert_eq!(last.c0().value(), &BigUint::from(8u32));
        // all distinct
        let mut seen = std::collections::HashSet::new();
        for b in &bases {
            assert!(seen.insert(format!(
                "{}/{}/{}",
                b.a0().value(),
                b.b0().value(),
                b.c0().value()
            )));
        }
    }

    #[test]
    fn enumeration_rejects_tiny_sets() {
        let set = smooth_numbers(&BigUint::from(3u32), 3).unwrap(); // {1, 2}
        assert!(matches!(
            enumerate_bases(&set).err(),
            Some(SearchError::SetTooSmall(2))
        ));
    }

    #[test]
    fn unrank_agrees_with_sequential_enumeration() {
        let k = 9usize;
        let mut expect = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    expect.push((i, j, l));
                }
            }
        }
        for (rank, combo) in expect.iter().enumerate() {
            assert_eq!(unrank_combination(k, rank as u64), *combo, "rank {rank}");
        }
        // next_combination walks the same order
        let mut cur = (0usize, 1usize, 2usize);
        for combo in &expect {
            assert_eq!(cur, *combo);
            cur = next_combination(k, cur);
        }
    }

    #[test]
    fn evaluate_base_worked_example() {
        let base = BaseTriple::new(
            parse_factored("1").unwrap(),
            parse_factored("3^4").unwrap(),
            parse_factored("5^4").unwrap(),
        )
        .unwrap();
        let cfg = SearchConfig::new(BigUint::from(10u32), 2);
        let records = evaluate_base(&base, &cfg);
        // (1, 2*3^7, 5^4*7) with P ~ 1.5679 clears the default threshold
        let keys: Vec<String> = records.iter().map(|r| canonical_key(&r.triple)).collect();
        assert!(keys.contains(&"1+2*3^7=5^4*7".to_string()), "{keys:?}");
        // every record's relation rebuilds its triple
        for r in &records {
            let rebuilt = build_triple(&r.relation, &r.base, &cfg.factor_effort).unwrap();
            assert_eq!(rebuilt, r.triple);
        }
    }

    #[test]
    fn evaluate_base_finds_record_triple() {
        let base = BaseTriple::new(
            parse_factored("71^8").unwrap(),
            parse_factored("2^5*5^18*17^3").unwrap(),
            parse_factored("3^38").unwrap(),
        )
        .unwrap();
        let cfg = SearchConfig::new(BigUint::from(10u32), 2);
        let records = evaluate_base(&base, &cfg);
        let rec = records
            .iter()
            .find(|r| {
                canonical_key(&r.triple) == "71^8*233^3+2^5*5^18*7^3*17^3*981439=3^38*13^4*5233"
            })
            .expect("record triple present");
        assert!((rec.triple.power() - 1.41457078).abs() < 1e-6);
        assert!((rec.triple.szpiro() - 4.00747592).abs() < 1e-6);
    }

    #[test]
    fn evaluate_base_small_values_empty() {
        let base = BaseTriple::new(
            parse_factored("1").unwrap(),
            parse_factored("2").unwrap(),
            parse_factored("3").unwrap(),
        )
        .unwrap();
        let cfg = SearchConfig::new(BigUint::from(10u32), 2);
        assert!(evaluate_base(&base, &cfg).is_empty());
    }

    #[test]
    fn member_set_honors_include_one() {
        let mut cfg = SearchConfig::new(BigUint::from(100u32), 10);
        cfg.mode = SearchMode::Smooth;
        cfg.include_one = true;
        assert!(cfg.member_set().unwrap().members()[0].is_one());
        cfg.include_one = false;
        assert!(!cfg.member_set().unwrap().members()[0].is_one());

        cfg.mode = SearchMode::PrimePowerProducts2;
        cfg.include_one = true;
        let set = cfg.member_set().unwrap();
        assert!(set.members()[0].is_one());
        assert!(set.members()[1..].iter().all(|f| f.factors().len() == 2));
    }

    #[test]
    fn canonical_keys() {
        let t = AbcTriple::new(
            parse_factored("2").unwrap(),
            parse_factored("3^10*109").unwrap(),
            parse_factored("23^5").unwrap(),
        )
        .unwrap();
        assert_eq!(canonical_key(&t), "2+3^10*109=23^5");
        let t = AbcTriple::new(
            parse_factored("1").unwrap(),
            parse_factored("1").unwrap(),
            parse_factored("2").unwrap(),
        )
        .unwrap();
        assert_eq!(canonical_key(&t), "1+1=2");
    }
}
