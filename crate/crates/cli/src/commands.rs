//! Subcommand implementations.

use clap::{Subcommand, ValueEnum};
use num_bigint::BigUint;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use abc_core::lattice::{combine_candidates, relation_basis, LatticeBasis};
use abc_core::numtheory::{gcd_factored, radical, FactorEffort, Factorization};
use abc_core::search::{
    canonical_key, run_search_with_progress, verify_tables, SearchConfig, SearchError, SearchMode,
    TableKind,
};
use abc_core::triples::{
    build_triple, estimate_worst_case_power, format_factored, parse_factored_with_effort, power_of,
    szpiro_of, BaseTriple, TripleError,
};

use crate::args::{parse_big_integer, parse_count, parse_count_usize};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_OUTPUT_UNWRITABLE: u8 = 3;

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum ModeArg {
    Smooth,
    PrimePowers,
    #[value(name = "pp-products-2")]
    PpProducts2,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Smooth => SearchMode::Smooth,
            ModeArg::PrimePowers => SearchMode::PrimePowers,
            ModeArg::PpProducts2 => SearchMode::PrimePowerProducts2,
        }
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Check A + B = C, coprimality, and report rad, P, rho, and size.
    Verify {
        /// A as a factored expression, e.g. "2" or "3^10*109"
        a: String,
        b: String,
        c: String,
        /// Divide out the common gcd before checking
        #[arg(long)]
        reduce_gcd: bool,
        #[arg(long, default_value_t = 1.4)]
        p_threshold: f64,
        #[arg(long, default_value_t = 4.0)]
        rho_threshold: f64,
    },
    /// Reduce the relation lattice of a base triple and score every
    /// small candidate combination.
    Reduce {
        a0: String,
        b0: String,
        c0: String,
        #[arg(long, default_value = "16", value_parser = parse_count_usize)]
        cf_depth: usize,
        #[arg(long = "box", default_value = "8", value_parser = parse_count)]
        box_bound: u64,
        /// Pollard-Brent iteration budget per cofactor
        #[arg(long, default_value = "67108864", value_parser = parse_count)]
        factor_effort: u64,
    },
    /// Sweep all base triples drawn from a smooth set and record every
    /// triple that clears a threshold.
    Search {
        #[arg(long, value_parser = parse_big_integer)]
        max_value: BigUint,
        #[arg(long, value_parser = parse_count)]
        prime_bound: u64,
        #[arg(long, value_enum, default_value = "prime-powers")]
        mode: ModeArg,
        /// Admit 1 into the candidate set
        #[arg(long)]
        include_one: bool,
        #[arg(long, default_value_t = 1.4)]
        p_threshold: f64,
        #[arg(long, default_value_t = 4.0)]
        rho_threshold: f64,
        #[arg(long, default_value = "16", value_parser = parse_count_usize)]
        cf_depth: usize,
        #[arg(long = "box", default_value = "8", value_parser = parse_count)]
        box_bound: u64,
        #[arg(long, default_value = "67108864", value_parser = parse_count)]
        factor_effort: u64,
        /// Worker threads; results are identical for any value
        #[arg(long, value_parser = parse_count_usize)]
        workers: Option<usize>,
        /// JSONL output path (appended)
        #[arg(long, default_value = "abc-records.jsonl")]
        out: PathBuf,
    },
    /// Re-verify a TSV table of known good triples.
    Tables {
        #[arg(long)]
        fixture: PathBuf,
    },
    /// Worst-case power of a triple built from bases of a given size.
    Estimate {
        /// Approximate size of the base values
        #[arg(long)]
        size: f64,
        /// Exactly three base primes, comma separated
        #[arg(long, value_delimiter = ',')]
        primes: Vec<f64>,
    },
}

impl Command {
    pub fn run(self) -> ExitCode {
        match self {
            Command::Verify {
                a,
                b,
                c,
                reduce_gcd,
                p_threshold,
                rho_threshold,
            } => cmd_verify(&a, &b, &c, reduce_gcd, p_threshold, rho_threshold),
            Command::Reduce {
                a0,
                b0,
                c0,
                cf_depth,
                box_bound,
                factor_effort,
            } => cmd_reduce(&a0, &b0, &c0, cf_depth, box_bound, factor_effort),
            Command::Search {
                max_value,
                prime_bound,
                mode,
                include_one,
                p_threshold,
                rho_threshold,
                cf_depth,
                box_bound,
                factor_effort,
                workers,
                out,
            } => {
                let mut cfg = SearchConfig::new(max_value, prime_bound);
                cfg.mode = mode.into();
                cfg.include_one = include_one;
                cfg.p_threshold = p_threshold;
                cfg.rho_threshold = rho_threshold;
                cfg.cf_depth = cf_depth;
                cfg.box_bound = box_bound;
                cfg.factor_effort.rho_iterations = factor_effort;
                cfg.worker_count = workers.unwrap_or_else(|| {
                    std::thread::available_parallelism()
                        .map(|n| n.get())
                        .unwrap_or(1)
                });
                cfg.output_path = Some(out);
                cmd_search(&cfg)
            }
            Command::Tables { fixture } => cmd_tables(&fixture),
            Command::Estimate { size, primes } => cmd_estimate(size, &primes),
        }
    }
}

fn parse_or_exit(
    label: &str,
    expr: &str,
    effort: &FactorEffort,
) -> Result<Factorization, ExitCode> {
    parse_factored_with_effort(expr, effort).map_err(|e| {
        eprintln!("error: cannot parse {label} = {expr:?}: {e}");
        ExitCode::from(EXIT_BAD_INPUT)
    })
}

fn cmd_verify(
    a: &str,
    b: &str,
    c: &str,
    reduce_gcd: bool,
    p_threshold: f64,
    rho_threshold: f64,
) -> ExitCode {
    let effort = FactorEffort::default();
    let (mut fa, mut fb, mut fc) = match (
        parse_or_exit("A", a, &effort),
        parse_or_exit("B", b, &effort),
        parse_or_exit("C", c, &effort),
    ) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => return e,
    };

    if reduce_gcd {
        let g = gcd_factored(&gcd_factored(&fa, &fb), &fc);
        if !g.is_one() {
            println!("common gcd = {} (divided out)", format_factored(&g));
            fa = fa.div_exact(&g);
            fb = fb.div_exact(&g);
            fc = fc.div_exact(&g);
        }
    }

    println!("A = {} (= {})", format_factored(&fa), fa.value());
    println!("B = {} (= {})", format_factored(&fb), fb.value());
    println!("C = {} (= {})", format_factored(&fc), fc.value());

    let sum_ok = &(fa.value() + fb.value()) == fc.value();
    println!("A + B = C: {}", if sum_ok { "ok" } else { "FAILED" });
    let coprime = gcd_factored(&fa, &fb).is_one()
        && gcd_factored(&fa, &fc).is_one()
        && gcd_factored(&fb, &fc).is_one();
    println!("pairwise coprime: {}", if coprime { "yes" } else { "no" });

    let rad = radical(&fa, &fb, &fc);
    println!("rad  = {} (= {})", format_factored(&rad), rad.value());
    match (power_of(&fa, &fb, &fc), szpiro_of(&fa, &fb, &fc)) {
        (Ok(p), Ok(rho)) => {
            let size = fa.log10().max(fb.log10()).max(fc.log10());
            println!("size log10 = {:.10}", size);
            println!("P    = {:.10}", p);
            println!("rho  = {:.10}", rho);
            println!(
                "good ABC triple (P > {p_threshold}): {}",
                if p > p_threshold { "yes" } else { "no" }
            );
            println!(
                "good Szpiro triple (rho > {rho_threshold}): {}",
                if rho > rho_threshold { "yes" } else { "no" }
            );
        }
        _ => println!("P and rho undefined (radical is 1)"),
    }

    if sum_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn cmd_reduce(
    a0: &str,
    b0: &str,
    c0: &str,
    cf_depth: usize,
    box_bound: u64,
    rho_budget: u64,
) -> ExitCode {
    let effort = FactorEffort {
        rho_iterations: rho_budget,
        ..FactorEffort::default()
    };
    let (fa, fb, fc) = match (
        parse_or_exit("A0", a0, &effort),
        parse_or_exit("B0", b0, &effort),
        parse_or_exit("C0", c0, &effort),
    ) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => return e,
    };
    let base = match BaseTriple::new(fa, fb, fc) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };

    println!(
        "base: A0 = {} (= {}), B0 = {} (= {}), C0 = {} (= {})",
        format_factored(base.a0()),
        base.a0().value(),
        format_factored(base.b0()),
        base.b0().value(),
        format_factored(base.c0()),
        base.c0().value()
    );

    let (v1, v2) = match relation_basis(base.a0().value(), base.b0().value(), base.c0().value()) {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    println!("relation lattice generators:");
    println!("  v1 = {v1}   |v1|^2 = {}", v1.norm_sq());
    println!("  v2 = {v2}   |v2|^2 = {}", v2.norm_sq());
    let basis = LatticeBasis::new(vec![
        abc_core::lattice::IntVector::new(v1.entries().map(Clone::clone).to_vec()).unwrap(),
        abc_core::lattice::IntVector::new(v2.entries().map(Clone::clone).to_vec()).unwrap(),
    ])
    .unwrap();
    let gram = basis.gram_determinant();
    println!("gram determinant = {gram} (certifies the kernel is full)");

    let candidates = combine_candidates(&v1, &v2, cf_depth, box_bound);
    println!("candidates ({}):", candidates.len());
    for rel in &candidates {
        match build_triple(rel, &base, &effort) {
            Ok(t) => {
                println!(
                    "  {} -> {} + {} = {}   P = {:.10}  rho = {:.10}",
                    rel,
                    format_factored(t.a()),
                    format_factored(t.b()),
                    format_factored(t.c()),
                    t.power(),
                    t.szpiro()
                );
            }
            Err(TripleError::DegenerateRelation) => {
                println!("  {rel} -> skipped (zero coefficient)");
            }
            Err(e) => {
                println!("  {rel} -> skipped ({e})");
            }
        }
    }
    ExitCode::SUCCESS
}

fn cmd_search(cfg: &SearchConfig) -> ExitCode {
    eprintln!(
        "search: mode={} M={} N={} include_one={} thresholds P>{} rho>{} workers={}",
        cfg.mode.as_str(),
        cfg.value_bound,
        cfg.prime_bound,
        cfg.include_one,
        cfg.p_threshold,
        cfg.rho_threshold,
        cfg.worker_count
    );
    let started = Instant::now();
    let last_report = AtomicU64::new(0);
    let progress = move |done: u64, total: u64| {
        // rate-limit to ~1 line per second of elapsed time
        let secs = started.elapsed().as_secs();
        if secs > last_report.swap(secs, Ordering::Relaxed) {
            eprintln!("  ... {done}/{total} bases");
        }
    };
    match run_search_with_progress(cfg, &progress) {
        Ok((records, stats)) => {
            for rec in &records {
                println!(
                    "{}   P = {:.10}  rho = {:.10}",
                    canonical_key(&rec.triple),
                    rec.triple.power(),
                    rec.triple.szpiro()
                );
            }
            eprintln!(
                "done: {} bases, {} candidates, {} records ({} good ABC, {} good Szpiro), \
                 {} duplicates removed, {} factorization skips, {:.1}s",
                stats.bases_examined,
                stats.candidates_built,
                records.len(),
                stats.good_abc_found,
                stats.good_szpiro_found,
                stats.duplicates_removed,
                stats.factorization_skips,
                stats.wall_time.as_secs_f64()
            );
            if let Some(path) = &cfg.output_path {
                eprintln!("records appended to {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ SearchError::OutputUnwritable { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_OUTPUT_UNWRITABLE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}

fn cmd_tables(fixture: &std::path::Path) -> ExitCode {
    match verify_tables(fixture) {
        Ok(report) => {
            for row in &report.rows {
                println!(
                    "{} [{}] {}: metric {:.8} vs {:.8}, log10C {:.1} vs {:.1}",
                    if row.passed() { "pass" } else { "FAIL" },
                    row.kind.as_str(),
                    row.label,
                    row.computed_metric,
                    row.expected_metric,
                    row.computed_log10c,
                    row.expected_log10c
                );
            }
            let szpiro = report.count(TableKind::Szpiro);
            let abc = report.count(TableKind::Abc);
            let failed = report.failures().count();
            println!(
                "{} rows ({szpiro} szpiro, {abc} abc): {} passed, {failed} failed",
                report.rows.len(),
                report.rows.len() - failed
            );
            if report.rows.is_empty() {
                eprintln!("warning: fixture has no rows");
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}

fn cmd_estimate(size: f64, primes: &[f64]) -> ExitCode {
    if primes.len() != 3 {
        eprintln!(
            "error: --primes needs exactly three values, found {}",
            primes.len()
        );
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    if !size.is_finite() || size <= 1.0 || primes.iter().any(|&p| !p.is_finite() || p < 2.0) {
        eprintln!("error: --size must exceed 1 and primes must be at least 2");
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    let e = estimate_worst_case_power(size, primes[0], primes[1], primes[2]);
    println!(
        "worst-case P for bases of size ~{size:e} over primes {}, {}, {}: {e:.10}",
        primes[0], primes[1], primes[2]
    );
    println!("(tends to 1 from below as the size grows)");
    ExitCode::SUCCESS
}
