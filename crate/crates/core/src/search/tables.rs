//! Regression check against the shipped table of known good triples.
//!
//! Fixture format: TSV with columns kind (szpiro|abc), a, b, c (factored
//! text), expected_metric (8 decimals), expected_log10c (1 decimal). Each
//! row is re-verified from scratch: exact sum, pairwise coprimality, and
//! the recomputed metric against the printed value.

use std::fs;
use std::path::Path;

use super::SearchError;
use crate::numtheory::{gcd_factored, Factorization};
use crate::triples::{parse_factored, power_of, szpiro_of};

/// |computed - printed| tolerance for the 8-decimal metric column; wide
/// enough to cover either rounding or truncation of the true value.
pub const METRIC_TOLERANCE: f64 = 1e-6;
/// Tolerance for the 1-decimal log10 C column.
pub const LOG10C_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Szpiro,
    Abc,
}

impl TableKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TableKind::Szpiro => "szpiro",
            TableKind::Abc => "abc",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TableRowResult {
    pub line: usize,
    pub kind: TableKind,
    pub label: String,
    pub sum_ok: bool,
    pub coprime_ok: bool,
    pub metric_ok: bool,
    pub log10c_ok: bool,
    pub computed_metric: f64,
    pub expected_metric: f64,
    pub computed_log10c: f64,
    pub expected_log10c: f64,
}

impl TableRowResult {
    pub fn passed(&self) -> bool {
        self.sum_ok && self.coprime_ok && self.metric_ok && self.log10c_ok
    }
}

#[derive(Debug, Clone, Default)]
pub struct TableReport {
    pub rows: Vec<TableRowResult>,
}

impl TableReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(TableRowResult::passed)
    }

    pub fn count(&self, kind: TableKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &TableRowResult> {
        self.rows.iter().filter(|r| !r.passed())
    }
}

pub fn verify_tables(path: &Path) -> Result<TableReport, SearchError> {
    let text = fs::read_to_string(path).map_err(|source| SearchError::FixtureUnreadable {
        path: path.to_path_buf(),
        source,
    })?;
    let mut report = TableReport::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if idx == 0 && fields.first() == Some(&"kind") {
            continue; // column header
        }
        if fields.len() != 6 {
            return Err(SearchError::Fixture {
                line: line_no,
                msg: format!("expected 6 tab-separated fields, found {}", fields.len()),
            });
        }
        let kind = match fields[0] {
            "szpiro" => TableKind::Szpiro,
            "abc" => TableKind::Abc,
            other => {
                return Err(SearchError::Fixture {
                    line: line_no,
                    msg: format!("unknown kind {other:?}"),
                })
            }
        };
        let parse_part = |expr: &str| -> Result<Factorization, SearchError> {
            parse_factored(expr).map_err(|e| SearchError::Fixture {
                line: line_no,
                msg: e.to_string(),
            })
        };
        let a = parse_part(fields[1])?;
        let b = parse_part(fields[2])?;
        let c = parse_part(fields[3])?;
        let expected_metric: f64 = fields[4].parse().map_err(|_| SearchError::Fixture {
            line: line_no,
            msg: format!("bad metric {:?}", fields[4]),
        })?;
        let expected_log10c: f64 = fields[5].parse().map_err(|_| SearchError::Fixture {
            line: line_no,
            msg: format!("bad log10c {:?}", fields[5]),
        })?;

        let sum_ok = &(a.value() + b.value()) == c.value();
        let coprime_ok = gcd_factored(&a, &b).is_one()
            && gcd_factored(&a, &c).is_one()
            && gcd_factored(&b, &c).is_one();
        let computed_metric = match kind {
            TableKind::Szpiro => szpiro_of(&a, &b, &c),
            TableKind::Abc => power_of(&a, &b, &c),
        }
        .map_err(|e| SearchError::Fixture {
            line: line_no,
            msg: e.to_string(),
        })?;
        let computed_log10c = c.log10();
        report.rows.push(TableRowResult {
            line: line_no,
            kind,
            label: format!("{}+{}={}", fields[1], fields[2], fields[3]),
            sum_ok,
            coprime_ok,
            metric_ok: (computed_metric - expected_metric).abs() <= METRIC_TOLERANCE,
            log10c_ok: (computed_log10c - expected_log10c).abs() <= LOG10C_TOLERANCE,
            computed_metric,
            expected_metric,
            computed_log10c,
            expected_log10c,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_fixture(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn verifies_known_rows() {
        let f = write_fixture(
            "kind\ta\tb\tc\texpected_metric\texpected_log10c\n\
             szpiro\t71^8*233^3\t2^5*5^18*7^3*17^3*981439\t3^38*13^4*5233\t4.00747592\t26.3\n\
             abc\t71^8*233^3\t2^5*5^18*7^3*17^3*981439\t3^38*13^4*5233\t1.41457078\t26.3\n",
        );
        let report = verify_tables(f.path()).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert!(report.all_passed());
        assert_eq!(report.count(TableKind::Szpiro), 1);
        assert_eq!(report.count(TableKind::Abc), 1);
    }

    #[test]
    fn misprinted_sum_fails_exactly() {
        // C off by one: 3^2 replaced with 11
        let f = write_fixture("abc\t1\t2^3\t11\t1.22629439\t1.0\n");
        let report = verify_tables(f.path()).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(!report.rows[0].sum_ok);
        assert!(!report.all_passed());
    }

    #[test]
    fn wrong_metric_fails_only_that_check() {
        let f = write_fixture("abc\t1\t2^3\t3^2\t1.30000000\t1.0\n");
        let report = verify_tables(f.path()).unwrap();
        let row = &report.rows[0];
        assert!(row.sum_ok && row.coprime_ok && row.log10c_ok);
        assert!(!row.metric_ok);
    }

    #[test]
    fn corrupt_row_is_a_parse_error() {
        let f = write_fixture("szpiro\tnot-a-number\t2\t3\t1.0\t1.0\n");
        match verify_tables(f.path()) {
            Err(SearchError::Fixture { line: 1, .. }) => {}
            other => panic!("expected fixture error, got {other:?}"),
        }
        let f = write_fixture("abc\t1\t2\n");
        assert!(matches!(
            verify_tables(f.path()),
            Err(SearchError::Fixture { line: 1, .. })
        ));
    }

    #[test]
    fn empty_fixture_passes_vacuously() {
        let f = write_fixture("");
        let report = verify_tables(f.path()).unwrap();
        assert!(report.rows.is_empty());
        assert!(report.all_passed());
    }
}
