//! Append-only JSONL persistence for search runs. Each run appends one
//! header line carrying the full config, then one line per record.
//!
//! Record fields: a, b, c (canonical factored text), p, rho, size_log10
//! (reals rounded to 10 significant digits), base_a0, base_b0, base_c0
//! (factored text), alpha, beta, gamma (decimal integer strings; they can
//! exceed anything a JSON double represents exactly).

use serde_json::{json, Value};
use std::fs::OpenOptions;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use super::{SearchConfig, SearchRecord};
use crate::triples::format_factored;

/// Round to `digits` significant decimal digits so the JSON number prints
/// with that precision.
fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - magnitude);
    (x * factor).round() / factor
}

pub fn record_to_json_line(r: &SearchRecord) -> String {
    let v = json!({
        "a": format_factored(r.triple.a()),
        "b": format_factored(r.triple.b()),
        "c": format_factored(r.triple.c()),
        "p": round_sig(r.triple.power(), 10),
        "rho": round_sig(r.triple.szpiro(), 10),
        "size_log10": round_sig(r.triple.size_log10(), 10),
        "base_a0": format_factored(r.base.a0()),
        "base_b0": format_factored(r.base.b0()),
        "base_c0": format_factored(r.base.c0()),
        "alpha": r.relation.alpha().to_string(),
        "beta": r.relation.beta().to_string(),
        "gamma": r.relation.gamma().to_string(),
    });
    v.to_string()
}

fn config_header(cfg: &SearchConfig) -> String {
    let v = json!({
        "config": {
            "value_bound": cfg.value_bound.to_string(),
            "prime_bound": cfg.prime_bound,
            "mode": cfg.mode.as_str(),
            "include_one": cfg.include_one,
            "p_threshold": cfg.p_threshold,
            "rho_threshold": cfg.rho_threshold,
            "cf_depth": cfg.cf_depth,
            "box": cfg.box_bound,
            "trial_bound": cfg.factor_effort.trial_bound,
            "rho_iterations": cfg.factor_effort.rho_iterations,
            "workers": cfg.worker_count,
        }
    });
    v.to_string()
}

pub(super) fn append_run(
    path: &Path,
    cfg: &SearchConfig,
    records: &[SearchRecord],
) -> io::Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(file, "{}", config_header(cfg))?;
    for r in records {
        writeln!(file, "{}", record_to_json_line(r))?;
    }
    file.flush()
}

/// One parsed record line.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordLine {
    pub a: String,
    pub b: String,
    pub c: String,
    pub p: f64,
    pub rho: f64,
    pub size_log10: f64,
    pub base_a0: String,
    pub base_b0: String,
    pub base_c0: String,
    pub alpha: String,
    pub beta: String,
    pub gamma: String,
}

pub fn parse_record_line(line: &str) -> Option<RecordLine> {
    let v: Value = serde_json::from_str(line).ok()?;
    if v.get("config").is_some() {
        return None; // header line
    }
    let s = |k: &str| v.get(k)?.as_str().map(str::to_owned);
    let f = |k: &str| v.get(k)?.as_f64();
    Some(RecordLine {
        a: s("a")?,
        b: s("b")?,
        c: s("c")?,
        p: f("p")?,
        rho: f("rho")?,
        size_log10: f("size_log10")?,
        base_a0: s("base_a0")?,
        base_b0: s("base_b0")?,
        base_c0: s("base_c0")?,
        alpha: s("alpha")?,
        beta: s("beta")?,
        gamma: s("gamma")?,
    })
}

/// All record lines in the file, headers skipped.
pub fn read_record_lines(path: &Path) -> io::Result<Vec<RecordLine>> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rec) = parse_record_line(&line) {
            out.push(rec);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digit_rounding() {
        assert_eq!(round_sig(1.6299116841270533, 10), 1.629911684);
        assert_eq!(round_sig(-4.419014048408801, 10), -4.419014048);
        assert_eq!(round_sig(0.0, 10), 0.0);
        assert_eq!(round_sig(26.30513182331, 10), 26.30513182);
    }
}
