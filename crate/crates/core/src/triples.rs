//! ABC triples: construction from a relation and a base, the power and
//! Szpiro metrics, classification thresholds, the factored-expression
//! text format, and the worst-case power estimate.

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::RelationVector;
use crate::numtheory::{
    factorize, gcd_factored, radical, FactorEffort, Factorization, NumTheoryError,
};

/// A triple with P above this is a good ABC triple.
pub const DEFAULT_P_THRESHOLD: f64 = 1.4;
/// A triple with rho above this is a good Szpiro triple.
pub const DEFAULT_RHO_THRESHOLD: f64 = 4.0;

/// Largest exponent the parser accepts; keeps hostile input like
/// 2^4294967295 from expanding into gigabytes.
pub const MAX_PARSE_EXPONENT: u32 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("relation has a zero coefficient")]
    DegenerateRelation,
    #[error("relation does not annihilate the base triple")]
    RelationMismatch,
    #[error("A + B != C")]
    SumMismatch,
    #[error("A, B, C are not pairwise coprime")]
    NotCoprime,
    #[error("radical is 1; the metrics are undefined")]
    RadicalIsOne,
    #[error("base values must be pairwise distinct")]
    IndistinctBase,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Factor(#[from] NumTheoryError),
}

/// Base triple (A0, B0, C0): large values with small radicals whose
/// relation lattice gets searched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseTriple {
    a0: Factorization,
    b0: Factorization,
    c0: Factorization,
}

impl BaseTriple {
    pub fn new(
        a0: Factorization,
        b0: Factorization,
        c0: Factorization,
    ) -> Result<Self, TripleError> {
        if a0.value() == b0.value() || a0.value() == c0.value() || b0.value() == c0.value() {
            return Err(TripleError::IndistinctBase);
        }
        Ok(BaseTriple { a0, b0, c0 })
    }

    pub fn a0(&self) -> &Factorization {
        &self.a0
    }

    pub fn b0(&self) -> &Factorization {
        &self.b0
    }

    pub fn c0(&self) -> &Factorization {
        &self.c0
    }
}

/// Coprime positive integers A + B = C in fully factored form, with the
/// power and Szpiro metrics precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcTriple {
    a: Factorization,
    b: Factorization,
    c: Factorization,
    power: f64,
    szpiro: f64,
    size_log10: f64,
}

impl AbcTriple {
    /// Validate A + B = C (reordering A, B so A <= B), pairwise
    /// coprimality, and compute the metrics.
    pub fn new(a: Factorization, b: Factorization, c: Factorization) -> Result<Self, TripleError> {
        let (a, b) = if a.value() <= b.value() {
            (a, b)
        } else {
            (b, a)
        };
        if &(a.value() + b.value()) != c.value() {
            return Err(TripleError::SumMismatch);
        }
        if !gcd_factored(&a, &b).is_one()
            || !gcd_factored(&a, &c).is_one()
            || !gcd_factored(&b, &c).is_one()
        {
            return Err(TripleError::NotCoprime);
        }
        let rad = radical(&a, &b, &c);
        if rad.is_one() {
            return Err(TripleError::RadicalIsOne);
        }
        let ln_rad = rad.ln();
        let ln_c = c.ln();
        let power = ln_c / ln_rad;
        let szpiro = (a.ln() + b.ln() + ln_c) / ln_rad;
        let size_log10 = ln_c / std::f64::consts::LN_10;
        Ok(AbcTriple {
            a,
            b,
            c,
            power,
            szpiro,
            size_log10,
        })
    }

    pub fn a(&self) -> &Factorization {
        &self.a
    }

    pub fn b(&self) -> &Factorization {
        &self.b
    }

    pub fn c(&self) -> &Factorization {
        &self.c
    }

    /// P = log C / log rad(ABC).
    pub fn power(&self) -> f64 {
        self.power
    }

    /// rho = log(ABC) / log rad(ABC).
    pub fn szpiro(&self) -> f64 {
        self.szpiro
    }

    /// log10 of the size max(A, B, C) = C.
    pub fn size_log10(&self) -> f64 {
        self.size_log10
    }

    pub fn radical(&self) -> Factorization {
        radical(&self.a, &self.b, &self.c)
    }

    /// Strict comparisons against the two thresholds.
    pub fn classify(&self, p_threshold: f64, rho_threshold: f64) -> (bool, bool) {
        (self.power > p_threshold, self.szpiro > rho_threshold)
    }
}

/// P of raw factored parts (not necessarily coprime or ordered).
pub fn power_of(
    a: &Factorization,
    b: &Factorization,
    c: &Factorization,
) -> Result<f64, TripleError> {
    let rad = radical(a, b, c);
    if rad.is_one() {
        return Err(TripleError::RadicalIsOne);
    }
    let size = a.ln().max(b.ln()).max(c.ln());
    Ok(size / rad.ln())
}

/// rho of raw factored parts.
pub fn szpiro_of(
    a: &Factorization,
    b: &Factorization,
    c: &Factorization,
) -> Result<f64, TripleError> {
    let rad = radical(a, b, c);
    if rad.is_one() {
        return Err(TripleError::RadicalIsOne);
    }
    Ok((a.ln() + b.ln() + c.ln()) / rad.ln())
}

/// Build the candidate triple for a relation over a base: the two
/// like-signed terms of (alpha A0, beta B0, gamma C0) become A and B, the
/// opposite-signed term becomes C, and the common gcd is divided out.
pub fn build_triple(
    rel: &RelationVector,
    base: &BaseTriple,
    effort: &FactorEffort,
) -> Result<AbcTriple, TripleError> {
    if rel.alpha().is_zero() || rel.beta().is_zero() || rel.gamma().is_zero() {
        return Err(TripleError::DegenerateRelation);
    }
    if !rel.annihilates(base.a0.value(), base.b0.value(), base.c0.value()) {
        return Err(TripleError::RelationMismatch);
    }

    let mut terms: Vec<(bool, Factorization)> = Vec::with_capacity(3);
    for (coeff, part) in [
        (rel.alpha(), &base.a0),
        (rel.beta(), &base.b0),
        (rel.gamma(), &base.c0),
    ] {
        let coeff_f = factorize(coeff.magnitude(), effort)?;
        terms.push((coeff.is_positive(), coeff_f.mul(part)));
    }

    // Three nonzero terms summing to zero: exactly two share a sign.
    let positives = terms.iter().filter(|(pos, _)| *pos).count();
    let lone_positive = positives == 1;
    let mut pair: Vec<Factorization> = Vec::with_capacity(2);
    let mut lone: Option<Factorization> = None;
    for (pos, f) in terms {
        if pos == lone_positive {
            lone = Some(f);
        } else {
            pair.push(f);
        }
    }
    let (a, b) = (pair.remove(0), pair.remove(0));
    let c = lone.expect("sign split of three nonzero terms");

    let g = gcd_factored(&gcd_factored(&a, &b), &c);
    AbcTriple::new(a.div_exact(&g), b.div_exact(&g), c.div_exact(&g))
}

/// Parse the factored-expression grammar: term ("*" term)* with
/// term = integer ("^" integer)?, whitespace ignored, bases >= 1 and
/// exponents >= 1 in decimal. Stated prime bases are verified; composite
/// bases are factorized.
pub fn parse_factored(expr: &str) -> Result<Factorization, TripleError> {
    parse_factored_with_effort(expr, &FactorEffort::default())
}

pub fn parse_factored_with_effort(
    expr: &str,
    effort: &FactorEffort,
) -> Result<Factorization, TripleError> {
    let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(TripleError::Parse {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut result = Factorization::one();
    let mut pos = 0usize;
    for term in compact.split('*') {
        if term.is_empty() {
            return Err(TripleError::Parse {
                pos,
                msg: "empty term".into(),
            });
        }
        let (base_s, exp_s) = match term.split_once('^') {
            Some((b, e)) => (b, Some(e)),
            None => (term, None),
        };
        let base: BigUint = base_s.parse().map_err(|_| TripleError::Parse {
            pos,
            msg: format!("invalid integer {base_s:?}"),
        })?;
        let exp: u32 = match exp_s {
            Some(e) => e.parse().map_err(|_| TripleError::Parse {
                pos,
                msg: format!("invalid exponent {e:?}"),
            })?,
            None => 1,
        };
        if base.is_zero() {
            return Err(TripleError::Parse {
                pos,
                msg: "base must be at least 1".into(),
            });
        }
        if exp == 0 {
            return Err(TripleError::Parse {
                pos,
                msg: "exponent must be at least 1".into(),
            });
        }
        if exp > MAX_PARSE_EXPONENT {
            return Err(TripleError::Parse {
                pos,
                msg: format!("exponent {exp} exceeds the supported maximum {MAX_PARSE_EXPONENT}"),
            });
        }
        if !base.is_one() {
            let base_f = factorize(&base, effort)?;
            result = result.mul(&base_f.pow(exp));
        }
        pos += term.len() + 1;
    }
    Ok(result)
}

/// Canonical text form "p1^e1*p2^e2*..." with "^1" omitted; "1" for the
/// empty factorization. Round-trips through [`parse_factored`].
pub fn format_factored(f: &Factorization) -> String {
    if f.is_one() {
        return "1".to_string();
    }
    f.factors()
        .iter()
        .map(|(p, e)| {
            if *e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Worst-case power of a triple built from base values of size about `n`
/// with base primes p, q, r:
/// log(n sqrt(3n)) / (3 log sqrt(3n) + log p + log q + log r).
/// Tends to 1 from below as n grows (about (sqrt(3n))^3 box combinations
/// pigeonhole into a zero sum).
pub fn estimate_worst_case_power(n: f64, p: f64, q: f64, r: f64) -> f64 {
    let s = (3.0 * n).sqrt();
    (n * s).ln() / (3.0 * s.ln() + p.ln() + q.ln() + r.ln())
}
