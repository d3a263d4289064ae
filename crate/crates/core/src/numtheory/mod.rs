//! Integer number theory: primality, factorization, smooth-number
//! enumeration, radicals and factored gcds. Everything a triple needs to
//! exist in fully factored form.

mod factor;
mod primality;

pub use factor::{factorize, FactorEffort};
pub use primality::{is_prime, is_prime_u64};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use thiserror::Error;

/// Default cap on enumerated smooth-set members.
pub const DEFAULT_MEMBER_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumTheoryError {
    #[error("value must be positive")]
    NotPositive,
    #[error("factorization incomplete: cofactor {cofactor} resisted the effort budget")]
    IncompleteFactorization {
        partial: Factorization,
        cofactor: BigUint,
    },
    #[error("smooth enumeration exceeds the member cap of {cap}")]
    BoundsTooLarge { cap: usize },
    #[error("bound must be at least 2")]
    BoundTooSmall,
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("exponent must be at least 1")]
    ZeroExponent,
}

/// A positive integer as a sorted list of (prime, exponent) pairs plus the
/// expanded value. The empty list is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(BigUint, u32)>,
    value: BigUint,
}

impl Factorization {
    pub fn one() -> Self {
        Factorization {
            factors: Vec::new(),
            value: BigUint::one(),
        }
    }

    /// Build from (base, exponent) pairs, verifying each base is prime.
    /// Pairs may repeat or arrive unsorted; exponents of equal primes add.
    pub fn from_prime_powers(pairs: Vec<(BigUint, u32)>) -> Result<Self, NumTheoryError> {
        let mut pairs = pairs;
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut factors: Vec<(BigUint, u32)> = Vec::with_capacity(pairs.len());
        for (p, e) in pairs {
            if e == 0 {
                return Err(NumTheoryError::ZeroExponent);
            }
            if !is_prime(&p) {
                return Err(NumTheoryError::NotPrime(p));
            }
            match factors.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => factors.push((p, e)),
            }
        }
        Ok(Self::from_trusted(factors))
    }

    /// Internal constructor for factor lists already known to be sorted,
    /// duplicate-free lists of true prime powers.
    pub(crate) fn from_trusted(factors: Vec<(BigUint, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|(p, e)| *e > 0 && is_prime(p)));
        let value = factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        Factorization { factors, value }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Exponent of `p` in this factorization (0 if absent).
    pub fn exponent_of(&self, p: &BigUint) -> u32 {
        self.factors
            .binary_search_by(|(q, _)| q.cmp(p))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Factorization) -> Factorization {
        let merged = merge_exponents(&self.factors, &other.factors, |a, b| Some(a + b));
        Factorization {
            factors: merged,
            value: &self.value * &other.value,
        }
    }

    /// Componentwise minimum of exponents: gcd in factored form.
    pub fn gcd(&self, other: &Factorization) -> Factorization {
        let mut out = Vec::new();
        let mut it = other.factors.iter().peekable();
        for (p, e) in &self.factors {
            while it.peek().is_some_and(|(q, _)| q < p) {
                it.next();
            }
            if let Some((q, f)) = it.peek() {
                if q == p {
                    out.push((p.clone(), (*e).min(*f)));
                }
            }
        }
        Self::from_trusted(out)
    }

    /// Exact quotient in factored form. Panics when `other` does not
    /// divide `self`; callers divide only by a computed gcd.
    pub fn div_exact(&self, other: &Factorization) -> Factorization {
        let merged = merge_exponents(&self.factors, &other.factors, |a, b| {
            assert!(a >= b, "div_exact: divisor does not divide value");
            (a > b).then_some(a - b)
        });
        Factorization {
            factors: merged,
            value: &self.value / &other.value,
        }
    }

    /// Natural log of the value as sum of e * ln(p).
    pub fn ln(&self) -> f64 {
        self.factors
            .iter()
            .map(|(p, e)| *e as f64 * ln_biguint(p))
            .sum()
    }

    pub fn log10(&self) -> f64 {
        self.ln() / std::f64::consts::LN_10
    }

    /// Squarefree product of the distinct primes.
    pub fn radical(&self) -> Factorization {
        Self::from_trusted(self.factors.iter().map(|(p, _)| (p.clone(), 1)).collect())
    }

    /// k-th power in factored form.
    pub fn pow(&self, k: u32) -> Factorization {
        if k == 0 {
            return Factorization::one();
        }
        Factorization {
            factors: self
                .factors
                .iter()
                .map(|(p, e)| (p.clone(), e.checked_mul(k).expect("exponent overflow")))
                .collect(),
            value: self.value.pow(k),
        }
    }

    #[cfg(test)]
    pub(crate) fn to_pairs_u64(&self) -> Vec<(u64, u32)> {
        self.factors
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect()
    }
}

impl PartialOrd for Factorization {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Factorization {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

/// Merge two sorted factor lists; `combine(a, b)` yields the merged
/// exponent (entries missing on one side see 0 there).
fn merge_exponents(
    left: &[(BigUint, u32)],
    right: &[(BigUint, u32)],
    combine: impl Fn(u32, u32) -> Option<u32>,
) -> Vec<(BigUint, u32)> {
    let mut out = Vec::with_capacity(left.len() + right.len());
    let (mut i, mut j) = (0, 0);
    while i < left.len() || j < right.len() {
        let (p, a, b) = if j == right.len() || (i < left.len() && left[i].0 < right[j].0) {
            let r = (&left[i].0, left[i].1, 0);
            i += 1;
            r
        } else if i == left.len() || right[j].0 < left[i].0 {
            let r = (&right[j].0, 0, right[j].1);
            j += 1;
            r
        } else {
            let r = (&left[i].0, left[i].1, right[j].1);
            i += 1;
            j += 1;
            r
        };
        if let Some(e) = combine(a, b) {
            if e > 0 {
                out.push((p.clone(), e));
            }
        }
    }
    out
}

/// ln of an arbitrarily large positive integer, accurate to ~1 ulp.
pub(crate) fn ln_biguint(n: &BigUint) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Product of the primes dividing a, b, or c.
pub fn radical(a: &Factorization, b: &Factorization, c: &Factorization) -> Factorization {
    let mut primes: Vec<&BigUint> = a
        .factors
        .iter()
        .chain(b.factors.iter())
        .chain(c.factors.iter())
        .map(|(p, _)| p)
        .collect();
    primes.sort_unstable();
    primes.dedup();
    Factorization::from_trusted(primes.into_iter().map(|p| (p.clone(), 1)).collect())
}

/// Componentwise-minimum gcd of two factored values.
pub fn gcd_factored(a: &Factorization, b: &Factorization) -> Factorization {
    a.gcd(b)
}

/// A complete enumeration of numbers below `value_bound` whose prime
/// factors all lie below `prime_bound` (or a structured subset of it).
#[derive(Debug, Clone)]
pub struct SmoothSet {
    value_bound: BigUint,
    prime_bound: u64,
    members: Vec<Factorization>,
}

impl SmoothSet {
    pub fn value_bound(&self) -> &BigUint {
        &self.value_bound
    }

    pub fn prime_bound(&self) -> u64 {
        self.prime_bound
    }

    pub fn members(&self) -> &[Factorization] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The same set with the member 1 removed, if present.
    pub fn without_one(mut self) -> SmoothSet {
        if self.members.first().is_some_and(Factorization::is_one) {
            self.members.remove(0);
        }
        self
    }
}

/// All numbers below `m` whose prime factors are below `n`, in ascending
/// order; 1 is vacuously smooth and always included.
pub fn smooth_numbers(m: &BigUint, n: u64) -> Result<SmoothSet, NumTheoryError> {
    smooth_numbers_capped(m, n, DEFAULT_MEMBER_CAP)
}

pub fn smooth_numbers_capped(m: &BigUint, n: u64, cap: usize) -> Result<SmoothSet, NumTheoryError> {
    let primes = bounded_primes(m, n, cap)?;
    let mut members = Vec::new();
    let mut stack: Vec<(BigUint, u32)> = Vec::new();
    dfs_smooth(
        m,
        &primes,
        0,
        &BigUint::one(),
        &mut stack,
        &mut members,
        cap,
    )?;
    members.sort_unstable_by(|a: &Factorization, b: &Factorization| a.value.cmp(&b.value));
    Ok(SmoothSet {
        value_bound: m.clone(),
        prime_bound: n,
        members,
    })
}

fn dfs_smooth(
    m: &BigUint,
    primes: &[u64],
    start: usize,
    value: &BigUint,
    stack: &mut Vec<(BigUint, u32)>,
    members: &mut Vec<Factorization>,
    cap: usize,
) -> Result<(), NumTheoryError> {
    if members.len() >= cap {
        return Err(NumTheoryError::BoundsTooLarge { cap });
    }
    members.push(Factorization {
        factors: stack.clone(),
        value: value.clone(),
    });
    for (k, &p) in primes.iter().enumerate().skip(start) {
        let pb = BigUint::from(p);
        let mut v = value * &pb;
        if v >= *m {
            break; // primes ascend, larger ones overshoot too
        }
        let mut e = 1u32;
        while v < *m {
            stack.push((pb.clone(), e));
            dfs_smooth(m, primes, k + 1, &v, stack, members, cap)?;
            stack.pop();
            v *= &pb;
            e += 1;
        }
    }
    Ok(())
}

/// Primes that can actually divide a member: below both bounds.
fn bounded_primes(m: &BigUint, n: u64, cap: usize) -> Result<Vec<u64>, NumTheoryError> {
    if n < 2 || *m < BigUint::from(2u32) {
        return Err(NumTheoryError::BoundTooSmall);
    }
    let effective = match m.to_u64() {
        Some(mv) => n.min(mv),
        None => n,
    };
    // pi(x) > x / ln(x); refuse plainly hopeless sieves before allocating.
    if effective > 1 << 28 {
        let est = effective as f64 / (effective as f64).ln();
        if est > cap as f64 {
            return Err(NumTheoryError::BoundsTooLarge { cap });
        }
    }
    Ok(factor::sieve_primes_below(effective))
}

/// The subset of the smooth numbers that are powers of a single prime,
/// optionally with 1 prepended.
pub fn prime_powers(m: &BigUint, n: u64, include_one: bool) -> Result<SmoothSet, NumTheoryError> {
    prime_powers_capped(m, n, include_one, DEFAULT_MEMBER_CAP)
}

pub fn prime_powers_capped(
    m: &BigUint,
    n: u64,
    include_one: bool,
    cap: usize,
) -> Result<SmoothSet, NumTheoryError> {
    let primes = bounded_primes(m, n, cap)?;
    let mut members = Vec::new();
    if include_one {
        members.push(Factorization::one());
    }
    for p in primes {
        let pb = BigUint::from(p);
        let mut v = pb.clone();
        let mut e = 1u32;
        while v < *m {
            if members.len() >= cap {
                return Err(NumTheoryError::BoundsTooLarge { cap });
            }
            members.push(Factorization {
                factors: vec![(pb.clone(), e)],
                value: v.clone(),
            });
            v *= &pb;
            e += 1;
        }
    }
    members.sort_unstable_by(|a, b| a.value.cmp(&b.value));
    Ok(SmoothSet {
        value_bound: m.clone(),
        prime_bound: n,
        members,
    })
}

/// Products of exactly two distinct prime powers p^a * q^b below `m`,
/// optionally with 1 prepended.
pub fn prime_power_products_2(
    m: &BigUint,
    n: u64,
    include_one: bool,
    cap: usize,
) -> Result<SmoothSet, NumTheoryError> {
    let primes = bounded_primes(m, n, cap)?;
    let mut members = Vec::new();
    if include_one {
        members.push(Factorization::one());
    }
    for (i, &p) in primes.iter().enumerate() {
        let pb = BigUint::from(p);
        let mut pv = pb.clone();
        let mut pe = 1u32;
        while pv < *m {
            for &q in &primes[i + 1..] {
                let qb = BigUint::from(q);
                let mut v = &pv * &qb;
                let mut qe = 1u32;
                if v >= *m {
                    break;
                }
                while v < *m {
                    if members.len() >= cap {
                        return Err(NumTheoryError::BoundsTooLarge { cap });
                    }
                    members.push(Factorization {
                        factors: vec![(pb.clone(), pe), (qb.clone(), qe)],
                        value: v.clone(),
                    });
                    v *= &qb;
                    qe += 1;
                }
            }
            pv *= &pb;
            pe += 1;
        }
    }
    members.sort_unstable_by(|a, b| a.value.cmp(&b.value));
    Ok(SmoothSet {
        value_bound: m.clone(),
        prime_bound: n,
        members,
    })
}
