//! Integer factorization: trial division, then Pollard-Brent rho with a
//! bounded iteration budget. Failures surface as
//! [`NumTheoryError::IncompleteFactorization`] so callers can skip a
//! candidate (search) or abort (verification).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

use super::primality::{is_prime, is_prime_u64};
use super::{Factorization, NumTheoryError};

/// Work limits for [`factorize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorEffort {
    /// Trial-divide by all primes below this bound first.
    pub trial_bound: u64,
    /// Pollard-Brent iteration budget per remaining cofactor.
    pub rho_iterations: u64,
}

impl Default for FactorEffort {
    fn default() -> Self {
        FactorEffort {
            trial_bound: 100_000,
            rho_iterations: 1 << 26,
        }
    }
}

pub(crate) fn sieve_primes_below(limit: u64) -> Vec<u64> {
    if limit <= 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for i in 2..n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Primes below the default trial bound, shared across calls.
fn default_trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes_below(FactorEffort::default().trial_bound))
}

pub fn factorize(n: &BigUint, effort: &FactorEffort) -> Result<Factorization, NumTheoryError> {
    if n.is_zero() {
        return Err(NumTheoryError::NotPositive);
    }
    if n.is_one() {
        return Ok(Factorization::one());
    }
    if let Some(n64) = n.to_u64() {
        return factorize_u64(n64, effort);
    }

    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    let mut rest = n.clone();

    // Trial division. Stop early once p^2 exceeds the remaining cofactor.
    let owned_primes;
    let primes: &[u64] = if effort.trial_bound == FactorEffort::default().trial_bound {
        default_trial_primes()
    } else {
        owned_primes = sieve_primes_below(effort.trial_bound);
        &owned_primes
    };
    for &p in primes {
        if rest.is_one() {
            break;
        }
        if let Some(r) = rest.to_u64() {
            if (p as u128) * (p as u128) > r as u128 {
                break;
            }
        }
        let pb = BigUint::from(p);
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((pb, e));
        }
    }

    // Both to_u64 branches above leave `rest` either 1, prime, or a
    // composite with no factor below trial_bound (when rest is large the
    // p^2 early exit never fires, which is only a speed question).
    let mut pending = vec![rest];
    let mut unfactored: Vec<BigUint> = Vec::new();
    while let Some(m) = pending.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(m64) = m.to_u64() {
            if is_prime_u64(m64) {
                push_factor(&mut factors, m, 1);
                continue;
            }
            match brent_rho_u64(m64, effort.rho_iterations) {
                Some(d) => {
                    pending.push(BigUint::from(d));
                    pending.push(BigUint::from(m64 / d));
                }
                None => unfactored.push(m),
            }
        } else {
            if is_prime(&m) {
                push_factor(&mut factors, m, 1);
                continue;
            }
            match brent_rho_big(&m, effort.rho_iterations) {
                Some(d) => {
                    pending.push(&m / &d);
                    pending.push(d);
                }
                None => unfactored.push(m),
            }
        }
    }

    factors.sort_by(|a, b| a.0.cmp(&b.0));
    let factors = merge_sorted(factors);

    if unfactored.is_empty() {
        let f = Factorization::from_trusted(factors);
        debug_assert_eq!(f.value(), n);
        Ok(f)
    } else {
        let cofactor = unfactored
            .into_iter()
            .fold(BigUint::one(), |acc, m| acc * m);
        Err(NumTheoryError::IncompleteFactorization {
            partial: Factorization::from_trusted(factors),
            cofactor,
        })
    }
}

/// Allocation-free path for word-sized inputs; these dominate the search
/// (relation coefficients are far below 2^64).
fn factorize_u64(n: u64, effort: &FactorEffort) -> Result<Factorization, NumTheoryError> {
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut rest = n;

    let owned_primes;
    let primes: &[u64] = if effort.trial_bound == FactorEffort::default().trial_bound {
        default_trial_primes()
    } else {
        owned_primes = sieve_primes_below(effort.trial_bound);
        &owned_primes
    };
    for &p in primes {
        if rest == 1 || (p as u128) * (p as u128) > rest as u128 {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rest > 1 {
        // Whatever survives trial division is prime or rho-sized.
        if (rest as u128) <= (effort.trial_bound as u128) * (effort.trial_bound as u128)
            || is_prime_u64(rest)
        {
            factors.push((rest, 1));
        } else {
            let mut pending = vec![rest];
            let mut found: Vec<u64> = Vec::new();
            let mut unfactored = 1u128;
            while let Some(m) = pending.pop() {
                if is_prime_u64(m) {
                    found.push(m);
                } else {
                    match brent_rho_u64(m, effort.rho_iterations) {
                        Some(d) => {
                            pending.push(d);
                            pending.push(m / d);
                        }
                        None => unfactored *= m as u128,
                    }
                }
            }
            found.sort_unstable();
            for p in found {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
            if unfactored > 1 {
                return Err(NumTheoryError::IncompleteFactorization {
                    partial: Factorization::from_trusted(
                        factors
                            .into_iter()
                            .map(|(p, e)| (BigUint::from(p), e))
                            .collect(),
                    ),
                    cofactor: BigUint::from(unfactored),
                });
            }
        }
    }
    Ok(Factorization::from_trusted(
        factors
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect(),
    ))
}

fn push_factor(factors: &mut Vec<(BigUint, u32)>, p: BigUint, e: u32) {
    if let Some(entry) = factors.iter_mut().find(|(q, _)| *q == p) {
        entry.1 += e;
    } else {
        factors.push((p, e));
    }
}

fn merge_sorted(factors: Vec<(BigUint, u32)>) -> Vec<(BigUint, u32)> {
    let mut out: Vec<(BigUint, u32)> = Vec::with_capacity(factors.len());
    for (p, e) in factors {
        match out.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => out.push((p, e)),
        }
    }
    out
}

/// Brent's cycle-finding variant of Pollard rho on u64. Returns a
/// nontrivial factor of composite odd `n`, or None if the budget runs out.
fn brent_rho_u64(n: u64, budget: u64) -> Option<u64> {
    debug_assert!(n > 3 && !is_prime_u64(n));
    if n.is_multiple_of(2) {
        return Some(2);
    }
    for c in 1..=4u64 {
        if let Some(d) = brent_rho_u64_once(n, c, budget / 4) {
            return Some(d);
        }
    }
    None
}

fn brent_rho_u64_once(n: u64, c: u64, budget: u64) -> Option<u64> {
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let step = |x: u64| {
        let y = mul(x, x) + c;
        if y >= n {
            y - n
        } else {
            y
        }
    };
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut iters = 0u64;
    let m = 128u64;
    loop {
        let x = y;
        for _ in 0..r {
            y = step(y);
        }
        let mut k = 0u64;
        while k < r {
            let mut ys = y;
            let lim = m.min(r - k);
            for _ in 0..lim {
                y = step(y);
                q = mul(q, x.abs_diff(y));
            }
            let g = q.gcd(&n);
            iters += lim;
            if g > 1 {
                // Back up one step at a time to isolate the factor.
                if g == n {
                    loop {
                        ys = step(ys);
                        let g = x.abs_diff(ys).gcd(&n);
                        if g > 1 {
                            return if g == n { None } else { Some(g) };
                        }
                    }
                }
                return Some(g);
            }
            if iters >= budget {
                return None;
            }
            k += lim;
        }
        r *= 2;
    }
}

/// Pollard-Brent on BigUint for cofactors above u64.
fn brent_rho_big(n: &BigUint, budget: u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    for c in 1u32..=4 {
        let cb = BigUint::from(c);
        let step = |x: &BigUint| (x * x + &cb) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = one.clone();
        let mut iters = 0u64;
        let m = 64u64;
        'outer: loop {
            let x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0u64;
            while k < r {
                let mut ys = y.clone();
                let lim = m.min(r - k);
                for _ in 0..lim {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                let g = q.gcd(n);
                iters += lim;
                if !g.is_one() {
                    if &g == n {
                        loop {
                            ys = step(&ys);
                            let diff = if x > ys { &x - &ys } else { &ys - &x };
                            let g = diff.gcd(n);
                            if !g.is_one() {
                                if &g == n {
                                    break 'outer; // cycle degenerated; retry with next c
                                }
                                return Some(g);
                            }
                        }
                    }
                    return Some(g);
                }
                if iters >= budget / 4 {
                    break 'outer;
                }
                k += lim;
            }
            r *= 2;
        }
    }
    None
}
