//! Deterministic primality testing.
//!
//! Below 3.3e24 a fixed set of strong-pseudoprime bases is a proof of
//! primality; beyond that we fall back to Baillie-PSW (no counterexample
//! is known). Inputs in this project are far below the deterministic
//! threshold, so BPSW is a safety net only.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Strong-pseudoprime bases covering all of u64 (7 bases, Sinclair set).
const U64_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// The first 13 primes are deterministic witnesses below this bound.
const MR13_LIMIT_DEC: &str = "3317044064679887385961981";

const MR13_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn mr13_limit() -> &'static BigUint {
    static LIMIT: OnceLock<BigUint> = OnceLock::new();
    LIMIT.get_or_init(|| MR13_LIMIT_DEC.parse().unwrap())
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(x) = n.to_u64() {
        return is_prime_u64(x);
    }
    for p in MR13_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    if n < mr13_limit() {
        MR13_BASES
            .iter()
            .all(|&a| strong_probable_prime(n, &BigUint::from(a)))
    } else {
        baillie_psw(n)
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'base: for a in U64_BASES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Miller-Rabin round: `n` odd, `a` in [2, n-2].
fn strong_probable_prime(n: &BigUint, a: &BigUint) -> bool {
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = a.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u32), n);
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Baillie-PSW: strong base-2 test plus a strong Lucas test with
/// Selfridge parameters. `n` odd, not divisible by small primes.
fn baillie_psw(n: &BigUint) -> bool {
    if !strong_probable_prime(n, &BigUint::from(2u32)) {
        return false;
    }
    if is_perfect_square(n) {
        return false;
    }
    strong_lucas(n)
}

fn is_perfect_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

/// Jacobi symbol (a/n) for odd positive n.
fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let n_big = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n_big);
    let mut n = n_big;
    let mut result = 1i32;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32().unwrap() == 3 && (&n % 4u32).to_u32().unwrap() == 3 {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas probable-prime test, Selfridge parameter selection.
fn strong_lucas(n: &BigUint) -> bool {
    let n_int = BigInt::from(n.clone());

    // Find D in 5, -7, 9, -11, ... with (D/n) = -1.
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, n) {
            -1 => break,
            0 => {
                // gcd(|D|, n) > 1: composite unless n equals that factor.
                return n_int.magnitude() == d.magnitude();
            }
            _ => {}
        }
        d = if d.sign() == num_bigint::Sign::Plus {
            -(&d + BigInt::from(2))
        } else {
            -(&d - BigInt::from(2))
        };
    }
    // P = 1, Q = (1 - D) / 4.
    let q: BigInt = (BigInt::one() - &d) / BigInt::from(4);

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let t = &n_plus_1 >> s;

    // Compute U_t, V_t mod n by the binary double-and-add chain.
    let mut u = BigInt::one();
    let mut v = BigInt::one();
    let mut qk = q.mod_floor(&n_int);
    let bits = t.bits();
    let half = |x: BigInt| -> BigInt {
        // exact division by 2 mod n (n odd)
        let y: BigInt = if x.is_even() {
            x >> 1
        } else {
            (x + &n_int) >> 1
        };
        y.mod_floor(&n_int)
    };
    for i in (0..bits - 1).rev() {
        // double: U_{2k} = U V, V_{2k} = V^2 - 2 Q^k
        u = (&u * &v).mod_floor(&n_int);
        v = (&v * &v - BigInt::from(2) * &qk).mod_floor(&n_int);
        qk = (&qk * &qk).mod_floor(&n_int);
        if t.bit(i) {
            // add one: U_{k+1} = (P U + V)/2, V_{k+1} = (D U + P V)/2
            let u1 = half(&u + &v);
            let v1 = half(&d * &u + &v);
            u = u1;
            v = v1;
            qk = (&qk * &q).mod_floor(&n_int);
        }
    }

    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - BigInt::from(2) * &qk).mod_floor(&n_int);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(&n_int);
    }
    false
}
