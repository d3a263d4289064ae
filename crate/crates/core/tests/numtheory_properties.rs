//! Randomized number-theory properties: factorization round-trips against
//! the raw input, smooth enumeration against a brute-force filter, and
//! the radical/gcd algebra.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use abc_core::numtheory::{
    factorize, gcd_factored, is_prime, is_prime_u64, radical, smooth_numbers, FactorEffort,
    Factorization,
};

fn assert_round_trip(n: u64) {
    let f = factorize(&BigUint::from(n), &FactorEffort::default())
        .unwrap_or_else(|e| panic!("factorize({n}) failed: {e}"));
    let product = f
        .factors()
        .iter()
        .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
    assert_eq!(product, BigUint::from(n), "round trip for {n}");
    assert_eq!(f.value(), &BigUint::from(n));
    for (p, _) in f.factors() {
        assert!(is_prime(p), "claimed prime {p} of {n} is composite");
    }
    for w in f.factors().windows(2) {
        assert!(w[0].0 < w[1].0, "factors of {n} not strictly ascending");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn factorize_round_trip_u64(n in 1u64..) {
        assert_round_trip(n);
    }

    #[test]
    fn smooth_set_equals_brute_force(m in 2u64..10_000u64, n_bound in 2u64..50u64) {
        let set = smooth_numbers(&BigUint::from(m), n_bound).unwrap();
        let mut expect = vec![1u64];
        for v in 2..m {
            let mut x = v;
            for p in 2..n_bound {
                while x % p == 0 {
                    x /= p;
                }
            }
            if x == 1 {
                expect.push(v);
            }
        }
        let got: Vec<u64> = set
            .members()
            .iter()
            .map(|f| f.value().to_u64().unwrap())
            .collect();
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn radical_divides_product_and_is_squarefree(
        a in 1u64..1_000_000u64,
        b in 1u64..1_000_000u64,
        c in 1u64..1_000_000u64,
    ) {
        let effort = FactorEffort::default();
        let fa = factorize(&BigUint::from(a), &effort).unwrap();
        let fb = factorize(&BigUint::from(b), &effort).unwrap();
        let fc = factorize(&BigUint::from(c), &effort).unwrap();
        let rad = radical(&fa, &fb, &fc);
        prop_assert!(rad.factors().iter().all(|(_, e)| *e == 1));
        let product = BigUint::from(a) * BigUint::from(b) * BigUint::from(c);
        prop_assert!((product % rad.value()) == BigUint::from(0u32));
        // monotone under adding prime factors
        let extended = radical(&fa.mul(&fb), &fb, &fc);
        prop_assert!((extended.value() % rad.value()) == BigUint::from(0u32));
    }

    #[test]
    fn gcd_divides_both_arguments(a in 1u64..1_000_000_000u64, b in 1u64..1_000_000_000u64) {
        let effort = FactorEffort::default();
        let fa = factorize(&BigUint::from(a), &effort).unwrap();
        let fb = factorize(&BigUint::from(b), &effort).unwrap();
        let g = gcd_factored(&fa, &fb);
        prop_assert!((BigUint::from(a) % g.value()) == BigUint::from(0u32));
        prop_assert!((BigUint::from(b) % g.value()) == BigUint::from(0u32));
        prop_assert!(gcd_factored(&fa, &Factorization::one()).is_one());
        // agrees with the integer gcd
        let expect = num_integer::Integer::gcd(&a, &b);
        prop_assert_eq!(g.value().to_u64().unwrap(), expect);
    }
}

#[test]
fn factorize_round_trip_bulk() {
    // the classic fixed-seed sweep: 10^4 uniform draws over all of u64
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed_ab5e);
    for _ in 0..10_000 {
        assert_round_trip(rng.gen_range(1..=u64::MAX));
    }
}

#[test]
fn primality_spot_checks_against_known_values() {
    // boundary behavior around the word size, and the base-set regions
    for (n, expect) in [
        (2u64, true),
        (3, true),
        (4, false),
        (25_326_001, false),                // strong pseudoprime to {2, 3, 5}
        (3_215_031_751, false),             // strong pseudoprime to {2, 3, 5, 7}
        (341_550_071_728_321, false),       // spsp to {2,3,5,7,11,13,17}
        (18_446_744_073_709_551_557, true), // largest prime below 2^64
    ] {
        assert_eq!(is_prime_u64(n), expect, "{n}");
    }
}
