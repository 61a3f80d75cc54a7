//! Small-prime utilities: a sieve, deterministic Miller-Rabin and trial division.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// Inputs at or above this bound are refused by [`is_prime`].
pub const PRIMALITY_LIMIT: u64 = 330_000_000_000_000;

// Deterministic for n < 341_550_071_728_321.
const WITNESSES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for `n < PRIMALITY_LIMIT`.
pub fn is_prime(n: u64) -> Result<bool> {
    if n >= PRIMALITY_LIMIT {
        return Err(Error::PrimalityLimit(n));
    }
    if n < 2 {
        return Ok(false);
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return Ok(n == w);
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// All primes `<= bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Odd primes `<= bound`.
pub fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    primes_up_to(bound)
        .into_iter()
        .filter(|&p| p != 2)
        .collect()
}

/// Distinct prime factors of `n` found by trial division up to `limit`,
/// ascending, and the unfactored cofactor.
pub fn trial_factor(n: &BigUint, limit: u64) -> (Vec<u64>, BigUint) {
    let mut rest = n.clone();
    let mut found = Vec::new();
    if rest.is_zero() {
        return (found, rest);
    }
    for p in primes_up_to(limit) {
        if (&rest % p).is_zero() {
            found.push(p);
            while (&rest % p).is_zero() {
                rest /= p;
            }
        }
        if rest.to_u64().is_some_and(|r| r < p.saturating_mul(p)) {
            // rest is 1 or a prime above p
            if let Some(r) = rest.to_u64() {
                if r > 1 && r <= limit {
                    found.push(r);
                    rest = BigUint::from(1u32);
                }
            }
            break;
        }
    }
    (found, rest)
}
