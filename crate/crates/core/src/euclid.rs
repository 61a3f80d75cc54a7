//! Euclidean-algorithm length and the golden-ratio lower bound on it.
//!
//! `L(x, y)` counts division steps until the remainder is zero, starting with
//! the larger argument, so `L(n, 1) = 1` and `L(25, 7) = 4`.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::surd::{compare_abs_phi, fib_lucas, integer_sqrt, Rational};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EuclidStep {
    pub dividend: u64,
    pub divisor: u64,
    pub quotient: u64,
    pub remainder: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EuclidTrace {
    pub steps: Vec<EuclidStep>,
}

impl EuclidTrace {
    pub fn length(&self) -> usize {
        self.steps.len()
    }
}

/// `L(x, y)` with the full division trace.
pub fn euclid_length(x: u64, y: u64) -> Result<EuclidTrace> {
    if x == 0 || y == 0 {
        return Err(Error::ZeroArgument);
    }
    let (mut a, mut b) = if x >= y { (x, y) } else { (y, x) };
    let mut steps = Vec::new();
    loop {
        let step = EuclidStep {
            dividend: a,
            divisor: b,
            quotient: a / b,
            remainder: a % b,
        };
        steps.push(step);
        if step.remainder == 0 {
            return Ok(EuclidTrace { steps });
        }
        a = b;
        b = step.remainder;
    }
}

/// `L(x, y)` without recording the trace. Both arguments must be positive.
pub fn euclid_len(x: u64, y: u64) -> u32 {
    debug_assert!(x > 0 && y > 0);
    let (mut a, mut b) = if x >= y { (x, y) } else { (y, x) };
    let mut n = 0;
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
        n += 1;
    }
    n
}

/// `F_k` with `F_0 = 0, F_1 = F_2 = 1`.
pub fn fibonacci(k: u64) -> BigUint {
    fib_lucas(k).0
}

/// Whether `|a/b - phi| < |F_{k+2}/F_{k+1} - phi|`, decided exactly.
pub fn fib_hypothesis_holds(a: u64, b: u64, k: u64) -> bool {
    if b == 0 {
        return false;
    }
    let x = Rational::new(BigInt::from(a), BigInt::from(b));
    let y = Rational::new(fibonacci(k + 2).into(), fibonacci(k + 1).into());
    compare_abs_phi(&x, &y) == Ordering::Less
}

/// The numerator `b` closest to `p * phi`, so `|b/p - phi| < 1/p`.
pub fn best_phi_numerator(p: u64) -> Result<u64> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!(
            "p must be at least 2, got {p}"
        )));
    }
    // p*phi = (p + sqrt(5 p^2)) / 2, and sqrt(5 p^2) is irrational.
    let five_p2 = BigUint::from(p) * p * 5u32;
    let root = integer_sqrt(&five_p2).0.to_u64().expect("fits");
    let floor = (p + root) / 2;
    let den = BigInt::from(p);
    let lo = Rational::new(BigInt::from(floor), den.clone());
    let hi = Rational::new(BigInt::from(floor + 1), den);
    Ok(match compare_abs_phi(&lo, &hi) {
        Ordering::Less => floor,
        _ => floor + 1,
    })
}
