//! Exact integer square roots, canonical quadratic surds and golden-ratio
//! comparisons.
//!
//! The golden ratio is never approximated. A rational `z` is compared with
//! `phi = (1 + sqrt 5) / 2` by squaring an integer inequality, and a power
//! `phi^k` is carried as the exact pair `(L_k, F_k)` with
//! `phi^k = (L_k + F_k sqrt 5) / 2`.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

/// Returns `(floor(sqrt(n)), n is a perfect square)`.
pub fn integer_sqrt(n: &BigUint) -> (BigUint, bool) {
    if n.is_zero() {
        return (BigUint::zero(), true);
    }
    // 2^ceil(bits/2) is always >= sqrt(n), so Newton descends monotonically.
    let bits = n.bits();
    let mut x = BigUint::one() << bits.div_ceil(2);
    loop {
        let next = (&x + n / &x) >> 1u32;
        if next >= x {
            break;
        }
        x = next;
    }
    while &x * &x > *n {
        x -= 1u32;
    }
    loop {
        let up = &x + 1u32;
        if &up * &up <= *n {
            x = up;
        } else {
            break;
        }
    }
    let square = &x * &x == *n;
    (x, square)
}

pub(crate) fn require_nonsquare(n: &BigUint) -> Result<BigUint> {
    let (root, square) = integer_sqrt(n);
    if square {
        Err(Error::PerfectSquare(n.clone()))
    } else {
        Ok(root)
    }
}

/// The quadratic irrational `(P + sqrt(D)) / Q` with `Q | D - P^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurdState {
    p: BigInt,
    q: BigInt,
    d: BigUint,
}

impl SurdState {
    /// Canonicalizes `(p + sqrt(d)) / q`.
    ///
    /// When `q` does not divide `d - p^2` the fraction is rescaled by `|q|`,
    /// then any content shared by `p`, `q` and `(d - p^2) / q` is removed.
    pub fn normalize(p: BigInt, q: BigInt, d: BigUint) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        require_nonsquare(&d)?;
        let (mut p, mut q, mut d) = (p, q, d);
        let rem = (BigInt::from(d.clone()) - &p * &p) % &q;
        if !rem.is_zero() {
            let scale = q.abs();
            p *= &scale;
            d *= scale.magnitude() * scale.magnitude();
            q *= &scale;
        }
        let cofactor = (BigInt::from(d.clone()) - &p * &p) / &q;
        let g = p.gcd(&q).gcd(&cofactor);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            d /= g.magnitude() * g.magnitude();
        }
        Ok(SurdState { p, q, d })
    }

    /// Builds a state that is already canonical, checking the invariant.
    pub fn new(p: BigInt, q: BigInt, d: BigUint) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        require_nonsquare(&d)?;
        if !((BigInt::from(d.clone()) - &p * &p) % &q).is_zero() {
            return Err(Error::InvalidArgument(format!(
                "{q} does not divide {d} - ({p})^2"
            )));
        }
        Ok(SurdState { p, q, d })
    }

    pub fn sqrt(d: &BigUint) -> Result<Self> {
        Self::new(BigInt::zero(), BigInt::one(), d.clone())
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn radicand(&self) -> &BigUint {
        &self.d
    }

    /// Approximate value for display only.
    pub fn approx(&self) -> f64 {
        let p: f64 = self.p.to_string().parse().unwrap_or(f64::NAN);
        let q: f64 = self.q.to_string().parse().unwrap_or(f64::NAN);
        let d: f64 = self.d.to_string().parse().unwrap_or(f64::NAN);
        (p + d.sqrt()) / q
    }

    pub(crate) fn into_parts(self) -> (BigInt, BigInt, BigUint) {
        (self.p, self.q, self.d)
    }
}

/// `sign(z - phi)` for rational `z`.
pub fn cmp_phi(z: &Rational) -> Ordering {
    // z - phi = (2n - m - m sqrt 5) / 2m with m > 0.
    let lhs: BigInt = z.numer() * 2u32 - z.denom();
    if !lhs.is_positive() {
        return Ordering::Less;
    }
    let den = z.denom();
    (&lhs * &lhs).cmp(&(den * den * 5))
}

/// Orders `|x - phi|` against `|y - phi|` exactly.
///
/// `|x-phi|^2 - |y-phi|^2 = (x - y)(x + y - 2 phi)`, so the answer is the
/// product of two signs. `Equal` only occurs when `x == y`.
pub fn compare_abs_phi(x: &Rational, y: &Rational) -> Ordering {
    let first = x.cmp(y);
    if first == Ordering::Equal {
        return Ordering::Equal;
    }
    let mid = (x + y) / Rational::from_integer(BigInt::from(2));
    let second = cmp_phi(&mid);
    match (first, second) {
        (a, Ordering::Greater) => a,
        (a, _) => a.reverse(),
    }
}

/// `phi^k = (lucas + fib * sqrt 5) / 2` held exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiPower {
    k: u64,
    lucas: BigUint,
    fib: BigUint,
}

impl PhiPower {
    pub fn one() -> Self {
        PhiPower {
            k: 0,
            lucas: BigUint::from(2u32),
            fib: BigUint::zero(),
        }
    }

    pub fn new(k: u64) -> Self {
        let (fib, lucas) = fib_lucas(k);
        PhiPower { k, lucas, fib }
    }

    pub fn exponent(&self) -> u64 {
        self.k
    }

    pub fn lucas(&self) -> &BigUint {
        &self.lucas
    }

    pub fn fib(&self) -> &BigUint {
        &self.fib
    }

    /// Multiplies by phi in place.
    pub fn advance(&mut self) {
        let lucas = (&self.lucas + &self.fib * 5u32) >> 1u32;
        let fib = (&self.lucas + &self.fib) >> 1u32;
        self.lucas = lucas;
        self.fib = fib;
        self.k += 1;
    }

    /// Orders `phi^k` against the integer `n`.
    pub fn cmp_integer(&self, n: &BigUint) -> Ordering {
        let gap = BigInt::from(n * 2u32) - BigInt::from(self.lucas.clone());
        match gap.sign() {
            Sign::Minus => Ordering::Greater,
            _ if self.fib.is_zero() => BigInt::zero().cmp(&gap),
            Sign::NoSign => Ordering::Greater,
            Sign::Plus => {
                let lhs = &self.fib * &self.fib * 5u32;
                lhs.cmp(&gap.magnitude().pow(2))
            }
        }
    }
}

/// `(F_k, L_k)` by fast doubling.
pub(crate) fn fib_lucas(k: u64) -> (BigUint, BigUint) {
    // Fast doubling on (F_j, F_{j+1}).
    let mut a = BigUint::zero();
    let mut b = BigUint::one();
    for bit in (0..64 - k.leading_zeros()).rev() {
        let two_b = &b << 1u32;
        let c = &a * (&two_b - &a);
        let d = &a * &a + &b * &b;
        if (k >> bit) & 1 == 1 {
            b = &c + &d;
            a = d;
        } else {
            a = c;
            b = d;
        }
    }
    // L_k = 2 F_{k+1} - F_k
    let lucas = (&b << 1u32) - &a;
    (a, lucas)
}

/// The unique `t` with `phi^(2t) < p < phi^(2t+2)`.
pub fn phi_interval_exponent(p: &BigUint) -> Result<u64> {
    if *p < BigUint::from(2u32) {
        return Err(Error::InvalidArgument(format!(
            "p must be at least 2, got {p}"
        )));
    }
    let mut power = PhiPower::one();
    loop {
        power.advance();
        power.advance();
        if power.cmp_integer(p) == Ordering::Greater {
            return Ok(power.exponent() / 2 - 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn isqrt_anchors() {
        assert_eq!(integer_sqrt(&big(0)), (big(0), true));
        assert_eq!(integer_sqrt(&big(1)), (big(1), true));
        assert_eq!(integer_sqrt(&big(108)), (big(10), false));
        let two128 = BigUint::one() << 128u32;
        assert_eq!(integer_sqrt(&two128), (BigUint::one() << 64u32, true));
    }

    #[test]
    fn isqrt_exhaustive_small() {
        for n in 0..=1_000_000u64 {
            let (s, sq) = integer_sqrt(&big(n));
            let s = u64::try_from(&s).unwrap();
            assert!(s * s <= n && n < (s + 1) * (s + 1), "n = {n}");
            assert_eq!(sq, s * s == n);
        }
    }

    #[test]
    fn isqrt_huge_matches_library() {
        let mut n = BigUint::from(7u32);
        for _ in 0..12 {
            n = &n * &n + 12345u32;
            assert_eq!(integer_sqrt(&n).0, n.sqrt());
        }
    }

    #[test]
    fn normalize_examples() {
        let s = SurdState::normalize(BigInt::zero(), BigInt::one(), big(2)).unwrap();
        assert_eq!(
            (s.p().clone(), s.q().clone(), s.radicand().clone()),
            (0.into(), 1.into(), big(2))
        );

        let s = SurdState::normalize(BigInt::from(1), BigInt::from(3), big(2)).unwrap();
        let check = BigInt::from(s.radicand().clone()) - s.p() * s.p();
        assert!((check % s.q()).is_zero());
        // (P + sqrt D)/Q = (1 + sqrt 2)/3  <=>  sqrt D = (Q/3) + (Q/3) sqrt 2 - P
        // with Q = 9, P = 3: sqrt D = 3 sqrt 2, D = 18.
        assert_eq!(
            (s.p().clone(), s.q().clone(), s.radicand().clone()),
            (3.into(), 9.into(), big(18))
        );
        assert!((s.approx() - (1.0 + 2f64.sqrt()) / 3.0).abs() < 1e-12);

        assert!(matches!(
            SurdState::normalize(BigInt::zero(), BigInt::one(), big(4)),
            Err(Error::PerfectSquare(_))
        ));
        assert!(matches!(
            SurdState::normalize(BigInt::zero(), BigInt::zero(), big(2)),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn normalize_removes_content() {
        // (2 + sqrt 8)/2 = 1 + sqrt 2
        let s = SurdState::normalize(BigInt::from(2), BigInt::from(2), big(8)).unwrap();
        assert_eq!(
            (s.p().clone(), s.q().clone(), s.radicand().clone()),
            (1.into(), 1.into(), big(2))
        );
    }

    #[test]
    fn cmp_phi_signs() {
        assert_eq!(cmp_phi(&rat(8, 5)), Ordering::Less);
        assert_eq!(cmp_phi(&rat(13, 8)), Ordering::Greater);
        assert_eq!(cmp_phi(&rat(-3, 1)), Ordering::Less);
        assert_eq!(cmp_phi(&rat(2, 1)), Ordering::Greater);
    }

    #[test]
    fn compare_abs_phi_examples() {
        // Exact rule: 13/8 vs 8/5. x > y, and (13/8 + 8/5)/2 = 129/80 < phi
        // because 2*129 - 80 = 178, 178^2 = 31684 < 5 * 80^2 = 32000.
        // Signs (+)(-) give LT.
        assert_eq!(compare_abs_phi(&rat(13, 8), &rat(8, 5)), Ordering::Less);
        assert_eq!(compare_abs_phi(&rat(8, 5), &rat(13, 8)), Ordering::Greater);
        assert_eq!(compare_abs_phi(&rat(3, 2), &rat(3, 2)), Ordering::Equal);
        assert_eq!(compare_abs_phi(&rat(157, 97), &rat(2, 1)), Ordering::Less);
    }

    #[test]
    fn phi_power_identity() {
        for k in 0..=200u64 {
            let pw = PhiPower::new(k);
            let lhs =
                BigInt::from(pw.lucas() * pw.lucas()) - BigInt::from(pw.fib() * pw.fib() * 5u32);
            let rhs = if k % 2 == 0 {
                BigInt::from(4)
            } else {
                BigInt::from(-4)
            };
            assert_eq!(lhs, rhs, "k = {k}");
        }
    }

    #[test]
    fn phi_power_advance_matches_direct() {
        let mut pw = PhiPower::one();
        for k in 1..=100u64 {
            pw.advance();
            assert_eq!(pw, PhiPower::new(k));
        }
    }

    #[test]
    fn phi_power_cmp_integer() {
        // phi^0 = 1, phi^1 ~ 1.618, phi^8 ~ 46.98, phi^10 ~ 122.99
        assert_eq!(PhiPower::new(0).cmp_integer(&big(1)), Ordering::Equal);
        assert_eq!(PhiPower::new(0).cmp_integer(&big(2)), Ordering::Less);
        assert_eq!(PhiPower::new(1).cmp_integer(&big(1)), Ordering::Greater);
        assert_eq!(PhiPower::new(1).cmp_integer(&big(2)), Ordering::Less);
        assert_eq!(PhiPower::new(8).cmp_integer(&big(46)), Ordering::Greater);
        assert_eq!(PhiPower::new(8).cmp_integer(&big(47)), Ordering::Less);
        assert_eq!(PhiPower::new(10).cmp_integer(&big(122)), Ordering::Greater);
        assert_eq!(PhiPower::new(10).cmp_integer(&big(123)), Ordering::Less);
    }

    #[test]
    fn phi_interval_examples() {
        assert_eq!(phi_interval_exponent(&big(97)).unwrap(), 4);
        assert_eq!(phi_interval_exponent(&big(3)).unwrap(), 1);
        assert_eq!(phi_interval_exponent(&big(47)).unwrap(), 4);
        assert_eq!(phi_interval_exponent(&big(2)).unwrap(), 0);
        assert!(phi_interval_exponent(&big(1)).is_err());
    }

    #[test]
    fn phi_interval_monotone_and_float_consistent() {
        let log_phi = |x: f64| x.ln() / ((1.0 + 5f64.sqrt()) / 2.0).ln();
        let mut prev = 0;
        for p in 2..20_000u64 {
            let t = phi_interval_exponent(&big(p)).unwrap();
            assert!(t >= prev);
            prev = t;
            let approx = (log_phi(p as f64) / 2.0).floor() as u64;
            assert_eq!(t, approx, "p = {p}");
        }
    }

    /// phi to ~240 bits as a scaled integer, for comparison against the exact rule.
    fn phi_scaled(bits: u32) -> BigUint {
        let five = BigUint::from(5u32) << (2 * bits);
        ((BigUint::one() << bits) + five.sqrt()) >> 1u32
    }

    proptest! {
        #[test]
        fn compare_abs_phi_matches_high_precision(
            xn in 1i64..3_000_000, xd in 1i64..1_000_000,
            yn in 1i64..3_000_000, yd in 1i64..1_000_000,
        ) {
            let x = rat(xn, xd);
            let y = rat(yn, yd);
            prop_assume!(x != y);
            const BITS: u32 = 240;
            let phi = BigInt::from(phi_scaled(BITS));
            let scale = BigInt::one() << BITS;
            // |x - phi| * xd * yd scaled; compare |xn*yd*2^B - phi*xd*yd| vs |yn*xd*2^B - phi*xd*yd|
            let common = &phi * xd * yd;
            let dx = (BigInt::from(xn * yd) * &scale - &common).abs();
            let dy = (BigInt::from(yn * xd) * &scale - &common).abs();
            // phi error < 1 ulp scaled; distances carry error < xd*yd, so demand a wider gap.
            let margin = BigInt::from(4) * xd * yd;
            if (&dx - &dy).abs() > margin {
                prop_assert_eq!(compare_abs_phi(&x, &y), dx.cmp(&dy));
            }
        }

        #[test]
        fn isqrt_bounds_random(n in any::<u128>()) {
            let n = BigUint::from(n);
            let (s, sq) = integer_sqrt(&n);
            prop_assert!(&s * &s <= n);
            let up = &s + 1u32;
            prop_assert!(&up * &up > n);
            prop_assert_eq!(sq, &s * &s == n);
        }
    }
}
