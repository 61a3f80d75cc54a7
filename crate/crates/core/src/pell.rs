//! The Pell equation `x^2 - d y^2 = 1`.
//!
//! Solutions `(x_n, y_n)` are the powers `(x_1 + y_1 sqrt d)^n` of the
//! fundamental solution. Their residues modulo any `a` repeat, and the period
//! of `x_n mod a` is written `m_d(a)`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::cf::{convergents, expand_sqrt};
use crate::primes::odd_primes_up_to;
use crate::surd::require_nonsquare;
use crate::{Error, Result};

/// Indices above this use doubling instead of repeated composition.
const LINEAR_LIMIT: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PellSolution {
    pub index: u64,
    #[serde(with = "crate::serde_decimal")]
    pub x: BigUint,
    #[serde(with = "crate::serde_decimal")]
    pub y: BigUint,
    #[serde(with = "crate::serde_decimal")]
    pub d: BigUint,
}

impl PellSolution {
    fn new(index: u64, x: BigUint, y: BigUint, d: BigUint) -> Self {
        debug_assert!(&x * &x == &d * &y * &y + 1u32, "not a Pell solution");
        PellSolution { index, x, y, d }
    }

    /// `x^2 - d y^2 == 1`.
    pub fn is_valid(&self) -> bool {
        &self.x * &self.x == &self.d * &self.y * &self.y + 1u32
    }

    /// Product in `Z[sqrt d]`; indices add.
    pub fn compose(&self, other: &PellSolution) -> PellSolution {
        let x = &self.x * &other.x + &self.d * &self.y * &other.y;
        let y = &self.x * &other.y + &self.y * &other.x;
        PellSolution::new(self.index + other.index, x, y, self.d.clone())
    }

    /// `(x_{2j}, y_{2j}) = (2 x_j^2 - 1, 2 x_j y_j)`.
    pub fn double(&self) -> PellSolution {
        let x = ((&self.x * &self.x) << 1u32) - 1u32;
        let y = (&self.x * &self.y) << 1u32;
        PellSolution::new(self.index * 2, x, y, self.d.clone())
    }

    /// Raises a fundamental solution to the `n`-th power.
    pub fn power(&self, n: u64) -> Result<PellSolution> {
        if n == 0 {
            return Err(Error::ZeroArgument);
        }
        if n <= LINEAR_LIMIT {
            let mut acc = self.clone();
            for _ in 1..n {
                acc = acc.compose(self);
            }
            return Ok(acc);
        }
        let mut acc = self.clone();
        for bit in (0..63 - n.leading_zeros()).rev() {
            acc = acc.double();
            if (n >> bit) & 1 == 1 {
                acc = acc.compose(self);
            }
        }
        Ok(acc)
    }

    /// Iterates `(x_1, y_1), (x_2, y_2), ...` by repeated composition.
    pub fn successors(&self) -> impl Iterator<Item = PellSolution> + '_ {
        std::iter::successors(Some(self.clone()), move |s| Some(s.compose(self)))
    }
}

/// The smallest positive solution, read off the convergents of `sqrt(d)`.
pub fn fundamental_solution(d: &BigUint) -> Result<PellSolution> {
    let cf = expand_sqrt(d)?;
    let k = cf.period_len();
    let idx = if k % 2 == 0 { k - 1 } else { 2 * k - 1 };
    let c = convergents(&cf, idx + 1).pop().expect("nonempty");
    let x = c.p.to_biguint().expect("positive");
    let y = c.q.to_biguint().expect("positive");
    Ok(PellSolution::new(1, x, y, d.clone()))
}

/// `(x_n, y_n)` for `n >= 1`.
pub fn nth_solution(d: &BigUint, n: u64) -> Result<PellSolution> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    fundamental_solution(d)?.power(n)
}

/// Whether `x^2 - d y^2 = -1` has integer solutions: exactly when the period
/// of `sqrt(d)` is odd.
pub fn negative_pell_solvable(d: &BigUint) -> Result<bool> {
    Ok(expand_sqrt(d)?.period_len() % 2 == 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PellPeriodReport {
    #[serde(with = "crate::serde_decimal")]
    pub d: BigUint,
    pub modulus: u64,
    /// Least `s >= 1` with `(x_s, y_s) = (1, 0) mod a`.
    pub pair_period: u64,
    /// `m_d(a)`: least period of `x_n mod a`.
    pub x_period: u64,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Residue periods of the solution sequence modulo `a`.
pub fn pell_period_mod(d: &BigUint, a: u64) -> Result<PellPeriodReport> {
    if a < 2 {
        return Err(Error::InvalidArgument(format!(
            "modulus must be at least 2, got {a}"
        )));
    }
    let fund = fundamental_solution(d)?;
    let reduce = |v: &BigUint| (v % a).to_u64().expect("residue fits");
    let (x1, y1, dm) = (reduce(&fund.x), reduce(&fund.y), reduce(d));

    // x_0 = 1, y_0 = 0; the orbit of (1, 0) under an invertible map is a pure cycle.
    let mut xs = vec![1 % a];
    let (mut x, mut y) = (x1, y1);
    while (x, y) != (1 % a, 0) {
        xs.push(x);
        let nx = (mul_mod(x1, x, a) + mul_mod(dm, mul_mod(y1, y, a), a)) % a;
        let ny = (mul_mod(x1, y, a) + mul_mod(y1, x, a)) % a;
        x = nx;
        y = ny;
    }
    let pair_period = xs.len() as u64;
    let n = xs.len();
    let x_period = (1..=n)
        .filter(|e| n % e == 0)
        .find(|&e| (0..n).all(|i| xs[i] == xs[(i + e) % n]))
        .expect("the full cycle is a period") as u64;
    Ok(PellPeriodReport {
        d: d.clone(),
        modulus: a,
        pair_period,
        x_period,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PellLemmaRow {
    pub prime: u64,
    pub x_period: u64,
    pub pair_period: u64,
    pub divides: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PellLemmaReport {
    #[serde(with = "crate::serde_decimal")]
    pub d: BigUint,
    pub rows: Vec<PellLemmaRow>,
}

impl PellLemmaReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.divides)
    }

    pub fn first_failure(&self) -> Option<&PellLemmaRow> {
        self.rows.iter().find(|r| !r.divides)
    }
}

/// Tabulates `m_d(p) | p^2 - 1` for every odd prime `p <= prime_bound`.
pub fn verify_pell_period_lemma(d: &BigUint, prime_bound: u64) -> Result<PellLemmaReport> {
    require_nonsquare(d)?;
    let rows = odd_primes_up_to(prime_bound)
        .into_iter()
        .map(|p| {
            let rep = pell_period_mod(d, p)?;
            let target = p as u128 * p as u128 - 1;
            Ok(PellLemmaRow {
                prime: p,
                x_period: rep.x_period,
                pair_period: rep.pair_period,
                divides: target.is_multiple_of(rep.x_period as u128),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PellLemmaReport { d: d.clone(), rows })
}

/// Direct search for `x^2 - d y^2 = -1` among the first `count` convergents.
pub fn negative_pell_by_search(d: &BigUint, count: usize) -> Result<Option<(BigUint, BigUint)>> {
    let cf = expand_sqrt(d)?;
    let d = d.clone();
    Ok(convergents(&cf, count).into_iter().find_map(|c| {
        let x = c.p.to_biguint()?;
        let y = c.q.to_biguint()?;
        (&x * &x + BigUint::one() == &d * &y * &y).then_some((x, y))
    }))
}

/// Smallest positive solution with `y < y_bound`, by brute force over `y`.
pub fn smallest_solution_brute_force(d: u64, y_bound: u64) -> Option<(u64, u64)> {
    (1..y_bound).find_map(|y| {
        let rhs = d as u128 * y as u128 * y as u128 + 1;
        let x = (rhs as f64).sqrt() as u128;
        (x.saturating_sub(2)..=x + 2)
            .find(|&c| c * c == rhs)
            .map(|x| (x as u64, y))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn pair(s: &PellSolution) -> (String, String) {
        (s.x.to_string(), s.y.to_string())
    }

    #[test]
    fn fundamental_examples() {
        assert_eq!(
            pair(&fundamental_solution(&big(2)).unwrap()),
            ("3".into(), "2".into())
        );
        assert_eq!(
            pair(&fundamental_solution(&big(3)).unwrap()),
            ("2".into(), "1".into())
        );
        assert_eq!(
            pair(&fundamental_solution(&big(61)).unwrap()),
            ("1766319049".into(), "226153980".into())
        );
        assert!(matches!(
            fundamental_solution(&big(16)),
            Err(Error::PerfectSquare(_))
        ));
    }

    #[test]
    fn fundamental_by_brute_force() {
        for d in 2..=200u64 {
            let Ok(fund) = fundamental_solution(&big(d)) else {
                continue;
            };
            assert!(fund.is_valid());
            let y1 = fund.y.to_u64().unwrap_or(u64::MAX);
            // exhaustive below y1 where feasible
            let bound = y1.min(200_000);
            assert_eq!(smallest_solution_brute_force(d, bound), None, "d = {d}");
            if y1 <= 200_000 {
                let found = smallest_solution_brute_force(d, y1 + 1).unwrap();
                assert_eq!(found, (fund.x.to_u64().unwrap(), y1));
            }
        }
    }

    #[test]
    fn nth_examples() {
        assert_eq!(
            pair(&nth_solution(&big(2), 3).unwrap()),
            ("99".into(), "70".into())
        );
        let s = nth_solution(&big(3), 8).unwrap();
        assert_eq!(pair(&s), ("18817".into(), "10864".into()));
        assert_eq!(s.x, big(2 * 97 * 97 - 1));
        assert_eq!(
            nth_solution(&big(7), 1).unwrap(),
            fundamental_solution(&big(7)).unwrap()
        );
        assert!(nth_solution(&big(7), 0).is_err());
    }

    #[test]
    fn power_matches_iteration() {
        for d in [2u64, 3, 5, 13, 61] {
            let fund = fundamental_solution(&big(d)).unwrap();
            for (i, s) in fund.successors().take(200).enumerate() {
                let n = i as u64 + 1;
                assert_eq!(s.index, n);
                let p = fund.power(n).unwrap();
                assert_eq!(p, s, "d = {d}, n = {n}");
                assert!(p.is_valid());
            }
        }
    }

    #[test]
    fn doubling_identities() {
        let fund = fundamental_solution(&big(3)).unwrap();
        let seq: Vec<_> = fund.successors().take(200).collect();
        for j in 1..=100usize {
            let xj = &seq[j - 1].x;
            let yj = &seq[j - 1].y;
            assert_eq!(seq[2 * j - 1].x, xj * xj * 2u32 - 1u32);
            assert_eq!(seq[2 * j - 1].y, xj * yj * 2u32);
        }
    }

    #[test]
    fn solutions_increase() {
        let fund = fundamental_solution(&big(13)).unwrap();
        let seq: Vec<_> = fund.successors().take(30).collect();
        assert!(seq.windows(2).all(|w| w[0].x < w[1].x && w[0].y < w[1].y));
    }

    #[test]
    fn negative_pell_examples() {
        assert!(negative_pell_solvable(&big(2)).unwrap());
        assert!(!negative_pell_solvable(&big(3)).unwrap());
        assert!(negative_pell_solvable(&big(13)).unwrap());
        assert_eq!(
            negative_pell_by_search(&big(13), 20).unwrap(),
            Some((big(18), big(5)))
        );
        assert!(negative_pell_solvable(&big(9)).is_err());
    }

    #[test]
    fn negative_pell_cross_check() {
        for d in 2..=500u64 {
            let Ok(solvable) = negative_pell_solvable(&big(d)) else {
                continue;
            };
            let k = expand_sqrt(&big(d)).unwrap().period_len();
            let found = negative_pell_by_search(&big(d), 2 * k + 2).unwrap();
            assert_eq!(solvable, found.is_some(), "d = {d}");
        }
    }

    #[test]
    fn period_mod_examples() {
        let r = pell_period_mod(&big(2), 5).unwrap();
        assert_eq!((r.pair_period, r.x_period), (6, 6));
        let r = pell_period_mod(&big(2), 7).unwrap();
        assert_eq!((r.pair_period, r.x_period), (3, 3));
        let r = pell_period_mod(&big(3), 5).unwrap();
        assert_eq!((r.pair_period, r.x_period), (3, 3));
        assert!(pell_period_mod(&big(3), 1).is_err());
    }

    #[test]
    fn period_mod_against_big_iteration() {
        for d in [2u64, 3, 6, 20, 45] {
            let fund = fundamental_solution(&big(d)).unwrap();
            let seq: Vec<_> = fund.successors().take(400).collect();
            for a in [2u64, 3, 5, 7, 9, 10, 11, 12, 13] {
                let r = pell_period_mod(&big(d), a).unwrap();
                let xs: Vec<BigUint> = seq.iter().map(|s| &s.x % a).collect();
                let ys: Vec<BigUint> = seq.iter().map(|s| &s.y % a).collect();
                let s = r.pair_period as usize;
                assert_eq!(xs[s - 1], big(1) % a);
                assert_eq!(ys[s - 1], big(0));
                for i in 0..s - 1 {
                    assert!(!(xs[i] == big(1) % a && ys[i] == big(0)));
                }
                let m = r.x_period as usize;
                assert!(s.is_multiple_of(m));
                assert!((0..300).all(|i| xs[i] == xs[i + m]));
                assert!((1..m).all(|e| (0..300).any(|i| xs[i] != xs[i + e])));
            }
        }
    }

    #[test]
    fn x_period_divides_when_p_divides_d() {
        let r = pell_period_mod(&big(20), 5).unwrap();
        // x_n = 4^n mod 5 alternates, while the pair cycle has length 10
        assert_eq!((r.pair_period, r.x_period), (10, 2));
        assert_eq!(24 % r.x_period, 0);
    }

    #[test]
    fn period_lemma_tables() {
        let rep = verify_pell_period_lemma(&big(2), 100).unwrap();
        assert!(rep.all_pass());
        assert_eq!(rep.rows.len(), 24);
        let rep = verify_pell_period_lemma(&big(3), 5).unwrap();
        assert_eq!(rep.rows.last().unwrap().x_period, 3);
        for d in 2..=50u64 {
            if let Ok(rep) = verify_pell_period_lemma(&big(d), 200) {
                assert!(rep.all_pass(), "d = {d}: {:?}", rep.first_failure());
            }
        }
    }
}
