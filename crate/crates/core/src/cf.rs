//! Continued-fraction expansion of quadratic surds.
//!
//! Expansions run the PQa recurrence on canonical states `(P + sqrt D) / Q`:
//!
//! ```text
//! a_i     = floor((P_i + sqrt D) / Q_i)
//! P_{i+1} = a_i Q_i - P_i
//! Q_{i+1} = (D - P_{i+1}^2) / Q_i
//! ```
//!
//! The period is found as the first state `(P, Q)` seen twice, which makes it
//! minimal by construction.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::surd::{integer_sqrt, require_nonsquare, Rational, SurdState};
use crate::{Error, Result};

/// `[a0; preperiod, (period)]`. The period is aligned to start no earlier
/// than index 1, so `period.len()` is the period length `D(alpha)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    a0: BigInt,
    preperiod: Vec<BigUint>,
    period: Vec<BigUint>,
}

impl CfExpansion {
    pub fn new(a0: BigInt, preperiod: Vec<BigUint>, period: Vec<BigUint>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidArgument("period must be nonempty".into()));
        }
        if preperiod.iter().chain(&period).any(Zero::is_zero) {
            return Err(Error::InvalidArgument(
                "partial quotients after a0 must be positive".into(),
            ));
        }
        Ok(CfExpansion {
            a0,
            preperiod,
            period,
        })
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn preperiod(&self) -> &[BigUint] {
        &self.preperiod
    }

    pub fn period(&self) -> &[BigUint] {
        &self.period
    }

    /// `D(alpha)`.
    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// Partial quotient `a_i`, repeating the period as needed.
    pub fn term(&self, i: usize) -> BigInt {
        if i == 0 {
            return self.a0.clone();
        }
        let i = i - 1;
        if i < self.preperiod.len() {
            return self.preperiod[i].clone().into();
        }
        let j = (i - self.preperiod.len()) % self.period.len();
        self.period[j].clone().into()
    }

    /// True when no shorter word repeats to give the period.
    pub fn has_minimal_period(&self) -> bool {
        let n = self.period.len();
        (1..n)
            .filter(|e| n.is_multiple_of(*e))
            .all(|e| (0..n).any(|i| self.period[i] != self.period[(i + e) % n]))
    }
}

impl fmt::Display for CfExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};", self.a0)?;
        for a in &self.preperiod {
            write!(f, " {a},")?;
        }
        write!(f, " (")?;
        for (i, a) in self.period.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")]")
    }
}

impl Serialize for CfExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let words = |v: &[BigUint]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        let mut st = s.serialize_struct("CfExpansion", 4)?;
        st.serialize_field("a0", &self.a0.to_string())?;
        st.serialize_field("preperiod", &words(&self.preperiod))?;
        st.serialize_field("period", &words(&self.period))?;
        st.serialize_field("period_len", &self.period.len())?;
        st.end()
    }
}

/// One PQa step from `(p, q)`; returns `(a, p', q')`.
fn pqa_step(p: &BigInt, q: &BigInt, d: &BigInt, root: &BigInt) -> (BigInt, BigInt, BigInt) {
    let a = if q.is_positive() {
        (p + root).div_floor(q)
    } else {
        (p + root + 1u32).div_floor(q)
    };
    let p_next = &a * q - p;
    let (q_next, rem) = (d - &p_next * &p_next).div_rem(q);
    debug_assert!(rem.is_zero(), "Q must divide D - P^2");
    (a, p_next, q_next)
}

/// Expands a canonical surd, memoizing states to split off the period.
pub fn expand_surd(s: &SurdState, max_steps: usize) -> Result<CfExpansion> {
    let (p, q, d) = s.clone().into_parts();
    let root = BigInt::from(integer_sqrt(&d).0);
    let d = BigInt::from(d);
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut terms: Vec<BigInt> = Vec::new();
    let (mut p, mut q) = (p, q);
    let cycle_start = loop {
        if let Some(&j) = seen.get(&(p.clone(), q.clone())) {
            break j;
        }
        if terms.len() >= max_steps {
            return Err(Error::StepLimit(max_steps));
        }
        seen.insert((p.clone(), q.clone()), terms.len());
        let (a, p_next, q_next) = pqa_step(&p, &q, &d, &root);
        terms.push(a);
        p = p_next;
        q = q_next;
    };
    let len = terms.len() - cycle_start;
    let at = |i: usize| -> BigInt {
        if i < terms.len() {
            terms[i].clone()
        } else {
            terms[cycle_start + (i - cycle_start) % len].clone()
        }
    };
    let first = cycle_start.max(1);
    let to_nat = |a: BigInt| {
        a.to_biguint()
            .expect("partial quotients after a0 are positive")
    };
    let preperiod = (1..first).map(|i| to_nat(at(i))).collect();
    let period = (first..first + len).map(|i| to_nat(at(i))).collect();
    CfExpansion::new(terms[0].clone(), preperiod, period)
}

/// Expansion of `sqrt(n)`.
pub fn expand_sqrt(n: &BigUint) -> Result<CfExpansion> {
    require_nonsquare(n)?;
    let cf = expand_surd(&SurdState::sqrt(n)?, usize::MAX)?;
    debug_assert!(cf.preperiod.is_empty());
    Ok(cf)
}

/// Radicands below this bound use the fixed-width fast path.
const SMALL_RADICAND: u128 = 1 << 120;

/// Period length of `sqrt(n)` with machine integers, or `None` if `n` is a
/// perfect square. The expansion is purely periodic from index 1, so the
/// period ends at the first return to the state after `a0`.
pub fn sqrt_period_small(n: u128) -> Option<usize> {
    assert!(
        n < SMALL_RADICAND,
        "radicand {n} too large for the fast path"
    );
    let (root, square) = integer_sqrt(&BigUint::from(n));
    if square {
        return None;
    }
    let root = root.to_u128().expect("root fits") as i128;
    let n = n as i128;
    // state after a0: P_1 = a0, Q_1 = n - a0^2; Q_0 = 1
    let (p1, q1) = (root, n - root * root);
    let (mut p, mut q, mut q_prev) = (p1, q1, 1i128);
    let mut len = 0usize;
    loop {
        let a = (p + root) / q;
        let p_next = a * q - p;
        let q_next = q_prev + a * (p - p_next);
        len += 1;
        if p_next == p1 && q_next == q1 {
            return Some(len);
        }
        q_prev = q;
        p = p_next;
        q = q_next;
    }
}

/// `D(n sqrt d)`, the period length of `sqrt(n^2 d)`.
pub fn period_of_multiple(n: &BigUint, d: &BigUint) -> Result<usize> {
    if n.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let radicand = n * n * d;
    match radicand.to_u128() {
        Some(r) if r < SMALL_RADICAND => sqrt_period_small(r).ok_or(Error::PerfectSquare(radicand)),
        _ => Ok(expand_sqrt(&radicand)?.period_len()),
    }
}

/// Convergent `p_index / q_index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentPair {
    pub index: usize,
    pub p: BigInt,
    pub q: BigInt,
}

/// The first `count` convergents, from the seeds `p_{-1} = 1, q_{-1} = 0`.
pub fn convergents(cf: &CfExpansion, count: usize) -> Vec<ConvergentPair> {
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (cf.a0.clone(), BigInt::one());
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        if index > 0 {
            let a = cf.term(index);
            let p_next = &a * &p + &p_prev;
            let q_next = &a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
        }
        out.push(ConvergentPair {
            index,
            p: p.clone(),
            q: q.clone(),
        });
    }
    out
}

/// Folds `[a_0, ..., a_k]` back to front into a rational.
pub fn fold_terms(terms: &[BigInt]) -> Rational {
    let mut iter = terms.iter().rev();
    let last = iter.next().expect("at least one term");
    let mut acc = Rational::from_integer(last.clone());
    for a in iter {
        acc = Rational::from_integer(a.clone()) + acc.recip();
    }
    acc
}

/// `period = (w, 2 a0)` with `w` a palindrome.
pub fn is_galois_palindrome(cf: &CfExpansion) -> Result<bool> {
    if !cf.preperiod.is_empty() {
        return Err(Error::NotPureSquareRoot);
    }
    let (last, w) = cf.period.split_last().expect("period is nonempty");
    let doubled = BigInt::from(last.clone()) == &cf.a0 * 2;
    Ok(doubled && w.iter().eq(w.iter().rev()))
}

/// Both sides of one checked identity or divisibility.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PropertyCheck {
    pub holds: bool,
    #[serde(serialize_with = "display_str")]
    pub lhs: BigInt,
    #[serde(serialize_with = "display_str")]
    pub rhs: BigInt,
}

fn display_str<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl PropertyCheck {
    fn equal(lhs: BigInt, rhs: BigInt) -> Self {
        PropertyCheck {
            holds: lhs == rhs,
            lhs,
            rhs,
        }
    }

    fn divides(divisor: BigInt, dividend: BigInt) -> Self {
        let holds = !divisor.is_zero() && (&dividend % &divisor).is_zero();
        PropertyCheck {
            holds,
            lhs: divisor,
            rhs: dividend,
        }
    }
}

/// Outcome of the palindrome-middle identities for `sqrt(d)` with even
/// period `k = 2l`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct IdentityReport {
    #[serde(with = "crate::serde_decimal")]
    pub d: BigUint,
    pub k: usize,
    pub l: usize,
    /// `q_{k-1} = q_{l-1}(q_l + q_{l-2})`
    pub property_1: PropertyCheck,
    /// `q_{k-1} = q_{l-1}(a_l q_{l-1} + 2 q_{l-2})`
    pub property_1b: PropertyCheck,
    /// `p_{k-1} = a0 q_{k-1} + q_{k-2}`
    pub property_2: PropertyCheck,
    /// `q_{l-1} | q_{k-2} + (-1)^{l-1}`
    pub property_3: PropertyCheck,
    /// `a_l q_{l-1} + 2 q_{l-2} | q_{k-2} + (-1)^l`
    pub property_4: PropertyCheck,
    /// `M_l M_{l-1}^T = M_{k-1} [[a0, 1], [1, 0]]` with `M_j = [[p_j, p_{j-1}], [q_j, q_{j-1}]]`
    pub matrix: bool,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.property_1.holds
            && self.property_1b.holds
            && self.property_2.holds
            && self.property_3.holds
            && self.property_4.holds
            && self.matrix
    }
}

/// Evaluates the middle-of-palindrome identities exactly. Indices below zero
/// use `p_{-1} = 1, q_{-1} = 0`.
pub fn verify_middle_identities(d: &BigUint) -> Result<IdentityReport> {
    let cf = expand_sqrt(d)?;
    let k = cf.period_len();
    if k % 2 == 1 {
        return Err(Error::LemmaPrecondition(format!(
            "period of sqrt({d}) is {k}, which is odd"
        )));
    }
    let l = k / 2;
    let conv = convergents(&cf, k);
    let p_at = |i: isize| -> BigInt {
        if i < 0 {
            BigInt::one()
        } else {
            conv[i as usize].p.clone()
        }
    };
    let q_at = |i: isize| -> BigInt {
        if i < 0 {
            BigInt::zero()
        } else {
            conv[i as usize].q.clone()
        }
    };
    let (k, l) = (k as isize, l as isize);
    let a_l = cf.term(l as usize);
    let a0 = cf.a0.clone();
    let sign = |e: isize| {
        if e % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        }
    };
    let middle = &a_l * q_at(l - 1) + q_at(l - 2) * 2;

    let property_1 = PropertyCheck::equal(q_at(k - 1), q_at(l - 1) * (q_at(l) + q_at(l - 2)));
    let property_1b = PropertyCheck::equal(q_at(k - 1), q_at(l - 1) * &middle);
    let property_2 = PropertyCheck::equal(p_at(k - 1), &a0 * q_at(k - 1) + q_at(k - 2));
    let property_3 = PropertyCheck::divides(q_at(l - 1), q_at(k - 2) + sign(l - 1));
    let property_4 = PropertyCheck::divides(middle, q_at(k - 2) + sign(l));

    let m = |j: isize| [[p_at(j), p_at(j - 1)], [q_at(j), q_at(j - 1)]];
    let lhs = mat_mul(&m(l), &transpose(&m(l - 1)));
    let a0_mat = [[a0.clone(), BigInt::one()], [BigInt::one(), BigInt::zero()]];
    let rhs = mat_mul(&m(k - 1), &a0_mat);
    let matrix = lhs == rhs;

    Ok(IdentityReport {
        d: d.clone(),
        k: k as usize,
        l: l as usize,
        property_1,
        property_1b,
        property_2,
        property_3,
        property_4,
        matrix,
    })
}

type Mat = [[BigInt; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let cell = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]]
}

fn transpose(a: &Mat) -> Mat {
    [
        [a[0][0].clone(), a[1][0].clone()],
        [a[0][1].clone(), a[1][1].clone()],
    ]
}
