//! Constructions that force `D(n sqrt d)` into a predicted window.
//!
//! The pipeline starting at [`theorem_pipeline`] picks an odd prime `p`
//! dividing `x_{8r} + 1`, a prime `q = b (mod p)` where `b / p` is the best
//! approximation of phi with denominator `p`, and an index `m` with
//! `m = 8r (mod 16r)` and `(q^2 - 1) | m`. Then `2pq | y_m`, and
//! `n = y_m / (2pq)` has `D(n sqrt d)` in `{2L(p, q), 2L(p, q) + 2}`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cf::{expand_sqrt, period_of_multiple, CfExpansion};
use crate::euclid::{best_phi_numerator, euclid_len};
use crate::pell::{fundamental_solution, PellSolution};
use crate::primes::{is_prime, trial_factor, PRIMALITY_LIMIT};
use crate::surd::{phi_interval_exponent, require_nonsquare, PhiPower};
use crate::{Error, Result};

/// The multiplier `n = y_1` with `n sqrt d = [x_1 - 1; (1, 2(x_1 - 1))]`,
/// together with that predicted expansion.
pub fn period_two_multiplier(d: &BigUint) -> Result<(BigUint, CfExpansion)> {
    let fund = fundamental_solution(d)?;
    let a = &fund.x - 1u32;
    let expected = CfExpansion::new(a.clone().into(), vec![], vec![BigUint::one(), a * 2u32])?;
    Ok((fund.y, expected))
}

/// Which of `x_m + 1`, `x_m - 1` each prime divides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignSplit {
    /// `p | x_m + 1` and `q | x_m - 1`
    PPlusQMinus,
    /// `p | x_m - 1` and `q | x_m + 1`
    PMinusQPlus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma6Witness {
    #[serde(with = "crate::serde_decimal")]
    pub d: BigUint,
    pub p: u64,
    pub q: u64,
    /// Solution index.
    pub m: u64,
    #[serde(with = "crate::serde_decimal")]
    pub n: BigUint,
    /// `L(p, q)`
    pub euclid_len: u32,
    pub measured_period: usize,
    pub sign_split: SignSplit,
}

impl Lemma6Witness {
    pub fn predicted(&self) -> [usize; 2] {
        let l = self.euclid_len as usize;
        [2 * l, 2 * l + 2]
    }

    pub fn in_window(&self) -> bool {
        self.predicted().contains(&self.measured_period)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn split_for(x_mod: u64, p: u64, q: u64) -> Option<SignSplit> {
    let (xp, xq) = (x_mod % p, x_mod % q);
    if xp == p - 1 && xq == 1 {
        Some(SignSplit::PPlusQMinus)
    } else if xp == 1 && xq == q - 1 {
        Some(SignSplit::PMinusQPlus)
    } else {
        None
    }
}

/// Solution indices `m <= index_bound` with `2pq | y_m` and `p`, `q`
/// dividing `x_m + 1`, `x_m - 1` in opposite order, with `D(n sqrt d)`
/// measured for `n = y_m / (2pq)`.
///
/// The scan runs on residues modulo `2pq`; only hits are expanded to full
/// solutions. A hit is kept only when `(x_m, 2pq)` is the fundamental
/// solution for the radicand `n^2 d`, which the period bound relies on;
/// small indices often fail this and are skipped. A kept hit whose period
/// misses `{2L, 2L + 2}` is a falsification.
pub fn find_lemma6_witnesses(
    d: &BigUint,
    p: u64,
    q: u64,
    index_bound: u64,
) -> Result<Vec<Lemma6Witness>> {
    for (name, v) in [("p", p), ("q", q)] {
        if v < 3 || v % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "{name} must be odd and at least 3, got {v}"
            )));
        }
    }
    if p.gcd(&q) != 1 {
        return Err(Error::InvalidArgument(format!("gcd({p}, {q}) must be 1")));
    }
    let modulus = (2 * p as u128 * q as u128)
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument("2pq must fit in 64 bits".into()))?;
    let period = expand_sqrt(d)?.period_len();
    if period % 2 == 1 {
        return Err(Error::LemmaPrecondition(format!(
            "period of sqrt({d}) is {period}, which is odd"
        )));
    }
    let fund = fundamental_solution(d)?;
    let reduce = |v: &BigUint| (v % modulus).to_u64().expect("residue fits");
    let (x1, y1, dm) = (reduce(&fund.x), reduce(&fund.y), reduce(d));
    let l = euclid_len(p, q);

    let mut out = Vec::new();
    let (mut x, mut y) = (x1, y1);
    for m in 1..=index_bound {
        let split = if y == 0 { split_for(x, p, q) } else { None };
        if let Some(sign_split) = split {
            let sol = fund.power(m)?;
            let n = &sol.y / modulus;
            if fundamental_solution(&(&n * &n * d))?.x == sol.x {
                let witness = Lemma6Witness {
                    d: d.clone(),
                    p,
                    q,
                    m,
                    measured_period: period_of_multiple(&n, d)?,
                    n,
                    euclid_len: l,
                    sign_split,
                };
                if !witness.in_window() {
                    return Err(Error::Falsified(format!(
                        "D(n sqrt {d}) = {} at m = {m} is outside {:?}",
                        witness.measured_period,
                        witness.predicted()
                    )));
                }
                out.push(witness);
            }
        }
        let nx =
            (mul_mod(x1, x, modulus) + mul_mod(dm, mul_mod(y1, y, modulus), modulus)) % modulus;
        let ny = (mul_mod(x1, y, modulus) + mul_mod(y1, x, modulus)) % modulus;
        x = nx;
        y = ny;
    }
    Ok(out)
}

/// Integer values of `D` inside the open interval
/// `(log_phi p - 3, 2 log_phi p + 4)`, decided with exact powers of phi.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogWindow {
    pub p: u64,
    /// Smallest integer inside: least `z` with `phi^(z+3) > p`.
    pub min_int: i64,
    /// Largest integer inside: greatest `z` with `phi^(z-4) < p^2`.
    pub max_int: i64,
    /// Display-only approximations of the endpoints.
    pub lo_approx: f64,
    pub hi_approx: f64,
}

impl LogWindow {
    pub fn contains(&self, value: i64) -> bool {
        self.min_int <= value && value <= self.max_int
    }
}

/// The window `(log_phi p - 3, 2 log_phi p + 4)` for `p >= 2`.
pub fn window_from_prime(p: u64) -> Result<LogWindow> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!(
            "p must be at least 2, got {p}"
        )));
    }
    let big_p = BigUint::from(p);
    let mut power = PhiPower::one();
    while power.cmp_integer(&big_p) != Ordering::Greater {
        power.advance();
    }
    let min_int = power.exponent() as i64 - 3;

    let p2 = &big_p * &big_p;
    let mut power = PhiPower::one();
    // phi^0 = 1 < p^2; walk up to the last power below p^2
    loop {
        let mut next = power.clone();
        next.advance();
        if next.cmp_integer(&p2) == Ordering::Less {
            power = next;
        } else {
            break;
        }
    }
    let max_int = power.exponent() as i64 + 4;

    let log_phi = (p as f64).ln() / ((1.0 + 5f64.sqrt()) / 2.0).ln();
    Ok(LogWindow {
        p,
        min_int,
        max_int,
        lo_approx: log_phi - 3.0,
        hi_approx: 2.0 * log_phi + 4.0,
    })
}

/// Search bounds for [`theorem_pipeline`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineLimits {
    /// Trial-division bound when factoring `x_{4r}`.
    pub trial_division: u64,
    /// Largest prime `q` tried.
    pub q_search: u64,
    /// Largest solution index `m` materialized.
    pub max_index: u64,
}

impl Default for PipelineLimits {
    fn default() -> Self {
        PipelineLimits {
            trial_division: 1_000_000,
            q_search: 100_000_000,
            max_index: 500_000,
        }
    }
}

/// Every boolean a certificate asserts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateChecks {
    pub working_period_is_two: bool,
    pub p_divides_x8r_plus_1: bool,
    pub p_coprime_to_working_d: bool,
    pub p_in_phi_interval: bool,
    pub b_within_one_over_p: bool,
    pub fib_bound_l_b_p: bool,
    pub q_prime: bool,
    pub q_congruent_b_mod_p: bool,
    pub gcd_2r_q_condition: bool,
    pub m_congruent_8r_mod_16r: bool,
    pub q2_minus_1_divides_m: bool,
    pub x_m_pell: bool,
    pub two_pq_divides_y_m: bool,
    pub p_divides_x_m_plus_1: bool,
    pub q_divides_x_m_minus_1: bool,
    pub measured_in_predicted: bool,
    pub measured_in_log_window: bool,
}

impl CertificateChecks {
    pub fn all(&self) -> bool {
        let CertificateChecks {
            working_period_is_two,
            p_divides_x8r_plus_1,
            p_coprime_to_working_d,
            p_in_phi_interval,
            b_within_one_over_p,
            fib_bound_l_b_p,
            q_prime,
            q_congruent_b_mod_p,
            gcd_2r_q_condition,
            m_congruent_8r_mod_16r,
            q2_minus_1_divides_m,
            x_m_pell,
            two_pq_divides_y_m,
            p_divides_x_m_plus_1,
            q_divides_x_m_minus_1,
            measured_in_predicted,
            measured_in_log_window,
        } = self;
        [
            working_period_is_two,
            p_divides_x8r_plus_1,
            p_coprime_to_working_d,
            p_in_phi_interval,
            b_within_one_over_p,
            fib_bound_l_b_p,
            q_prime,
            q_congruent_b_mod_p,
            gcd_2r_q_condition,
            m_congruent_8r_mod_16r,
            q2_minus_1_divides_m,
            x_m_pell,
            two_pq_divides_y_m,
            p_divides_x_m_plus_1,
            q_divides_x_m_minus_1,
            measured_in_predicted,
            measured_in_log_window,
        ]
        .iter()
        .all(|b| **b)
    }
}

/// One fully recorded run of the construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionCertificate {
    #[serde(with = "crate::serde_decimal")]
    pub d: BigUint,
    /// `c` with `D(c sqrt d) = 2`; 1 when `D(sqrt d)` is already 2.
    #[serde(with = "crate::serde_decimal")]
    pub reduction_multiplier: BigUint,
    /// `d' = c^2 d`
    #[serde(with = "crate::serde_decimal")]
    pub working_d: BigUint,
    pub r: u64,
    #[serde(with = "crate::serde_decimal")]
    pub x_4r: BigUint,
    pub p: u64,
    pub t: u64,
    pub b: u64,
    pub q: u64,
    pub m: u64,
    #[serde(with = "crate::serde_decimal")]
    pub x_m: BigUint,
    #[serde(with = "crate::serde_decimal")]
    pub y_m: BigUint,
    /// `n = y_m / (2pq)`, the multiplier of `sqrt(d')`.
    #[serde(with = "crate::serde_decimal")]
    pub n: BigUint,
    /// `n c`, the same radicand written as a multiplier of `sqrt(d)`.
    #[serde(with = "crate::serde_decimal")]
    pub n_for_d: BigUint,
    /// `L(p, q)`
    pub euclid_len: u32,
    /// `L(b, p)`
    pub euclid_len_b_p: u32,
    pub predicted_window: [usize; 2],
    pub log_window: LogWindow,
    pub measured_period: usize,
    pub checks: CertificateChecks,
}

impl ConstructionCertificate {
    pub fn verified(&self) -> bool {
        self.checks.all()
    }
}

fn crt(a1: u128, n1: u128, a2: u128, n2: u128) -> Option<(u128, u128)> {
    // m = a1 + n1 * s, n1 * s = a2 - a1 (mod n2)
    let g = n1.gcd(&n2);
    let diff = (a2 as i128 - a1 as i128).rem_euclid(n2 as i128) as u128;
    if !diff.is_multiple_of(g) {
        return None;
    }
    let lcm = n1 / g * n2;
    let n2g = n2 / g;
    let inv = mod_inverse((n1 / g) % n2g, n2g)?;
    let s = (diff / g % n2g) * inv % n2g;
    let m = (a1 + n1 * s) % lcm;
    Some((m, lcm))
}

fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u128)
}

/// Runs the full construction for `d` and odd `r`.
pub fn theorem_pipeline(
    d: &BigUint,
    r: u64,
    limits: &PipelineLimits,
) -> Result<ConstructionCertificate> {
    if r == 0 || r.is_multiple_of(2) {
        return Err(Error::RNotOdd(r));
    }
    require_nonsquare(d)?;

    // Reduce to a radicand whose square root has period two.
    let base_period = expand_sqrt(d)?.period_len();
    let reduction_multiplier = if base_period == 2 {
        BigUint::one()
    } else {
        period_two_multiplier(d)?.0
    };
    let working_d = &reduction_multiplier * &reduction_multiplier * d;
    let working_period_is_two = expand_sqrt(&working_d)?.period_len() == 2;
    let fund = fundamental_solution(&working_d)?;

    // Odd primes dividing x_{8r} + 1 = 2 x_{4r}^2 are the odd primes of x_{4r}.
    let x_4r = fund.power(4 * r)?.x;
    let p =
        smallest_usable_prime(&x_4r, &working_d, limits.trial_division).ok_or(Error::NoPrimeP {
            index: 4 * r,
            limit: limits.trial_division,
        })?;
    let x_8r = fund.power(8 * r)?.x;
    let p_divides_x8r_plus_1 = ((&x_8r + 1u32) % p).is_zero();
    let p_coprime_to_working_d = !(&working_d % p).is_zero();

    let big_p = BigUint::from(p);
    let t = phi_interval_exponent(&big_p)?;
    let p_in_phi_interval = PhiPower::new(2 * t).cmp_integer(&big_p) == Ordering::Less
        && PhiPower::new(2 * t + 2).cmp_integer(&big_p) == Ordering::Greater;
    let b = best_phi_numerator(p)?;
    let b_within_one_over_p = phi_between(b - 1, b + 1, p);
    let euclid_len_b_p = euclid_len(b, p);
    let fib_bound_l_b_p = euclid_len_b_p as i64 >= t as i64 - 1;

    let q = find_q(b, p, r, &working_d, limits.q_search)?;
    let q2m1 = q as u128 * q as u128 - 1;
    let r16 = 16 * r as u128;
    let (m, _) = crt(8 * r as u128 % r16, r16, 0, q2m1)
        .ok_or_else(|| Error::Falsified(format!("no m with m = 8r (mod 16r) and {q2m1} | m")))?;
    let m = if m == 0 { r16.lcm(&q2m1) } else { m };
    if m > limits.max_index as u128 {
        return Err(Error::IndexLimit {
            index: m,
            limit: limits.max_index,
        });
    }
    let m = m as u64;
    let sol = fund.power(m)?;

    let two_pq = 2 * p as u128 * q as u128;
    let two_pq_big = BigUint::from(two_pq);
    let two_pq_divides_y_m = (&sol.y % &two_pq_big).is_zero();
    let p_divides_x_m_plus_1 = ((&sol.x + 1u32) % p).is_zero();
    let q_divides_x_m_minus_1 = ((&sol.x - 1u32) % q).is_zero();
    if !(two_pq_divides_y_m && p_divides_x_m_plus_1 && q_divides_x_m_minus_1) {
        return Err(Error::Falsified(format!(
            "divisibility conditions fail at m = {m}: 2pq | y_m {two_pq_divides_y_m}, \
             p | x_m + 1 {p_divides_x_m_plus_1}, q | x_m - 1 {q_divides_x_m_minus_1}"
        )));
    }
    let n = &sol.y / &two_pq_big;
    let measured_period = period_of_multiple(&n, &working_d)?;
    let l = euclid_len(p, q);
    let predicted_window = [2 * l as usize, 2 * l as usize + 2];
    let log_window = window_from_prime(p)?;

    let checks = CertificateChecks {
        working_period_is_two,
        p_divides_x8r_plus_1,
        p_coprime_to_working_d,
        p_in_phi_interval,
        b_within_one_over_p,
        fib_bound_l_b_p,
        q_prime: is_prime(q)?,
        q_congruent_b_mod_p: q % p == b % p,
        gcd_2r_q_condition: (2 * r as u128).gcd(&(q2m1 / 8)) == 1,
        m_congruent_8r_mod_16r: m as u128 % r16 == 8 * r as u128 % r16,
        q2_minus_1_divides_m: (m as u128).is_multiple_of(q2m1),
        x_m_pell: sol.is_valid(),
        two_pq_divides_y_m,
        p_divides_x_m_plus_1,
        q_divides_x_m_minus_1,
        measured_in_predicted: predicted_window.contains(&measured_period),
        measured_in_log_window: log_window.contains(measured_period as i64),
    };

    Ok(ConstructionCertificate {
        d: d.clone(),
        n_for_d: &n * &reduction_multiplier,
        reduction_multiplier,
        working_d,
        r,
        x_4r,
        p,
        t,
        b,
        q,
        m,
        x_m: sol.x,
        y_m: sol.y,
        n,
        euclid_len: l,
        euclid_len_b_p,
        predicted_window,
        log_window,
        measured_period,
        checks,
    })
}

/// `lo / p < phi < hi / p`.
fn phi_between(lo: u64, hi: u64, p: u64) -> bool {
    use crate::surd::{cmp_phi, Rational};
    let r = |v: u64| Rational::new(v.into(), p.into());
    cmp_phi(&r(lo)) == Ordering::Less && cmp_phi(&r(hi)) == Ordering::Greater
}

/// Smallest odd prime factor of `x` not dividing `d`, by trial division.
/// A cofactor left below `limit^2` is itself prime and is accepted.
fn smallest_usable_prime(x: &BigUint, d: &BigUint, limit: u64) -> Option<u64> {
    let (found, rest) = trial_factor(x, limit);
    let usable = |p: u64| p % 2 == 1 && !(d % p).is_zero();
    if let Some(&p) = found.iter().find(|&&p| usable(p)) {
        return Some(p);
    }
    let rest = rest.to_u64()?;
    let bound = (limit as u128 + 1).pow(2);
    (rest > 1 && (rest as u128) < bound && rest < PRIMALITY_LIMIT && usable(rest)).then_some(rest)
}

/// Smallest prime `q = b (mod p)` with `q != p`, `q` coprime to `d` and
/// `gcd(2r, (q^2 - 1) / 8) = 1`.
fn find_q(b: u64, p: u64, r: u64, d: &BigUint, limit: u64) -> Result<u64> {
    let mut q = b % p;
    while q < 3 {
        q += p;
    }
    while q <= limit {
        if q % 2 == 1 && q != p && is_prime(q)? && !(d % q).is_zero() {
            let eighth = (q as u128 * q as u128 - 1) / 8;
            if (2 * r as u128).gcd(&eighth) == 1 {
                return Ok(q);
            }
        }
        q += p;
    }
    Err(Error::NoPrimeQ {
        residue: b % p,
        modulus: p,
        limit,
    })
}

/// Recomputes every check of a certificate from its recorded values alone.
pub fn verify_certificate(cert: &ConstructionCertificate) -> Result<CertificateChecks> {
    let (p, q, r, m, t, b) = (cert.p, cert.q, cert.r, cert.m, cert.t, cert.b);
    let c = &cert.reduction_multiplier;
    if (c * c * &cert.d) != cert.working_d {
        return Err(Error::Falsified("working_d != c^2 d".into()));
    }
    let fund = fundamental_solution(&cert.working_d)?;
    let x_4r = fund.power(4 * r)?.x;
    if x_4r != cert.x_4r {
        return Err(Error::Falsified("recorded x_4r does not match".into()));
    }
    let x_8r = fund.power(8 * r)?.x;
    let sol = PellSolution {
        index: m,
        x: cert.x_m.clone(),
        y: cert.y_m.clone(),
        d: cert.working_d.clone(),
    };
    let two_pq = BigUint::from(2 * p as u128 * q as u128);
    if &sol.y / &two_pq != cert.n || &cert.n * c != cert.n_for_d {
        return Err(Error::Falsified(
            "recorded n does not match y_m / 2pq".into(),
        ));
    }
    let big_p = BigUint::from(p);
    let q2m1 = q as u128 * q as u128 - 1;
    let r16 = 16 * r as u128;
    let measured = period_of_multiple(&cert.n, &cert.working_d)?;
    if measured != cert.measured_period {
        return Err(Error::Falsified(format!(
            "recorded period {} but measured {measured}",
            cert.measured_period
        )));
    }
    let l = euclid_len(p, q) as usize;
    let window = window_from_prime(p)?;
    Ok(CertificateChecks {
        working_period_is_two: expand_sqrt(&cert.working_d)?.period_len() == 2,
        p_divides_x8r_plus_1: ((&x_8r + 1u32) % p).is_zero(),
        p_coprime_to_working_d: !(&cert.working_d % p).is_zero(),
        p_in_phi_interval: phi_interval_exponent(&big_p)? == t,
        b_within_one_over_p: phi_between(b - 1, b + 1, p),
        fib_bound_l_b_p: euclid_len(b, p) as i64 >= t as i64 - 1,
        q_prime: is_prime(q)?,
        q_congruent_b_mod_p: q % p == b % p,
        gcd_2r_q_condition: (2 * r as u128).gcd(&(q2m1 / 8)) == 1,
        m_congruent_8r_mod_16r: m as u128 % r16 == 8 * r as u128 % r16,
        q2_minus_1_divides_m: (m as u128).is_multiple_of(q2m1),
        x_m_pell: sol.is_valid() && sol == fund.power(m)?,
        two_pq_divides_y_m: (&sol.y % &two_pq).is_zero(),
        p_divides_x_m_plus_1: ((&sol.x + 1u32) % p).is_zero(),
        q_divides_x_m_minus_1: ((&sol.x - 1u32) % q).is_zero(),
        measured_in_predicted: [2 * l, 2 * l + 2].contains(&measured),
        measured_in_log_window: window.contains(measured as i64),
    })
}
