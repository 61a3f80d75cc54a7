//! Experiments over many radicands: period scans, limit-point evidence,
//! verification suites and Euclid-length spectra.
//!
//! Finite scans cannot decide whether a value is a limit point of
//! `D(n sqrt d)`. A value is reported as a *candidate* when it occurs at
//! least `threshold` times, and the reports say so.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{
    convergents, expand_sqrt, fold_terms, is_galois_palindrome, period_of_multiple,
    verify_middle_identities,
};
use crate::construct::period_two_multiplier;
use crate::euclid::{best_phi_numerator, euclid_len, fib_hypothesis_holds};
use crate::pell::{negative_pell_by_search, negative_pell_solvable, verify_pell_period_lemma};
use crate::surd::{integer_sqrt, require_nonsquare, Rational};
use crate::{Error, Result};

pub const DEFAULT_THRESHOLD: u64 = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRecord {
    #[serde(with = "crate::serde_decimal")]
    pub d: BigUint,
    pub n: u64,
    #[serde(with = "crate::serde_decimal")]
    pub radicand: BigUint,
    pub period: usize,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))
}

/// `D(n sqrt d)` for `n = 1..=n_max`, ordered by `n` for any worker count.
pub fn scan(d: &BigUint, n_max: u64, workers: usize) -> Result<Vec<ScanRecord>> {
    require_nonsquare(d)?;
    pool(workers)?.install(|| {
        (1..=n_max)
            .into_par_iter()
            .map(|n| {
                let big_n = BigUint::from(n);
                Ok(ScanRecord {
                    d: d.clone(),
                    n,
                    radicand: &big_n * &big_n * d,
                    period: period_of_multiple(&big_n, d)?,
                })
            })
            .collect()
    })
}

/// Writes `d,n,radicand,D` rows with LF line endings.
pub fn write_scan_csv<W: Write>(records: &[ScanRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "d,n,radicand,D")?;
    for r in records {
        writeln!(out, "{},{},{},{}", r.d, r.n, r.radicand, r.period)?;
    }
    out.flush()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitPointReport {
    #[serde(with = "crate::serde_decimal")]
    pub d: BigUint,
    pub n_max: u64,
    pub threshold: u64,
    /// Frequency of each period value.
    pub counts: BTreeMap<usize, u64>,
    /// Values seen at least `threshold` times, ascending.
    pub candidates: Vec<usize>,
}

impl LimitPointReport {
    pub fn from_records(d: &BigUint, records: &[ScanRecord], threshold: u64) -> Self {
        let mut counts = BTreeMap::new();
        for r in records {
            *counts.entry(r.period).or_insert(0u64) += 1;
        }
        let candidates = counts
            .iter()
            .filter(|(_, &c)| c >= threshold)
            .map(|(&v, _)| v)
            .collect();
        LimitPointReport {
            d: d.clone(),
            n_max: records.len() as u64,
            threshold,
            counts,
            candidates,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Galois,
    Eq1Eq2,
    PellPeriod,
    Okres2,
    EvenParity,
    Wlasnosci,
    Fib,
    NegativePell,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Galois,
        Suite::Eq1Eq2,
        Suite::PellPeriod,
        Suite::Okres2,
        Suite::EvenParity,
        Suite::Wlasnosci,
        Suite::Fib,
        Suite::NegativePell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Galois => "galois",
            Suite::Eq1Eq2 => "eq1eq2",
            Suite::PellPeriod => "pell-period",
            Suite::Okres2 => "okres2",
            Suite::EvenParity => "even-parity",
            Suite::Wlasnosci => "wlasnosci",
            Suite::Fib => "fib",
            Suite::NegativePell => "negative-pell",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::Galois => "sqrt(d) = [a0; (palindrome, 2 a0)]",
            Suite::Eq1Eq2 => "convergent determinant (-1)^(k-1) and p_k/q_k = [a0..ak]",
            Suite::PellPeriod => "m_d(p) divides p^2 - 1 for odd primes p",
            Suite::Okres2 => "y_1 sqrt d = [x_1 - 1; (1, 2(x_1 - 1))]",
            Suite::EvenParity => "even D(sqrt d) forces even D(n sqrt d)",
            Suite::Wlasnosci => "palindrome-middle identities for even periods",
            Suite::Fib => "golden-ratio closeness bounds L(a, b) from below",
            Suite::NegativePell => "x^2 - d y^2 = -1 solvable iff D(sqrt d) odd",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "galois" | "palindrome" => Suite::Galois,
            "eq1eq2" | "convergents" => Suite::Eq1Eq2,
            "pell-period" => Suite::PellPeriod,
            "okres2" | "period-two" => Suite::Okres2,
            "even-parity" => Suite::EvenParity,
            "wlasnosci" | "middle-identities" => Suite::Wlasnosci,
            "fib" => Suite::Fib,
            "negative-pell" => Suite::NegativePell,
            other => return Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
        })
    }
}

/// Bounds for a verification run; unset fields take per-suite defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyBounds {
    pub dmax: Option<u64>,
    pub nmax: Option<u64>,
    pub bound: Option<u64>,
    pub samples: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    /// Number of individual cases checked.
    pub checked: u64,
    pub counterexample: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn nonsquares(dmax: u64) -> impl Iterator<Item = u64> {
    (2..=dmax).filter(|&d| !integer_sqrt(&BigUint::from(d)).1)
}

/// Runs `check` over `items` in parallel and keeps the counterexample with the
/// smallest item, so reports do not depend on scheduling.
fn run_cases<F>(suite: Suite, items: Vec<u64>, workers: usize, check: F) -> Result<SuiteReport>
where
    F: Fn(u64) -> Result<(u64, Option<String>)> + Sync,
{
    let results: Vec<(u64, Option<String>)> =
        pool(workers)?.install(|| items.par_iter().map(|&i| check(i)).collect::<Result<_>>())?;
    let checked = results.iter().map(|r| r.0).sum();
    let counterexample = results.into_iter().find_map(|r| r.1);
    Ok(SuiteReport {
        suite,
        checked,
        counterexample,
    })
}

pub fn run_suite(suite: Suite, bounds: &VerifyBounds) -> Result<SuiteReport> {
    let workers = bounds.workers.unwrap_or_else(rayon::current_num_threads);
    match suite {
        Suite::Galois => {
            let dmax = bounds.dmax.unwrap_or(5000);
            run_cases(suite, nonsquares(dmax).collect(), workers, |d| {
                let cf = expand_sqrt(&d.into())?;
                let ok = cf.preperiod().is_empty()
                    && cf.has_minimal_period()
                    && is_galois_palindrome(&cf)?;
                Ok((1, (!ok).then(|| format!("d = {d}: sqrt(d) = {cf}"))))
            })
        }
        Suite::Eq1Eq2 => {
            let dmax = bounds.dmax.unwrap_or(1000);
            let kmax = bounds.bound.unwrap_or(50) as usize;
            run_cases(suite, nonsquares(dmax).collect(), workers, |d| {
                Ok((kmax as u64, convergent_identity_failure(d, kmax)?))
            })
        }
        Suite::PellPeriod => {
            let dmax = bounds.dmax.unwrap_or(50);
            let pmax = bounds.bound.unwrap_or(200);
            run_cases(suite, nonsquares(dmax).collect(), workers, |d| {
                let rep = verify_pell_period_lemma(&d.into(), pmax)?;
                let bad = rep.first_failure().map(|r| {
                    format!(
                        "d = {d}, p = {}: m_d(p) = {} does not divide p^2 - 1",
                        r.prime, r.x_period
                    )
                });
                Ok((rep.rows.len() as u64, bad))
            })
        }
        Suite::Okres2 => {
            let dmax = bounds.dmax.unwrap_or(500);
            run_cases(suite, nonsquares(dmax).collect(), workers, |d| {
                let d_big = BigUint::from(d);
                let (n, expected) = period_two_multiplier(&d_big)?;
                let actual = expand_sqrt(&(&n * &n * &d_big))?;
                let ok = actual == expected && actual.period_len() == 2;
                Ok((
                    1,
                    (!ok).then(|| format!("d = {d}: {n} sqrt d = {actual}, expected {expected}")),
                ))
            })
        }
        Suite::EvenParity => {
            let dmax = bounds.dmax.unwrap_or(100);
            let nmax = bounds.nmax.unwrap_or(300);
            run_cases(suite, nonsquares(dmax).collect(), workers, |d| {
                let d_big = BigUint::from(d);
                if expand_sqrt(&d_big)?.period_len() % 2 == 1 {
                    return Ok((0, None));
                }
                for n in 1..=nmax {
                    let period = period_of_multiple(&n.into(), &d_big)?;
                    if period % 2 == 1 {
                        return Ok((n, Some(format!("d = {d}, n = {n}: D(n sqrt d) = {period}"))));
                    }
                }
                Ok((nmax, None))
            })
        }
        Suite::Wlasnosci => {
            let dmax = bounds.dmax.unwrap_or(3000);
            run_cases(suite, nonsquares(dmax).collect(), workers, |d| {
                let d_big = BigUint::from(d);
                if expand_sqrt(&d_big)?.period_len() % 2 == 1 {
                    return Ok((0, None));
                }
                let rep = verify_middle_identities(&d_big)?;
                Ok((1, (!rep.all_hold()).then(|| format!("d = {d}: {rep:?}"))))
            })
        }
        Suite::Fib => {
            let samples = bounds.samples.unwrap_or(10_000);
            let bmax = bounds.bound.unwrap_or(1_000_000);
            let rep = fib_lower_bound_samples(samples, bmax, 0x5eed)?;
            Ok(SuiteReport {
                suite,
                checked: rep.0,
                counterexample: rep.1,
            })
        }
        Suite::NegativePell => {
            let dmax = bounds.dmax.unwrap_or(500);
            run_cases(suite, nonsquares(dmax).collect(), workers, |d| {
                let d_big = BigUint::from(d);
                let solvable = negative_pell_solvable(&d_big)?;
                let k = expand_sqrt(&d_big)?.period_len();
                let found = negative_pell_by_search(&d_big, 2 * k + 2)?;
                let ok = solvable == found.is_some();
                Ok((
                    1,
                    (!ok).then(|| {
                        format!("d = {d}: parity says {solvable}, search found {found:?}")
                    }),
                ))
            })
        }
    }
}

/// First failure of the determinant identity or the fold identity for
/// convergents `1..kmax` of `sqrt(d)`.
pub fn convergent_identity_failure(d: u64, kmax: usize) -> Result<Option<String>> {
    let cf = expand_sqrt(&d.into())?;
    let conv = convergents(&cf, kmax + 1);
    let terms: Vec<BigInt> = (0..=kmax).map(|i| cf.term(i)).collect();
    for k in 0..=kmax {
        if k >= 1 {
            let det = &conv[k].p * &conv[k - 1].q - &conv[k - 1].p * &conv[k].q;
            let expected = if (k - 1) % 2 == 0 { 1 } else { -1 };
            if det != BigInt::from(expected) {
                return Ok(Some(format!("d = {d}, k = {k}: determinant {det}")));
            }
        }
        let folded = fold_terms(&terms[..=k]);
        if folded != Rational::new(conv[k].p.clone(), conv[k].q.clone()) {
            return Ok(Some(format!("d = {d}, k = {k}: fold {folded} != p_k/q_k")));
        }
    }
    Ok(None)
}

/// Draws `(a, b, k)` with the closeness hypothesis verified exactly and checks
/// `L(a, b) >= k`. Returns `(checked, counterexample)`.
pub fn fib_lower_bound_samples(
    samples: u64,
    bmax: u64,
    seed: u64,
) -> Result<(u64, Option<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < samples {
        let b: u64 = rng.gen_range(2..=bmax.max(2));
        let offset: i64 = rng.gen_range(-2..=2);
        let a = (best_phi_numerator(b)? as i64 + offset) as u64;
        if a <= b {
            continue;
        }
        let l = euclid_len(a, b) as u64;
        // The hypothesis threshold shrinks with k, so admissible k form a prefix.
        let mut k = 1;
        while fib_hypothesis_holds(a, b, k) && checked < samples {
            checked += 1;
            if l < k {
                return Ok((
                    checked,
                    Some(format!("a = {a}, b = {b}, k = {k}: L(a, b) = {l}")),
                ));
            }
            k += 1;
        }
    }
    Ok((checked, None))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumRow {
    pub n: u64,
    pub attained: BTreeSet<u32>,
    /// Whether `1..=k` are all attained.
    pub covered: bool,
    pub smallest_missing: Option<u32>,
}

/// `{L(m, n) : 1 <= m <= n}` for each `n` in range, against the targets `1..=k`.
pub fn euclid_spectrum(n_min: u64, n_max: u64, k: u32, workers: usize) -> Result<Vec<SpectrumRow>> {
    if n_min == 0 || n_min > n_max || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n_min <= n_max and k >= 1, got n_min = {n_min}, n_max = {n_max}, k = {k}"
        )));
    }
    Ok(pool(workers)?.install(|| {
        (n_min..=n_max)
            .into_par_iter()
            .map(|n| {
                let attained: BTreeSet<u32> = (1..=n).map(|m| euclid_len(m, n)).collect();
                let smallest_missing = (1..=k).find(|i| !attained.contains(i));
                SpectrumRow {
                    n,
                    attained,
                    covered: smallest_missing.is_none(),
                    smallest_missing,
                }
            })
            .collect()
    }))
}

/// Writes `n,attained,covered,smallest_missing`; `attained` is `;`-joined.
pub fn write_spectrum_csv<W: Write>(rows: &[SpectrumRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,attained,covered,smallest_missing")?;
    for r in rows {
        let attained: Vec<String> = r.attained.iter().map(u32::to_string).collect();
        let missing = r
            .smallest_missing
            .map(|m| m.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{}",
            r.n,
            attained.join(";"),
            r.covered,
            missing
        )?;
    }
    out.flush()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Q3Row {
    pub k: usize,
    pub k_candidate: bool,
    pub next_candidate: bool,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Q3Report {
    pub limit_points: LimitPointReport,
    pub rows: Vec<Q3Row>,
}

impl Q3Report {
    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }
}

/// For each `k <= k_max`, whether `k` or `k + 1` is an empirical candidate.
pub fn q3_report(
    d: &BigUint,
    n_max: u64,
    k_max: usize,
    threshold: u64,
    workers: usize,
) -> Result<Q3Report> {
    let records = scan(d, n_max, workers)?;
    let limit_points = LimitPointReport::from_records(d, &records, threshold);
    let is_candidate = |v: usize| limit_points.candidates.binary_search(&v).is_ok();
    let rows = (1..=k_max)
        .map(|k| {
            let (a, b) = (is_candidate(k), is_candidate(k + 1));
            Q3Row {
                k,
                k_candidate: a,
                next_candidate: b,
                satisfied: a || b,
            }
        })
        .collect();
    Ok(Q3Report { limit_points, rows })
}
