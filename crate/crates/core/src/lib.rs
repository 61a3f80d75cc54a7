//! Exact continued-fraction machinery for quadratic surds.
//!
//! The crate computes the period length `D(n*sqrt(d))` of continued fraction
//! expansions, solves Pell equations, measures Euclidean-algorithm lengths and
//! runs a constructive pipeline that produces multipliers `n` whose period is
//! forced into a predicted window. Every decision is made with exact integer
//! arithmetic; floating point only ever appears in human-readable output.

pub mod cf;
pub mod construct;
mod error;
pub mod euclid;
pub mod explore;
pub mod pell;
pub mod primes;
mod serde_decimal;
pub mod surd;

pub use error::{Error, Result};

pub use cf::{
    convergents, expand_sqrt, expand_surd, is_galois_palindrome, period_of_multiple,
    verify_middle_identities, CfExpansion, ConvergentPair, IdentityReport,
};
pub use construct::{
    find_lemma6_witnesses, period_two_multiplier, theorem_pipeline, window_from_prime,
    ConstructionCertificate, Lemma6Witness, LogWindow, PipelineLimits, SignSplit,
};
pub use euclid::{best_phi_numerator, euclid_length, fib_hypothesis_holds, fibonacci, EuclidTrace};
pub use pell::{
    fundamental_solution, negative_pell_solvable, nth_solution, pell_period_mod,
    verify_pell_period_lemma, PellPeriodReport, PellSolution,
};
pub use surd::{
    compare_abs_phi, integer_sqrt, phi_interval_exponent, PhiPower, Rational, SurdState,
};
