//! `surdlab`: scans of D(n sqrt d), verification suites and construction
//! certificates.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage error,
//! 3 resource limit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use surdlab::construct::{theorem_pipeline, PipelineLimits};
use surdlab::explore::{
    euclid_spectrum, q3_report, run_suite, scan, write_scan_csv, write_spectrum_csv,
    LimitPointReport, Suite, VerifyBounds, DEFAULT_THRESHOLD,
};
use surdlab::Error;

#[derive(Parser)]
#[command(
    name = "surdlab",
    version,
    about = "Continued-fraction period experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute D(n sqrt d) for n = 1..=nmax and write CSV.
    Scan {
        d: BigUint,
        #[arg(long)]
        nmax: u64,
        /// Occurrences needed to report a value as a limit-point candidate.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: u64,
        /// Write the limit-point report as JSON here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        #[arg(long)]
        dmax: Option<u64>,
        #[arg(long)]
        nmax: Option<u64>,
        /// Suite-specific bound: k for eq1eq2, primes for pell-period, b for fib.
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Build and verify a construction certificate for (d, r).
    Construct {
        d: BigUint,
        r: u64,
        #[arg(long, default_value_t = PipelineLimits::default().trial_division)]
        trial_division: u64,
        #[arg(long, default_value_t = PipelineLimits::default().q_search)]
        q_search: u64,
        #[arg(long, default_value_t = PipelineLimits::default().max_index)]
        max_index: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Attained Euclid lengths {L(m, n) : m <= n} against 1..=k.
    EuclidSpectrum {
        #[arg(long)]
        nmin: u64,
        #[arg(long)]
        nmax: u64,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        common: Common,
    },
    /// For k <= kmax, whether k or k + 1 is a limit-point candidate.
    Q3 {
        d: BigUint,
        #[arg(long)]
        nmax: u64,
        #[arg(long)]
        kmax: usize,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> surdlab::Result<()> {
    let mut out = open_out(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn print_report(rep: &LimitPointReport) {
    eprintln!(
        "d = {}, n <= {}: {} distinct periods; candidates (>= {} occurrences, evidence only): {:?}",
        rep.d,
        rep.n_max,
        rep.counts.len(),
        rep.threshold,
        rep.candidates
    );
}

fn run(cli: Cli) -> surdlab::Result<bool> {
    match cli.command {
        Command::Scan {
            d,
            nmax,
            threshold,
            report,
            common,
        } => {
            if nmax == 0 {
                return Err(Error::InvalidArgument("nmax must be at least 1".into()));
            }
            let records = scan(&d, nmax, common.workers())?;
            write_scan_csv(&records, open_out(common.out.as_deref())?)?;
            let rep = LimitPointReport::from_records(&d, &records, threshold);
            print_report(&rep);
            if let Some(path) = report {
                write_json(Some(&path), &rep)?;
            }
            Ok(true)
        }
        Command::Verify {
            suite,
            dmax,
            nmax,
            bound,
            samples,
            common,
        } => {
            let suites = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse::<Suite>()?]
            };
            let bounds = VerifyBounds {
                dmax,
                nmax,
                bound,
                samples,
                workers: Some(common.workers()),
            };
            let mut reports = Vec::new();
            for s in suites {
                let rep = run_suite(s, &bounds)?;
                match &rep.counterexample {
                    None => eprintln!("PASS {s} ({} cases): {}", rep.checked, s.description()),
                    Some(c) => eprintln!("FAIL {s}: {c}"),
                }
                reports.push(rep);
            }
            if common.out.is_some() {
                write_json(common.out.as_deref(), &reports)?;
            }
            Ok(reports.iter().all(|r| r.passed()))
        }
        Command::Construct {
            d,
            r,
            trial_division,
            q_search,
            max_index,
            common,
        } => {
            let limits = PipelineLimits {
                trial_division,
                q_search,
                max_index,
            };
            let cert = theorem_pipeline(&d, r, &limits)?;
            write_json(common.out.as_deref(), &cert)?;
            eprintln!(
                "d = {}, r = {}: p = {}, q = {}, m = {}, D = {} (predicted {:?}, log window {}..={}){}",
                cert.d,
                cert.r,
                cert.p,
                cert.q,
                cert.m,
                cert.measured_period,
                cert.predicted_window,
                cert.log_window.min_int,
                cert.log_window.max_int,
                if cert.verified() { "" } else { " NOT VERIFIED" }
            );
            Ok(cert.verified())
        }
        Command::EuclidSpectrum {
            nmin,
            nmax,
            k,
            common,
        } => {
            let rows = euclid_spectrum(nmin, nmax, k, common.workers())?;
            write_spectrum_csv(&rows, open_out(common.out.as_deref())?)?;
            let uncovered = rows.iter().filter(|r| !r.covered).count();
            eprintln!(
                "{} of {} values of n miss some length in 1..={k}",
                uncovered,
                rows.len()
            );
            Ok(true)
        }
        Command::Q3 {
            d,
            nmax,
            kmax,
            threshold,
            common,
        } => {
            let rep = q3_report(&d, nmax, kmax, threshold, common.workers())?;
            for row in &rep.rows {
                eprintln!(
                    "k = {:>3}: k {} k+1 {} -> {}",
                    row.k,
                    if row.k_candidate { "yes" } else { "no " },
                    if row.next_candidate { "yes" } else { "no " },
                    if row.satisfied { "ok" } else { "MISSING" }
                );
            }
            write_json(common.out.as_deref(), &rep)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.reason_code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
