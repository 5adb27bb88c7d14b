//! Exit criteria. Runs without the libtest harness so that every criterion
//! prints its `PASS`/`FAIL` line in a plain `cargo test`. Exits nonzero if
//! any criterion fails.
//!
//! `cargo test -p lagrange-core --test acceptance -- --ignored` adds the
//! slow direct check to 10^1000.

mod common;

use std::collections::BTreeSet;
use std::panic;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use lagrange_core::checkpoint::{checkpoint, restore};
use lagrange_core::muc::{check_muc, MucLimit};
use lagrange_core::precision::PrecisionReal;
use lagrange_core::series::{
    default_digits, mcshane_partial, mcshane_partials, partial_sum, partial_sums,
    trace_identity_error, zagier_tail,
};
use lagrange_core::slope::{
    dihedral_orbit, farey_markov, holonomy_trace, slopes_in_box, HolonomyPair, Slope,
};
use lagrange_core::MarkovStream;
use num_bigint::{BigInt, BigUint};

use common::brute_force_markov_numbers;

static REPORTED: AtomicBool = AtomicBool::new(false);

fn verdict(id: u32, name: &str, ok: bool, detail: impl std::fmt::Display) {
    println!("[{}] AC{id:02} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    REPORTED.store(true, Ordering::SeqCst);
    assert!(ok, "AC{id} {name} failed: {detail}");
}

fn ac01_enumeration_matches_exhaustive_search() {
    let start = Instant::now();
    let first: Vec<BigUint> = MarkovStream::new().take(50).map(|e| e.max).collect();
    let elapsed = start.elapsed();
    let oracle: Vec<BigUint> = brute_force_markov_numbers(10_000_000)
        .into_iter()
        .take(50)
        .map(BigUint::from)
        .collect();
    let ok = first == oracle && oracle.len() == 50 && elapsed < Duration::from_secs(10);
    verdict(
        1,
        "first 50 Markov numbers vs exhaustive search (z <= 10^7)",
        ok,
        format!("m_50 = {}, enumeration {:.3?}", first[49], elapsed),
    );
}

fn ac02_muc_desk_scale() {
    let start = Instant::now();
    let report = check_muc(MucLimit::MaxValue(1_000_000u32.into()));
    let elapsed = start.elapsed();
    let oracle = brute_force_markov_numbers(10_000);
    let small: Vec<u64> = MarkovStream::with_ceiling(10_000u32.into())
        .map(|e| u64::try_from(&e.max).unwrap())
        .collect();
    let ok = report.duplicates.is_empty()
        && small == oracle
        && elapsed < Duration::from_secs(60);
    verdict(
        2,
        "MUC check to 10^6, distinct set at 10^4 matches brute force",
        ok,
        format!(
            "{} distinct <= 10^6, {} duplicates, {} distinct <= 10^4, {:.3?}",
            report.verified_distinct,
            report.duplicates.len(),
            small.len(),
            elapsed
        ),
    );
}

fn ac03_series_headline_r50000() {
    let start = Instant::now();
    let digits = default_digits(50_000);
    let report = partial_sum(50_000, digits, &mut MarkovStream::new()).unwrap();
    let elapsed = start.elapsed();
    let shown = report.remainder.to_sci(6);
    let five = report.remainder.to_sci(5);
    let ok = five == "7.3417e-455" && elapsed < Duration::from_secs(3600);
    verdict(
        3,
        "R_50000 = 7.34169e-455 to 5 significant figures",
        ok,
        format!("R_50000 = {shown} at {digits} digits, {elapsed:.3?}"),
    );
}

fn ac04_remainders_positive_and_decreasing() {
    let samples: Vec<u64> = (1..=10_000).collect();
    let digits = default_digits(10_000);
    let reports = partial_sums(&mut MarkovStream::new(), digits, &samples).unwrap();
    let positive = reports.iter().all(|r| r.remainder.is_positive());
    let decreasing = reports
        .windows(2)
        .all(|w| w[1].remainder.try_cmp(&w[0].remainder).unwrap().is_lt());
    verdict(
        4,
        "R_n > 0 and strictly decreasing for n <= 10^4",
        reports.len() == 10_000 && positive && decreasing,
        format!("R_10000 = {}", reports.last().unwrap().remainder.to_sci(8)),
    );
}

fn ac05_tail_model_in_log_scale() {
    let digits = default_digits(10_000);
    let reports = partial_sums(&mut MarkovStream::new(), digits, &[1_000, 10_000]).unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for r in &reports {
        let lr = r.remainder.log10_abs();
        let lt = zagier_tail(r.n, digits).unwrap().log10_abs();
        let rel = ((lr - lt) / lt).abs();
        ok &= rel <= 0.10;
        lines.push(format!("n={}: log10 R={lr:.3}, log10 tail={lt:.3}, rel={rel:.2e}", r.n));
    }
    verdict(5, "log10 R_n within 10% of log10 tail", ok, lines.join("; "));
}

fn ac06_holonomy_trace_is_three_markov() {
    let start = Instant::now();
    let slopes = slopes_in_box(50);
    let bad: Vec<String> = slopes
        .iter()
        .filter(|s| holonomy_trace(s) != farey_markov(s) * 3u32)
        .map(|s| s.to_string())
        .collect();
    let elapsed = start.elapsed();
    verdict(
        6,
        "holonomy_trace = 3 * farey_markov on |p|, q <= 50",
        bad.is_empty() && elapsed < Duration::from_secs(10),
        format!("{} slopes, {} mismatches, {elapsed:.3?}", slopes.len(), bad.len()),
    );
}

fn ac07_dihedral_orbit_sizes() {
    let short: BTreeSet<Slope> = ["[1:1]", "[1:-1]"].iter().map(|s| s.parse().unwrap()).collect();
    let mut sizes_ok = true;
    let mut threes = 0;
    for s in slopes_in_box(30) {
        let n = dihedral_orbit(&s).len();
        let in_short_orbit = short.iter().any(|t| dihedral_orbit(t).contains(&s));
        if short.contains(&s) {
            sizes_ok &= n == 3;
        } else if !in_short_orbit {
            sizes_ok &= n == 6;
        } else {
            sizes_ok &= n == 3;
        }
        threes += usize::from(n == 3);
    }
    let ok = sizes_ok && threes == 6 && short.iter().all(|s| dihedral_orbit(s).len() == 3);
    verdict(
        7,
        "orbit size 3 for [1:1], [1:-1]; 6 for all other orbits (|p|, q <= 30)",
        ok,
        format!("{threes} slopes lie in size-3 orbits (two orbits of three)"),
    );
}

/// 200-digit independent oracle: McShane box sums at N = 20 and N = 40.
const MCSHANE_20: &str = "0.4999999999999992394444503678841111332521027652339633812348264360586838";
const MCSHANE_40: &str = "0.4999999999999999999999999999993006229679394419655080310770989830198221";
/// `0.5 − partial(20) = 7.6056e-16` in the oracle run.
const MCSHANE_20_TOLERANCE: &str = "1e-15";

fn ac08_mcshane_convergence() {
    let digits = 200;
    let half = PrecisionReal::parse("0.5", digits).unwrap();
    let rows = mcshane_partials(40, digits).unwrap();
    let increasing = rows.windows(2).all(|w| w[1].1.try_cmp(&w[0].1).unwrap().is_gt());
    let below = rows.iter().all(|(_, v)| v.try_cmp(&half).unwrap().is_lt());

    let p20 = &rows[19].1;
    let tol = PrecisionReal::parse(MCSHANE_20_TOLERANCE, digits).unwrap();
    let within = (&half - p20).try_cmp(&tol).unwrap().is_lt();
    let agree = |v: &PrecisionReal, lit: &str| {
        (v - &PrecisionReal::parse(lit, digits).unwrap()).abs().log10_abs() < -68.0
    };
    let oracle_ok = agree(p20, MCSHANE_20) && agree(&rows[39].1, MCSHANE_40);
    let direct_ok = mcshane_partial(20, digits).unwrap() == *p20;

    let one_ulp = PrecisionReal::from_u64(1, digits).unwrap().ulp();
    let two_ulp = &one_ulp + &one_ulp;
    let traces: BTreeSet<BigUint> = slopes_in_box(40).iter().map(holonomy_trace).collect();
    let identity_ok = traces
        .iter()
        .all(|t| trace_identity_error(t, digits).unwrap().try_cmp(&two_ulp).unwrap().is_le());

    verdict(
        8,
        "McShane partial sums increase, stay below 1/2, match the 200-digit oracle",
        increasing && below && within && oracle_ok && direct_ok && identity_ok,
        format!(
            "0.5 - S(20) = {}, 0.5 - S(40) = {}, {} traces checked",
            (&half - p20).to_sci(6),
            (&half - &rows[39].1).to_sci(6),
            traces.len()
        ),
    );
}

fn ac09_fricke_and_holonomy_invariants() {
    let pair = HolonomyPair::modular();
    let three = BigInt::from(3);
    let (x, y, z) = pair.trace_triple();
    let cubic = &x * &x + &y * &y + &z * &z == &x * &y * &z;
    let ok = (x.clone(), y.clone(), z.clone()) == (three.clone(), three.clone(), three)
        && cubic
        && pair.commutator_trace() == BigInt::from(-2)
        && pair.fricke_commutator_trace() == BigInt::from(-2)
        && pair.a().det() == BigInt::from(1)
        && pair.b().det() == BigInt::from(1);
    verdict(
        9,
        "tr[A,B] = -2 and trace triple (3,3,3) on x^2+y^2+z^2 = xyz",
        ok,
        format!("traces ({x}, {y}, {z}), commutator {}", pair.commutator_trace()),
    );
}

fn ac10_checkpoint_resume_is_byte_identical() {
    let (k, j) = (10_000, 10_000);
    let mut straight = MarkovStream::new();
    let all: Vec<_> = straight.by_ref().take(k + j).collect();

    let mut first = MarkovStream::new();
    let head: Vec<_> = first.by_ref().take(k).collect();
    let blob = checkpoint(&first);
    let mut resumed = restore(&blob).unwrap();
    let reblob = checkpoint(&resumed);
    let tail: Vec<_> = resumed.by_ref().take(j).collect();

    let joined: Vec<_> = head.into_iter().chain(tail).collect();
    let ok = joined == all && blob == reblob && checkpoint(&resumed) == checkpoint(&straight);
    verdict(
        10,
        "checkpoint/resume at (10^4, 10^4) matches the uninterrupted run",
        ok,
        format!("checkpoint {} bytes at k = {k}", blob.len()),
    );
}

/// Direct check to 10^1000. Takes about half a minute, so opt-in.
fn extended_muc_to_ten_to_the_thousand() {
    let bound = BigUint::from(10u32).pow(1000);
    let report = check_muc(MucLimit::MaxValue(bound));
    verdict(
        11,
        "direct MUC check to 10^1000 (opt-in)",
        report.duplicates.is_empty() && report.verified_distinct == 959_047,
        format!(
            "{} distinct, {} duplicates, {:.1}s",
            report.verified_distinct,
            report.duplicates.len(),
            report.wall_time
        ),
    );
}

type Criterion = (u32, fn());

const CRITERIA: [Criterion; 10] = [
    (1, ac01_enumeration_matches_exhaustive_search),
    (2, ac02_muc_desk_scale),
    (3, ac03_series_headline_r50000),
    (4, ac04_remainders_positive_and_decreasing),
    (5, ac05_tail_model_in_log_scale),
    (6, ac06_holonomy_trace_is_three_markov),
    (7, ac07_dihedral_orbit_sizes),
    (8, ac08_mcshane_convergence),
    (9, ac09_fricke_and_holonomy_invariants),
    (10, ac10_checkpoint_resume_is_byte_identical),
];

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut run: Vec<Criterion> = CRITERIA.to_vec();
    if args.iter().any(|a| a == "--ignored" || a == "--include-ignored") {
        run.push((11, extended_muc_to_ten_to_the_thousand));
    }

    // Failures are reported by `verdict`; keep the default panic message quiet.
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, f) in &run {
        REPORTED.store(false, Ordering::SeqCst);
        if let Err(e) = panic::catch_unwind(f) {
            failed += 1;
            if !REPORTED.load(Ordering::SeqCst) {
                let msg = e
                    .downcast_ref::<String>()
                    .map(String::as_str)
                    .or_else(|| e.downcast_ref::<&str>().copied())
                    .unwrap_or("panic");
                println!("[FAIL] AC{id:02}: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", run.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
