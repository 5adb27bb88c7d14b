//! Lagrange numbers and the series `Σ (3 − Lₙ)` at arbitrary precision.
//!
//! Over all distinct Markov numbers the series sums to at most
//! `4 − φ − √2`, with equality exactly when the uniqueness conjecture holds.
//! This module evaluates partial sums, the remainders
//! `Rₙ = (4 − φ − √2) − Σ_{k≤n} (3 − L_k)`, the asymptotic tail model
//! `(6√n / C)·e^{−2C√n}`, and truncations of McShane's identity on the modular
//! torus.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::enumeration::MarkovStream;
use crate::error::{Error, Result};
use crate::precision::PrecisionReal;
use crate::slope::{holonomy_trace, slopes_in_box, slopes_on_shell, Slope};

/// Growth constant of `mₙ ∼ ⅓·e^{C√n}`, as a literal with its published digits.
pub const ZAGIER_C: &str = "2.3523414972";
const ZAGIER_C_F64: f64 = 2.3523414972;

/// Digits kept on top of the size of the remainder.
pub const GUARD_DIGITS: u32 = 50;

/// Distinct Markov numbers evaluated per parallel batch.
const BATCH: usize = 2048;

/// Working precision for `Rₙ`: enough digits to resolve the tail model at `n`
/// plus [`GUARD_DIGITS`].
pub fn default_digits(n: u64) -> u32 {
    let decades = 2.0 * ZAGIER_C_F64 * (n as f64).sqrt() / std::f64::consts::LN_10;
    decades.ceil() as u32 + GUARD_DIGITS
}

fn int(v: u64, digits: u32) -> Result<PrecisionReal> {
    PrecisionReal::from_u64(v, digits)
}

/// `4/m²` at the working precision.
fn four_over_square(m: &BigUint, digits: u32) -> Result<PrecisionReal> {
    if m.bits() == 0 {
        return Err(Error::ZeroMarkov);
    }
    let mf = PrecisionReal::from_biguint(m, digits)?;
    Ok(int(4, digits)? / (&mf * &mf))
}

/// `L(m) = √(9 − 4/m²)`.
pub fn lagrange(m: &BigUint, digits: u32) -> Result<PrecisionReal> {
    let inv = four_over_square(m, digits)?;
    Ok((int(9, digits)? - inv).sqrt())
}

/// `3 − L(m)` as `(4/m²) / (3 + √(9 − 4/m²))`, free of cancellation.
pub fn gap_term(m: &BigUint, digits: u32) -> Result<PrecisionReal> {
    let inv = four_over_square(m, digits)?;
    let root = (int(9, digits)? - &inv).sqrt();
    Ok(inv / (int(3, digits)? + root))
}

/// `3 − L(m)` by direct subtraction. Loses digits for large `m`.
pub fn gap_term_direct(m: &BigUint, digits: u32) -> Result<PrecisionReal> {
    Ok(int(3, digits)? - lagrange(m, digits)?)
}

pub fn golden_ratio(digits: u32) -> Result<PrecisionReal> {
    Ok((int(1, digits)? + int(5, digits)?.sqrt()) / int(2, digits)?)
}

/// `4 − φ − √2`.
pub fn target_constant(digits: u32) -> Result<PrecisionReal> {
    Ok(int(4, digits)? - golden_ratio(digits)? - int(2, digits)?.sqrt())
}

pub fn zagier_constant(digits: u32) -> Result<PrecisionReal> {
    PrecisionReal::parse(ZAGIER_C, digits)
}

/// `(6√n / C)·e^{−2C√n}`.
pub fn zagier_tail(n: u64, digits: u32) -> Result<PrecisionReal> {
    let c = zagier_constant(digits)?;
    let root = int(n, digits)?.sqrt();
    let decay = (-(int(2, digits)? * &c * &root)).exp();
    Ok(int(6, digits)? * root / c * decay)
}

/// One row of the remainder table.
#[derive(Debug, Clone)]
pub struct SeriesReport {
    pub n: u64,
    pub digits: u32,
    /// `mₙ`, the last Markov number included.
    pub markov: BigUint,
    pub partial_sum: PrecisionReal,
    pub remainder: PrecisionReal,
    pub zagier_tail: PrecisionReal,
    /// `Rₙ / tail(n)`.
    pub ratio: PrecisionReal,
    /// Accumulated rounding bound, `(n + 4)` ulps of the partial sum.
    pub rounding_budget: PrecisionReal,
}

/// Running sum of gap terms over distinct Markov numbers in stream order.
pub struct SeriesAccumulator {
    digits: u32,
    target: PrecisionReal,
    sum: PrecisionReal,
    n: u64,
    last: BigUint,
}

impl SeriesAccumulator {
    pub fn new(digits: u32) -> Result<Self> {
        Ok(Self {
            digits,
            target: target_constant(digits)?,
            sum: PrecisionReal::zero(digits)?,
            n: 0,
            last: BigUint::default(),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sum(&self) -> &PrecisionReal {
        &self.sum
    }

    pub fn push(&mut self, m: BigUint, term: &PrecisionReal) {
        self.sum = &self.sum + term;
        self.n += 1;
        self.last = m;
    }

    /// Builds the report for the current `n`, failing when the remainder is
    /// not resolvable at this precision.
    pub fn report(&self) -> Result<SeriesReport> {
        let d = self.digits;
        let remainder = &self.target - &self.sum;
        let budget = int(self.n + 4, d)? * self.sum.ulp().max_with(&self.target.ulp())?;
        if remainder.try_cmp(&budget)?.is_le() {
            return Err(Error::InsufficientPrecision {
                n: self.n,
                digits: d,
                suggested: default_digits(self.n).max(2 * d),
            });
        }
        let tail = zagier_tail(self.n, d)?;
        Ok(SeriesReport {
            n: self.n,
            digits: d,
            markov: self.last.clone(),
            partial_sum: self.sum.clone(),
            ratio: &remainder / &tail,
            remainder,
            zagier_tail: tail,
            rounding_budget: budget,
        })
    }
}

impl PrecisionReal {
    fn max_with(&self, o: &Self) -> Result<Self> {
        Ok(if self.try_cmp(o)?.is_ge() { self.clone() } else { o.clone() })
    }
}

/// Sums `3 − L(mₖ)` over the distinct Markov numbers drawn from `stream`,
/// returning a report at every `n` in `samples` (sorted, deduplicated
/// internally). Gap terms are evaluated in parallel batches and added in
/// stream order.
pub fn partial_sums(
    stream: &mut MarkovStream,
    digits: u32,
    samples: &[u64],
) -> Result<Vec<SeriesReport>> {
    let mut samples = samples.to_vec();
    samples.sort_unstable();
    samples.dedup();
    samples.retain(|&n| n > 0);
    let Some(&last) = samples.last() else {
        return Ok(Vec::new());
    };

    let mut acc = SeriesAccumulator::new(digits)?;
    let mut out = Vec::with_capacity(samples.len());
    let mut next_sample = samples.iter().peekable();
    while acc.n() < last {
        let want = ((last - acc.n()) as usize).min(BATCH);
        let batch: Vec<BigUint> = stream
            .by_ref()
            .filter(|e| !e.duplicate)
            .take(want)
            .map(|e| e.max)
            .collect();
        if batch.is_empty() {
            return Err(Error::StreamExhausted(acc.n()));
        }
        let terms: Vec<PrecisionReal> = batch
            .par_iter()
            .map(|m| gap_term(m, digits))
            .collect::<Result<_>>()?;
        for (m, t) in batch.into_iter().zip(&terms) {
            acc.push(m, t);
            if next_sample.peek() == Some(&&acc.n()) {
                next_sample.next();
                out.push(acc.report()?);
            }
        }
    }
    Ok(out)
}

/// Report at a single `n`.
pub fn partial_sum(n: u64, digits: u32, stream: &mut MarkovStream) -> Result<SeriesReport> {
    partial_sums(stream, digits, &[n])?
        .pop()
        .ok_or(Error::StreamExhausted(0))
}

/// Powers of two up to `n`, plus `n` and any extra points `≤ n`.
pub fn sampling_schedule(n: u64, extra: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = std::iter::successors(Some(1u64), |k| k.checked_mul(2))
        .take_while(|&k| k <= n)
        .collect();
    v.extend(extra.iter().copied().filter(|&k| k >= 1 && k <= n));
    if n >= 1 {
        v.push(n);
    }
    v.sort_unstable();
    v.dedup();
    v
}

/// `6·S − 3·((3 − L₁) + (3 − L₂))` for a partial sum `S`. Tends to 3 exactly
/// when `S` tends to `4 − φ − √2`.
pub fn orbit_weighted_value(partial: &PrecisionReal) -> Result<PrecisionReal> {
    let d = partial.digits();
    let short = gap_term(&1u32.into(), d)? + gap_term(&2u32.into(), d)?;
    Ok(int(6, d)? * partial - int(3, d)? * short)
}

/// Orbit-weighted McShane sum over the first `n` distinct Markov numbers;
/// equals `3 − 6·Rₙ`.
pub fn orbit_weighted_identity_check(
    n: u64,
    digits: u32,
    stream: &mut MarkovStream,
) -> Result<PrecisionReal> {
    let report = partial_sum(n, digits, stream)?;
    orbit_weighted_value(&report.partial_sum)
}

/// `e^{ℓ/2} = (τ + √(τ² − 4)) / 2` for a trace `τ ≥ 3`.
fn half_length_exp(trace: &BigUint, digits: u32) -> Result<PrecisionReal> {
    let t = PrecisionReal::from_biguint(trace, digits)?;
    let disc = (&t * &t - int(4, digits)?).sqrt();
    Ok((t + disc) / int(2, digits)?)
}

/// `1 / (1 + e^ℓ)` for the geodesic of trace `τ`.
pub fn mcshane_term_from_trace(trace: &BigUint, digits: u32) -> Result<PrecisionReal> {
    let h = half_length_exp(trace, digits)?;
    let one = int(1, digits)?;
    Ok((&one + &h * &h).recip())
}

/// `(1 − √(1 − 4/τ²)) / 2`, the same quantity written through the trace.
pub fn mcshane_term_closed_form(trace: &BigUint, digits: u32) -> Result<PrecisionReal> {
    let inv = four_over_square(trace, digits)?;
    let one = int(1, digits)?;
    Ok((&one - (&one - inv).sqrt()) / int(2, digits)?)
}

/// `|2/(1 + e^ℓ) − (1 − √(1 − 4/τ²))|`. The right side cancels against 1, so
/// the natural unit for this error is one ulp of 1 at the working precision.
pub fn trace_identity_error(trace: &BigUint, digits: u32) -> Result<PrecisionReal> {
    let two = int(2, digits)?;
    let lhs = &two * mcshane_term_from_trace(trace, digits)?;
    let rhs = two * mcshane_term_closed_form(trace, digits)?;
    Ok((lhs - rhs).abs())
}

pub fn mcshane_term(s: &Slope, digits: u32) -> Result<PrecisionReal> {
    mcshane_term_from_trace(&holonomy_trace(s), digits)
}

/// McShane sum over the canonical slopes with `|p| ≤ height`, `q ≤ height`.
pub fn mcshane_partial(height: u64, digits: u32) -> Result<PrecisionReal> {
    let terms: Vec<PrecisionReal> = slopes_in_box(height)
        .par_iter()
        .map(|s| mcshane_term(s, digits))
        .collect::<Result<_>>()?;
    terms
        .iter()
        .try_fold(PrecisionReal::zero(digits)?, |acc, t| Ok(acc + t))
}

/// `(N, mcshane_partial(N))` for `N = 1..=height`, growing the box shell by shell.
pub fn mcshane_partials(height: u64, digits: u32) -> Result<Vec<(u64, PrecisionReal)>> {
    let mut sum = PrecisionReal::zero(digits)?;
    let mut out = Vec::with_capacity(height as usize);
    for h in 1..=height {
        let terms: Vec<PrecisionReal> = slopes_on_shell(h)
            .par_iter()
            .map(|s| mcshane_term(s, digits))
            .collect::<Result<_>>()?;
        for t in &terms {
            sum = sum + t;
        }
        out.push((h, sum.clone()));
    }
    Ok(out)
}
