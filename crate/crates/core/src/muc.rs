//! Direct check of the Markov Uniqueness Conjecture up to a limit.

use std::time::Instant;

use num_bigint::BigUint;
use serde::Serialize;

use crate::enumeration::{Emission, MarkovStream};
use crate::markov::MarkovTriple;

/// Where to stop: every Markov number up to a value, or the first `n`
/// distinct ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MucLimit {
    MaxValue(#[serde(serialize_with = "ser_decimal")] BigUint),
    DistinctCount(u64),
}

fn ser_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Two normalized triples sharing their maximum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicateWitness {
    #[serde(serialize_with = "ser_decimal")]
    pub max: BigUint,
    #[serde(serialize_with = "ser_triple")]
    pub first: MarkovTriple,
    #[serde(serialize_with = "ser_triple")]
    pub second: MarkovTriple,
}

fn ser_triple<S: serde::Serializer>(t: &MarkovTriple, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for e in t.entries() {
        seq.serialize_element(&e.to_string())?;
    }
    seq.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MucReport {
    pub limit: MucLimit,
    pub verified_distinct: u64,
    /// Tree nodes consumed, duplicates included.
    pub emissions: u64,
    #[serde(serialize_with = "ser_opt_decimal")]
    pub largest: Option<BigUint>,
    pub duplicates: Vec<DuplicateWitness>,
    pub wall_time: f64,
}

fn ser_opt_decimal<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

impl MucReport {
    pub fn holds(&self) -> bool {
        self.duplicates.is_empty()
    }
}

/// Emissions between progress callbacks.
pub const PROGRESS_EVERY: u64 = 10_000;

pub fn check_muc(limit: MucLimit) -> MucReport {
    check_muc_with(&mut fresh_stream(&limit), limit, |_| {})
}

/// Stream suited to a limit: value bounds prune the tree at the bound.
pub fn fresh_stream(limit: &MucLimit) -> MarkovStream {
    match limit {
        MucLimit::MaxValue(b) => MarkovStream::with_ceiling(b.clone()),
        MucLimit::DistinctCount(_) => MarkovStream::new(),
    }
}

/// Consumes `stream` until `limit`, calling `progress` every
/// [`PROGRESS_EVERY`] emissions. The stream may be a restored checkpoint;
/// counts in the report are totals since the stream started. On return the
/// stream sits just past the limit, ready to checkpoint.
pub fn check_muc_with(
    stream: &mut MarkovStream,
    limit: MucLimit,
    mut progress: impl FnMut(&Emission),
) -> MucReport {
    let start = Instant::now();
    let mut duplicates = Vec::new();
    let mut previous: Option<MarkovTriple> = None;
    let mut largest = stream.last_max().cloned();

    loop {
        let more = match &limit {
            MucLimit::MaxValue(b) => stream.peek_max().is_some_and(|m| &m <= b),
            MucLimit::DistinctCount(n) => stream.distinct() < *n || stream.next_is_duplicate(),
        };
        if !more {
            break;
        }
        let Some(e) = stream.next_markov() else { break };
        if e.duplicate {
            let first = previous.clone().expect("a duplicate follows an emission");
            duplicates.push(DuplicateWitness {
                max: e.max.clone(),
                first,
                second: e.triple.clone(),
            });
        }
        if e.position % PROGRESS_EVERY == 0 {
            progress(&e);
        }
        largest = Some(e.max.clone());
        previous = Some(e.triple);
    }

    MucReport {
        limit,
        verified_distinct: stream.distinct(),
        emissions: stream.emitted(),
        largest,
        duplicates,
        wall_time: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_two_sees_only_singular_triples() {
        let r = check_muc(MucLimit::MaxValue(2u32.into()));
        assert_eq!(r.verified_distinct, 2);
        assert_eq!(r.emissions, 2);
        assert!(r.duplicates.is_empty());
        assert_eq!(r.largest, Some(2u32.into()));
    }

    #[test]
    fn limit_modes_agree() {
        let by_value = check_muc(MucLimit::MaxValue(10_000u32.into()));
        let by_count = check_muc(MucLimit::DistinctCount(by_value.verified_distinct));
        assert_eq!(by_value.largest, by_count.largest);
        assert_eq!(by_value.emissions, by_count.emissions);
        assert!(by_value.holds() && by_count.holds());
    }

    #[test]
    fn progress_cadence() {
        let mut calls = 0;
        check_muc_with(&mut MarkovStream::new(), MucLimit::DistinctCount(25_000), |_| calls += 1);
        assert_eq!(calls, 2);
    }

    #[test]
    fn reports_are_deterministic() {
        let mut a = check_muc(MucLimit::DistinctCount(500));
        let mut b = check_muc(MucLimit::DistinctCount(500));
        a.wall_time = 0.0;
        b.wall_time = 0.0;
        assert_eq!(a, b);
    }
}
