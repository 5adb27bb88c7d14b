//! Markov numbers in increasing order.
//!
//! The stream first replays the singular chain `(1, 1, 1)`, `(1, 1, 2)`, then
//! expands the tree rooted at `(1, 2, 5)` best-first: a min-heap keyed by
//! `(max, y, x)` holds the frontier. Children always have a larger maximum than
//! their parent, so popping the heap yields tree nodes sorted by maximum.
//!
//! Two nodes with the same maximum would be a counterexample to the uniqueness
//! conjecture. They are emitted next to each other, and the second one is
//! flagged as a duplicate.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use num_bigint::BigUint;

use crate::markov::MarkovTriple;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierNode {
    pub(crate) triple: MarkovTriple,
}

impl FrontierNode {
    pub fn new(triple: MarkovTriple) -> Self {
        Self { triple }
    }

    pub fn max(&self) -> &BigUint {
        self.triple.max()
    }

    pub fn triple(&self) -> &MarkovTriple {
        &self.triple
    }
}

impl Ord for FrontierNode {
    fn cmp(&self, other: &Self) -> Ordering {
        self.triple.tree_order(&other.triple)
    }
}

impl PartialOrd for FrontierNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One tree node, in emission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emission {
    /// Index `n` of the distinct Markov number `mₙ`; repeated for duplicates.
    pub index: u64,
    /// Position in the raw emission sequence, duplicates included (1-based).
    pub position: u64,
    pub max: BigUint,
    pub triple: MarkovTriple,
    pub duplicate: bool,
}

#[derive(Debug, Clone)]
pub struct MarkovStream {
    /// How many singular-chain triples have been emitted (0, 1 or 2).
    pub(crate) prefix_emitted: u8,
    pub(crate) heap: BinaryHeap<Reverse<FrontierNode>>,
    pub(crate) emitted: u64,
    pub(crate) distinct: u64,
    pub(crate) last_max: Option<BigUint>,
    /// Children above this value are never pushed.
    pub(crate) ceiling: Option<BigUint>,
}

impl PartialEq for MarkovStream {
    fn eq(&self, o: &Self) -> bool {
        let sorted = |s: &Self| {
            let mut v: Vec<_> = s.heap.iter().map(|Reverse(n)| n.clone()).collect();
            v.sort();
            v
        };
        (self.prefix_emitted, self.emitted, self.distinct, &self.last_max, &self.ceiling)
            == (o.prefix_emitted, o.emitted, o.distinct, &o.last_max, &o.ceiling)
            && sorted(self) == sorted(o)
    }
}

impl Eq for MarkovStream {}

impl Default for MarkovStream {
    fn default() -> Self {
        Self::new()
    }
}

impl MarkovStream {
    pub fn new() -> Self {
        Self {
            prefix_emitted: 0,
            heap: BinaryHeap::new(),
            emitted: 0,
            distinct: 0,
            last_max: None,
            ceiling: None,
        }
    }

    /// A finite stream of the tree nodes with maximum `≤ ceiling`. Nodes above
    /// the ceiling are pruned, so memory stays proportional to the output.
    pub fn with_ceiling(ceiling: BigUint) -> Self {
        Self {
            ceiling: Some(ceiling),
            ..Self::new()
        }
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Distinct Markov numbers emitted so far.
    pub fn distinct(&self) -> u64 {
        self.distinct
    }

    pub fn last_max(&self) -> Option<&BigUint> {
        self.last_max.as_ref()
    }

    pub fn ceiling(&self) -> Option<&BigUint> {
        self.ceiling.as_ref()
    }

    pub fn frontier_len(&self) -> usize {
        self.heap.len()
    }

    fn admits(&self, m: &BigUint) -> bool {
        self.ceiling.as_ref().is_none_or(|c| m <= c)
    }

    fn push(&mut self, t: MarkovTriple) {
        if self.admits(t.max()) {
            self.heap.push(Reverse(FrontierNode::new(t)));
        }
    }

    /// Maximum of the next emission without advancing.
    pub fn peek_max(&self) -> Option<BigUint> {
        if self.prefix_emitted < 2 {
            let [a, b] = MarkovTriple::singular_chain();
            let next = if self.prefix_emitted == 0 { a } else { b };
            return self.admits(next.max()).then(|| next.max().clone());
        }
        self.heap.peek().map(|Reverse(n)| n.max().clone())
    }

    fn pop_node(&mut self) -> Option<MarkovTriple> {
        if self.prefix_emitted < 2 {
            let chain = MarkovTriple::singular_chain();
            let t = chain[self.prefix_emitted as usize].clone();
            if !self.admits(t.max()) {
                return None;
            }
            self.prefix_emitted += 1;
            if self.prefix_emitted == 2 {
                self.push(MarkovTriple::root());
            }
            return Some(t);
        }
        let Reverse(node) = self.heap.pop()?;
        let (a, b) = node.triple.children().expect("tree nodes are non-singular");
        self.push(a);
        self.push(b);
        Some(node.triple)
    }

    /// Next tree node in increasing order of maximum.
    pub fn next_markov(&mut self) -> Option<Emission> {
        let triple = self.pop_node()?;
        let max = triple.max().clone();
        let duplicate = self.last_max.as_ref() == Some(&max);
        if !duplicate {
            self.distinct += 1;
        }
        self.emitted += 1;
        self.last_max = Some(max.clone());
        Some(Emission {
            index: self.distinct,
            position: self.emitted,
            max,
            triple,
            duplicate,
        })
    }

    /// Pulls distinct Markov numbers until `n` have been emitted, plus any
    /// duplicates of the last one.
    pub fn take_distinct(&mut self, n: u64) -> Vec<Emission> {
        let mut out = Vec::new();
        while self.distinct < n || self.next_is_duplicate() {
            match self.next_markov() {
                Some(e) => out.push(e),
                None => break,
            }
        }
        out
    }

    /// Whether the next emission repeats the last emitted maximum.
    pub fn next_is_duplicate(&self) -> bool {
        match (self.peek_max(), &self.last_max) {
            (Some(next), Some(last)) => &next == last,
            _ => false,
        }
    }
}

impl Iterator for MarkovStream {
    type Item = Emission;

    fn next(&mut self) -> Option<Emission> {
        self.next_markov()
    }
}
