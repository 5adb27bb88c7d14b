//! Markov triples and the Vieta moves that generate the Markov tree.
//!
//! Triples are stored sorted ascending, so a Markov number `m` is the maximum
//! of a triple `(x, y, m)` with `x ≤ y ≤ m`. The uniqueness conjecture is then
//! the statement that `m` determines `(x, y)`.
//!
//! The tree used throughout the crate is rooted at `(1, 2, 5)`. The two
//! singular triples `(1, 1, 1)` and `(1, 1, 2)` sit in front of the root as a
//! fixed chain, see [`SINGULAR_CHAIN`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};

use crate::error::{Error, Result};

/// Position inside a normalized triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coordinate {
    X,
    Y,
    Z,
}

impl Coordinate {
    pub const ALL: [Coordinate; 3] = [Coordinate::X, Coordinate::Y, Coordinate::Z];

    fn index(self) -> usize {
        match self {
            Coordinate::X => 0,
            Coordinate::Y => 1,
            Coordinate::Z => 2,
        }
    }

    fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

/// A normalized positive solution of `x² + y² + z² = 3xyz` with `x ≤ y ≤ z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkovTriple {
    x: BigUint,
    y: BigUint,
    z: BigUint,
}

/// `(1, 1, 1)` and `(1, 1, 2)`, emitted before the binary tree rooted at `(1, 2, 5)`.
pub const SINGULAR_CHAIN: [(u32, u32, u32); 2] = [(1, 1, 1), (1, 1, 2)];

fn satisfies(x: &BigUint, y: &BigUint, z: &BigUint) -> bool {
    x * x + y * y + z * z == BigUint::from(3u32) * x * y * z
}

/// Checks `x² + y² + z² = 3xyz` exactly. Non-positive entries are a domain
/// error, not a `false`.
pub fn is_markov(x: &BigInt, y: &BigInt, z: &BigInt) -> Result<bool> {
    if !(x.is_positive() && y.is_positive() && z.is_positive()) {
        return Err(Error::NonPositive(x.to_string(), y.to_string(), z.to_string()));
    }
    Ok(satisfies(x.magnitude(), y.magnitude(), z.magnitude()))
}

/// Result of a Vieta move: the re-sorted triple and the position the new value
/// landed in. Replaying the move at `landed` undoes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VietaMove {
    pub triple: MarkovTriple,
    pub landed: Coordinate,
}

impl MarkovTriple {
    /// Builds a triple from any ordering of its entries, validating the
    /// Markov equation.
    pub fn new(a: BigUint, b: BigUint, c: BigUint) -> Result<Self> {
        let mut v = [a, b, c];
        if v.iter().any(|e| e.bits() == 0) {
            let [a, b, c] = v;
            return Err(Error::NonPositive(a.to_string(), b.to_string(), c.to_string()));
        }
        v.sort();
        let [x, y, z] = v;
        if !satisfies(&x, &y, &z) {
            return Err(Error::NotMarkov(x.to_string(), y.to_string(), z.to_string()));
        }
        Ok(Self { x, y, z })
    }

    pub fn from_u64(a: u64, b: u64, c: u64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into())
    }

    /// Assembles a triple already known to be sorted and valid (tree moves).
    pub(crate) fn from_sorted_unchecked(x: BigUint, y: BigUint, z: BigUint) -> Self {
        debug_assert!(x <= y && y <= z);
        debug_assert!(satisfies(&x, &y, &z));
        Self { x, y, z }
    }

    pub fn root() -> Self {
        Self::from_sorted_unchecked(1u32.into(), 2u32.into(), 5u32.into())
    }

    pub fn singular_chain() -> [Self; 2] {
        SINGULAR_CHAIN.map(|(a, b, c)| Self::from_sorted_unchecked(a.into(), b.into(), c.into()))
    }

    pub fn x(&self) -> &BigUint {
        &self.x
    }

    pub fn y(&self) -> &BigUint {
        &self.y
    }

    pub fn z(&self) -> &BigUint {
        &self.z
    }

    /// The Markov number this triple witnesses (its largest entry).
    pub fn max(&self) -> &BigUint {
        &self.z
    }

    pub fn get(&self, c: Coordinate) -> &BigUint {
        match c {
            Coordinate::X => &self.x,
            Coordinate::Y => &self.y,
            Coordinate::Z => &self.z,
        }
    }

    pub fn entries(&self) -> [&BigUint; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// `(1, 1, 1)` and `(1, 1, 2)`: the only triples with a repeated entry.
    pub fn is_singular(&self) -> bool {
        self.x == self.y || self.y == self.z
    }

    /// Replaces the entry at `c` by `3·(product of the other two) − entry` and
    /// re-sorts.
    pub fn vieta(&self, c: Coordinate) -> VietaMove {
        let i = c.index();
        let mut v = [self.x.clone(), self.y.clone(), self.z.clone()];
        let others = (0..3).filter(|&j| j != i).map(|j| &v[j]);
        let product = others.fold(BigUint::from(3u32), |acc, e| acc * e);
        // product ≥ entry: for a Markov triple the replaced value is 3·(others) − entry ≥ 1.
        let replaced = product - &v[i];
        v[i] = replaced.clone();
        v.sort();
        // If the new value ties with another entry, pick the position that
        // lets the move be replayed: any position holding the new value works.
        let landed = v
            .iter()
            .position(|e| *e == replaced)
            .map(Coordinate::from_index)
            .expect("replaced value is present");
        let [x, y, z] = v;
        VietaMove {
            triple: Self::from_sorted_unchecked(x, y, z),
            landed,
        }
    }

    /// The two Vieta neighbours with a larger maximum, replacing `x` then `y`.
    /// The third neighbour (replacing `z`) is the parent.
    pub fn children(&self) -> Result<(Self, Self)> {
        if self.is_singular() {
            return Err(Error::SingularTriple(self.to_string()));
        }
        let three_z = BigUint::from(3u32) * &self.z;
        let via_x = &three_z * &self.y - &self.x;
        let via_y = &three_z * &self.x - &self.y;
        Ok((
            Self::from_sorted_unchecked(self.y.clone(), self.z.clone(), via_x),
            Self::from_sorted_unchecked(self.x.clone(), self.z.clone(), via_y),
        ))
    }

    /// Vieta move replacing `z`; `None` at the root of the singular chain.
    pub fn parent(&self) -> Option<Self> {
        if self.z.is_one() {
            return None;
        }
        Some(self.vieta(Coordinate::Z).triple)
    }

    /// Order used by the enumeration heap: `(max, y, x)` lexicographic.
    pub fn tree_order(&self, other: &Self) -> Ordering {
        (&self.z, &self.y, &self.x).cmp(&(&other.z, &other.y, &other.x))
    }
}

impl fmt::Display for MarkovTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}
