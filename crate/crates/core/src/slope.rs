//! Simple closed curves on the modular torus, indexed by slopes.
//!
//! A simple closed curve on the once-punctured torus is determined by its
//! homology line, a primitive projective pair `[p:q]`. Two independent routes
//! give its Markov number:
//!
//! - [`farey_markov`]: Stern–Brocot descent carrying Markov numbers along
//!   Farey triangles;
//! - [`holonomy_trace`]: the trace of the Christoffel word of the slope,
//!   evaluated in a fixed pair of `SL(2, ℤ)` matrices, which is `3·m`.
//!
//! Marking: the letter `a` is carried by `A`, and the letter `b` of a
//! nonnegative slope by `B⁻¹`. With this marking the three curves of trace 3
//! are `[0:1]`, `[1:0]` and `[1:−1]`, and `[1:1]` has trace 6. Negative slopes
//! use `B` for the letter `b`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Primitive homology line `[p:q]`, stored with `q > 0` or as `[1:0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Slope {
    p: BigInt,
    q: BigInt,
}

impl Slope {
    /// Accepts only canonical, coprime pairs.
    pub fn new(p: BigInt, q: BigInt) -> Result<Self> {
        let bad = |why| Error::InvalidSlope(p.to_string(), q.to_string(), why);
        if q.is_negative() || (q.is_zero() && !p.is_one()) {
            return Err(bad("not canonical (need q > 0 or [1:0])"));
        }
        if !p.gcd(&q).is_one() {
            return Err(bad("entries are not coprime"));
        }
        Ok(Self { p, q })
    }

    pub fn from_i64(p: i64, q: i64) -> Result<Self> {
        Self::new(p.into(), q.into())
    }

    /// Reduces any nonzero vector to its canonical projective representative.
    pub fn canonicalize(p: BigInt, q: BigInt) -> Result<Self> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidSlope(p.to_string(), q.to_string(), "zero vector"));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            p = -p;
            q = -q;
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// `max(|p|, q)`, the box size in which this slope first appears.
    pub fn height(&self) -> BigInt {
        self.p.abs().max(self.q.clone())
    }

    pub fn infinity() -> Self {
        Self { p: BigInt::one(), q: BigInt::zero() }
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.height(), &self.q, &self.p).cmp(&(other.height(), &other.q, &other.p))
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.p, self.q)
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Slope {
    type Err = Error;

    /// Parses `[p:q]` or `p:q`; signs are normalized, entries must be coprime.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (p, q) = body.split_once(':').ok_or_else(|| Error::Parse(s.to_string()))?;
        let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|_| Error::Parse(s.to_string()));
        let (p, q) = (parse(p)?, parse(q)?);
        if !p.gcd(&q).is_one() {
            return Err(Error::InvalidSlope(p.to_string(), q.to_string(), "entries are not coprime"));
        }
        Self::canonicalize(p, q)
    }
}

/// All canonical slopes with `|p| ≤ height` and `q ≤ height`, in [`Slope`] order.
pub fn slopes_in_box(height: u64) -> Vec<Slope> {
    let mut out = Vec::new();
    if height == 0 {
        return out;
    }
    let h = height as i64;
    out.push(Slope::infinity());
    for q in 1..=h {
        for p in -h..=h {
            if p.gcd(&q) == 1 {
                out.push(Slope { p: p.into(), q: q.into() });
            }
        }
    }
    out.sort();
    out
}

/// Canonical slopes with height exactly `height` (the shell added when a box
/// grows from `height − 1`).
pub fn slopes_on_shell(height: u64) -> Vec<Slope> {
    if height == 0 {
        return Vec::new();
    }
    let h = BigInt::from(height);
    slopes_in_box(height).into_iter().filter(|s| s.height() == h).collect()
}

/// 2×2 integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2(pub [BigInt; 4]);

impl Mat2 {
    pub fn from_i64(m: [i64; 4]) -> Self {
        Self(m.map(BigInt::from))
    }

    pub fn identity() -> Self {
        Self::from_i64([1, 0, 0, 1])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &o.0;
        Self([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn trace(&self) -> BigInt {
        &self.0[0] + &self.0[3]
    }

    pub fn det(&self) -> BigInt {
        &self.0[0] * &self.0[3] - &self.0[1] * &self.0[2]
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse_sl2(&self) -> Self {
        let [a, b, c, d] = &self.0;
        Self([d.clone(), -b, -c, a.clone()])
    }

    /// Action on the column vector `(p, q)ᵀ`.
    pub fn apply(&self, p: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
        let [a, b, c, d] = &self.0;
        (a * p + b * q, c * p + d * q)
    }
}

/// Holonomies of the generators of the fundamental group of the punctured torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolonomyPair {
    a: Mat2,
    b: Mat2,
}

impl HolonomyPair {
    /// Checks `det = 1` for both matrices and a parabolic commutator (trace −2).
    pub fn new(a: Mat2, b: Mat2) -> Result<Self> {
        let pair = Self { a, b };
        let one = BigInt::one();
        if pair.a.det() != one || pair.b.det() != one {
            return Err(Error::InvalidHolonomy("matrices must have determinant 1"));
        }
        if pair.commutator_trace() != BigInt::from(-2) {
            return Err(Error::InvalidHolonomy("commutator trace must be -2"));
        }
        Ok(pair)
    }

    /// `A = (1 1; 1 2)`, `B = (1 −1; −1 2)`: trace triple `(3, 3, 3)`.
    pub fn modular() -> Self {
        Self {
            a: Mat2::from_i64([1, 1, 1, 2]),
            b: Mat2::from_i64([1, -1, -1, 2]),
        }
    }

    pub fn a(&self) -> &Mat2 {
        &self.a
    }

    pub fn b(&self) -> &Mat2 {
        &self.b
    }

    /// `(tr A, tr B, tr AB)`.
    pub fn trace_triple(&self) -> (BigInt, BigInt, BigInt) {
        (self.a.trace(), self.b.trace(), self.a.mul(&self.b).trace())
    }

    /// `tr(ABA⁻¹B⁻¹)` by direct multiplication.
    pub fn commutator_trace(&self) -> BigInt {
        self.a
            .mul(&self.b)
            .mul(&self.a.inverse_sl2())
            .mul(&self.b.inverse_sl2())
            .trace()
    }

    /// `x² + y² + z² − xyz − 2` on the trace triple; equals the commutator trace.
    pub fn fricke_commutator_trace(&self) -> BigInt {
        let (x, y, z) = self.trace_triple();
        &x * &x + &y * &y + &z * &z - &x * &y * &z - 2
    }

    /// Product of the matrices along `word`, with the marking described in the
    /// module docs.
    pub fn evaluate(&self, word: &[Letter], negative: bool) -> Mat2 {
        let b = if negative { self.b.clone() } else { self.b.inverse_sl2() };
        word.iter().fold(Mat2::identity(), |acc, l| match l {
            Letter::A => acc.mul(&self.a),
            Letter::B => acc.mul(&b),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    A,
    B,
}

/// Lower Christoffel word of `[p:q]`: `q` letters `A` and `|p|` letters `B`.
///
/// # Panics
///
/// If `|p| + q` does not fit in `usize`.
pub fn christoffel_word(s: &Slope) -> Vec<Letter> {
    let bs = s.p.abs();
    let n = &bs + &s.q;
    let len = n.to_usize().expect("word length fits in memory");
    let mut prev = BigInt::zero();
    (1..=len)
        .map(|i| {
            let cur = (&bs * BigInt::from(i)).div_floor(&n);
            let letter = if cur > prev { Letter::B } else { Letter::A };
            prev = cur;
            letter
        })
        .collect()
}

/// `|tr|` of the holonomy of the curve of slope `s` in [`HolonomyPair::modular`].
/// Always `3·m` for the Markov number `m` of the curve.
pub fn holonomy_trace(s: &Slope) -> BigUint {
    let pair = HolonomyPair::modular();
    let m = pair.evaluate(&christoffel_word(s), s.p.is_negative());
    m.trace().magnitude().clone()
}

/// Markov number of the curve of slope `s` by Stern–Brocot descent.
///
/// The three trace-3 slopes `0`, `∞` and `−1` cut the projective line into
/// three arcs. Each arc is a Farey interval; descending into it, the mediant
/// of neighbours with Markov numbers `l`, `r` gets `3·l·r − o`, where `o` is
/// the number at the third vertex of the Farey triangle.
pub fn farey_markov(s: &Slope) -> BigUint {
    let one = BigInt::one();
    let (p, q) = (&s.p, &s.q);
    let anchor = |p: i64, q: i64| (BigInt::from(p), BigInt::from(q));
    if (q.is_zero()) || (p.is_zero() && q.is_one()) || (p == &-&one && q.is_one()) {
        return BigUint::one();
    }
    // Arc endpoints as vectors whose sum walks toward the target.
    let (mut left, mut right) = if p.is_positive() {
        (anchor(0, 1), anchor(1, 0))
    } else if p.abs() < *q {
        (anchor(-1, 1), anchor(0, 1))
    } else {
        (anchor(-1, 0), anchor(-1, 1))
    };
    let (mut m_left, mut m_right, mut m_opp) = (BigUint::one(), BigUint::one(), BigUint::one());
    let cross = |u: &(BigInt, BigInt), v: &(BigInt, BigInt)| &u.0 * &v.1 - &u.1 * &v.0;
    let target = (p.clone(), q.clone());
    loop {
        let mid = (&left.0 + &right.0, &left.1 + &right.1);
        let m_mid = BigUint::from(3u32) * &m_left * &m_right - &m_opp;
        if mid == target {
            return m_mid;
        }
        // Target lies between left and mid iff it is on the same side of mid as left.
        let side_t = cross(&mid, &target).signum();
        let side_l = cross(&mid, &left).signum();
        if side_t == side_l {
            m_opp = std::mem::replace(&mut m_right, m_mid);
            right = mid;
        } else {
            m_opp = std::mem::replace(&mut m_left, m_mid);
            left = mid;
        }
    }
}

/// `r = (0 1; −1 −1)` of order 3 in `PGL(2, ℤ)`.
pub fn rotation() -> Mat2 {
    Mat2::from_i64([0, 1, -1, -1])
}

/// `σ = (0 1; 1 0)`, swapping `p` and `q`.
pub fn flip() -> Mat2 {
    Mat2::from_i64([0, 1, 1, 0])
}

/// The six elements `rᵏ` and `σ·rᵏ`, `k = 0, 1, 2`.
pub fn dihedral_group() -> Vec<Mat2> {
    let r = rotation();
    let r2 = r.mul(&r);
    let s = flip();
    vec![
        Mat2::identity(),
        r.clone(),
        r2.clone(),
        s.clone(),
        s.mul(&r),
        s.mul(&r2),
    ]
}

pub fn act(g: &Mat2, s: &Slope) -> Slope {
    let (p, q) = g.apply(&s.p, &s.q);
    Slope::canonicalize(p, q).expect("invertible action keeps vectors nonzero")
}

/// Orbit of `s` under the dihedral group of order six.
pub fn dihedral_orbit(s: &Slope) -> BTreeSet<Slope> {
    dihedral_group().iter().map(|g| act(g, s)).collect()
}

/// Slopes fixed by `g`.
pub fn fixed_slopes<'a>(g: &Mat2, candidates: impl IntoIterator<Item = &'a Slope>) -> Vec<Slope> {
    candidates.into_iter().filter(|s| act(g, s) == **s).cloned().collect()
}
