//! Markov triples, Lagrange numbers and the series `Σ (3 − Lₙ)`.
//!
//! The crate is split along the two sides of the Markov/Lagrange story:
//!
//! - the arithmetic side: [`markov`] (triples and Vieta moves), [`enumeration`]
//!   (Markov numbers in increasing order, with checkpoints) and [`muc`]
//!   (direct uniqueness checks);
//! - the geometric side: [`slope`] (simple closed curves on the modular torus,
//!   holonomy traces and the dihedral symmetry group);
//! - the numerics: [`precision`] (arbitrary-precision reals) and [`series`]
//!   (Lagrange gaps, partial sums, remainders, tail model, McShane sums).
//!
//! ```
//! use lagrange_core::enumeration::MarkovStream;
//!
//! let first: Vec<u64> = MarkovStream::new()
//!     .take(6)
//!     .map(|e| e.max.try_into().unwrap())
//!     .collect();
//! assert_eq!(first, [1, 2, 5, 13, 29, 34]);
//! ```

pub mod checkpoint;
pub mod enumeration;
pub mod error;
pub mod markov;
pub mod muc;
pub mod precision;
pub mod series;
pub mod slope;

pub use enumeration::{Emission, MarkovStream};
pub use error::{Error, Result};
pub use markov::{Coordinate, MarkovTriple};
pub use muc::{check_muc, MucLimit, MucReport};
pub use precision::PrecisionReal;
pub use series::SeriesReport;
pub use slope::{HolonomyPair, Slope};
