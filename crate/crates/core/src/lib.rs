//! Small vertex sets spanning many triples `(a, b, ab)` of a finite group,
//! and the planar extremal function that governs how small they can be.
//!
//! The crate covers four connected pieces:
//!
//! * [`lattice`]: planar point sets, their row/column/anti-diagonal profile
//!   `g(P)`, edge boundaries in the triangular lattice, hexagonal balls and a
//!   nested family of boundary minimisers with a brute-force oracle.
//! * [`extremal`]: the diagonal profile of a grid, `h(a, b, ℓ)`, `h(m)` and the
//!   exact value of `g(k)` obtained by inverting `h`.
//! * [`compression`]: exhaustive certification that arbitrary row/column sets
//!   never cover more points with `ℓ` diagonals than intervals do.
//! * [`groups`], [`triples`] and [`witness`]: finite groups, triple systems
//!   `(a, b, ab)`, span counting and explicit vertex sets spanning `k` triples.

pub mod compression;
pub mod config;
pub mod error;
pub mod extremal;
pub mod groups;
pub mod lattice;
pub mod svg;
pub mod triples;
pub mod witness;

pub use config::{Budget, OutputFormat, RunConfig};
pub use error::{Error, Result};
pub use groups::{Elem, GroupSpec};
pub use lattice::{Point, PointSet};
pub use triples::TripleSystem;
