//! Bernoulli bond percolation on two-dimensional lattice slabs
//! Z² × {0,…,k−1}^{d−2}.
//!
//! The crate provides deterministic counter-seeded sampling, cluster and
//! path queries, a catalog of crossing and proximity events on strips,
//! Monte Carlo estimation with Wilson intervals, exact small-instance
//! oracles, and a harness that evaluates glueing and
//! Russo-Seymour-Welsh-style crossing inequalities at desk scale.

pub mod bitset;
pub mod connectivity;
pub mod error;
pub mod estimation;
pub mod events;
pub mod geometry;
pub mod harness;
pub mod oracle;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
