//! Fringe-tree statistics for random binary search trees and random
//! recursive trees.
//!
//! The crate is `no_std` (with `alloc`). It holds the tree types, the
//! uniform-stamp representation, closed-form exact moments in rational
//! arithmetic, the explicit couplings, and a reproducible stream RNG.
//! Enumeration oracles, Monte Carlo drivers and the command line live in
//! the `fringe-lab` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod couplings;
pub mod devroye;
pub mod error;
pub mod exact;
pub mod model;
pub mod perm;
pub mod random;
pub mod rational;
pub mod rng;
pub mod stat;
pub mod trees;

pub use error::{Error, Result};
pub use model::Model;
pub use rational::{rat, Rational, Scalar, Value};
