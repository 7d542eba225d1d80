//! Library for augmenting graph connectivity from 1 to 2 via node Steiner
//! tree instances: problem reductions, an LP-based iterative randomized
//! rounding solver, witness-tree analysis of solution quality, instance
//! generators, and brute-force oracles for verification.

pub mod error;
pub mod graph;
pub mod harmonic;
pub mod instance;
pub mod instances;
pub mod lp;
pub mod maxflow;
pub mod reductions;
pub mod rng;
pub mod rounding;
pub mod simplex;
pub mod steiner;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
