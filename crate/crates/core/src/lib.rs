//! A seedable workbench for two-party protocols built on BB84 conjugate
//! coding: commitments, the commit-and-open compiler, oblivious transfer,
//! password identification, coin-flipping amplification and
//! zero-knowledge proofs of knowledge.

pub mod bits;
pub mod coinflip;
pub mod error;
pub mod fieldmath;
pub mod harness;
pub mod hashing;
pub mod mixedcommit;
pub mod protocols;
pub mod qchannel;
pub mod rng;
pub mod session;
pub mod ssscommit;
pub mod stats;
pub mod zkpk;

pub use error::{AbortReason, Error, Result};
