//! Naor's generator-based bit commitment and the keyed LWE commitment
//! that is hiding or binding depending on how its key was made.

mod lwe;
mod naor;

pub use lwe::{
    binding_key_string, commit_bits, commit_with, gen_binding, gen_hiding, is_prime, key_from_string, lwe_commit,
    lwe_extract, lwe_verify, CommitKey, KeyMode, LweCommitment, LweOpening, LweParams, SEED_BITS,
};
pub use naor::{
    equivocation_probability, naor_commit, naor_verify, prg, Extracted, NaorParams, NaorTable, MAX_ENUMERABLE,
};
