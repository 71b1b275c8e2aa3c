//! BB84-type protocols: preparation, the commit-and-open compiler,
//! oblivious transfer and password-based identification.

pub mod bb84;
pub mod id;
pub mod idplus;
pub mod ot;

pub use bb84::{
    compile_verification, run_bb84_preparation, AlicePrep, BobPrep, BobStrategy, CompilerConfig, QubitTap, Verification,
};
pub use id::{id_run, run_compiled_id, run_id, Code, IdOutcome};
pub use idplus::{id_plus_run, IdPlusKeys, IdPlusOutcome, SyndromeFamily};
pub use ot::{ot_postprocess, ot_storage_attack, run_compiled_ot, run_ot, OtInputs, OtOutcome};

use crate::error::{AbortReason, Error};
use crate::qchannel::Basis;
use crate::rng::{fork, Rng};
use crate::session::Schedule;

/// Independent randomness for each party and for the channel.
#[derive(Clone)]
pub struct PartyRngs {
    pub alice: Rng,
    pub bob: Rng,
    pub world: Rng,
}

impl PartyRngs {
    pub fn new(rng: &mut Rng) -> Self {
        PartyRngs { alice: fork(rng, "alice"), bob: fork(rng, "bob"), world: fork(rng, "world") }
    }
}

pub fn basis_xor(a: Basis, b: Basis) -> Basis {
    Basis::from_bit(a.bit() ^ b.bit())
}

pub(crate) fn malformed<E>(_: E) -> Error {
    Error::Abort(AbortReason::Malformed)
}

/// Preparation, verification and then the post-processing `post`, whose
/// first message is `first`.
pub fn compiled_schedule(post: &Schedule, first: &'static str) -> Schedule {
    bb84::schedule().merge(&bb84::compiler_schedule()).merge(post).requires("cmp-open", first)
}

/// Check that `idx` is a strictly increasing list of positions below `n`.
pub(crate) fn check_index_set(idx: &[usize], n: usize) -> Result<(), Error> {
    if idx.windows(2).all(|w| w[0] < w[1]) && idx.last().is_none_or(|&i| i < n) {
        Ok(())
    } else {
        Err(AbortReason::Malformed.into())
    }
}
