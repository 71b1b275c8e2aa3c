//! Seeded randomness. Every party and every session draws from its own
//! ChaCha20 stream so runs are reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha20Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Per-session seed: `SHA-256(master_le || index_le)`.
pub fn derive_seed(master: u64, index: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(index.to_le_bytes());
    h.finalize().into()
}

pub fn session_rng(master: u64, index: u64) -> Rng {
    ChaCha20Rng::from_seed(derive_seed(master, index))
}

/// Split off an independent stream labelled `tag`, e.g. one per party.
pub fn fork(rng: &mut Rng, tag: &str) -> Rng {
    use rand::RngCore;
    let mut h = Sha256::new();
    let mut nonce = [0u8; 32];
    rng.fill_bytes(&mut nonce);
    h.update(nonce);
    h.update(tag.as_bytes());
    ChaCha20Rng::from_seed(h.finalize().into())
}
