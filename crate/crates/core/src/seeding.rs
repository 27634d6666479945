//! Per-item random sources derived from one global seed.
//!
//! Every question or fold gets its own generator keyed by `(seed, item key)`,
//! so results do not depend on the order or thread in which items are
//! processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type ItemRng = ChaCha8Rng;

pub fn item_rng(seed: u64, key: &str) -> ItemRng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((key.len() as u64).to_le_bytes());
    hasher.update(key.as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}
