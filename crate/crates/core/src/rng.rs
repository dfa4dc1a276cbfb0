//! Seed expansion into independent, addressable random substreams.
//!
//! Every random quantity in a drop is keyed by what it describes (purpose,
//! cell, user, link) rather than by the order in which it is drawn, so adding
//! users or PRBs never perturbs draws that already existed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    DropSeed = 1,
    Placement = 2,
    Shadowing = 3,
    Fading = 4,
    Ordering = 5,
    Instance = 6,
}

/// Opens the substream identified by `(purpose, cell, user, extra)`.
///
/// `cell` uses 8 bits, `user` and `extra` 24 bits each.
pub fn substream(seed: u64, purpose: Purpose, cell: usize, user: usize, extra: usize) -> ChaCha8Rng {
    debug_assert!(cell < 1 << 8 && user < 1 << 24 && extra < 1 << 24);
    let stream = (purpose as u64) << 56
        | ((cell as u64) & 0xFF) << 48
        | ((user as u64) & 0xFF_FFFF) << 24
        | (extra as u64) & 0xFF_FFFF;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of the `drop_index`-th Monte-Carlo drop under `master_seed`.
pub fn drop_seed(master_seed: u64, drop_index: usize) -> u64 {
    substream(master_seed, Purpose::DropSeed, 0, 0, drop_index).next_u64()
}
