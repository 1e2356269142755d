//! Reproducible random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by
//! a 64-bit master seed and a 64-bit domain tag, positioned on a 64-bit
//! stream id. The stream-split rule is: the key is the 32-byte seed
//! `seed_le || domain_le || 0^16`, the stream id is the index of the unit
//! of work (frame, population block, ...). Two draws with different
//! `(seed, domain, stream)` triples never share keystream, and the value of
//! a draw never depends on how work is scheduled across threads.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Domain tags used by the crate's own consumers.
pub mod domain {
    pub const CODE_CONSTRUCTION: u64 = 0x636f_6465;
    pub const BP_DENSITY_EVOLUTION: u64 = 0x6270_6465;
    /// Simulation frames use `SIM_FRAMES + grid_index`.
    pub const SIM_FRAMES: u64 = 0x7369_6d00_0000_0000;
}

/// The generator for `(seed, domain, stream)`.
pub fn stream_rng(seed: u64, domain: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Shorthand for the default domain (0) and stream 0.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 0, 0)
}
