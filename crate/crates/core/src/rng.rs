//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, stream, index)`. The ChaCha key is
//! built from the seed and the stream id, and the index selects the ChaCha
//! stream, so a draw never depends on how many values other workers have
//! consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Well-known stream ids used by the experiments.
pub mod streams {
    pub const MOTIONS: u64 = 1;
    pub const TORUS_SAMPLES: u64 = 2;
    pub const GROUP_SAMPLES: u64 = 3;
    pub const TEST_POINTS: u64 = 4;
    pub const NOISE: u64 = 5;
}

pub fn substream(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(b"lrl-rng1");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
