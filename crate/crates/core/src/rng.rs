//! Counter-based random streams.
//!
//! A stream is a (seed, stream id) pair mapped onto one ChaCha8 keystream:
//! the seed selects the key and the stream id selects the 64-bit nonce, so
//! distinct ids never share output blocks. Replication `r` of sample size
//! `n` always reads stream [`replication_stream_id`]`(n, r)`, which is what
//! makes Monte Carlo output independent of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream id used for replication `rep` at sample size `n`:
/// `splitmix64(splitmix64(n) ^ rep)`.
pub fn replication_stream_id(n: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(n) ^ rep)
}

/// Seed offset for the `index`-th population of a multi-population run.
/// Index 0 keeps the base seed.
pub fn derived_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn for_replication(seed: u64, n: u64, rep: u64) -> Self {
        Self::new(seed, replication_stream_id(n, rep))
    }

    /// Uniform variates on the open interval (0, 1) read from this stream.
    pub fn uniforms(&self) -> OpenUniforms {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        OpenUniforms {
            rng,
            buf: Box::new([0; BLOCK]),
            pos: BLOCK,
        }
    }
}

const BLOCK: usize = 512;
const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Buffered iterator of 53-bit uniforms in (0, 1).
///
/// Each `u64` of the keystream yields `(x >> 11) * 2^-53`; a zero is
/// skipped, so values lie in `[2^-53, 1 - 2^-53]`.
pub struct OpenUniforms {
    rng: ChaCha8Rng,
    buf: Box<[u64; BLOCK]>,
    pos: usize,
}

impl Iterator for OpenUniforms {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        loop {
            if self.pos == BLOCK {
                self.rng.fill(&mut self.buf[..]);
                self.pos = 0;
            }
            let bits = self.buf[self.pos] >> 11;
            self.pos += 1;
            if bits != 0 {
                return Some(bits as f64 * INV_2_53);
            }
        }
    }
}
