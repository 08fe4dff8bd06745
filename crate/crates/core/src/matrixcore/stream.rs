use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Generator behind every [`SeededStream`]: ChaCha8, a counter-based
/// cipher generator, so output is platform independent.
pub type StreamRng = ChaCha8Rng;

/// A reproducible source of randomness named by `(seed, stream_index)`.
///
/// The pair is the ChaCha key. [`SeededStream::rng`] uses cipher stream 0;
/// [`SeededStream::trial_rng`] gives trial `t` cipher stream `t + 1`, so
/// parallel trials never share a stream and never depend on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    fn key(&self) -> [u8; 32] {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream_index.to_le_bytes());
        key[16..].copy_from_slice(b"cswiretap-stream");
        key
    }

    pub fn rng(&self) -> StreamRng {
        StreamRng::from_seed(self.key())
    }

    /// Generator for trial `t` of a Monte Carlo run driven by this stream.
    pub fn trial_rng(&self, t: u64) -> StreamRng {
        let mut rng = self.rng();
        rng.set_stream(t.wrapping_add(1));
        rng
    }

    /// An independent stream for sub-task `index` (e.g. one matrix of a pair).
    pub fn child(&self, index: u64) -> SeededStream {
        SeededStream {
            seed: splitmix64(self.seed ^ splitmix64(self.stream_index ^ 0xA076_1D64_78BD_642F)),
            stream_index: index,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
