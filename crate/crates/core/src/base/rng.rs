use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Label used to derive a child stream.
#[derive(Clone, Copy, Debug)]
pub enum StreamLabel<'a> {
    Index(u64),
    Name(&'a str),
}

impl From<u64> for StreamLabel<'_> {
    fn from(i: u64) -> Self {
        StreamLabel::Index(i)
    }
}

impl From<usize> for StreamLabel<'_> {
    fn from(i: usize) -> Self {
        StreamLabel::Index(i as u64)
    }
}

impl<'a> From<&'a str> for StreamLabel<'a> {
    fn from(s: &'a str) -> Self {
        StreamLabel::Name(s)
    }
}

/// Seeded ChaCha8 stream with hierarchical, position-independent derivation.
///
/// A child's seed is the SHA-256 of the parent seed and the label, so
/// `derive` never depends on how many words the parent has produced.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: [u8; 32],
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"cleanlabel-root");
        h.update(seed.to_le_bytes());
        Self::from_key(finish(h))
    }

    fn from_key(seed: [u8; 32]) -> Self {
        RngStream { seed, rng: ChaCha8Rng::from_seed(seed) }
    }

    pub fn derive<'a>(&self, label: impl Into<StreamLabel<'a>>) -> RngStream {
        let mut h = Sha256::new();
        h.update(self.seed);
        match label.into() {
            StreamLabel::Index(i) => {
                h.update([0u8]);
                h.update(i.to_le_bytes());
            }
            StreamLabel::Name(s) => {
                h.update([1u8]);
                h.update((s.len() as u64).to_le_bytes());
                h.update(s.as_bytes());
            }
        }
        Self::from_key(finish(h))
    }

    /// Convenience for `derive(a).derive(b)`.
    pub fn derive2<'a, 'b>(&self, a: impl Into<StreamLabel<'a>>, b: impl Into<StreamLabel<'b>>) -> RngStream {
        self.derive(a).derive(b)
    }

    /// The 32-byte key identifying this stream.
    pub fn key(&self) -> [u8; 32] {
        self.seed
    }
}

fn finish(h: Sha256) -> [u8; 32] {
    let mut out = [0u8; 32];
    out.copy_from_slice(&h.finalize());
    out
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
