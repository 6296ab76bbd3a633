//! Keyed pseudorandom streams.
//!
//! Every random object (a codeword, a trial's host and noise) draws from
//! its own ChaCha8 stream whose key is the SHA-256 digest of the run seed,
//! a role label and the object's context. Codewords are therefore pure
//! functions of their indices and can be generated lazily, in any order,
//! from any thread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::typicality::{cumulative, sample_cdf};

/// Stream for `(seed, role, ctx, seq)`; `seq` is typically a host sequence.
pub fn keyed_rng(seed: u64, role: &str, ctx: &[u64], seq: &[usize]) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((role.len() as u64).to_le_bytes());
    h.update(role.as_bytes());
    h.update((ctx.len() as u64).to_le_bytes());
    for c in ctx {
        h.update(c.to_le_bytes());
    }
    h.update((seq.len() as u64).to_le_bytes());
    for &s in seq {
        h.update((s as u64).to_le_bytes());
    }
    let digest: [u8; 32] = h.finalize().into();
    ChaCha8Rng::from_seed(digest)
}

/// Inverse-CDF sampler for a conditional table with one row per input
/// symbol combination.
#[derive(Clone, Debug)]
pub struct CondSampler {
    cdfs: Vec<Vec<f64>>,
}

impl CondSampler {
    /// `rows[r]` is a pmf over the output alphabet.
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        CondSampler {
            cdfs: rows.iter().map(|r| cumulative(r)).collect(),
        }
    }

    pub fn sample<R: Rng>(&self, row: usize, rng: &mut R) -> usize {
        sample_cdf(&self.cdfs[row], rng.random::<f64>())
    }

    pub fn rows(&self) -> usize {
        self.cdfs.len()
    }
}
