//! Deterministic random streams.
//!
//! All randomness flows through ChaCha8 generators keyed by the user seed and
//! a stream id built from a [`Purpose`] tag and an index (replicate, draw, …).
//! ChaCha is counter based, so each stream is independent of how many numbers
//! other streams consumed and of the order in which work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// What a stream is used for. The discriminant occupies the top byte of the
/// ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Design = 1,
    SignalPlacement = 2,
    Noise = 3,
    MonteCarloDraw = 4,
    Genotype = 5,
    LabEffects = 6,
    DominantEffects = 7,
    PowerIteration = 8,
}

const INDEX_BITS: u32 = 56;

/// Generator for `(seed, purpose, index)`; `index` must fit in 56 bits.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    debug_assert!(index < (1u64 << INDEX_BITS));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << INDEX_BITS) | (index & ((1u64 << INDEX_BITS) - 1)));
    rng
}

/// Packs a two-level index such as `(replicate, draw)` into one stream index.
pub fn pair_index(outer: u64, inner: u64) -> u64 {
    debug_assert!(outer < (1 << 24) && inner < (1 << 32));
    (outer << 32) | inner
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Laplace draw with the given scale, by inversion of a uniform on (-½, ½).
pub fn laplace<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    if u == -0.5 {
        return laplace(rng, scale);
    }
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}
