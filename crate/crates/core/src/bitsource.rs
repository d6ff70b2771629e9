//! Seedable bit and Gaussian sources with independent per-cell substreams.
//!
//! Every sweep cell owns an [`RngStream`] derived from `(origin_seed, cell_id)`:
//!
//! ```text
//! key   = origin_seed ^ cell_id.rotate_left(32)
//! s0    = splitmix64_mix(key)
//! state = [splitmix64(s0) for four successive SplitMix64 steps]
//! ```
//!
//! The 256-bit state then drives xoshiro256++. Gaussian variates use the
//! Box-Muller transform. Results are reproducible within this implementation
//! only; nothing here is meant to match other simulators bit for bit.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Master seed used when none is given on the command line.
pub const DEFAULT_SEED: u64 = 0x0FDA_0FDA_0FDA_0FDA;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer (a bijective 64-bit avalanche mixer).
#[inline]
pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed word for the substream of `cell_id` under `origin_seed`.
pub fn derive_seed(origin_seed: u64, cell_id: u64) -> u64 {
    splitmix64_mix(origin_seed ^ cell_id.rotate_left(32))
}

/// A deterministic random stream owned by exactly one sweep cell.
#[derive(Clone, Debug)]
pub struct RngStream {
    rng: Xoshiro256PlusPlus,
    origin_seed: u64,
    cell_id: u64,
}

impl RngStream {
    pub fn new(origin_seed: u64, cell_id: u64) -> Self {
        let mut sm = derive_seed(origin_seed, cell_id);
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            sm = sm.wrapping_add(GOLDEN_GAMMA);
            chunk.copy_from_slice(&splitmix64_mix(sm).to_le_bytes());
        }
        Self {
            rng: Xoshiro256PlusPlus::from_seed(seed),
            origin_seed,
            cell_id,
        }
    }

    pub fn origin_seed(&self) -> u64 {
        self.origin_seed
    }

    pub fn cell_id(&self) -> u64 {
        self.cell_id
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn draw_bits(&mut self, count: usize) -> BitBlock {
        let mut bits = Vec::with_capacity(count);
        while bits.len() < count {
            let word = self.next_u64();
            let take = (count - bits.len()).min(64);
            bits.extend((0..take).map(|i| ((word >> i) & 1) as u8));
        }
        BitBlock { bits }
    }

    /// Two independent N(0, 1) variates (Box-Muller).
    #[inline]
    pub fn draw_gaussian_pair(&mut self) -> (f64, f64) {
        // 1 - u lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (r * c, r * s)
    }
}

pub fn make_stream(origin_seed: u64, cell_id: u64) -> RngStream {
    RngStream::new(origin_seed, cell_id)
}

pub fn draw_bits(stream: &mut RngStream, count: usize) -> BitBlock {
    stream.draw_bits(count)
}

pub fn draw_gaussian_pair(stream: &mut RngStream) -> (f64, f64) {
    stream.draw_gaussian_pair()
}

/// A sequence of hard bits, each stored as a `0` or `1` byte.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitBlock {
    bits: Vec<u8>,
}

impl BitBlock {
    /// Builds a block from `0`/`1` values; any other value is rejected.
    pub fn from_bits(bits: Vec<u8>) -> Option<Self> {
        bits.iter().all(|&b| b <= 1).then_some(Self { bits })
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub(crate) fn push_group(&mut self, value: usize, width: usize) {
        self.bits.extend((0..width).rev().map(|i| ((value >> i) & 1) as u8));
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| b ^ 1).collect(),
        }
    }
}

impl std::ops::Index<usize> for BitBlock {
    type Output = u8;

    fn index(&self, i: usize) -> &u8 {
        &self.bits[i]
    }
}
