//! Gray-labelled M-PSK mapping and hard-decision demapping.
//!
//! Constellation point `k` (phase `2πk/M`) carries the label
//! `gray(k) = k ^ (k >> 1)`, read most significant bit first. A `b`-bit group
//! `g` is therefore sent on point `gray⁻¹(g)`: group `0` sits at phase zero,
//! group `1` at `2π/M`, and angular neighbours differ in exactly one bit.

use std::f64::consts::TAU;

use num_complex::Complex;

use crate::bitsource::BitBlock;
use crate::error::{Error, Result};
use crate::scalar::{cis, Scalar};

/// Magnitude below which a received symbol has no usable phase.
pub const ZERO_SYMBOL_THRESHOLD: f64 = 1e-300;

#[inline]
pub fn gray_encode(g: usize) -> usize {
    g ^ (g >> 1)
}

#[inline]
pub fn gray_decode(mut k: usize) -> usize {
    let mut shift = k >> 1;
    while shift != 0 {
        k ^= shift;
        shift >>= 1;
    }
    k
}

/// Returns `log2(order)` if `order` is a power of two `>= 2`.
pub fn bits_per_symbol(order: usize) -> Result<usize> {
    if order >= 2 && order.is_power_of_two() {
        Ok(order.trailing_zeros() as usize)
    } else {
        Err(Error::Order(order))
    }
}

/// Hard decisions plus the number of symbols whose phase was undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demapped {
    pub bits: BitBlock,
    /// Symbols below [`ZERO_SYMBOL_THRESHOLD`], decoded as constellation index 0.
    pub zero_symbols: usize,
}

#[derive(Clone, Debug)]
pub struct Constellation<T: Scalar> {
    order: usize,
    bits_per_symbol: usize,
    /// Indexed by constellation position `k`, not by bit group.
    points: Vec<Complex<T>>,
}

impl<T: Scalar> Constellation<T> {
    pub fn new(order: usize) -> Result<Self> {
        let bits_per_symbol = bits_per_symbol(order)?;
        let points = (0..order).map(|k| cis(TAU * k as f64 / order as f64)).collect();
        Ok(Self {
            order,
            bits_per_symbol,
            points,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Points in angular order, `points()[k]` at phase `2πk/M`.
    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    /// The point carrying bit group `g`.
    pub fn point_for_group(&self, g: usize) -> Complex<T> {
        self.points[gray_decode(g)]
    }

    pub fn map(&self, bits: &BitBlock) -> Result<Vec<Complex<T>>> {
        let b = self.bits_per_symbol;
        if !bits.len().is_multiple_of(b) {
            return Err(Error::Length {
                len: bits.len(),
                group: b,
            });
        }
        Ok(bits
            .as_slice()
            .chunks_exact(b)
            .map(|chunk| {
                let g = chunk.iter().fold(0usize, |acc, &bit| (acc << 1) | bit as usize);
                self.point_for_group(g)
            })
            .collect())
    }

    /// Constellation index with the nearest phase; exact sector boundaries
    /// resolve to the lower index. `None` when the phase is undefined.
    #[inline]
    pub fn decide(&self, symbol: Complex<T>) -> Option<usize> {
        if symbol.norm().as_f64() < ZERO_SYMBOL_THRESHOLD {
            return None;
        }
        let mut phase = symbol.im.atan2(symbol.re).as_f64();
        if phase < 0.0 {
            phase += TAU;
        }
        let t = phase * self.order as f64 / TAU;
        let k = (t - 0.5).ceil() as i64;
        Some(k.rem_euclid(self.order as i64) as usize)
    }

    pub fn demap(&self, symbols: &[Complex<T>]) -> Demapped {
        let mut bits = BitBlock::default();
        let mut zero_symbols = 0;
        for &s in symbols {
            let k = self.decide(s).unwrap_or_else(|| {
                zero_symbols += 1;
                0
            });
            bits.push_group(gray_encode(k), self.bits_per_symbol);
        }
        Demapped { bits, zero_symbols }
    }
}

pub fn map_psk<T: Scalar>(bits: &BitBlock, order: usize) -> Result<Vec<Complex<T>>> {
    Constellation::new(order)?.map(bits)
}

pub fn demap_psk<T: Scalar>(symbols: &[Complex<T>], order: usize) -> Result<Demapped> {
    Ok(Constellation::new(order)?.demap(symbols))
}
