//! One-tap zero-forcing equalization with genie channel knowledge.
//!
//! The response of a tap vector is the plain (non-unitary) DFT of the
//! zero-padded taps, `H[k] = Σ_l h_l·exp(−i·2π·kl/N)`. With that convention a
//! prefix at least as long as the channel memory turns the channel into
//! `Y[k] = H[k]·X[k]` under the unitary transforms in [`crate::transform`].

use std::f64::consts::TAU;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::channel::{ChannelKind, ChannelRealization};
use crate::scalar::{cis, Scalar};

/// `|H[k]|` below this is treated as a spectral null.
pub const ZF_EPSILON: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FreqResponse<T: Scalar>(pub Vec<Complex<T>>);

impl<T: Scalar> FreqResponse<T> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.0
    }
}

/// Per-subcarrier response of a realization. AWGN realizations yield all ones.
pub fn channel_freq_response<T: Scalar>(real: &ChannelRealization<T>, fft_size: usize) -> FreqResponse<T> {
    let n = fft_size;
    let h = match real.kind() {
        ChannelKind::Awgn => vec![Complex::one(); n],
        ChannelKind::FlatBlockFading => vec![real.gains()[0]; n],
        ChannelKind::TappedDelayLine => (0..n)
            .map(|k| {
                real.gains().iter().enumerate().fold(Complex::zero(), |acc, (l, tap)| {
                    acc + *tap * cis::<T>(-TAU * ((k * l) % n) as f64 / n as f64)
                })
            })
            .collect(),
    };
    FreqResponse(h)
}

/// Equalizer output plus the number of subcarriers zeroed as spectral nulls.
#[derive(Clone, Debug, PartialEq)]
pub struct Equalized<T: Scalar> {
    pub symbols: Vec<Complex<T>>,
    pub zf_clamps: u64,
}

pub fn zero_forcing<T: Scalar>(rx_freq: &[Complex<T>], response: &FreqResponse<T>) -> Equalized<T> {
    assert_eq!(rx_freq.len(), response.len(), "response length must match the FFT size");
    let eps = T::lit(ZF_EPSILON);
    let mut zf_clamps = 0;
    let symbols = rx_freq
        .iter()
        .zip(response.as_slice())
        .map(|(y, h)| {
            if h.norm() < eps {
                zf_clamps += 1;
                Complex::zero()
            } else {
                y / h
            }
        })
        .collect();
    Equalized { symbols, zf_clamps }
}
