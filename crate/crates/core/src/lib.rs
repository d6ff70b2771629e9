//! Deterministic OFDM baseband link simulator.
//!
//! The transmit chain maps bits onto Gray-coded M-PSK points, lays them out
//! on `N` subcarriers, takes a unitary IDFT and prepends a cyclic prefix of
//! `L = G·N` samples. The channel is AWGN, block Rayleigh fading or a
//! Rayleigh tapped delay line. The receiver strips the prefix, takes the DFT,
//! applies one-tap zero-forcing with exact channel knowledge and demaps.
//!
//! The DSP kernels are generic over [`Scalar`] (`f32` or `f64`); the Monte
//! Carlo runner and the aliases below use `f64`.

pub mod bitsource;
pub mod chain;
pub mod channel;
pub mod config;
pub mod equalizer;
mod error;
pub mod framing;
pub mod metrics;
pub mod modem;
pub mod plot;
pub mod records;
mod scalar;
pub mod sweep;
pub mod transform;
pub mod validate;

pub use bitsource::{make_stream, BitBlock, RngStream, DEFAULT_SEED};
pub use channel::{ChannelKind, ChannelSpec};
pub use error::{Error, Result};
pub use framing::{CpFraction, OfdmConfig};
pub use metrics::BerRecord;
pub use scalar::{cis, Scalar};
pub use sweep::{run_cell, run_grid, run_grid_with_workers, GridOutcome, RunSettings, SweepGrid};

pub use num_complex::Complex;

/// The universal signal unit: a double-precision complex sample.
pub type ComplexSample = Complex<f64>;
pub type Link = chain::Link<f64>;
pub type Constellation = modem::Constellation<f64>;
pub type FftPlan = transform::FftPlan<f64>;
pub type SpectralBlock = transform::SpectralBlock<f64>;
pub type OfdmFrame = framing::OfdmFrame<f64>;
pub type ChannelRealization = channel::ChannelRealization<f64>;
pub type FreqResponse = equalizer::FreqResponse<f64>;
