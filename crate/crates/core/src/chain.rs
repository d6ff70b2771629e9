//! The end-to-end link for one configuration.
//!
//! ```text
//! bits → map → S/P → IDFT → +CP → P/S → channel → split → −CP → DFT → ZF → demap
//! ```

use num_complex::Complex;

use crate::bitsource::{BitBlock, RngStream};
use crate::channel::{apply_channel, realize_channel, ChannelKind, ChannelSpec};
use crate::equalizer::{channel_freq_response, zero_forcing, FreqResponse};
use crate::error::Result;
use crate::framing::{
    parallel_to_serial, remove_cyclic_prefix, serial_to_parallel, split_frames, OfdmConfig, OfdmFrame,
};
use crate::modem::Constellation;
use crate::scalar::Scalar;
use crate::transform::{FftPlan, SpectralBlock};

/// A transmitted burst of OFDM symbols.
#[derive(Clone, Debug)]
pub struct TxBurst<T: Scalar> {
    pub samples: Vec<Complex<T>>,
    pub frames: usize,
    /// Data-carrying subcarrier slots; the tail of the last frame is padding.
    pub used: usize,
}

/// Channel knowledge handed to the receiver.
#[derive(Clone, Debug)]
pub enum ChannelState<T: Scalar> {
    /// One response valid for the whole burst.
    Shared(FreqResponse<T>),
    /// One response per OFDM symbol.
    PerFrame(Vec<FreqResponse<T>>),
}

impl<T: Scalar> ChannelState<T> {
    pub fn for_frame(&self, i: usize) -> &FreqResponse<T> {
        match self {
            ChannelState::Shared(h) => h,
            ChannelState::PerFrame(hs) => &hs[i],
        }
    }
}

#[derive(Clone, Debug)]
pub struct RxBurst {
    pub bits: BitBlock,
    pub zf_clamps: u64,
    pub zero_symbols: usize,
}

#[derive(Clone, Debug)]
pub struct Link<T: Scalar> {
    config: OfdmConfig,
    plan: FftPlan<T>,
    constellation: Constellation<T>,
}

impl<T: Scalar> Link<T> {
    pub fn new(config: OfdmConfig) -> Result<Self> {
        Ok(Self {
            plan: FftPlan::new(config.fft_size())?,
            constellation: Constellation::new(config.modulation_order())?,
            config,
        })
    }

    pub fn config(&self) -> &OfdmConfig {
        &self.config
    }

    pub fn constellation(&self) -> &Constellation<T> {
        &self.constellation
    }

    /// Modulated time-domain frames for `bits` (length a multiple of log2 M).
    pub fn frames(&self, bits: &BitBlock) -> Result<(Vec<OfdmFrame<T>>, usize)> {
        let symbols = self.constellation.map(bits)?;
        let grid = serial_to_parallel(&symbols, self.config.fft_size());
        let frames = grid
            .rows
            .into_iter()
            .map(|mut row| {
                self.plan.inverse(&mut row)?;
                OfdmFrame::new(SpectralBlock::time(row), self.config.cp_len())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((frames, grid.used))
    }

    pub fn transmit(&self, bits: &BitBlock) -> Result<TxBurst<T>> {
        let (frames, used) = self.frames(bits)?;
        Ok(TxBurst {
            samples: parallel_to_serial(&frames),
            frames: frames.len(),
            used,
        })
    }

    /// Frequency-domain payload of every received frame, before equalization.
    pub fn demodulate(&self, rx: &[Complex<T>]) -> Result<Vec<Vec<Complex<T>>>> {
        let (n, l) = (self.config.fft_size(), self.config.cp_len());
        split_frames(rx, n, l)?
            .into_iter()
            .map(|frame| {
                let mut payload = remove_cyclic_prefix(frame, n, l)?;
                self.plan.forward(&mut payload)?;
                Ok(payload)
            })
            .collect()
    }

    /// Recovers the first `used` symbols' bits, equalizing when `state` is given.
    pub fn receive(&self, rx: &[Complex<T>], state: Option<&ChannelState<T>>, used: usize) -> Result<RxBurst> {
        let mut zf_clamps = 0;
        let mut symbols = Vec::with_capacity(used);
        for (i, payload) in self.demodulate(rx)?.into_iter().enumerate() {
            let payload = match state {
                Some(s) => {
                    let eq = zero_forcing(&payload, s.for_frame(i));
                    zf_clamps += eq.zf_clamps;
                    eq.symbols
                }
                None => payload,
            };
            symbols.extend(payload);
        }
        symbols.truncate(used);
        let demapped = self.constellation.demap(&symbols);
        Ok(RxBurst {
            bits: demapped.bits,
            zf_clamps,
            zero_symbols: demapped.zero_symbols,
        })
    }

    /// Draws the channel for one burst and passes the burst through it.
    ///
    /// Flat fading gets a fresh gain per OFDM symbol; TDL taps are held over
    /// the whole burst, so each frame's prefix absorbs the previous frame's
    /// echo.
    pub fn propagate(
        &self,
        burst: &TxBurst<T>,
        spec: &ChannelSpec,
        noise_variance: f64,
        stream: &mut RngStream,
    ) -> (Vec<Complex<T>>, ChannelState<T>) {
        let n = self.config.fft_size();
        match spec.kind() {
            ChannelKind::FlatBlockFading => {
                let mut out = Vec::with_capacity(burst.samples.len());
                let mut responses = Vec::with_capacity(burst.frames);
                for frame in burst.samples.chunks(self.config.frame_len()) {
                    let real = realize_channel(spec, noise_variance, stream);
                    out.extend(apply_channel(frame, &real, stream));
                    responses.push(channel_freq_response(&real, n));
                }
                (out, ChannelState::PerFrame(responses))
            }
            ChannelKind::Awgn | ChannelKind::TappedDelayLine => {
                let real = realize_channel(spec, noise_variance, stream);
                let out = apply_channel(&burst.samples, &real, stream);
                (out, ChannelState::Shared(channel_freq_response(&real, n)))
            }
        }
    }
}
