//! OFDM symbol assembly: serial/parallel reshaping and cyclic prefix handling.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modem::bits_per_symbol;
use crate::scalar::Scalar;
use crate::transform::SpectralBlock;

/// FFT sizes of the default sweep grid.
pub const GRID_FFT_SIZES: [usize; 4] = [64, 128, 256, 512];

/// Cyclic prefix length as an exact fraction of the FFT size.
///
/// Serialized as `"num/den"` in lowest terms (`"0"` for no prefix).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CpFraction(Ratio<u32>);

impl CpFraction {
    pub const NONE: CpFraction = CpFraction(Ratio::new_raw(0, 1));

    pub fn new(numer: u32, denom: u32) -> Result<Self> {
        if denom == 0 {
            return Err(Error::config("cyclic prefix fraction has zero denominator"));
        }
        let r = Ratio::new(numer, denom);
        if r > Ratio::from_integer(1) {
            return Err(Error::config(format!("cyclic prefix fraction {r} exceeds 1")));
        }
        Ok(Self(r))
    }

    pub fn numer(&self) -> u32 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u32 {
        *self.0.denom()
    }

    /// `G·N` if it is an integer.
    pub fn cp_len(&self, fft_size: usize) -> Result<usize> {
        let scaled = fft_size as u64 * self.numer() as u64;
        if !scaled.is_multiple_of(self.denom() as u64) {
            return Err(Error::NonIntegerCp {
                fraction: self.to_string(),
                fft_size,
            });
        }
        Ok((scaled / self.denom() as u64) as usize)
    }

    pub fn as_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Table-1 style set used by the default sweep: 1/2, 1/4, 1/16, 1/32.
    pub fn grid_default() -> Vec<CpFraction> {
        [2, 4, 16, 32].map(|d| CpFraction(Ratio::new(1, d))).to_vec()
    }

    /// Union of every fraction the simulator is exercised with.
    pub fn grid_union() -> Vec<CpFraction> {
        [2, 4, 8, 16, 32].map(|d| CpFraction(Ratio::new(1, d))).to_vec()
    }
}

impl fmt::Display for CpFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.numer() == 0 {
            f.write_str("0")
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for CpFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config(format!("cannot parse cyclic prefix fraction {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = n.trim().parse().map_err(|_| bad())?;
                let d = d.trim().parse().map_err(|_| bad())?;
                CpFraction::new(n, d)
            }
            None => CpFraction::new(s.parse().map_err(|_| bad())?, 1),
        }
    }
}

impl Serialize for CpFraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CpFraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Physical-layer parameters of one sweep cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OfdmConfig {
    fft_size: usize,
    cp_fraction: CpFraction,
    cp_len: usize,
    modulation_order: usize,
    /// Information bits per burst (one channel realization).
    bit_budget: usize,
}

impl OfdmConfig {
    /// Symbols per burst when no bit budget is given.
    pub const DEFAULT_SYMBOLS_PER_BURST: usize = 1000;

    pub fn new(fft_size: usize, cp_fraction: CpFraction, modulation_order: usize) -> Result<Self> {
        if fft_size < 2 || !fft_size.is_power_of_two() {
            return Err(Error::Size(fft_size));
        }
        let b = bits_per_symbol(modulation_order)?;
        let cp_len = cp_fraction.cp_len(fft_size)?;
        if cp_len > fft_size {
            return Err(Error::CpLength { cp_len, fft_size });
        }
        Ok(Self {
            fft_size,
            cp_fraction,
            cp_len,
            modulation_order,
            bit_budget: Self::DEFAULT_SYMBOLS_PER_BURST * b,
        })
    }

    pub fn with_bit_budget(mut self, bits: usize) -> Result<Self> {
        let b = self.bits_per_symbol();
        if bits == 0 || !bits.is_multiple_of(b) {
            return Err(Error::config(format!(
                "bit budget {bits} must be a positive multiple of {b} bits per symbol"
            )));
        }
        self.bit_budget = bits;
        Ok(self)
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn cp_fraction(&self) -> CpFraction {
        self.cp_fraction
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    pub fn modulation_order(&self) -> usize {
        self.modulation_order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation_order.trailing_zeros() as usize
    }

    pub fn bit_budget(&self) -> usize {
        self.bit_budget
    }

    /// Samples on the air per OFDM symbol, `N + L`.
    pub fn frame_len(&self) -> usize {
        self.fft_size + self.cp_len
    }
}

/// Symbols laid out on subcarriers, one row per OFDM symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct SubcarrierGrid<T: Scalar> {
    pub rows: Vec<Vec<Complex<T>>>,
    /// Number of slots that carry data; the rest of the last row is padding.
    pub used: usize,
}

impl<T: Scalar> SubcarrierGrid<T> {
    pub fn pad_slots(&self) -> usize {
        self.rows.iter().map(Vec::len).sum::<usize>() - self.used
    }
}

pub fn serial_to_parallel<T: Scalar>(symbols: &[Complex<T>], fft_size: usize) -> SubcarrierGrid<T> {
    let rows = symbols
        .chunks(fft_size)
        .map(|chunk| {
            let mut row = chunk.to_vec();
            row.resize(fft_size, Complex::zero());
            row
        })
        .collect();
    SubcarrierGrid {
        rows,
        used: symbols.len(),
    }
}

/// Prepends the last `cp_len` samples of `time_symbol`.
pub fn add_cyclic_prefix<T: Scalar>(time_symbol: &[Complex<T>], cp_len: usize) -> Result<Vec<Complex<T>>> {
    let n = time_symbol.len();
    if cp_len > n {
        return Err(Error::CpLength { cp_len, fft_size: n });
    }
    let mut out = Vec::with_capacity(n + cp_len);
    out.extend_from_slice(&time_symbol[n - cp_len..]);
    out.extend_from_slice(time_symbol);
    Ok(out)
}

pub fn remove_cyclic_prefix<T: Scalar>(rx: &[Complex<T>], fft_size: usize, cp_len: usize) -> Result<Vec<Complex<T>>> {
    if rx.len() != fft_size + cp_len {
        return Err(Error::SampleCount {
            expected: fft_size + cp_len,
            found: rx.len(),
        });
    }
    Ok(rx[cp_len..].to_vec())
}

/// One OFDM symbol in the time domain with its cyclic prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct OfdmFrame<T: Scalar> {
    pub payload: SpectralBlock<T>,
    pub prefix: Vec<Complex<T>>,
}

impl<T: Scalar> OfdmFrame<T> {
    pub fn new(payload: SpectralBlock<T>, cp_len: usize) -> Result<Self> {
        let n = payload.len();
        if cp_len > n {
            return Err(Error::CpLength { cp_len, fft_size: n });
        }
        let prefix = payload.samples[n - cp_len..].to_vec();
        Ok(Self { payload, prefix })
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn samples(&self) -> impl Iterator<Item = &Complex<T>> {
        self.prefix.iter().chain(&self.payload.samples)
    }
}

/// Concatenates `prefix ‖ payload` of each frame in order.
pub fn parallel_to_serial<T: Scalar>(frames: &[OfdmFrame<T>]) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(frames.iter().map(OfdmFrame::len).sum());
    for f in frames {
        out.extend(f.samples().copied());
    }
    out
}

/// Receiver-side split of a serial stream into `N + L` sample frames.
pub fn split_frames<T: Scalar>(serial: &[Complex<T>], fft_size: usize, cp_len: usize) -> Result<Vec<&[Complex<T>]>> {
    let frame_len = fft_size + cp_len;
    if !serial.len().is_multiple_of(frame_len) {
        return Err(Error::SampleCount {
            expected: serial.len().div_ceil(frame_len) * frame_len,
            found: serial.len(),
        });
    }
    Ok(serial.chunks_exact(frame_len).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitsource::make_stream;

    fn ramp(n: usize) -> Vec<Complex<f64>> {
        (0..n).map(|i| Complex::new(i as f64, -(i as f64))).collect()
    }

    #[test]
    fn fraction_parsing_and_display() {
        let q: CpFraction = "1/4".parse().unwrap();
        assert_eq!(q.to_string(), "1/4");
        assert_eq!("2/8".parse::<CpFraction>().unwrap().to_string(), "1/4");
        assert_eq!("0".parse::<CpFraction>().unwrap(), CpFraction::NONE);
        assert_eq!(CpFraction::NONE.to_string(), "0");
        assert!("1/0".parse::<CpFraction>().is_err());
        assert!("3/2".parse::<CpFraction>().is_err());
        assert!("quarter".parse::<CpFraction>().is_err());
        assert_eq!(serde_json::to_string(&q).unwrap(), "\"1/4\"");
    }

    #[test]
    fn cp_length_rules() {
        let g = |s: &str| s.parse::<CpFraction>().unwrap();
        assert_eq!(OfdmConfig::new(512, g("1/4"), 8).unwrap().cp_len(), 128);
        assert_eq!(OfdmConfig::new(64, g("1/16"), 8).unwrap().cp_len(), 4);
        assert_eq!(OfdmConfig::new(64, g("1/32"), 8).unwrap().cp_len(), 2);
        assert!(matches!(
            OfdmConfig::new(64, g("1/3"), 8),
            Err(Error::NonIntegerCp { .. })
        ));
        assert!(matches!(OfdmConfig::new(48, g("1/4"), 8), Err(Error::Size(48))));
        assert!(matches!(OfdmConfig::new(64, g("1/4"), 6), Err(Error::Order(6))));
        for n in GRID_FFT_SIZES {
            for q in CpFraction::grid_union() {
                assert!(OfdmConfig::new(n, q, 8).is_ok());
            }
        }
    }

    #[test]
    fn bit_budget_must_fill_symbols() {
        let c = OfdmConfig::new(64, CpFraction::NONE, 8).unwrap();
        assert_eq!(c.bit_budget(), 3000);
        assert!(c.with_bit_budget(1000).is_err());
        assert!(c.with_bit_budget(0).is_err());
        assert_eq!(c.with_bit_budget(999).unwrap().bit_budget(), 999);
    }

    #[test]
    fn serial_to_parallel_padding() {
        let g = serial_to_parallel(&ramp(128), 64);
        assert_eq!((g.rows.len(), g.pad_slots()), (2, 0));
        let g = serial_to_parallel(&ramp(100), 64);
        assert_eq!((g.rows.len(), g.pad_slots(), g.used), (2, 28, 100));
        assert!(g.rows[1][36..].iter().all(|c| c.is_zero()));
        let g = serial_to_parallel::<f64>(&[], 64);
        assert!(g.rows.is_empty());
    }

    #[test]
    fn cyclic_prefix_definition() {
        let x = ramp(8);
        let y = add_cyclic_prefix(&x, 2).unwrap();
        assert_eq!(y.len(), 10);
        assert_eq!(&y[..2], &x[6..]);
        assert_eq!(&y[2..], &x[..]);
        assert_eq!(remove_cyclic_prefix(&y, 8, 2).unwrap(), x);
        assert_eq!(add_cyclic_prefix(&x, 0).unwrap(), x);
        assert_eq!(remove_cyclic_prefix(&x, 8, 0).unwrap(), x);
        assert!(matches!(add_cyclic_prefix(&x, 9), Err(Error::CpLength { .. })));
        assert!(matches!(remove_cyclic_prefix(&x, 8, 2), Err(Error::SampleCount { .. })));
        assert_eq!(add_cyclic_prefix(&ramp(512), 128).unwrap().len(), 640);
    }

    #[test]
    fn cp_round_trip_over_grid() {
        let mut s = make_stream(1, 1);
        for n in GRID_FFT_SIZES {
            let x: Vec<_> = (0..n)
                .map(|_| {
                    let (a, b) = s.draw_gaussian_pair();
                    Complex::new(a, b)
                })
                .collect();
            for q in CpFraction::grid_union() {
                let l = q.cp_len(n).unwrap();
                let y = add_cyclic_prefix(&x, l).unwrap();
                assert_eq!(&y[..l], &y[n..n + l]);
                assert_eq!(remove_cyclic_prefix(&y, n, l).unwrap(), x);
            }
        }
    }

    #[test]
    fn frames_serialize_in_order() {
        let frames: Vec<_> = (0..2)
            .map(|i| {
                OfdmFrame::new(
                    SpectralBlock::time(ramp(64).into_iter().map(|c| c * (i + 1) as f64).collect()),
                    16,
                )
                .unwrap()
            })
            .collect();
        let serial = parallel_to_serial(&frames);
        assert_eq!(serial.len(), 160);
        let split = split_frames(&serial, 64, 16).unwrap();
        assert_eq!(split.len(), 2);
        for (raw, f) in split.iter().zip(&frames) {
            assert_eq!(remove_cyclic_prefix(raw, 64, 16).unwrap(), f.payload.samples);
        }
        assert!(parallel_to_serial::<f64>(&[]).is_empty());
        assert!(split_frames(&serial[1..], 64, 16).is_err());
    }
}
