//! AWGN, block Rayleigh and tapped-delay-line channels plus Eb/No calibration.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bitsource::RngStream;
use crate::error::{Error, Result};
use crate::modem::bits_per_symbol;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Awgn,
    /// One complex Rayleigh gain per OFDM symbol.
    #[serde(rename = "flat")]
    FlatBlockFading,
    /// Rayleigh taps held constant over one burst.
    #[serde(rename = "tdl")]
    TappedDelayLine,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::FlatBlockFading => "flat",
            ChannelKind::TappedDelayLine => "tdl",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "awgn" => Ok(ChannelKind::Awgn),
            "flat" => Ok(ChannelKind::FlatBlockFading),
            "tdl" => Ok(ChannelKind::TappedDelayLine),
            other => Err(Error::config(format!(
                "unknown channel {other:?} (expected awgn, flat or tdl)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    kind: ChannelKind,
    /// Power-delay profile, summing to one. Empty unless `kind` is TDL.
    tap_powers: Vec<f64>,
    /// Scale noise by `(N+L)/N` so Eb/No accounts for the prefix energy.
    pub account_cp_overhead: bool,
}

impl ChannelSpec {
    pub fn awgn() -> Self {
        Self {
            kind: ChannelKind::Awgn,
            tap_powers: Vec::new(),
            account_cp_overhead: false,
        }
    }

    pub fn flat() -> Self {
        Self {
            kind: ChannelKind::FlatBlockFading,
            ..Self::awgn()
        }
    }

    /// Tapped delay line with the given (unnormalized) tap powers.
    pub fn tdl(powers: &[f64]) -> Result<Self> {
        if powers.is_empty() {
            return Err(Error::config("tapped delay line needs at least one tap"));
        }
        if powers.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::config("tap powers must be finite and nonnegative"));
        }
        let total: f64 = powers.iter().sum();
        if total <= 0.0 {
            return Err(Error::config("tap powers sum to zero"));
        }
        Ok(Self {
            kind: ChannelKind::TappedDelayLine,
            tap_powers: powers.iter().map(|p| p / total).collect(),
            account_cp_overhead: false,
        })
    }

    pub fn with_cp_overhead(mut self, on: bool) -> Self {
        self.account_cp_overhead = on;
        self
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn tap_powers(&self) -> &[f64] {
        &self.tap_powers
    }

    /// Index of the last tap (zero for non-TDL channels).
    pub fn memory(&self) -> usize {
        self.tap_powers.len().saturating_sub(1)
    }

    /// Short label used in result files: `awgn`, `flat` or `tdl<taps>`.
    pub fn label(&self) -> String {
        match self.kind {
            ChannelKind::TappedDelayLine => format!("tdl{}", self.tap_powers.len()),
            k => k.name().to_string(),
        }
    }
}

/// Exponentially decaying power-delay profile, normalized to unit sum.
pub fn exponential_pdp(length: usize, decay_db_per_tap: f64) -> Result<Vec<f64>> {
    if length == 0 {
        return Err(Error::config("power-delay profile length must be >= 1"));
    }
    let raw: Vec<f64> = (0..length)
        .map(|l| 10f64.powf(-(l as f64) * decay_db_per_tap / 10.0))
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|p| p / total).collect())
}

/// Total complex noise variance for unit-energy symbols at `ebno_db`.
///
/// `σ² = 1 / (log2(M) · 10^(ebno_db/10))`, times `(N+L)/N` when the prefix
/// overhead is charged. `+∞` dB gives exactly zero.
pub fn ebno_to_noise_variance(
    ebno_db: f64,
    modulation_order: usize,
    fft_size: usize,
    cp_len: usize,
    account_cp_overhead: bool,
) -> Result<f64> {
    let b = bits_per_symbol(modulation_order)?;
    if fft_size == 0 || cp_len > fft_size {
        return Err(Error::CpLength { cp_len, fft_size });
    }
    if ebno_db.is_nan() {
        return Err(Error::config("Eb/No is NaN"));
    }
    let mut var = 1.0 / (b as f64 * 10f64.powf(ebno_db / 10.0));
    if account_cp_overhead {
        var *= (fft_size + cp_len) as f64 / fft_size as f64;
    }
    Ok(var)
}

/// Per-sample SNR in dB implied by a noise variance, with unit symbol energy.
pub fn per_sample_snr_db(noise_variance: f64) -> f64 {
    -10.0 * noise_variance.log10()
}

/// One draw of the channel: gains plus the noise level to apply.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization<T: Scalar> {
    kind: ChannelKind,
    /// Empty for AWGN, one entry for flat fading, one per tap for TDL.
    gains: Vec<Complex<T>>,
    pub noise_variance: f64,
}

impl<T: Scalar> ChannelRealization<T> {
    pub fn awgn(noise_variance: f64) -> Self {
        Self {
            kind: ChannelKind::Awgn,
            gains: Vec::new(),
            noise_variance,
        }
    }

    pub fn flat(gain: Complex<T>, noise_variance: f64) -> Self {
        Self {
            kind: ChannelKind::FlatBlockFading,
            gains: vec![gain],
            noise_variance,
        }
    }

    pub fn tdl(taps: Vec<Complex<T>>, noise_variance: f64) -> Self {
        assert!(!taps.is_empty(), "tapped delay line needs at least one tap");
        Self {
            kind: ChannelKind::TappedDelayLine,
            gains: taps,
            noise_variance,
        }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn gains(&self) -> &[Complex<T>] {
        &self.gains
    }
}

fn complex_gaussian<T: Scalar>(stream: &mut RngStream, std_per_dim: f64) -> Complex<T> {
    let (a, b) = stream.draw_gaussian_pair();
    Complex::new(T::lit(a * std_per_dim), T::lit(b * std_per_dim))
}

pub fn realize_channel<T: Scalar>(
    spec: &ChannelSpec,
    noise_variance: f64,
    stream: &mut RngStream,
) -> ChannelRealization<T> {
    match spec.kind {
        ChannelKind::Awgn => ChannelRealization::awgn(noise_variance),
        ChannelKind::FlatBlockFading => {
            ChannelRealization::flat(complex_gaussian(stream, 0.5f64.sqrt()), noise_variance)
        }
        ChannelKind::TappedDelayLine => {
            let taps = spec
                .tap_powers
                .iter()
                .map(|p| complex_gaussian(stream, (p / 2.0).sqrt()))
                .collect();
            ChannelRealization::tdl(taps, noise_variance)
        }
    }
}

/// Passes `signal` through the realization and adds complex Gaussian noise.
///
/// TDL filtering is a linear convolution truncated to the input length, with
/// zero history before the first sample.
pub fn apply_channel<T: Scalar>(
    signal: &[Complex<T>],
    real: &ChannelRealization<T>,
    stream: &mut RngStream,
) -> Vec<Complex<T>> {
    let mut out: Vec<Complex<T>> = match real.kind {
        ChannelKind::Awgn => signal.to_vec(),
        ChannelKind::FlatBlockFading => {
            let h = real.gains[0];
            signal.iter().map(|x| h * x).collect()
        }
        ChannelKind::TappedDelayLine => {
            let taps = &real.gains;
            (0..signal.len())
                .map(|n| {
                    taps.iter()
                        .take(n + 1)
                        .enumerate()
                        .fold(Complex::new(T::zero(), T::zero()), |acc, (l, h)| {
                            acc + h * signal[n - l]
                        })
                })
                .collect()
        }
    };
    add_noise(&mut out, real.noise_variance, stream);
    out
}

/// Adds i.i.d. complex Gaussian noise of total variance `noise_variance`.
pub fn add_noise<T: Scalar>(samples: &mut [Complex<T>], noise_variance: f64, stream: &mut RngStream) {
    if noise_variance <= 0.0 {
        return;
    }
    let std = (noise_variance / 2.0).sqrt();
    for x in samples {
        *x += complex_gaussian::<T>(stream, std);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitsource::make_stream;

    #[test]
    fn calibration_arithmetic() {
        let v = ebno_to_noise_variance(0.0, 8, 64, 0, false).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let v = ebno_to_noise_variance(0.0, 8, 512, 128, true).unwrap();
        assert!((v - (1.0 / 3.0) * (640.0 / 512.0)).abs() < 1e-15);
        assert!((v - 0.416_666_666_666_666_7).abs() < 1e-15);
        assert!(ebno_to_noise_variance(300.0, 8, 64, 0, false).unwrap() < 1e-29);
        assert_eq!(ebno_to_noise_variance(f64::INFINITY, 8, 64, 0, false).unwrap(), 0.0);
        assert!(ebno_to_noise_variance(0.0, 6, 64, 0, false).is_err());
        assert!(ebno_to_noise_variance(0.0, 8, 64, 65, false).is_err());
    }

    #[test]
    fn exponential_profiles() {
        assert_eq!(exponential_pdp(1, 3.0).unwrap(), vec![1.0]);
        let p = exponential_pdp(2, 10.0 * 2f64.log10()).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12 && (p[1] - 1.0 / 3.0).abs() < 1e-12);
        for (len, d) in [(5, 0.0), (9, 1.0), (20, 6.5), (3, -2.0)] {
            let p = exponential_pdp(len, d).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(exponential_pdp(0, 1.0).is_err());
    }

    #[test]
    fn tdl_spec_normalizes() {
        let s = ChannelSpec::tdl(&[2.0, 1.0, 1.0]).unwrap();
        assert!((s.tap_powers().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(s.memory(), 2);
        assert_eq!(s.label(), "tdl3");
        assert!(ChannelSpec::tdl(&[]).is_err());
        assert!(ChannelSpec::tdl(&[1.0, -0.1]).is_err());
        assert!(ChannelSpec::tdl(&[0.0, 0.0]).is_err());
        assert_eq!(ChannelSpec::flat().memory(), 0);
    }

    #[test]
    fn flat_gain_has_unit_power() {
        let mut s = make_stream(9, 0);
        let spec = ChannelSpec::flat();
        let n = 100_000;
        let mean = (0..n)
            .map(|_| realize_channel::<f64>(&spec, 0.0, &mut s).gains()[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((0.99..=1.01).contains(&mean), "E|h|^2 = {mean}");
    }

    #[test]
    fn tdl_tap_powers_match_profile() {
        let mut s = make_stream(9, 1);
        let spec = ChannelSpec::tdl(&[0.5, 0.3, 0.2]).unwrap();
        let n = 100_000;
        let mut acc = [0.0; 3];
        for _ in 0..n {
            let r = realize_channel::<f64>(&spec, 0.0, &mut s);
            for (a, h) in acc.iter_mut().zip(r.gains()) {
                *a += h.norm_sqr();
            }
        }
        for (a, p) in acc.iter().zip([0.5, 0.3, 0.2]) {
            let mean = a / n as f64;
            // |h|^2 is exponential with mean p, so its standard deviation is p.
            let tol = 3.0 * p / (n as f64).sqrt();
            assert!((mean - p).abs() < tol, "tap mean {mean} vs {p}");
        }
    }

    #[test]
    fn noiseless_identities() {
        let mut s = make_stream(2, 2);
        let x: Vec<_> = (0..50).map(|i| Complex::new(i as f64, 1.0)).collect();
        assert_eq!(apply_channel(&x, &ChannelRealization::awgn(0.0), &mut s), x);
        let unit = ChannelRealization::tdl(vec![Complex::new(1.0, 0.0)], 0.0);
        assert_eq!(apply_channel(&x, &unit, &mut s), x);
    }

    #[test]
    fn tdl_is_truncated_linear_convolution() {
        let mut s = make_stream(2, 3);
        let x = vec![Complex::new(1.0, 0.0), Complex::new(2.0, 0.0), Complex::new(3.0, 0.0)];
        let h = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)];
        let y = apply_channel(&x, &ChannelRealization::tdl(h, 0.0), &mut s);
        assert_eq!(
            y,
            vec![Complex::new(1.0, 0.0), Complex::new(2.0, 1.0), Complex::new(3.0, 2.0)]
        );
    }

    #[test]
    fn awgn_noise_power_matches_variance() {
        let mut s = make_stream(4, 4);
        let mut z = vec![Complex::new(0.0f64, 0.0); 200_000];
        add_noise(&mut z, 0.25, &mut s);
        let p = z.iter().map(|c| c.norm_sqr()).sum::<f64>() / z.len() as f64;
        assert!((p - 0.25).abs() < 0.25 * 0.01, "noise power {p}");
        let re = z.iter().map(|c| c.re * c.re).sum::<f64>() / z.len() as f64;
        assert!((re - 0.125).abs() < 0.125 * 0.02);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in [
            ChannelKind::Awgn,
            ChannelKind::FlatBlockFading,
            ChannelKind::TappedDelayLine,
        ] {
            assert_eq!(k.name().parse::<ChannelKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("rician".parse::<ChannelKind>().is_err());
    }
}
