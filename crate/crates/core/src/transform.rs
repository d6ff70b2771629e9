//! Unitary DFT/IDFT.
//!
//! Both directions scale by `1/√N`:
//!
//! ```text
//! X[k] = 1/√N · Σ_n x[n]·exp(−i·2π·kn/N)
//! x[n] = 1/√N · Σ_k X[k]·exp(+i·2π·kn/N)
//! ```
//!
//! [`FftPlan`] is an iterative radix-2 decimation-in-time FFT with
//! precomputed twiddles. [`dft_direct`] evaluates the sums literally and is
//! kept as the reference the fast path is tested against.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Time,
    Frequency,
}

impl Domain {
    fn name(self) -> &'static str {
        match self {
            Domain::Time => "time",
            Domain::Frequency => "frequency",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Time to frequency, `exp(−i…)` kernel.
    Forward,
    /// Frequency to time, `exp(+i…)` kernel.
    Inverse,
}

/// `N` samples tagged with the domain they live in.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralBlock<T: Scalar> {
    pub samples: Vec<Complex<T>>,
    pub domain: Domain,
}

impl<T: Scalar> SpectralBlock<T> {
    pub fn time(samples: Vec<Complex<T>>) -> Self {
        Self {
            samples,
            domain: Domain::Time,
        }
    }

    pub fn frequency(samples: Vec<Complex<T>>) -> Self {
        Self {
            samples,
            domain: Domain::Frequency,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn expect(&self, domain: Domain) -> Result<()> {
        if self.domain == domain {
            Ok(())
        } else {
            Err(Error::Domain {
                expected: domain.name(),
                found: self.domain.name(),
            })
        }
    }
}

/// Precomputed radix-2 transform of one size. Read-only after construction,
/// so a plan can be shared between threads.
#[derive(Clone, Debug)]
pub struct FftPlan<T: Scalar> {
    size: usize,
    /// `exp(−i·2π·j/N)` for `j < N/2`.
    twiddles: Vec<Complex<T>>,
    bit_rev: Vec<usize>,
    scale: T,
}

impl<T: Scalar> FftPlan<T> {
    pub fn new(size: usize) -> Result<Self> {
        if !size.is_power_of_two() {
            return Err(Error::Size(size));
        }
        let twiddles = (0..size / 2).map(|j| cis(-TAU * j as f64 / size as f64)).collect();
        let bits = size.trailing_zeros();
        let bit_rev = (0..size)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (usize::BITS - bits)
                }
            })
            .collect();
        Ok(Self {
            size,
            twiddles,
            bit_rev,
            scale: T::lit(1.0 / (size as f64).sqrt()),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// In-place unitary transform of `buf` (length must equal the plan size).
    pub fn process(&self, buf: &mut [Complex<T>], direction: Direction) -> Result<()> {
        let n = self.size;
        if buf.len() != n {
            return Err(Error::SampleCount {
                expected: n,
                found: buf.len(),
            });
        }
        for i in 0..n {
            let j = self.bit_rev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for j in 0..half {
                    let w = self.twiddles[j * stride];
                    let w = match direction {
                        Direction::Forward => w,
                        Direction::Inverse => w.conj(),
                    };
                    let a = buf[start + j];
                    let b = buf[start + j + half] * w;
                    buf[start + j] = a + b;
                    buf[start + j + half] = a - b;
                }
            }
            half *= 2;
        }
        for x in buf.iter_mut() {
            *x = x.scale(self.scale);
        }
        Ok(())
    }

    pub fn forward(&self, buf: &mut [Complex<T>]) -> Result<()> {
        self.process(buf, Direction::Forward)
    }

    pub fn inverse(&self, buf: &mut [Complex<T>]) -> Result<()> {
        self.process(buf, Direction::Inverse)
    }
}

/// Time-domain block from a frequency-domain block.
pub fn idft<T: Scalar>(freq: &SpectralBlock<T>) -> Result<SpectralBlock<T>> {
    freq.expect(Domain::Frequency)?;
    let plan = FftPlan::new(freq.len())?;
    let mut samples = freq.samples.clone();
    plan.inverse(&mut samples)?;
    Ok(SpectralBlock::time(samples))
}

/// Frequency-domain block from a time-domain block.
pub fn dft<T: Scalar>(time: &SpectralBlock<T>) -> Result<SpectralBlock<T>> {
    time.expect(Domain::Time)?;
    let plan = FftPlan::new(time.len())?;
    let mut samples = time.samples.clone();
    plan.forward(&mut samples)?;
    Ok(SpectralBlock::frequency(samples))
}

/// Literal O(N²) evaluation of the unitary transform, any `N ≥ 1`.
///
/// The output domain is derived from `direction`; the input's domain tag is
/// not checked so the oracle can be applied to anything.
pub fn dft_direct<T: Scalar>(block: &SpectralBlock<T>, direction: Direction) -> SpectralBlock<T> {
    let n = block.len();
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let scale = 1.0 / (n.max(1) as f64).sqrt();
    let samples = (0..n)
        .map(|k| {
            let mut acc = Complex::new(0.0f64, 0.0);
            for (m, x) in block.samples.iter().enumerate() {
                // Reduce kn mod N in integers so the angle stays exact.
                let phase = sign * TAU * ((k * m) % n) as f64 / n as f64;
                let x = Complex::new(x.re.as_f64(), x.im.as_f64());
                acc += x * Complex::from_polar(1.0, phase);
            }
            Complex::new(T::lit(acc.re * scale), T::lit(acc.im * scale))
        })
        .collect();
    let domain = match direction {
        Direction::Forward => Domain::Frequency,
        Direction::Inverse => Domain::Time,
    };
    SpectralBlock { samples, domain }
}
