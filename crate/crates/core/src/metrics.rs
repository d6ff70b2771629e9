//! Bit error counting, binomial confidence intervals and the analytic M-PSK
//! reference curves used to validate the Monte Carlo results.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::bitsource::BitBlock;
use crate::error::{Error, Result};
use crate::framing::CpFraction;
use crate::modem::bits_per_symbol;

/// Default width of reported confidence intervals, in standard deviations.
pub const DEFAULT_Z: f64 = 3.0;

/// `(errors, total)` between two equally long blocks.
pub fn count_bit_errors(tx: &BitBlock, rx: &BitBlock) -> Result<(u64, u64)> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            tx: tx.len(),
            rx: rx.len(),
        });
    }
    let errors = tx.as_slice().iter().zip(rx.as_slice()).filter(|(a, b)| a != b).count();
    Ok((errors as u64, tx.len() as u64))
}

/// Gaussian tail probability `Q(x) = ½·erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Analytic BER of Gray-coded M-PSK on AWGN.
///
/// BPSK and QPSK use the exact `Q(√(2·Eb/N0))`. Higher orders use the
/// nearest-neighbour symbol error approximation divided by `log2(M)`.
pub fn theoretical_mpsk_ber(ebno_db: f64, modulation_order: usize) -> Result<f64> {
    let b = bits_per_symbol(modulation_order)? as f64;
    let gamma_b = 10f64.powf(ebno_db / 10.0);
    if modulation_order <= 4 {
        return Ok(q_function((2.0 * gamma_b).sqrt()));
    }
    let arg = (2.0 * b * gamma_b).sqrt() * (PI / modulation_order as f64).sin();
    Ok(2.0 * q_function(arg) / b)
}

/// Wilson score interval for `errors` successes out of `total` trials.
pub fn wilson_interval(errors: u64, total: u64, z: f64) -> (f64, f64) {
    assert!(total >= 1 && errors <= total, "need 0 <= errors <= total, total >= 1");
    let n = total as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if errors == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let high = if errors == total {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    (low, high)
}

/// One measured sweep cell. Field order is the column order of result files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub fft_size: usize,
    pub cp_fraction: CpFraction,
    pub channel: String,
    pub ebno_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub zf_clamps: u64,
    pub seed: u64,
    pub cell_id: u64,
}

impl BerRecord {
    /// Fills in `ber` and the z = 3 Wilson interval from the counts.
    #[allow(clippy::too_many_arguments)]
    pub fn from_counts(
        fft_size: usize,
        cp_fraction: CpFraction,
        channel: String,
        ebno_db: f64,
        bits_sent: u64,
        bit_errors: u64,
        zf_clamps: u64,
        seed: u64,
        cell_id: u64,
    ) -> Self {
        let (ber, (ci_low, ci_high)) = if bits_sent == 0 {
            (0.0, (0.0, 1.0))
        } else {
            (
                bit_errors as f64 / bits_sent as f64,
                wilson_interval(bit_errors, bits_sent, DEFAULT_Z),
            )
        };
        Self {
            fft_size,
            cp_fraction,
            channel,
            ebno_db,
            bits_sent,
            bit_errors,
            ber,
            ci_low,
            ci_high,
            zf_clamps,
            seed,
            cell_id,
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.ci_low, self.ci_high)
    }

    /// True if the two z = 3 intervals share at least one point.
    pub fn overlaps(&self, other: &BerRecord) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}
