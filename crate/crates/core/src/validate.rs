//! Theory-versus-simulation self check on AWGN.
//!
//! Three groups of checks:
//! * `raw`: 8-PSK without OFDM framing against [`theoretical_mpsk_ber`]
//!   (±10 % relative and the theory value inside the z = 3 interval);
//! * `ofdm`: the full chain at G = 1/4 must be statistically
//!   indistinguishable from the raw modem (overlapping intervals);
//! * `noiseless`: every grid cell on every channel decodes with zero errors.

use rayon::prelude::*;

use crate::bitsource::make_stream;
use crate::channel::{add_noise, ebno_to_noise_variance, exponential_pdp, ChannelSpec};
use crate::error::Result;
use crate::framing::{CpFraction, OfdmConfig, GRID_FFT_SIZES};
use crate::metrics::{count_bit_errors, theoretical_mpsk_ber, wilson_interval, DEFAULT_Z};
use crate::modem::Constellation;
use crate::sweep::{run_cell, RunSettings};

pub const VALIDATION_EBNO_DB: [f64; 3] = [4.0, 8.0, 12.0];
pub const VALIDATION_ORDER: usize = 8;
/// Maximum relative deviation of simulated from analytic BER.
pub const THEORY_REL_TOL: f64 = 0.10;
pub const MIN_BITS: u64 = 1_000_000;
/// Errors to collect per point so that 3σ sampling error stays below 10 %.
pub const TARGET_ERRORS: u64 = 1_500;
pub const MAX_BITS: u64 = 60_000_000;

/// Bits and errors of one Monte Carlo measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Count {
    pub errors: u64,
    pub bits: u64,
}

impl Count {
    pub fn ber(&self) -> f64 {
        self.errors as f64 / self.bits as f64
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson_interval(self.errors, self.bits, DEFAULT_Z)
    }
}

/// M-PSK over AWGN with no OFDM framing.
///
/// Runs at least `min_bits`, then continues until `target_errors` or
/// `max_bits`.
pub fn run_raw_modem(
    modulation_order: usize,
    ebno_db: f64,
    seed: u64,
    cell_id: u64,
    noise_scale: f64,
    (min_bits, target_errors, max_bits): (u64, u64, u64),
) -> Result<Count> {
    const BATCH: usize = 3 * 16_384;
    let constellation = Constellation::<f64>::new(modulation_order)?;
    let b = constellation.bits_per_symbol();
    let batch = BATCH - BATCH % b;
    let var = noise_scale * ebno_to_noise_variance(ebno_db, modulation_order, 1, 0, false)?;
    let mut stream = make_stream(seed, cell_id);
    let mut count = Count { errors: 0, bits: 0 };
    while count.bits < min_bits || (count.errors < target_errors && count.bits < max_bits) {
        let bits = stream.draw_bits(batch);
        let mut symbols = constellation.map(&bits)?;
        add_noise(&mut symbols, var, &mut stream);
        let (e, n) = count_bit_errors(&bits, &constellation.demap(&symbols).bits)?;
        count.errors += e;
        count.bits += n;
    }
    Ok(count)
}

/// Full OFDM chain over AWGN, `account_cp_overhead = false`.
pub fn run_ofdm_awgn(
    fft_size: usize,
    cp: CpFraction,
    ebno_db: f64,
    seed: u64,
    cell_id: u64,
    noise_scale: f64,
    (min_bits, target_errors, max_bits): (u64, u64, u64),
) -> Result<Count> {
    let config = OfdmConfig::new(fft_size, cp, VALIDATION_ORDER)?;
    let settings = RunSettings {
        target_errors,
        max_bits,
        min_bits,
        equalize: true,
        noise_scale,
    };
    let r = run_cell(&config, &ChannelSpec::awgn(), ebno_db, seed, cell_id, &settings)?;
    Ok(Count {
        errors: r.bit_errors,
        bits: r.bits_sent,
    })
}

/// Zero-noise run of every (N, G) in the grid under one channel.
///
/// TDL memory is `min(L, 8)` so the prefix always covers the channel.
/// Returns total `(errors, bits)` over all cells.
pub fn run_noiseless_grid(channel: &str, seed: u64, bits_per_cell: u64) -> Result<Count> {
    let cells: Vec<(usize, CpFraction)> = GRID_FFT_SIZES
        .iter()
        .flat_map(|&n| CpFraction::grid_union().into_iter().map(move |g| (n, g)))
        .collect();
    let counts = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(n, g))| {
            let config = OfdmConfig::new(n, g, VALIDATION_ORDER)?;
            let spec = match channel {
                "awgn" => ChannelSpec::awgn(),
                "flat" => ChannelSpec::flat(),
                _ => ChannelSpec::tdl(&exponential_pdp(config.cp_len().min(8) + 1, 1.0)?)?,
            };
            let settings = RunSettings {
                target_errors: 1,
                max_bits: bits_per_cell,
                ..RunSettings::default()
            };
            let r = run_cell(&config, &spec, f64::INFINITY, seed, i as u64, &settings)?;
            Ok(Count {
                errors: r.bit_errors,
                bits: r.bits_sent,
            })
        })
        .collect::<Result<Vec<Count>>>()?;
    Ok(counts.into_iter().fold(Count { errors: 0, bits: 0 }, |a, c| Count {
        errors: a.errors + c.errors,
        bits: a.bits + c.bits,
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationRow {
    pub check: String,
    pub modulation_order: usize,
    pub ebno_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub sim_ber: f64,
    /// Analytic BER for `raw` rows, raw-modem BER for `ofdm` rows, 0 for
    /// `noiseless` rows.
    pub reference_ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.pass)
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<14} {:>3} {:>6} {:>11} {:>7} {:>12} {:>12} {:>25}  {}\n",
            "check", "M", "Eb/No", "bits", "errors", "sim BER", "reference", "z=3 interval", "result"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<14} {:>3} {:>6} {:>11} {:>7} {:>12.4e} {:>12.4e} [{:>10.4e}, {:>10.4e}]  {}\n",
                r.check,
                r.modulation_order,
                if r.ebno_db.is_finite() {
                    format!("{:.1}", r.ebno_db)
                } else {
                    "inf".into()
                },
                r.bits,
                r.errors,
                r.sim_ber,
                r.reference_ber,
                r.ci_low,
                r.ci_high,
                if r.pass { "PASS" } else { "FAIL" }
            ));
        }
        out
    }
}

fn overlaps(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Runs every check. `noise_scale` other than 1 deliberately miscalibrates
/// the noise and should make the raw and OFDM checks fail.
pub fn validate(seed: u64, noise_scale: f64) -> Result<ValidationReport> {
    let budget = (MIN_BITS, TARGET_ERRORS, MAX_BITS);
    let m = VALIDATION_ORDER;
    let quarter = CpFraction::new(1, 4)?;

    let raw: Vec<Count> = VALIDATION_EBNO_DB
        .par_iter()
        .enumerate()
        .map(|(i, &eb)| run_raw_modem(m, eb, seed, i as u64, noise_scale, budget))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (&eb, c) in VALIDATION_EBNO_DB.iter().zip(&raw) {
        let theory = theoretical_mpsk_ber(eb, m)?;
        let (lo, hi) = c.interval();
        let pass = (c.ber() / theory - 1.0).abs() <= THEORY_REL_TOL && lo <= theory && theory <= hi;
        rows.push(ValidationRow {
            check: "raw".into(),
            modulation_order: m,
            ebno_db: eb,
            bits: c.bits,
            errors: c.errors,
            sim_ber: c.ber(),
            reference_ber: theory,
            ci_low: lo,
            ci_high: hi,
            pass,
        });
    }

    let ofdm_points: Vec<(usize, usize)> = [64usize, 512]
        .into_iter()
        .flat_map(|n| (0..VALIDATION_EBNO_DB.len()).map(move |i| (n, i)))
        .collect();
    let ofdm: Vec<Count> = ofdm_points
        .par_iter()
        .map(|&(n, i)| {
            run_ofdm_awgn(
                n,
                quarter,
                VALIDATION_EBNO_DB[i],
                seed,
                100 + (n * 10 + i) as u64,
                noise_scale,
                budget,
            )
        })
        .collect::<Result<_>>()?;
    for (&(n, i), c) in ofdm_points.iter().zip(&ofdm) {
        let reference = &raw[i];
        let (lo, hi) = c.interval();
        rows.push(ValidationRow {
            check: format!("ofdm N={n}"),
            modulation_order: m,
            ebno_db: VALIDATION_EBNO_DB[i],
            bits: c.bits,
            errors: c.errors,
            sim_ber: c.ber(),
            reference_ber: reference.ber(),
            ci_low: lo,
            ci_high: hi,
            pass: overlaps((lo, hi), reference.interval()),
        });
    }

    for channel in ["awgn", "flat", "tdl"] {
        let c = run_noiseless_grid(channel, seed, 30_000)?;
        let (lo, hi) = c.interval();
        rows.push(ValidationRow {
            check: format!("noiseless {channel}"),
            modulation_order: m,
            ebno_db: f64::INFINITY,
            bits: c.bits,
            errors: c.errors,
            sim_ber: c.ber(),
            reference_ber: 0.0,
            ci_low: lo,
            ci_high: hi,
            pass: c.errors == 0,
        });
    }
    Ok(ValidationReport { rows })
}
