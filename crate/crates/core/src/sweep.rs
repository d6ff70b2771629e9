//! Monte Carlo execution of single cells and whole parameter grids.
//!
//! Each cell draws from its own substream `(master_seed, cell_id)`, so the
//! records depend only on the grid and the seed, never on how many workers
//! ran it or in what order.

use rayon::prelude::*;

use crate::bitsource::make_stream;
use crate::chain::Link;
use crate::channel::{ebno_to_noise_variance, ChannelSpec};
use crate::error::{Error, Result};
use crate::framing::{CpFraction, OfdmConfig};
use crate::metrics::{count_bit_errors, BerRecord};

/// Early-stopping budget and receiver switches for a cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    /// Stop once this many bit errors have been seen.
    pub target_errors: u64,
    /// Stop once this many bits have been sent.
    pub max_bits: u64,
    /// Never stop on the error target before this many bits.
    pub min_bits: u64,
    /// Apply zero-forcing; when false the receiver demaps raw DFT outputs.
    pub equalize: bool,
    /// Multiplier on the calibrated noise variance (1.0 in normal use).
    pub noise_scale: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            target_errors: 100,
            max_bits: 2_000_000,
            min_bits: 0,
            equalize: true,
            noise_scale: 1.0,
        }
    }
}

/// Runs one cell until `target_errors` or `max_bits` is reached (but not
/// before `min_bits`).
///
/// Every burst carries `config.bit_budget()` bits over a fresh channel draw.
pub fn run_cell(
    config: &OfdmConfig,
    channel: &ChannelSpec,
    ebno_db: f64,
    seed: u64,
    cell_id: u64,
    settings: &RunSettings,
) -> Result<BerRecord> {
    let link = Link::<f64>::new(*config)?;
    let noise_variance = settings.noise_scale
        * ebno_to_noise_variance(
            ebno_db,
            config.modulation_order(),
            config.fft_size(),
            config.cp_len(),
            channel.account_cp_overhead,
        )?;
    let mut stream = make_stream(seed, cell_id);
    let (mut bits_sent, mut bit_errors, mut zf_clamps) = (0u64, 0u64, 0u64);
    while bits_sent < settings.min_bits || (bit_errors < settings.target_errors && bits_sent < settings.max_bits) {
        let bits = stream.draw_bits(config.bit_budget());
        let tx = link.transmit(&bits)?;
        let (rx, state) = link.propagate(&tx, channel, noise_variance, &mut stream);
        let out = link.receive(&rx, settings.equalize.then_some(&state), tx.used)?;
        let (errors, total) = count_bit_errors(&bits, &out.bits)?;
        bit_errors += errors;
        bits_sent += total;
        zf_clamps += out.zf_clamps;
    }
    Ok(BerRecord::from_counts(
        config.fft_size(),
        config.cp_fraction(),
        channel.label(),
        ebno_db,
        bits_sent,
        bit_errors,
        zf_clamps,
        seed,
        cell_id,
    ))
}

/// Cross product of FFT sizes, prefix fractions and Eb/No points.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub fft_sizes: Vec<usize>,
    pub cp_fractions: Vec<CpFraction>,
    pub ebno_points_db: Vec<f64>,
    pub channel: ChannelSpec,
    pub modulation_order: usize,
    pub master_seed: u64,
    /// Bits per burst; `None` means 1000 symbols.
    pub bit_budget: Option<usize>,
    pub settings: RunSettings,
}

/// Coordinates of one grid cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub cell_id: u64,
    pub fft_size: usize,
    pub cp_fraction: CpFraction,
    pub ebno_db: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellFailure {
    pub cell: Cell,
    pub message: String,
}

/// Completed records in `cell_id` order plus any cells that could not run.
#[derive(Clone, Debug, Default)]
pub struct GridOutcome {
    pub records: Vec<BerRecord>,
    pub failures: Vec<CellFailure>,
}

impl GridOutcome {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

impl SweepGrid {
    /// Cells in lexicographic (fft_size, cp_fraction, ebno) order; the
    /// position is the cell id.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::with_capacity(self.cell_count());
        for &fft_size in &self.fft_sizes {
            for &cp_fraction in &self.cp_fractions {
                for &ebno_db in &self.ebno_points_db {
                    cells.push(Cell {
                        cell_id: cells.len() as u64,
                        fft_size,
                        cp_fraction,
                        ebno_db,
                    });
                }
            }
        }
        cells
    }

    pub fn cell_count(&self) -> usize {
        self.fft_sizes.len() * self.cp_fractions.len() * self.ebno_points_db.len()
    }

    pub fn cell_config(&self, cell: &Cell) -> Result<OfdmConfig> {
        let config = OfdmConfig::new(cell.fft_size, cell.cp_fraction, self.modulation_order)?;
        match self.bit_budget {
            Some(bits) => config.with_bit_budget(bits),
            None => Ok(config),
        }
    }

    pub fn run_cell(&self, cell: &Cell) -> Result<BerRecord> {
        let config = self.cell_config(cell)?;
        run_cell(
            &config,
            &self.channel,
            cell.ebno_db,
            self.master_seed,
            cell.cell_id,
            &self.settings,
        )
    }

    /// Checks grid-wide parameters that would make every cell fail.
    pub fn validate(&self) -> Result<()> {
        if self.cell_count() == 0 {
            return Err(Error::config("sweep grid has no cells"));
        }
        crate::modem::bits_per_symbol(self.modulation_order)?;
        if self.settings.max_bits == 0 {
            return Err(Error::config("max_bits_per_cell must be positive"));
        }
        if self.ebno_points_db.iter().any(|e| e.is_nan()) {
            return Err(Error::config("Eb/No points must not be NaN"));
        }
        Ok(())
    }
}

fn collect(cells: Vec<Cell>, results: Vec<Result<BerRecord>>) -> GridOutcome {
    let mut outcome = GridOutcome::default();
    for (cell, result) in cells.into_iter().zip(results) {
        match result {
            Ok(r) => outcome.records.push(r),
            Err(e) => outcome.failures.push(CellFailure {
                cell,
                message: e.to_string(),
            }),
        }
    }
    outcome
}

/// Runs every cell on the current rayon pool.
pub fn run_grid(grid: &SweepGrid) -> Result<GridOutcome> {
    grid.validate()?;
    let cells = grid.cells();
    let results: Vec<_> = cells.par_iter().map(|c| grid.run_cell(c)).collect();
    Ok(collect(cells, results))
}

/// Runs every cell on a dedicated pool of `workers` threads.
pub fn run_grid_with_workers(grid: &SweepGrid, workers: usize) -> Result<GridOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_grid(grid))
}
