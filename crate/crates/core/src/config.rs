//! JSON grid configuration.
//!
//! Every key is optional; missing keys take the defaults below.
//!
//! ```json
//! {
//!   "fft_sizes": [64, 128, 256, 512],
//!   "cp_fractions": ["1/2", "1/4", "1/16", "1/32"],
//!   "ebno_db": [0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20],
//!   "channel": "tdl",
//!   "tdl_taps": [0.5, 0.3, 0.2],
//!   "tdl_len": 9,
//!   "tdl_decay_db": 1.0,
//!   "account_cp_overhead": false,
//!   "modulation_order": 8,
//!   "seed": 1070935767282649050,
//!   "max_bits_per_cell": 2000000,
//!   "target_errors": 100,
//!   "bit_budget": 3000,
//!   "equalizer": true
//! }
//! ```
//!
//! `tdl_taps` (an explicit power list) wins over `tdl_len`/`tdl_decay_db`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bitsource::DEFAULT_SEED;
use crate::channel::{exponential_pdp, ChannelKind, ChannelSpec};
use crate::error::{Error, Result};
use crate::framing::{CpFraction, GRID_FFT_SIZES};
use crate::sweep::{RunSettings, SweepGrid};

pub const DEFAULT_TDL_LEN: usize = 9;
pub const DEFAULT_TDL_DECAY_DB: f64 = 1.0;

pub fn default_ebno_axis() -> Vec<f64> {
    (0..=10).map(|i| 2.0 * i as f64).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fft_sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cp_fractions: Option<Vec<CpFraction>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ebno_db: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tdl_taps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tdl_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tdl_decay_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub account_cp_overhead: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulation_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_bits_per_cell: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_errors: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bit_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equalizer: Option<bool>,
}

/// Fully resolved configuration, echoed back to the user before a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectiveConfig {
    pub fft_sizes: Vec<usize>,
    pub cp_fractions: Vec<CpFraction>,
    pub ebno_db: Vec<f64>,
    pub channel: ChannelKind,
    pub tdl_taps: Vec<f64>,
    pub account_cp_overhead: bool,
    pub modulation_order: usize,
    pub seed: u64,
    pub max_bits_per_cell: u64,
    pub target_errors: u64,
    pub bit_budget: Option<usize>,
    pub equalizer: bool,
}

impl GridFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    /// Values in `other` replace ours where present.
    pub fn overlay(mut self, other: GridFile) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            fft_sizes,
            cp_fractions,
            ebno_db,
            channel,
            tdl_taps,
            tdl_len,
            tdl_decay_db,
            account_cp_overhead,
            modulation_order,
            seed,
            max_bits_per_cell,
            target_errors,
            bit_budget,
            equalizer
        );
        self
    }

    pub fn channel_spec(&self) -> Result<ChannelSpec> {
        let spec = match self.channel.unwrap_or(ChannelKind::Awgn) {
            ChannelKind::Awgn => ChannelSpec::awgn(),
            ChannelKind::FlatBlockFading => ChannelSpec::flat(),
            ChannelKind::TappedDelayLine => match &self.tdl_taps {
                Some(taps) => ChannelSpec::tdl(taps)?,
                None => ChannelSpec::tdl(&exponential_pdp(
                    self.tdl_len.unwrap_or(DEFAULT_TDL_LEN),
                    self.tdl_decay_db.unwrap_or(DEFAULT_TDL_DECAY_DB),
                )?)?,
            },
        };
        Ok(spec.with_cp_overhead(self.account_cp_overhead.unwrap_or(false)))
    }

    pub fn resolve(&self) -> Result<EffectiveConfig> {
        let channel = self.channel_spec()?;
        Ok(EffectiveConfig {
            fft_sizes: self.fft_sizes.clone().unwrap_or_else(|| GRID_FFT_SIZES.to_vec()),
            cp_fractions: self.cp_fractions.clone().unwrap_or_else(CpFraction::grid_default),
            ebno_db: self.ebno_db.clone().unwrap_or_else(default_ebno_axis),
            channel: channel.kind(),
            tdl_taps: channel.tap_powers().to_vec(),
            account_cp_overhead: channel.account_cp_overhead,
            modulation_order: self.modulation_order.unwrap_or(8),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            max_bits_per_cell: self.max_bits_per_cell.unwrap_or(RunSettings::default().max_bits),
            target_errors: self.target_errors.unwrap_or(RunSettings::default().target_errors),
            bit_budget: self.bit_budget,
            equalizer: self.equalizer.unwrap_or(true),
        })
    }

    pub fn to_grid(&self) -> Result<SweepGrid> {
        let eff = self.resolve()?;
        let grid = SweepGrid {
            fft_sizes: eff.fft_sizes,
            cp_fractions: eff.cp_fractions,
            ebno_points_db: eff.ebno_db,
            channel: self.channel_spec()?,
            modulation_order: eff.modulation_order,
            master_seed: eff.seed,
            bit_budget: eff.bit_budget,
            settings: RunSettings {
                target_errors: eff.target_errors,
                max_bits: eff.max_bits_per_cell,
                min_bits: 0,
                equalize: eff.equalizer,
                noise_scale: 1.0,
            },
        };
        grid.validate()?;
        // Surface per-cell parameter errors (such as a non-integer prefix)
        // up front instead of as partial results.
        for cell in grid.cells() {
            grid.cell_config(&cell)?;
        }
        Ok(grid)
    }
}
