use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ofdmsim::channel::{ebno_to_noise_variance, per_sample_snr_db};
use ofdmsim::config::GridFile;
use ofdmsim::plot::emit_plot;
use ofdmsim::records::{read_records, write_records, RecordFormat};
use ofdmsim::validate::validate;
use ofdmsim::{run_grid, run_grid_with_workers, ChannelKind, CpFraction, Error, GridOutcome, SweepGrid, DEFAULT_SEED};

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "ofdmsim", version, about = "OFDM link BER simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full grid and write records (and optionally plots).
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        /// Records file; `.json` selects JSON, anything else CSV.
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        /// Directory for one SVG per FFT size.
        #[arg(long)]
        plots: Option<PathBuf>,
    },
    /// Run one cell and print its record as JSON.
    Single {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Compare Monte Carlo BER on AWGN against theory.
    Validate {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Multiplies the calibrated noise variance (negative control).
        #[arg(long, default_value_t = 1.0)]
        noise_scale: f64,
    },
    /// Render SVG plots from an existing records file.
    Plot {
        /// CSV or JSON records written by `sweep`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        plots: PathBuf,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    /// JSON grid file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed [default: 0x0FDA0FDA0FDA0FDA].
    #[arg(long)]
    seed: Option<u64>,
    /// FFT sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    fft: Option<Vec<usize>>,
    /// Prefix fractions such as 1/4, comma separated.
    #[arg(long, value_delimiter = ',')]
    cp: Option<Vec<CpFraction>>,
    /// Eb/No points in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ebno: Option<Vec<f64>>,
    /// awgn, flat or tdl.
    #[arg(long)]
    channel: Option<ChannelKind>,
    /// Explicit TDL power-delay profile, comma separated.
    #[arg(long, value_delimiter = ',')]
    tdl_taps: Option<Vec<f64>>,
    /// Number of taps of the exponential TDL profile.
    #[arg(long)]
    tdl_len: Option<usize>,
    /// Power decay per tap of the exponential TDL profile.
    #[arg(long)]
    tdl_decay_db: Option<f64>,
    /// Charge the prefix energy against Eb/No.
    #[arg(long)]
    account_cp_overhead: bool,
    #[arg(long)]
    modulation_order: Option<usize>,
    /// Bit cap per cell.
    #[arg(long)]
    max_bits: Option<u64>,
    /// Error count that ends a cell early.
    #[arg(long)]
    target_errors: Option<u64>,
    /// Bits per burst (one channel draw).
    #[arg(long)]
    bit_budget: Option<usize>,
    /// Demap raw DFT outputs without zero-forcing.
    #[arg(long)]
    no_equalizer: bool,
}

impl GridArgs {
    fn overrides(&self) -> GridFile {
        GridFile {
            fft_sizes: self.fft.clone(),
            cp_fractions: self.cp.clone(),
            ebno_db: self.ebno.clone(),
            channel: self.channel,
            tdl_taps: self.tdl_taps.clone(),
            tdl_len: self.tdl_len,
            tdl_decay_db: self.tdl_decay_db,
            account_cp_overhead: self.account_cp_overhead.then_some(true),
            modulation_order: self.modulation_order,
            seed: self.seed,
            max_bits_per_cell: self.max_bits,
            target_errors: self.target_errors,
            bit_budget: self.bit_budget,
            equalizer: self.no_equalizer.then_some(false),
        }
    }

    /// Config file overlaid with flags, echoed to stderr.
    fn resolve(&self, command: &str) -> Result<SweepGrid, Failure> {
        let base = match &self.config {
            Some(path) => GridFile::load(path).map_err(|e| Failure::config(describe(path, e)))?,
            None => GridFile::default(),
        };
        let file = base.overlay(self.overrides());
        let effective = file.resolve().map_err(Failure::from)?;
        let echo = json!({ "command": command, "config": effective });
        eprintln!("{}", serde_json::to_string_pretty(&echo).expect("config serializes"));
        Ok(file.to_grid()?)
    }
}

fn describe(path: &Path, e: Error) -> String {
    match e {
        Error::Io { source, .. } => format!("cannot read config {}: {source}", path.display()),
        other => other.to_string(),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_io() { EXIT_IO } else { EXIT_CONFIG },
            message: e.to_string(),
        }
    }
}

fn workers() -> Result<Option<usize>, Failure> {
    match std::env::var("OFDMSIM_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Failure::config(format!("OFDMSIM_WORKERS must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn execute(grid: &SweepGrid) -> Result<GridOutcome, Failure> {
    let outcome = match workers()? {
        Some(n) => run_grid_with_workers(grid, n)?,
        None => run_grid(grid)?,
    };
    for f in &outcome.failures {
        eprintln!(
            "cell {} (fft {}, cp {}, {} dB) failed: {}",
            f.cell.cell_id, f.cell.fft_size, f.cell.cp_fraction, f.cell.ebno_db, f.message
        );
    }
    Ok(outcome)
}

fn cmd_sweep(grid_args: &GridArgs, out: &Path, plots: Option<&Path>) -> Result<u8, Failure> {
    let grid = grid_args.resolve("sweep")?;
    let outcome = execute(&grid)?;
    write_records(&outcome.records, out, RecordFormat::from_path(out))?;
    eprintln!("wrote {} records to {}", outcome.records.len(), out.display());
    if let Some(dir) = plots {
        if !outcome.records.is_empty() {
            for path in emit_plot(&outcome.records, dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(if outcome.is_complete() { 0 } else { EXIT_CONFIG })
}

fn cmd_single(grid_args: &GridArgs) -> Result<u8, Failure> {
    let grid = grid_args.resolve("single")?;
    if grid.cell_count() != 1 {
        return Err(Failure::config(format!(
            "single needs exactly one FFT size, prefix fraction and Eb/No point; got {} cells",
            grid.cell_count()
        )));
    }
    let cell = grid.cells()[0];
    let record = grid.run_cell(&cell)?;
    let config = grid.cell_config(&cell)?;
    let variance = ebno_to_noise_variance(
        cell.ebno_db,
        config.modulation_order(),
        config.fft_size(),
        config.cp_len(),
        grid.channel.account_cp_overhead,
    )?;
    let mut value = serde_json::to_value(&record).expect("record serializes");
    if let Value::Object(map) = &mut value {
        map.insert("equalizer".into(), json!(grid.settings.equalize));
        map.insert("account_cp_overhead".into(), json!(grid.channel.account_cp_overhead));
        map.insert("snr_db".into(), json!(per_sample_snr_db(variance)));
        map.insert("modulation_order".into(), json!(grid.modulation_order));
    }
    println!("{}", serde_json::to_string_pretty(&value).expect("record serializes"));
    Ok(0)
}

fn cmd_validate(seed: u64, noise_scale: f64) -> Result<u8, Failure> {
    if !(noise_scale.is_finite() && noise_scale > 0.0) {
        return Err(Failure::config("--noise-scale must be positive"));
    }
    eprintln!(
        "{}",
        json!({ "command": "validate", "seed": seed, "noise_scale": noise_scale })
    );
    let report = validate(seed, noise_scale)?;
    print!("{}", report.table());
    if report.all_pass() {
        println!("validation passed");
        Ok(0)
    } else {
        println!("validation FAILED");
        Ok(EXIT_VALIDATION)
    }
}

fn cmd_plot(input: &Path, plots: &Path) -> Result<u8, Failure> {
    let records = read_records(input, RecordFormat::from_path(input))?;
    for path in emit_plot(&records, plots)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep { grid, out, plots } => cmd_sweep(grid, out, plots.as_deref()),
        Command::Single { grid } => cmd_single(grid),
        Command::Validate { seed, noise_scale } => cmd_validate(*seed, *noise_scale),
        Command::Plot { input, plots } => cmd_plot(input, plots),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
