//! CSV and JSON persistence of [`BerRecord`]s.
//!
//! Both formats use the same keys in the same order. Floats are written with
//! 17 significant digits so they parse back to the identical `f64`, and the
//! prefix fraction is always the exact string form (`"1/4"`).

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::BerRecord;

pub const COLUMNS: [&str; 12] = [
    "fft_size",
    "cp_fraction",
    "channel",
    "ebno_db",
    "bits_sent",
    "bit_errors",
    "ber",
    "ci_low",
    "ci_high",
    "zf_clamps",
    "seed",
    "cell_id",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    Json,
}

impl RecordFormat {
    /// `.json` selects JSON; anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => RecordFormat::Json,
            _ => RecordFormat::Csv,
        }
    }
}

/// `f64` with 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fields(r: &BerRecord) -> [String; 12] {
    [
        r.fft_size.to_string(),
        r.cp_fraction.to_string(),
        r.channel.clone(),
        format_float(r.ebno_db),
        r.bits_sent.to_string(),
        r.bit_errors.to_string(),
        format_float(r.ber),
        format_float(r.ci_low),
        format_float(r.ci_high),
        r.zf_clamps.to_string(),
        r.seed.to_string(),
        r.cell_id.to_string(),
    ]
}

pub fn to_csv(records: &[BerRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record(fields(r)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn to_json(records: &[BerRecord]) -> String {
    if records.is_empty() {
        return "[]\n".to_string();
    }
    let mut out = String::from("[\n");
    for (i, r) in records.iter().enumerate() {
        let values = fields(r);
        out.push_str("  {");
        for (j, (key, value)) in COLUMNS.iter().zip(values).enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            // Only the string-typed columns need quoting.
            let value = match *key {
                "cp_fraction" | "channel" => serde_json::to_string(&value).expect("string"),
                _ => value,
            };
            out.push_str(&format!("\"{key}\": {value}"));
        }
        out.push('}');
        out.push_str(if i + 1 < records.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}

pub fn write_records(records: &[BerRecord], path: &Path, format: RecordFormat) -> Result<()> {
    let body = match format {
        RecordFormat::Csv => to_csv(records),
        RecordFormat::Json => to_json(records),
    };
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> std::result::Result<Vec<BerRecord>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

pub fn read_records(path: &Path, format: RecordFormat) -> Result<Vec<BerRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        RecordFormat::Csv => parse_csv(&text).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        }),
        RecordFormat::Json => serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        }),
    }
}
