//! Self-contained SVG waterfall plots, one file per FFT size.
//!
//! x is Eb/No in dB on a linear axis, y is BER on a log axis spanning
//! [`BER_FLOOR`] to 1. Each prefix fraction gets its own polyline. Cells
//! with zero observed errors are drawn at the floor with a hollow marker.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::framing::CpFraction;
use crate::metrics::BerRecord;

pub const BER_FLOOR: f64 = 1e-7;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

pub fn plot_file_name(fft_size: usize) -> String {
    format!("ber_fft{fft_size}.svg")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Tick spacing of 1, 2 or 5 times a power of ten giving roughly `target` ticks.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

struct Axes {
    x_min: f64,
    x_max: f64,
    decades: f64,
}

impl Axes {
    fn x(&self, ebno: f64) -> f64 {
        LEFT + (ebno - self.x_min) / (self.x_max - self.x_min) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, ber: f64) -> f64 {
        let t = (ber.max(BER_FLOOR).log10() - BER_FLOOR.log10()) / self.decades;
        HEIGHT - BOTTOM - t * (HEIGHT - TOP - BOTTOM)
    }
}

/// Renders the panel for one FFT size.
pub fn render_panel(fft_size: usize, records: &[&BerRecord]) -> String {
    let mut x_min = records.iter().map(|r| r.ebno_db).fold(f64::INFINITY, f64::min);
    let mut x_max = records.iter().map(|r| r.ebno_db).fold(f64::NEG_INFINITY, f64::max);
    if x_max - x_min < 1e-9 {
        x_min -= 1.0;
        x_max += 1.0;
    }
    let axes = Axes {
        x_min,
        x_max,
        decades: -BER_FLOOR.log10(),
    };

    let mut series: BTreeMap<std::cmp::Reverse<CpFraction>, Vec<&BerRecord>> = BTreeMap::new();
    for r in records {
        series.entry(std::cmp::Reverse(r.cp_fraction)).or_default().push(r);
    }
    let mut channels: Vec<&str> = records.iter().map(|r| r.channel.as_str()).collect();
    channels.sort_unstable();
    channels.dedup();

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="15">BER vs Eb/No, FFT size {fft_size} ({})</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(&channels.join(", "))
    );

    // Decade grid and y labels.
    for d in 0..=(axes.decades as i32) {
        let v = BER_FLOOR * 10f64.powi(d);
        let y = axes.y(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"##,
            WIDTH - RIGHT,
            LEFT - 8.0,
            y + 4.0,
            d - axes.decades as i32
        );
    }
    let step = nice_step(x_max - x_min, 10.0);
    let first = (x_min / step).ceil() as i64;
    let last = (x_max / step + 1e-9).floor() as i64;
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    for i in first..=last {
        let tick = i as f64 * step;
        let x = axes.x(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#eeeeee"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{:.*}</text>"##,
            HEIGHT - BOTTOM,
            HEIGHT - BOTTOM + 18.0,
            decimals,
            tick
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Eb/No (dB)</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">Bit error rate</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    let series_count = series.len();
    for (i, (fraction, mut pts)) in series.into_iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        pts.sort_by(|a, b| a.ebno_db.total_cmp(&b.ebno_db));
        let path: Vec<String> = pts
            .iter()
            .map(|r| format!("{:.2},{:.2}", axes.x(r.ebno_db), axes.y(r.ber)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        for r in &pts {
            let (x, y) = (axes.x(r.ebno_db), axes.y(r.ber));
            if r.bit_errors == 0 {
                let _ = writeln!(
                    svg,
                    r#"<path class="floor" d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} Z" fill="white" stroke="{color}"/>"#,
                    x,
                    y - 5.0,
                    x - 5.0,
                    y + 4.0,
                    x + 5.0,
                    y + 4.0
                );
            } else {
                let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
            }
        }
        let ly = TOP + 20.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">CP {}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            fraction.0
        );
    }
    let ly = TOP + 20.0 + 20.0 * series_count as f64 + 10.0;
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{ly:.2}" font-size="10">hollow: no errors</text>"#,
        WIDTH - RIGHT + 15.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Writes one SVG per FFT size into `dir` and returns the paths written.
pub fn emit_plot(records: &[BerRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::config("no records to plot"));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut by_size: BTreeMap<usize, Vec<&BerRecord>> = BTreeMap::new();
    for r in records {
        by_size.entry(r.fft_size).or_default().push(r);
    }
    let mut written = Vec::with_capacity(by_size.len());
    for (n, recs) in by_size {
        let path = dir.join(plot_file_name(n));
        fs::write(&path, render_panel(n, &recs)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
