//! Acceptance checks A1 to A9. Each prints one line; the process exits
//! non-zero if any check fails.

use std::time::Instant;

use ofdmsim::channel::{apply_channel, ebno_to_noise_variance, exponential_pdp, per_sample_snr_db, realize_channel};
use ofdmsim::config::{DEFAULT_TDL_DECAY_DB, DEFAULT_TDL_LEN};
use ofdmsim::equalizer::channel_freq_response;
use ofdmsim::framing::GRID_FFT_SIZES;
use ofdmsim::metrics::theoretical_mpsk_ber;
use ofdmsim::records::{to_csv, write_records, RecordFormat};
use ofdmsim::transform::{dft_direct, Direction};
use ofdmsim::validate::{
    run_noiseless_grid, run_ofdm_awgn, run_raw_modem, Count, MAX_BITS, MIN_BITS, TARGET_ERRORS, THEORY_REL_TOL,
    VALIDATION_EBNO_DB, VALIDATION_ORDER,
};
use ofdmsim::{
    make_stream, run_cell, run_grid_with_workers, BerRecord, ChannelSpec, Complex, CpFraction, FftPlan, Link,
    OfdmConfig, RunSettings, SpectralBlock, SweepGrid, DEFAULT_SEED,
};

type Outcome = (bool, String);
type Check<'a> = (&'static str, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn overlaps(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

fn frac(s: &str) -> CpFraction {
    s.parse().unwrap()
}

fn raw_points() -> Vec<Count> {
    VALIDATION_EBNO_DB
        .iter()
        .enumerate()
        .map(|(i, &eb)| {
            run_raw_modem(
                VALIDATION_ORDER,
                eb,
                DEFAULT_SEED,
                i as u64,
                1.0,
                (MIN_BITS, TARGET_ERRORS, MAX_BITS),
            )
            .unwrap()
        })
        .collect()
}

fn a1(raw: &[Count]) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (&eb, c) in VALIDATION_EBNO_DB.iter().zip(raw) {
        let theory = theoretical_mpsk_ber(eb, VALIDATION_ORDER).unwrap();
        let (lo, hi) = c.interval();
        let rel = c.ber() / theory - 1.0;
        ok &= c.bits >= 1_000_000 && rel.abs() <= THEORY_REL_TOL && lo <= theory && theory <= hi;
        detail.push(format!(
            "{eb} dB: {:.3e} vs {:.3e} ({:+.1}%, {} bits)",
            c.ber(),
            theory,
            100.0 * rel,
            c.bits
        ));
    }
    (ok, detail.join("; "))
}

fn a2(raw: &[Count]) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [64usize, 512] {
        for (i, &eb) in VALIDATION_EBNO_DB.iter().enumerate() {
            let c = run_ofdm_awgn(
                n,
                frac("1/4"),
                eb,
                DEFAULT_SEED,
                100 + (n * 10 + i) as u64,
                1.0,
                (MIN_BITS, TARGET_ERRORS, MAX_BITS),
            )
            .unwrap();
            let hit = overlaps(c.interval(), raw[i].interval());
            ok &= hit;
            detail.push(format!(
                "N={n} {eb} dB {:.3e}/{:.3e}{}",
                c.ber(),
                raw[i].ber(),
                if hit { "" } else { " (disjoint)" }
            ));
        }
    }
    (ok, detail.join("; "))
}

fn a3() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for ch in ["awgn", "flat", "tdl"] {
        let c = run_noiseless_grid(ch, DEFAULT_SEED, 30_000).unwrap();
        ok &= c.errors == 0;
        detail.push(format!("{ch} {}/{}", c.errors, c.bits));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 10.0;
    (
        ok,
        format!("{} errors over 20 cells each, {secs:.2} s", detail.join(", ")),
    )
}

fn a4() -> Outcome {
    let spec = ChannelSpec::tdl(&exponential_pdp(9, 1.0).unwrap()).unwrap();
    let mut ok = true;
    let (mut worst_long, mut best_short) = (0.0f64, f64::INFINITY);
    let mut s = make_stream(DEFAULT_SEED, 4);
    for n in GRID_FFT_SIZES {
        for g in CpFraction::grid_union().into_iter().chain([CpFraction::NONE]) {
            let link = Link::new(OfdmConfig::new(n, g, 8).unwrap()).unwrap();
            for _ in 0..5 {
                let bits = s.draw_bits(3 * n * 4);
                let x = link.constellation().map(&bits).unwrap();
                let tx = link.transmit(&bits).unwrap();
                let real = realize_channel(&spec, 0.0, &mut s);
                let rx = apply_channel(&tx.samples, &real, &mut s);
                let h = channel_freq_response(&real, n);
                let dev = link
                    .demodulate(&rx)
                    .unwrap()
                    .iter()
                    .flatten()
                    .zip(&x)
                    .enumerate()
                    .map(|(i, (y, x))| (y - h.as_slice()[i % n] * x).norm())
                    .fold(0.0, f64::max);
                if link.config().cp_len() >= 8 {
                    ok &= dev < 1e-9;
                    worst_long = worst_long.max(dev);
                } else {
                    ok &= dev > 1e-3;
                    best_short = best_short.min(dev);
                }
            }
        }
    }
    (
        ok,
        format!("L >= 8 max dev {worst_long:.1e}; L < 8 min dev {best_short:.1e}"),
    )
}

fn a5() -> Outcome {
    let settings = RunSettings {
        target_errors: 6000,
        max_bits: 50_000_000,
        ..RunSettings::default()
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, n) in GRID_FFT_SIZES.into_iter().enumerate() {
        let memory = 3 * n / 16;
        let ch = ChannelSpec::tdl(&vec![1.0; memory + 1]).unwrap();
        let r: Vec<BerRecord> = ["1/32", "1/4", "1/2"]
            .iter()
            .enumerate()
            .map(|(j, g)| {
                let cfg = OfdmConfig::new(n, frac(g), 8).unwrap();
                run_cell(&cfg, &ch, 20.0, DEFAULT_SEED, (10 * i + j) as u64, &settings).unwrap()
            })
            .collect();
        let ratio = r[0].ber / r[1].ber;
        let flat = r[1].overlaps(&r[2]);
        ok &= ratio > 10.0 && flat;
        detail.push(format!(
            "N={n} mem={memory}: x{ratio:.1}, 1/4 {:.2e} 1/2 {:.2e}{}",
            r[1].ber,
            r[2].ber,
            if flat { "" } else { " (disjoint)" }
        ));
    }
    (ok, detail.join("; "))
}

fn a6() -> Outcome {
    let ch = ChannelSpec::tdl(&exponential_pdp(DEFAULT_TDL_LEN, DEFAULT_TDL_DECAY_DB).unwrap()).unwrap();
    let settings = RunSettings {
        target_errors: 2000,
        max_bits: 20_000_000,
        ..RunSettings::default()
    };
    let g = frac("1/32");
    let small = run_cell(
        &OfdmConfig::new(64, g, 8).unwrap(),
        &ch,
        20.0,
        DEFAULT_SEED,
        60,
        &settings,
    )
    .unwrap();
    let large = run_cell(
        &OfdmConfig::new(512, g, 8).unwrap(),
        &ch,
        20.0,
        DEFAULT_SEED,
        61,
        &settings,
    )
    .unwrap();
    let ok = large.ber < small.ber && large.ci_high < small.ci_low;
    (
        ok,
        format!(
            "memory {}, G=1/32: N=64 {:.3e} [{:.2e}, {:.2e}], N=512 {:.3e} [{:.2e}, {:.2e}]",
            ch.memory(),
            small.ber,
            small.ci_low,
            small.ci_high,
            large.ber,
            large.ci_low,
            large.ci_high
        ),
    )
}

fn a7() -> Outcome {
    let mut s = make_stream(DEFAULT_SEED, 7);
    let (mut oracle, mut round, mut parseval) = (0.0f64, 0.0f64, 0.0f64);
    for n in GRID_FFT_SIZES {
        let plan = FftPlan::new(n).unwrap();
        for _ in 0..100 {
            let x: Vec<Complex<f64>> = (0..n)
                .map(|_| {
                    let (a, b) = s.draw_gaussian_pair();
                    Complex::new(a, b)
                })
                .collect();
            let mut fwd = x.clone();
            plan.forward(&mut fwd).unwrap();
            let mut inv = x.clone();
            plan.inverse(&mut inv).unwrap();
            let block = SpectralBlock::time(x.clone());
            let df = dft_direct(&block, Direction::Forward);
            let di = dft_direct(&block, Direction::Inverse);
            for k in 0..n {
                oracle = oracle
                    .max((fwd[k] - df.samples[k]).norm())
                    .max((inv[k] - di.samples[k]).norm());
            }
            let mut back = fwd.clone();
            plan.inverse(&mut back).unwrap();
            round = round.max(back.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
            let ex: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let ef: f64 = fwd.iter().map(|v| v.norm_sqr()).sum();
            parseval = parseval.max((ef / ex - 1.0).abs());
        }
    }
    let ok = oracle < 1e-10 && round < 1e-12 && parseval < 1e-10;
    (
        ok,
        format!("oracle {oracle:.1e}, round trip {round:.1e}, Parseval {parseval:.1e}"),
    )
}

fn a8() -> Outcome {
    let grid = SweepGrid {
        fft_sizes: GRID_FFT_SIZES.to_vec(),
        cp_fractions: CpFraction::grid_default(),
        ebno_points_db: vec![0.0, 10.0, 20.0],
        channel: ChannelSpec::tdl(&exponential_pdp(DEFAULT_TDL_LEN, DEFAULT_TDL_DECAY_DB).unwrap()).unwrap(),
        modulation_order: 8,
        master_seed: DEFAULT_SEED,
        bit_budget: None,
        settings: RunSettings {
            target_errors: 50,
            max_bits: 30_000,
            ..RunSettings::default()
        },
    };
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for workers in [1, 4] {
        let out = run_grid_with_workers(&grid, workers).unwrap();
        let path = dir.path().join(format!("w{workers}.csv"));
        write_records(&out.records, &path, RecordFormat::Csv).unwrap();
        files.push(std::fs::read(&path).unwrap());
        assert_eq!(to_csv(&out.records).as_bytes(), &files[files.len() - 1][..]);
    }
    let ok = files[0] == files[1];
    (
        ok,
        format!("{} cells, {} bytes, 1 vs 4 workers", grid.cell_count(), files[0].len()),
    )
}

fn a9() -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for (i, (eb, overhead)) in [(0.0, false), (10.0, false), (20.0, false), (10.0, true)]
        .into_iter()
        .enumerate()
    {
        let cfg = OfdmConfig::new(64, frac("1/4"), 8).unwrap();
        let link = Link::new(cfg).unwrap();
        let var = ebno_to_noise_variance(eb, 8, 64, cfg.cp_len(), overhead).unwrap();
        let spec = ChannelSpec::awgn();
        let mut s = make_stream(DEFAULT_SEED, 90 + i as u64);
        let (mut signal, mut noise, mut samples) = (0.0, 0.0, 0usize);
        while samples < 1_000_000 {
            let bits = s.draw_bits(3 * 64 * 50);
            let tx = link.transmit(&bits).unwrap();
            let real = realize_channel(&spec, var, &mut s);
            let rx = apply_channel(&tx.samples, &real, &mut s);
            for (x, y) in tx.samples.iter().zip(&rx) {
                signal += x.norm_sqr();
                noise += (y - x).norm_sqr();
            }
            samples += tx.samples.len();
        }
        let measured = 10.0 * (signal / noise).log10();
        let err = (measured - per_sample_snr_db(var)).abs();
        worst = worst.max(err);
        ok &= err < 0.1;
    }
    (ok, format!("max |measured - configured| {worst:.4} dB over 4 settings"))
}

fn main() {
    let started = Instant::now();
    let raw = std::sync::OnceLock::new();
    let checks: Vec<Check> = vec![
        (
            "A1",
            "raw 8-PSK matches theory",
            Box::new(|| a1(raw.get_or_init(raw_points))),
        ),
        (
            "A2",
            "OFDM over AWGN matches raw modem",
            Box::new(|| a2(raw.get_or_init(raw_points))),
        ),
        ("A3", "noiseless grid is error free", Box::new(a3)),
        ("A4", "circular convolution iff L >= memory", Box::new(a4)),
        ("A5", "short prefix error floor", Box::new(a5)),
        ("A6", "larger FFT beats fixed channel", Box::new(a6)),
        ("A7", "fast transform matches direct DFT", Box::new(a7)),
        ("A8", "worker count leaves CSV unchanged", Box::new(a8)),
        ("A9", "per-sample SNR calibration", Box::new(a9)),
    ];
    let mut failed = 0;
    for (id, name, check) in &checks {
        let t = Instant::now();
        let (ok, detail) = check();
        if !ok {
            failed += 1;
        }
        println!(
            "{id} {} {name} ({:.1} s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} passed in {:.1} s",
        checks.len() - failed,
        checks.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
