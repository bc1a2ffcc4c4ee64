//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use bandod::bandwidth::estimate_bandwidth;
use bandod::bench::{generate_dataset, pairwise_prf, perturb_cer, position_labels, SeriesDatasetConfig};
use bandod::discovery::{
    abod_error_ratio, bcod_segment, discover_abcod, discover_abcod_until, discover_abcod_with, DpOptions, DpStrategy,
};
use bandod::lmb::{compute_lmb, compute_lmb_oriented};
use bandod::model::{BandOdSpec, Direction, Orientation};
use bandod::oracle::{brute_lmb, brute_min_bcod_segments, brute_segmentation};
use bandod::pieces::{compute_pieces, compute_pre_pieces, discover_abcod_pieces, discover_abcod_pieces_with};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const LMB_RUNTIME_LIMIT: Duration = Duration::from_millis(10);
const ORACLE_SEQUENCES: usize = 5_000;
const ORACLE_MAX_LEN: usize = 12;
const ORACLE_RUNTIME_LIMIT: Duration = Duration::from_secs(300);
const SCALING_SIZES: [usize; 3] = [10_000, 20_000, 40_000];
const SCALING_RATIO_LIMIT: f64 = 2.6;
const SCALING_REPEATS: usize = 15;
const PIECES_INPUT_LEN: usize = 10_000;
const PIECES_MAX_COUNT: usize = 50;
const PIECES_SPEEDUP: u32 = 10;
const QUALITY_SEEDS: u64 = 10;
const QUALITY_ERROR_RATE: f64 = 0.05;
const QUALITY_CLEAN_F1: f64 = 1.0;
const QUALITY_NOISY_F1: f64 = 0.85;

const YEARS: [Option<i64>; 22] = [
    Some(1992),
    Some(2012),
    Some(1996),
    Some(1995),
    Some(1999),
    Some(2000),
    Some(1999),
    Some(2001),
    Some(2002),
    Some(2000),
    Some(1998),
    Some(1997),
    Some(1996),
    Some(1994),
    Some(1982),
    Some(1987),
    Some(1989),
    None,
    Some(1991),
    Some(1990),
    Some(1991),
    Some(1992),
];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_bandod"))
        .env_remove("BANDOD_THREADS")
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_json(args: &[&str]) -> Value {
    let (code, out) = cli(args);
    assert_eq!(code, 0, "{args:?} exited with {code}");
    serde_json::from_slice(&out).expect("report is JSON")
}

fn two_series() -> Vec<Option<i64>> {
    YEARS[..9].iter().chain(&YEARS[14..]).copied().collect()
}

fn best_of<F: FnMut()>(repeats: usize, mut f: F) -> Duration {
    (0..repeats)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .min()
        .unwrap()
}

fn golden_lmb() -> Outcome {
    let canada = data("music_canada.csv");
    let us = data("music_us_desc.csv");
    let asc = cli_json(&[
        "lmb",
        "-i",
        &canada,
        "--x",
        "cat",
        "--y",
        "year",
        "--delta",
        "1",
        "--direction",
        "asc",
        "--id",
        "id",
    ]);
    let desc = cli_json(&[
        "lmb",
        "-i",
        &us,
        "--x",
        "cat",
        "--y",
        "year",
        "--delta",
        "1",
        "--direction",
        "desc",
        "--id",
        "id",
    ]);
    let g = &asc["groups"][0];
    let asc_ok = g["length"] == 8 && g["outlier_ids"] == serde_json::json!(["t2"]);
    let desc_ok = desc["groups"][0]["length"] == 5 && desc["groups"][0]["direction"] == "desc";
    let lib_ok = compute_lmb(&YEARS[..9], 1, Direction::Asc).outliers == vec![2]
        && compute_lmb(&YEARS[9..14], 1, Direction::Desc).length == 5;
    let elapsed = best_of(5, || {
        std::hint::black_box(compute_lmb(std::hint::black_box(&YEARS[..9]), 1, Direction::Asc));
        std::hint::black_box(compute_lmb(std::hint::black_box(&YEARS[9..14]), 1, Direction::Desc));
    });
    outcome(
        asc_ok && desc_ok && lib_ok && elapsed < LMB_RUNTIME_LIMIT,
        format!(
            "asc length {} outliers {}, desc length {}, {:?} (limit {:?})",
            g["length"], g["outlier_ids"], desc["groups"][0]["length"], elapsed, LMB_RUNTIME_LIMIT
        ),
    )
}

fn golden_abod() -> Outcome {
    let canada = data("music_canada.csv");
    let r = cli_json(&[
        "discover",
        "-i",
        &canada,
        "--x",
        "cat",
        "--y",
        "year",
        "--mode",
        "abod",
        "--delta",
        "1",
        "--direction",
        "asc",
    ]);
    let ratio = r["groups"][0]["totals"]["error_ratio"].clone();
    let lib = abod_error_ratio(&YEARS[..9], 1, Orientation::Asc).ratio;
    outcome(
        ratio == "1/9" && (*lib.numer(), *lib.denom()) == (1, 9),
        format!("error ratio {ratio}"),
    )
}

fn golden_bcod() -> Outcome {
    let canada = data("music_canada.csv");
    let r = cli_json(&[
        "discover",
        "-i",
        &canada,
        "--x",
        "cat",
        "--y",
        "year",
        "--mode",
        "bcod",
        "--delta",
        "1",
        "--direction",
        "asc",
        "--id",
        "id",
    ]);
    let spans: Vec<(String, String)> = r["groups"][0]["segments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            (
                s["start_id"].as_str().unwrap().into(),
                s["end_id"].as_str().unwrap().into(),
            )
        })
        .collect();
    let lib: Vec<_> = bcod_segment(&YEARS[..9], 1, Orientation::Asc)
        .segments
        .iter()
        .map(|s| (s.start, s.end))
        .collect();
    let expected = vec![
        ("t1".to_string(), "t2".to_string()),
        ("t3".to_string(), "t9".to_string()),
    ];
    outcome(
        spans == expected && lib == vec![(1, 2), (3, 9)],
        format!("segments {spans:?}"),
    )
}

fn golden_abcod() -> Outcome {
    let series = data("music_series.csv");
    let mut notes = Vec::new();
    let mut pass = true;
    for flag in ["--pieces", "--no-pieces"] {
        let r = cli_json(&[
            "discover",
            "-i",
            &series,
            "--x",
            "country,cat",
            "--y",
            "year",
            "--mode",
            "abcod",
            "--delta",
            "1",
            "--epsilon",
            "1",
            "--direction",
            "asc",
            flag,
        ]);
        let t = &r["groups"][0]["totals"];
        pass &= t["segments"] == 2 && t["gain"] == 112;
        notes.push(format!("{flag}: {} segments gain {}", t["segments"], t["gain"]));
    }
    let ys = two_series();
    let spec = |o| BandOdSpec::new(o, 1, 1).unwrap();
    for o in [Orientation::Asc, Orientation::Bi] {
        pass &=
            discover_abcod(&ys, &spec(o)).total_gain == 112 && discover_abcod_pieces(&ys, &spec(o)).total_gain == 112;
    }
    let g = |o| -> Vec<i64> {
        let (_, t) = discover_abcod_with(&ys, &spec(o), DpOptions::default()).unwrap();
        t.gain[1..].iter().map(|g| g.unwrap()).collect()
    };
    let bi = g(Orientation::Bi);
    let expected = vec![1, 4, 5, 10, 15, 24, 35, 48, 63, 64, 67, 72, 72, 79, 88, 99, 112];
    let asc = g(Orientation::Asc);
    pass &= bi == expected && asc[4..9] == [15, 24, 35, 48, 63] && asc[16] == 112;
    notes.push(format!("bi G {bi:?}, asc G[5..9] {:?}", &asc[4..9]));
    outcome(pass, notes.join("; "))
}

fn golden_pieces() -> Outcome {
    let ys = two_series();
    let pre: Vec<_> = compute_pre_pieces(&ys, 1)
        .iter()
        .map(|p| (p.start, p.end, p.direction.as_str()))
        .collect();
    let pieces: Vec<_> = compute_pieces(&ys, 1).iter().map(|p| (p.start, p.end)).collect();
    let pass =
        pre == vec![
            (1, 2, "asc"),
            (2, 4, "desc"),
            (3, 9, "asc"),
            (8, 10, "desc"),
            (10, 17, "asc"),
        ] && pieces == vec![(1, 1), (2, 2), (3, 4), (5, 7), (8, 9), (10, 10), (11, 17)];
    outcome(pass, format!("pre-pieces {pre:?}; pieces {pieces:?}"))
}

#[derive(Default)]
struct Tally {
    checks: usize,
    mismatches: usize,
    first: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.mismatches += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn summary(&self, name: &str) -> String {
        match &self.first {
            None => format!("{name} 0/{}", self.checks),
            Some(f) => format!("{name} {}/{} (first: {f})", self.mismatches, self.checks),
        }
    }
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let (mut lmb, mut abcod, mut bcod, mut upper, mut asc_eq) = (
        Tally::default(),
        Tally::default(),
        Tally::default(),
        Tally::default(),
        Tally::default(),
    );
    let orientations = [Orientation::Asc, Orientation::Desc, Orientation::Bi];
    for _ in 0..ORACLE_SEQUENCES {
        let n = rng.gen_range(0..=ORACLE_MAX_LEN);
        let ys: Vec<Option<i64>> = (0..n).map(|_| Some(rng.gen_range(0..=9))).collect();
        for delta in 0..=2 {
            for o in orientations {
                let got = compute_lmb_oriented(&ys, delta, o).length;
                let want = brute_lmb(&ys, delta, o).unwrap().0;
                lmb.check(got == want, || {
                    format!("{ys:?} d={delta} {} {got} vs {want}", o.as_str())
                });
                let b = bcod_segment(&ys, delta, o).segments.len();
                let bm = brute_min_bcod_segments(&ys, delta, o).unwrap();
                bcod.check(b == bm, || format!("{ys:?} d={delta} {} {b} vs {bm}", o.as_str()));
                for eps in 0..=2 {
                    let spec = BandOdSpec::new(o, delta, eps).unwrap();
                    let full = discover_abcod(&ys, &spec).total_gain;
                    let brute = brute_segmentation(&ys, delta, eps, o).unwrap();
                    let pieces = discover_abcod_pieces(&ys, &spec).total_gain;
                    let case = || format!("{ys:?} d={delta} e={eps} {}", o.as_str());
                    abcod.check(full == brute, || format!("{} {full} vs {brute}", case()));
                    upper.check(pieces <= full, || format!("{} pieces {pieces} full {full}", case()));
                    if o == Orientation::Asc {
                        asc_eq.check(pieces == full, || format!("{} pieces {pieces} full {full}", case()));
                    }
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let tallies = [
        (&lmb, "lmb"),
        (&abcod, "abcod"),
        (&bcod, "bcod"),
        (&upper, "pieces<=full"),
        (&asc_eq, "asc pieces==full"),
    ];
    let pass = tallies.iter().all(|(t, _)| t.mismatches == 0) && elapsed < ORACLE_RUNTIME_LIMIT;
    let detail: Vec<String> = tallies.iter().map(|(t, name)| t.summary(name)).collect();
    outcome(
        pass,
        format!(
            "{} sequences, mismatches: {}; {:.1?}",
            ORACLE_SEQUENCES,
            detail.join(", "),
            elapsed
        ),
    )
}

fn generated_ys(cfg: &SeriesDatasetConfig) -> Vec<Option<i64>> {
    generate_dataset(cfg).unwrap().0.iter().map(|r| r.y).collect()
}

fn cli_estimate(path: &str, x: &str) -> i64 {
    let r = cli_json(&["estimate-delta", "-i", path, "--x", x, "--y", "y", "--ratio", "0.4"]);
    r["groups"][0]["delta"].as_i64().unwrap()
}

fn bandwidth() -> Outcome {
    let sample = data("music_sample.csv");
    let table1 = cli_json(&[
        "estimate-delta",
        "-i",
        &sample,
        "--x",
        "country,cat",
        "--y",
        "year",
        "--ratio",
        "0.4",
    ]);
    let table1_delta = table1["groups"][0]["delta"].as_i64().unwrap();
    let cat_only = cli_json(&[
        "estimate-delta",
        "-i",
        &sample,
        "--x",
        "cat",
        "--y",
        "year",
        "--ratio",
        "0.4",
    ]);

    // one monotone series per dataset; mixed series are reported for information
    let dir = tempfile::tempdir().unwrap();
    let mut synth = Vec::new();
    for (jitter, want) in [(0, 0), (2, 2)] {
        let d = dir.path().join(format!("j{jitter}.csv")).display().to_string();
        let t = dir.path().join(format!("j{jitter}_truth.csv")).display().to_string();
        let j = jitter.to_string();
        cli_json(&[
            "generate",
            "--series",
            "1",
            "--size-min",
            "500",
            "--size-max",
            "500",
            "--jitter",
            &j,
            "--seed",
            "0",
            "-o",
            &d,
            "--truth",
            &t,
        ]);
        let got = cli_estimate(&d, "x");
        let cfg = SeriesDatasetConfig {
            series_count: 1,
            size_min: 500,
            size_max: 500,
            jitter,
            ..Default::default()
        };
        let lib = estimate_bandwidth(&generated_ys(&cfg), 20, 0.4, Orientation::Bi)
            .unwrap()
            .delta;
        synth.push((jitter, want, got, lib));
    }
    let mixed: Vec<i64> = [0, 2]
        .iter()
        .map(|&jitter| {
            let cfg = SeriesDatasetConfig {
                jitter,
                ..Default::default()
            };
            estimate_bandwidth(&generated_ys(&cfg), 20, 0.4, Orientation::Bi)
                .unwrap()
                .delta
        })
        .collect();
    let pass = table1_delta == 1 && synth.iter().all(|&(_, want, got, lib)| got == want && lib == want);
    let synth_notes: Vec<String> = synth
        .iter()
        .map(|(j, want, got, _)| format!("jitter {j}: {got} (want {want})"))
        .collect();
    outcome(
        pass,
        format!(
            "music sample (x = country,cat): {} mean {}; x = cat alone: {}; single series {}; 30 mixed series jitter 0/2: {:?}",
            table1_delta,
            table1["groups"][0]["mean"],
            cat_only["groups"][0]["delta"],
            synth_notes.join(", "),
            mixed
        ),
    )
}

fn scaling() -> Outcome {
    let cfg = SeriesDatasetConfig {
        series_count: 1_000,
        jitter: 2,
        seed: 11,
        ..Default::default()
    };
    let all = generated_ys(&cfg);
    let times: Vec<Duration> = SCALING_SIZES
        .iter()
        .map(|&n| {
            let ys = &all[..n];
            best_of(SCALING_REPEATS, || {
                std::hint::black_box(compute_lmb(std::hint::black_box(ys), 2, Direction::Asc));
            })
        })
        .collect();
    let ratios: Vec<f64> = times
        .windows(2)
        .map(|w| w[1].as_secs_f64() / w[0].as_secs_f64())
        .collect();
    let lmb_ok = ratios.iter().all(|&r| r <= SCALING_RATIO_LIMIT);

    let piece_cfg = SeriesDatasetConfig {
        series_count: 10,
        size_min: 1_000,
        size_max: 1_000,
        jitter: 1,
        seed: 5,
        ..Default::default()
    };
    let ys = generated_ys(&piece_cfg);
    let pieces_count = compute_pieces(&ys, 1).len();
    let spec = BandOdSpec::new(Orientation::Bi, 1, 1).unwrap();
    let t = Instant::now();
    let (pieces_seg, _) = discover_abcod_pieces_with(&ys, &spec, DpOptions::default()).unwrap();
    let pieces_time = t.elapsed();
    let budget = pieces_time * PIECES_SPEEDUP;
    let t = Instant::now();
    let full = discover_abcod_until(&ys, &spec, DpStrategy::Incremental, Instant::now() + budget);
    let full_time = t.elapsed();
    let full_note = match &full {
        None => format!("full DP still running after {full_time:.1?} (budget {budget:.1?})"),
        Some(seg) => format!("full DP finished in {full_time:.1?} with gain {}", seg.total_gain),
    };
    let pieces_ok = ys.len() == PIECES_INPUT_LEN && pieces_count <= PIECES_MAX_COUNT && full.is_none();
    outcome(
        lmb_ok && pieces_ok,
        format!(
            "lmb {:?} ratios {:.2?} (limit {SCALING_RATIO_LIMIT}); {} tuples in {} pieces, pieces DP {:.1?} gain {}, {}",
            times, ratios, ys.len(), pieces_count, pieces_time, pieces_seg.total_gain, full_note
        ),
    )
}

fn quality() -> Outcome {
    let mut clean = 0.0;
    let mut noisy = 0.0;
    for seed in 0..QUALITY_SEEDS {
        let cfg = SeriesDatasetConfig {
            seed,
            ..Default::default()
        };
        let spec = BandOdSpec::new(Orientation::Bi, cfg.jitter, 1).unwrap();
        let (rows, truth) = generate_dataset(&cfg).unwrap();
        let score = |rows: &[bandod::bench::GeneratedRow], truth: &[usize]| {
            let ys: Vec<_> = rows.iter().map(|r| r.y).collect();
            let seg = discover_abcod_pieces(&ys, &spec);
            pairwise_prf(&position_labels(&seg, ys.len()), truth).f1
        };
        clean += score(&rows, &truth.series);
        let (noisy_rows, noisy_truth) = perturb_cer(&rows, &truth, QUALITY_ERROR_RATE, 1_000 + seed).unwrap();
        noisy += score(&noisy_rows, &noisy_truth.series);
    }
    let clean = clean / QUALITY_SEEDS as f64;
    let noisy = noisy / QUALITY_SEEDS as f64;
    outcome(
        clean == QUALITY_CLEAN_F1 && noisy >= QUALITY_NOISY_F1,
        format!(
            "mean pairwise F1 over {QUALITY_SEEDS} seeds: {clean:.4} at 0% errors, {noisy:.4} at {:.0}% (need {QUALITY_CLEAN_F1} and >= {QUALITY_NOISY_F1})",
            QUALITY_ERROR_RATE * 100.0
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| -> PathBuf { dir.path().join(n) };
    let s = |n: &str| p(n).display().to_string();
    let (sample, series, canada) = (
        data("music_sample.csv"),
        data("music_series.csv"),
        data("music_canada.csv"),
    );
    let (gd, gt, pd, pt) = (s("gen.csv"), s("gen_truth.csv"), s("noisy.csv"), s("noisy_truth.csv"));
    let runs: Vec<Vec<&str>> = vec![
        vec!["discover", "-i", &series, "--x", "country,cat", "--y", "year"],
        vec![
            "discover",
            "-i",
            &series,
            "--x",
            "country,cat",
            "--y",
            "year",
            "--no-pieces",
            "--format",
            "tsv",
        ],
        vec![
            "discover",
            "-i",
            &sample,
            "--x",
            "cat",
            "--y",
            "year",
            "--delta",
            "auto",
            "--group-by",
            "country",
        ],
        vec!["discover", "-i", &canada, "--x", "cat", "--y", "year", "--mode", "abod"],
        vec!["discover", "-i", &canada, "--x", "cat", "--y", "year", "--mode", "bcod"],
        vec!["lmb", "-i", &sample, "--x", "country,cat", "--y", "year,month:month"],
        vec!["estimate-delta", "-i", &sample, "--x", "country,cat", "--y", "year"],
        vec![
            "rank-candidates",
            "-i",
            &sample,
            "--candidate",
            "cat=>year",
            "--candidate",
            "id=>year",
        ],
        vec!["generate", "--seed", "9", "-o", &gd, "--truth", &gt],
        vec![
            "perturb",
            "-i",
            &gd,
            "--truth",
            &gt,
            "--rate",
            "0.05",
            "--seed",
            "4",
            "-o",
            &pd,
            "--truth-output",
            &pt,
        ],
        vec!["evaluate", "-i", &pd, "--x", "x", "--y", "y", "--truth", &pt],
        vec![
            "evaluate", "-i", &pd, "--x", "x", "--y", "y", "--truth", &pt, "--method", "gap",
        ],
        vec!["gap", "-i", &gd, "--x", "x", "--y", "y"],
        vec!["oracle", "-i", &canada, "--x", "cat", "--y", "year", "--check", "abcod"],
    ];
    let mut differing = Vec::new();
    for args in &runs {
        let first = cli(args);
        let files_first: Vec<Vec<u8>> = [&gd, &gt, &pd, &pt]
            .iter()
            .map(|f| std::fs::read(f).unwrap_or_default())
            .collect();
        let second = cli(args);
        let files_second: Vec<Vec<u8>> = [&gd, &gt, &pd, &pt]
            .iter()
            .map(|f| std::fs::read(f).unwrap_or_default())
            .collect();
        if first.0 != 0 || first != second || files_first != files_second {
            differing.push(args[0].to_string());
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} invocations run twice, differing or failing: {differing:?}",
            runs.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden LMB", golden_lmb),
        ("golden abOD", golden_abod),
        ("golden bcOD", golden_bcod),
        ("golden abcOD", golden_abcod),
        ("golden pieces", golden_pieces),
        ("oracle equivalence", oracle_equivalence),
        ("band-width estimation", bandwidth),
        ("scaling", scaling),
        ("end-to-end robustness", quality),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
