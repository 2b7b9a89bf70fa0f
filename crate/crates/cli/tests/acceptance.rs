//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scadenoise::denoise::{DenoiseConfig, Denoiser, Detector, Method};
use scadenoise::imaging::{median_filter, partition_blocks, psnr, read_pgm};
use scadenoise::noise::{corrupt, NoiseKind, NoiseSpec};
use scadenoise::solvers::{least_squares_known_support, sl0_solve, Sl0Params};
use scadenoise::synth::zero_tail_image;
use scadenoise::transforms::{block_dct, sensing_system, zigzag, SensingSystem};
use scadenoise::{Error, Image, Mask, Psnr};

const BIN: &str = env!("CARGO_BIN_EXE_scadenoise");

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn camera() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/camera256.pgm")
}

fn run_cli(args: &[&str]) -> String {
    let out = Command::new(BIN)
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .expect("spawn cli");
    assert!(out.status.success(), "cli {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn spikes(rng: &mut impl Rng, len: usize, k: usize) -> Vec<f64> {
    let mut z = vec![0.0; len];
    for i in sample(rng, len, k) {
        let a = rng.gen_range(50.0..=200.0);
        z[i] = if rng.gen::<bool>() { a } else { -a };
    }
    z
}

fn mat_vec(h: &DMatrix<f64>, z: &[f64]) -> Vec<f64> {
    (h * nalgebra::DVector::from_column_slice(z)).iter().copied().collect()
}

fn rel_err(est: &[f64], truth: &[f64]) -> f64 {
    let num: f64 = est.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let den: f64 = truth.iter().map(|b| b * b).sum::<f64>().sqrt();
    num / den
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail.push_str(&format!("; {:.2} s", took.as_secs_f64()));
    if let Some(limit) = limit {
        if took >= limit {
            out.pass = false;
            out.detail.push_str(&format!(" exceeds {} s", limit.as_secs()));
        }
    }
    out
}

fn transform_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_map: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    for n in [2, 4, 8] {
        let sys = SensingSystem::new(n, n * n / 2).unwrap();
        let g = sys.g();
        let gram = g * g.transpose();
        worst_orth = worst_orth.max((gram - DMatrix::identity(n * n, n * n)).abs().max());
        for _ in 0..100 {
            let e = Image::from_fn(n, n, |_, _| rng.gen_range(-255.0..=255.0)).unwrap();
            let lhs = mat_vec(g, &zigzag(&e, sys.order()).unwrap());
            let rhs = zigzag(&block_dct(&e, sys.basis()).unwrap(), sys.order()).unwrap();
            for (a, b) in lhs.iter().zip(&rhs) {
                worst_map = worst_map.max((a - b).abs());
            }
        }
    }
    Outcome::new(
        worst_map < 1e-10 && worst_orth < 1e-10,
        format!("max |G z(E) - z(TET')| = {worst_map:.2e}, max |GG' - I| = {worst_orth:.2e}"),
    )
}

fn unique_support_recovery() -> Outcome {
    let sys = sensing_system(8, 32).unwrap();
    let h = sys.h();
    let params = Sl0Params::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ok = 0;
    let mut by_k = [(0usize, 0usize); 16];
    for _ in 0..1000 {
        let k = rng.gen_range(1..=15);
        let truth = spikes(&mut rng, 64, k);
        let x = mat_vec(h, &truth);
        let good = sl0_solve(h, &x, &params).map(|z| rel_err(&z, &truth) < 1e-3).unwrap_or(false);
        by_k[k].1 += 1;
        if good {
            ok += 1;
            by_k[k].0 += 1;
        }
    }
    let per_k: Vec<String> = (1..=15).map(|k| format!("k{k}:{}/{}", by_k[k].0, by_k[k].1)).collect();
    Outcome::new(ok >= 990, format!("{ok}/1000 recovered (need 990) [{}]", per_k.join(" ")))
}

fn known_support_exactness() -> Outcome {
    let sys = sensing_system(8, 32).unwrap();
    let h = sys.h();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let size = rng.gen_range(1..=32);
        let truth = spikes(&mut rng, 64, size);
        let mut support: Vec<usize> = (0..64).filter(|&i| truth[i] != 0.0).collect();
        support.sort_unstable();
        let x = mat_vec(h, &truth);
        if let Ok(est) = least_squares_known_support(h, &x, &support) {
            let e = rel_err(&est.values, &truth);
            worst = worst.max(e);
            if e < 1e-8 {
                ok += 1;
            }
        }
    }
    let over: Vec<usize> = (0..33).collect();
    let capacity = matches!(
        least_squares_known_support(h, &[0.0; 32], &over),
        Err(Error::CapacityExceeded { support: 33, capacity: 32 })
    );
    Outcome::new(
        ok == 1000 && capacity,
        format!("{ok}/1000 exact (worst solved rel err {worst:.2e}); size-33 capacity error: {capacity}"),
    )
}

fn fixed_point(dir: &Path) -> Outcome {
    let synth = dir.join("zero_tail.pgm");
    let out = dir.join("zero_tail_sca.pgm");
    run_cli(&["synth", "--kind", "zero_tail", "--size", "256", "--block-size", "8", "--cr", "2", "--seed", "4", synth.to_str().unwrap()]);
    let start = Instant::now();
    let line = run_cli(&[
        "denoise",
        synth.to_str().unwrap(),
        out.to_str().unwrap(),
        "--method",
        "sca",
        "--block-size",
        "8",
        "--cr",
        "2",
        "--reference",
        synth.to_str().unwrap(),
    ]);
    let cli_time = start.elapsed();
    let identical = std::fs::read(&synth).unwrap() == std::fs::read(&out).unwrap();
    let infinite = line.contains("psnr_denoised=inf");

    let input = read_pgm(&std::fs::read(&synth).unwrap()).unwrap();
    let denoiser = Denoiser::new(DenoiseConfig::with_method(Method::Sca)).unwrap();
    let pre_round = denoiser.sca_pass(&input).unwrap().image;
    let err = pre_round.max_abs_diff(&input).unwrap();
    Outcome::new(
        identical && infinite && err < 1e-3 && cli_time < Duration::from_secs(30),
        format!(
            "output identical: {identical}, psnr inf: {infinite}, pre-rounding max error {err:.2e}, single-threaded cli {:.2} s",
            cli_time.as_secs_f64()
        ),
    )
}

fn block_counts(mask: &Mask, n: usize) -> Vec<usize> {
    let (_, blocks) = partition_blocks(&mask.to_image(), n).unwrap();
    blocks.iter().map(|b| b.data().iter().filter(|&&v| v > 0.5).count()).collect()
}

fn exact_salt_pepper() -> Outcome {
    let clean = zero_tail_image(256, 256, 8, 2.0, 0).unwrap();
    let mut seed = 0;
    let corruption = loop {
        let c = corrupt(&clean, &NoiseSpec::new(NoiseKind::SaltPepper, 0.3, seed).unwrap()).unwrap();
        if block_counts(&c.mask, 8).iter().all(|&k| k <= 32) {
            break c;
        }
        seed += 1;
    };
    let out = Denoiser::new(DenoiseConfig::with_method(Method::SpSca)).unwrap().denoise(&corruption.noisy).unwrap();
    let err = out.image.max_abs_diff(&clean).unwrap();
    let db = psnr(&clean, &out.image.quantized()).unwrap();
    let high = match db {
        Psnr::Infinite => true,
        Psnr::Finite(v) => v >= 50.0,
    };
    Outcome::new(
        err < 1e-6 && high && out.stats.fallback == 0,
        format!("noise seed {seed}: max pixel error {err:.2e}, psnr after rounding {db} dB, fallback blocks {}", out.stats.fallback),
    )
}

fn combined_beats_median(dir: &Path) -> Outcome {
    let csv = dir.join("ordering.csv");
    run_cli(&[
        "experiment",
        camera().to_str().unwrap(),
        "--noise",
        "random_valued",
        "--levels",
        "0.4,0.5,0.6",
        "--methods",
        "median_only,combined",
        "--seed",
        "42",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<String>> =
        text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    let mut wins = 0;
    let mut parts = Vec::new();
    for level in ["0.4", "0.5", "0.6"] {
        let get = |m: &str| -> f64 {
            rows.iter().find(|r| r[0] == m && r[2] == level).map(|r| r[5].parse().unwrap()).unwrap()
        };
        let (med, comb) = (get("median_only"), get("combined"));
        if comb > med {
            wins += 1;
        }
        parts.push(format!("p={level}: combined {comb:.2} vs median {med:.2}"));
    }
    Outcome::new(wins >= 2, format!("{wins}/3 levels won; {}", parts.join(", ")))
}

fn missing_gain() -> Outcome {
    let clean = zero_tail_image(256, 256, 8, 2.0, 7).unwrap();
    let noisy = corrupt(&clean, &NoiseSpec::new(NoiseKind::Missing, 0.4, 7).unwrap()).unwrap().noisy;
    let cfg = DenoiseConfig { detector: Detector::Missing, ..DenoiseConfig::with_method(Method::SpSca) };
    let out = Denoiser::new(cfg).unwrap().denoise(&noisy).unwrap();
    let before = psnr(&clean, &noisy).unwrap().db();
    let after = psnr(&clean, &out.image.quantized()).unwrap().db();
    Outcome::new(
        after - before >= 15.0,
        format!(
            "noisy {before:.2} dB, denoised {after:.2} dB, gain {:.2} dB; fallback blocks {}/{}",
            after - before,
            out.stats.fallback,
            out.stats.total
        ),
    )
}

fn brute_median(img: &Image, k: usize) -> Image {
    let r = (k / 2) as isize;
    let (h, w) = (img.height() as isize, img.width() as isize);
    Image::from_fn(img.height(), img.width(), |i, j| {
        let mut v = Vec::new();
        for di in -r..=r {
            for dj in -r..=r {
                let y = (i as isize + di).clamp(0, h - 1) as usize;
                let x = (j as isize + dj).clamp(0, w - 1) as usize;
                v.push(img.get(y, x));
            }
        }
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    })
    .unwrap()
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = 0;
    for _ in 0..50 {
        let img = Image::from_fn(12, 12, |_, _| f64::from(rng.gen_range(0..=255u8))).unwrap();
        for k in [3, 5] {
            if median_filter(&img, k).unwrap() != brute_median(&img, k) {
                mismatches += 1;
            }
        }
    }
    // 10·log10(255²/MSE) evaluated by hand for each case.
    let one_off = Image::from_fn(16, 16, |r, c| if (r, c) == (3, 9) { 255.0 } else { 0.0 }).unwrap();
    let flat = Image::filled(4, 4, 100.0).unwrap();
    let cases = [
        (Image::zeros(16, 16).unwrap(), one_off, 24.082399653118497),
        (flat.clone(), flat.map(|p| p + 1.0), 48.1308036086791),
        (flat.clone(), Image::from_fn(4, 4, |r, _| if r == 0 { 103.0 } else { 100.0 }).unwrap(), 44.60897842756548),
    ];
    let worst = cases.iter().map(|(a, b, want)| (psnr(a, b).unwrap().db() - want).abs()).fold(0.0, f64::max);
    let infinite = psnr(&flat, &flat).unwrap().is_infinite();
    Outcome::new(
        mismatches == 0 && worst < 1e-9 && infinite,
        format!("median mismatches {mismatches}/100, worst psnr deviation {worst:.1e} dB, identical images infinite: {infinite}"),
    )
}

fn strip_wall_time(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string()).collect()
}

fn determinism(dir: &Path) -> Outcome {
    let mut csvs = Vec::new();
    let mut images = Vec::new();
    for run in 0..2 {
        let csv = dir.join(format!("det{run}.csv"));
        let imgs = dir.join(format!("det{run}"));
        run_cli(&[
            "experiment",
            camera().to_str().unwrap(),
            "--noise",
            "salt_pepper",
            "--levels",
            "0.2,0.5",
            "--seed",
            "9",
            "--csv",
            csv.to_str().unwrap(),
            "--save-images",
            imgs.to_str().unwrap(),
        ]);
        let out = dir.join(format!("det{run}_denoised.pgm"));
        run_cli(&["denoise", camera().to_str().unwrap(), out.to_str().unwrap(), "--method", "combined"]);
        csvs.push(strip_wall_time(&std::fs::read_to_string(&csv).unwrap()));
        let mut names: Vec<PathBuf> = std::fs::read_dir(&imgs).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        let mut bytes: Vec<(String, Vec<u8>)> = names
            .iter()
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(p).unwrap()))
            .collect();
        bytes.push(("denoise".into(), std::fs::read(&out).unwrap()));
        images.push(bytes);
    }
    let same_csv = csvs[0] == csvs[1];
    let same_pgm = images[0] == images[1];
    Outcome::new(
        same_csv && same_pgm && csvs[0].len() == 8,
        format!("csv rows identical: {same_csv}, {} pgm files identical: {same_pgm}", images[0].len()),
    )
}

type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn main() -> ExitCode {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let criteria: Vec<Criterion<'_>> = vec![
        ("1 transform consistency", Box::new(|| timed(Some(Duration::from_secs(1)), transform_consistency))),
        ("2 unknown-support recovery k<=15", Box::new(|| timed(Some(Duration::from_secs(30)), unique_support_recovery))),
        ("3 known-support exactness", Box::new(|| timed(Some(Duration::from_secs(10)), known_support_exactness))),
        ("4 end-to-end fixed point", Box::new(move || timed(None, || fixed_point(d)))),
        ("5 end-to-end exact salt-pepper", Box::new(|| timed(Some(Duration::from_secs(60)), exact_salt_pepper))),
        ("6 combined beats median", Box::new(move || timed(None, || combined_beats_median(d)))),
        ("7 missing samples at 40%", Box::new(|| timed(None, missing_gain))),
        ("8 oracle equivalence", Box::new(|| timed(None, oracles))),
        ("9 determinism", Box::new(move || timed(None, || determinism(d)))),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let out = run();
        if !out.pass {
            failed += 1;
        }
        println!("criterion {name}: {} ({})", if out.pass { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
