use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use scadenoise::denoise::{DenoiseConfig, Denoiser, Detector, Method};
use scadenoise::imaging::{psnr, read_pgm, write_pgm};
use scadenoise::noise::{corrupt, remap_interior, NoiseKind, NoiseSpec, RNG_DESCRIPTION};
use scadenoise::synth::zero_tail_image;
use scadenoise::Image;

use crate::args::{DenoiseCmd, ExperimentCmd, SynthCmd, SynthKind};
use crate::record::{render_csv, cell_seed, RunRecord, SEED_DESCRIPTION};

pub fn load(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_pgm(&bytes).with_context(|| format!("cannot decode {}", path.display()))
}

pub fn save(path: &Path, img: &Image) -> Result<()> {
    fs::write(path, write_pgm(img)).with_context(|| format!("cannot write {}", path.display()))
}

fn capacities(cfg: &DenoiseConfig) -> Result<(Denoiser, String)> {
    let denoiser = Denoiser::new(*cfg)?;
    let note = format!(
        "block_size={} cr={} retained={} observations={} sca_capacity={} sp_capacity={}",
        cfg.block_size,
        cfg.compression_ratio,
        denoiser.system().retained(),
        denoiser.system().observations(),
        denoiser.sca_capacity(),
        denoiser.sp_capacity()
    );
    Ok((denoiser, note))
}

pub fn denoise(cmd: &DenoiseCmd) -> Result<()> {
    let cfg = cmd.config.to_config();
    let (denoiser, note) = capacities(&cfg)?;
    let input = load(&cmd.input)?;
    let reference = cmd.reference.as_deref().map(load).transpose()?;
    if let Some(r) = &reference {
        if !r.same_shape(&input) {
            bail!("reference {} has a different shape from the input", cmd.reference.as_ref().unwrap().display());
        }
    }
    let start = Instant::now();
    let out = denoiser.denoise(&input)?;
    let wall = start.elapsed().as_secs_f64();
    save(&cmd.output, &out.image)?;

    let mut line = format!(
        "method={} {note} blocks_total={} blocks_fallback={} blocks_solver_failed={} wall_time={wall:.6}",
        cfg.method, out.stats.total, out.stats.fallback, out.stats.solver_failed
    );
    if let Some(r) = &reference {
        line.push_str(&format!(
            " psnr_noisy={} psnr_denoised={}",
            psnr(r, &input)?,
            psnr(r, &out.image.quantized())?
        ));
    }
    println!("{line}");
    Ok(())
}

fn default_levels(kind: NoiseKind) -> Vec<f64> {
    let top = if kind == NoiseKind::Missing { 4 } else { 6 };
    (1..=top).map(|i| i as f64 / 10.0).collect()
}

fn default_methods(kind: NoiseKind) -> Vec<Method> {
    match kind {
        NoiseKind::RandomValued => vec![Method::MedianOnly, Method::Sca, Method::Combined],
        _ => vec![Method::MedianOnly, Method::SpSca, Method::Combined],
    }
}

pub fn experiment(cmd: &ExperimentCmd) -> Result<()> {
    let kind: NoiseKind = cmd.noise.into();
    let levels = cmd.levels.clone().unwrap_or_else(|| default_levels(kind));
    let methods: Vec<Method> = match &cmd.methods {
        Some(m) => m.iter().map(|&m| m.into()).collect(),
        None => default_methods(kind),
    };
    if levels.is_empty() || methods.is_empty() {
        bail!("need at least one noise level and one method");
    }
    let mut base = cmd.config.to_config();
    base.detector = if kind == NoiseKind::Missing { Detector::Missing } else { Detector::SaltPepper };
    let (_, note) = capacities(&base)?;
    eprintln!("{note}");

    let loaded = load(&cmd.input)?;
    let clean = if kind.needs_interior() { remap_interior(&loaded) } else { loaded };
    if let Some(dir) = &cmd.save_images {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }

    let cells: Vec<(usize, f64, Method)> = levels
        .iter()
        .enumerate()
        .flat_map(|(i, &level)| methods.iter().map(move |&m| (i, level, m)))
        .collect();
    let records = cells
        .par_iter()
        .map(|&(level_index, level, method)| {
            let seed = cell_seed(cmd.seed, level_index, method);
            let spec = NoiseSpec::new(kind, level, seed)?;
            let noisy = corrupt(&clean, &spec)?.noisy;
            let cfg = DenoiseConfig { method, ..base };
            let start = Instant::now();
            let out = Denoiser::new(cfg)?.denoise(&noisy)?;
            let wall_time = start.elapsed().as_secs_f64();
            if let Some(dir) = &cmd.save_images {
                let stem = format!("{kind}_{level}_{method}");
                save(&dir.join(format!("{stem}_noisy.pgm")), &noisy)?;
                save(&dir.join(format!("{stem}_denoised.pgm")), &out.image)?;
            }
            Ok(RunRecord {
                method,
                noise_kind: kind,
                noise_level: level,
                seed,
                psnr_noisy: psnr(&clean, &noisy)?,
                psnr_denoised: psnr(&clean, &out.image.quantized())?,
                stats: out.stats,
                wall_time,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let comment = format!("rng: {RNG_DESCRIPTION}; master seed {}; {SEED_DESCRIPTION}; {note}", cmd.seed);
    fs::write(&cmd.csv, render_csv(&comment, &records))
        .with_context(|| format!("cannot write {}", cmd.csv.display()))?;
    for r in &records {
        println!("{}", r.csv_row());
    }
    Ok(())
}

pub fn synth(cmd: &SynthCmd) -> Result<()> {
    let img = match cmd.kind {
        SynthKind::ZeroTail => zero_tail_image(cmd.size, cmd.size, cmd.block_size, cmd.cr, cmd.seed)?,
    };
    save(&cmd.output, &img)
}
