//! Blockwise reconstruction pipelines.
//!
//! A clean block is assumed to have zero DCT coefficients beyond the first
//! `n` in zigzag order. For a noisy block `X = S + E` those tail coefficients
//! therefore depend on the error alone, `tail(X) = H · zigzag(E)`, which is
//! an underdetermined system with a sparse unknown.
//!
//! * [`Method::Sca`] finds `E` with smoothed-ℓ0, keeps entries above `tau`,
//!   and subtracts it from the block.
//! * [`Method::SpSca`] knows where the errors are (pixels at 0 or 255, or at
//!   0 for missing samples) and solves for their amplitudes by least squares.
//! * [`Method::Combined`] runs a median filter, the `Sca` pass, then another
//!   median filter.
//! * [`Method::MedianOnly`] is the plain median filter, for comparison.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::imaging::{assemble_blocks, median_filter_parallel, partition_blocks, Image, Mask};
use crate::solvers::{least_squares_known_support, threshold_to_sparse, ErrorEstimate, Sl0Params, Sl0Solver};
use crate::transforms::{block_dct, inverse_zigzag, retained_count, zigzag, SensingSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MedianOnly,
    Sca,
    SpSca,
    Combined,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::MedianOnly, Method::Sca, Method::SpSca, Method::Combined];

    pub fn name(&self) -> &'static str {
        match self {
            Method::MedianOnly => "median_only",
            Method::Sca => "sca",
            Method::SpSca => "sp_sca",
            Method::Combined => "combined",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// How [`Method::SpSca`] locates corrupted pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Detector {
    /// Pixels at 0 or 255.
    #[default]
    SaltPepper,
    /// Pixels at 0.
    Missing,
}

impl Detector {
    pub fn detect(&self, img: &Image) -> Mask {
        match self {
            Detector::SaltPepper => detect_salt_pepper(img),
            Detector::Missing => detect_missing(img),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiseConfig {
    pub block_size: usize,
    pub compression_ratio: f64,
    pub sl0: Sl0Params,
    /// Impulse amplitudes at or below this many gray levels are discarded.
    pub tau: f64,
    pub median_window: usize,
    pub method: Method,
    pub detector: Detector,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        Self {
            block_size: 8,
            compression_ratio: 2.0,
            sl0: Sl0Params::default(),
            tau: 10.0,
            median_window: 3,
            method: Method::Sca,
            detector: Detector::SaltPepper,
        }
    }
}

impl DenoiseConfig {
    pub fn with_method(method: Method) -> Self {
        Self { method, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        retained_count(self.block_size, self.compression_ratio)?;
        self.sl0.validate()?;
        if !(self.tau >= 0.0) {
            return invalid(format!("tau must be non-negative, got {}", self.tau));
        }
        if self.median_window == 0 || self.median_window.is_multiple_of(2) {
            return invalid(format!("median window must be odd, got {}", self.median_window));
        }
        Ok(())
    }
}

/// Per-run block bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BlockStats {
    pub total: usize,
    /// Blocks whose flagged pixels outnumbered the observations and were
    /// filled by local median imputation.
    pub fallback: usize,
    /// Blocks whose solve failed.
    pub solver_failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Denoised {
    pub image: Image,
    pub stats: BlockStats,
}

/// What happened to one block under [`Denoiser::denoise_block_sp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpOutcome {
    Solved,
    Fallback,
    SolverFailed,
}

/// The tail coefficients `zigzag(dct(block))[n..m]`.
pub fn block_observation(block: &Image, sys: &SensingSystem) -> Result<Vec<f64>> {
    let coeffs = block_dct(block, sys.basis())?;
    let mut scan = zigzag(&coeffs, sys.order())?;
    Ok(scan.split_off(sys.retained()))
}

/// Flags pixels that round to 0 or 255.
pub fn detect_salt_pepper(img: &Image) -> Mask {
    let flags = img.data().iter().map(|p| matches!(p.round(), 0.0 | 255.0)).collect();
    Mask::from_vec(img.height(), img.width(), flags).expect("shape preserved")
}

/// Flags pixels that round to 0.
pub fn detect_missing(img: &Image) -> Mask {
    let flags = img.data().iter().map(|p| p.round() == 0.0).collect();
    Mask::from_vec(img.height(), img.width(), flags).expect("shape preserved")
}

/// Replaces each flagged pixel by the median of the unflagged pixels in the
/// smallest square window around it (3×3, then 5×5, ...) that contains any.
/// If the block has no unflagged pixel at all, flagged pixels take the median
/// of the whole block. Even-sized samples use the lower middle value.
pub fn impute_flagged(block: &Image, flags: &Mask) -> Image {
    let (h, w) = (block.height(), block.width());
    let mut out = block.clone();
    let mut window = Vec::new();
    let block_median = || {
        let mut all = block.data().to_vec();
        lower_median(&mut all)
    };
    for r in 0..h {
        for c in 0..w {
            if !flags.get(r, c) {
                continue;
            }
            let mut value = None;
            for radius in 1..h.max(w) {
                window.clear();
                for rr in r.saturating_sub(radius)..=(r + radius).min(h - 1) {
                    for cc in c.saturating_sub(radius)..=(c + radius).min(w - 1) {
                        if !flags.get(rr, cc) {
                            window.push(block.get(rr, cc));
                        }
                    }
                }
                if !window.is_empty() {
                    value = Some(lower_median(&mut window));
                    break;
                }
            }
            out.set(r, c, value.unwrap_or_else(block_median));
        }
    }
    out
}

fn lower_median(values: &mut [f64]) -> f64 {
    let mid = (values.len() - 1) / 2;
    *values.select_nth_unstable_by(mid, f64::total_cmp).1
}

/// A validated configuration together with its precomputed sensing system
/// and projector, shared read-only by all blocks.
#[derive(Debug, Clone)]
pub struct Denoiser {
    cfg: DenoiseConfig,
    system: SensingSystem,
    solver: Sl0Solver,
}

impl Denoiser {
    pub fn new(cfg: DenoiseConfig) -> Result<Self> {
        cfg.validate()?;
        let system = SensingSystem::with_compression_ratio(cfg.block_size, cfg.compression_ratio)?;
        let solver = Sl0Solver::new(system.h().clone())?;
        Ok(Self { cfg, system, solver })
    }

    pub fn config(&self) -> &DenoiseConfig {
        &self.cfg
    }

    pub fn system(&self) -> &SensingSystem {
        &self.system
    }

    pub fn solver(&self) -> &Sl0Solver {
        &self.solver
    }

    /// Largest per-block impulse count below the uniqueness bound
    /// `0.5 · (m − n)` for unknown positions.
    pub fn sca_capacity(&self) -> usize {
        (self.system.observations() - 1) / 2
    }

    /// Largest per-block count of known error positions, `m − n`.
    pub fn sp_capacity(&self) -> usize {
        self.system.observations()
    }

    /// Sparse pixel-domain error estimate for one block, zigzag ordered.
    ///
    /// A thresholded estimate that leaves a larger tail residual than no
    /// estimate at all is discarded in favour of zero.
    pub fn estimate_block_error(&self, block: &Image) -> Result<ErrorEstimate> {
        let tail = block_observation(block, &self.system)?;
        let z = self.solver.solve(&tail, &self.cfg.sl0)?;
        let est = threshold_to_sparse(&z, self.cfg.tau);
        if est.support.is_empty() {
            return Ok(est);
        }
        let h = self.system.h();
        let residual: f64 = tail
            .iter()
            .enumerate()
            .map(|(row, &x)| {
                let fit: f64 = est.support.iter().map(|&j| h[(row, j)] * est.values[j]).sum();
                (x - fit).powi(2)
            })
            .sum();
        let energy: f64 = tail.iter().map(|x| x * x).sum();
        if residual >= energy {
            return Ok(ErrorEstimate::zeros(z.len()));
        }
        Ok(est)
    }

    /// Unknown-support reconstruction of one block.
    pub fn denoise_block_sca(&self, block: &Image) -> Result<Image> {
        let est = self.estimate_block_error(block)?;
        subtract(block, &inverse_zigzag(&est.values, self.system.order())?)
    }

    /// Known-support reconstruction of one block. `flags` marks the pixels
    /// believed corrupted.
    pub fn denoise_block_sp(&self, block: &Image, flags: &Mask) -> Result<(Image, SpOutcome)> {
        let order = self.system.order();
        let n = order.size();
        if (block.height(), block.width(), flags.height(), flags.width()) != (n, n, n, n) {
            return invalid("block and flag mask must both match the block size");
        }
        let support: Vec<usize> =
            order.positions().iter().enumerate().filter(|(_, &(u, v))| flags.get(u, v)).map(|(i, _)| i).collect();
        if support.is_empty() {
            return Ok((block.clone(), SpOutcome::Solved));
        }
        let tail = block_observation(block, &self.system)?;
        match least_squares_known_support(self.system.h(), &tail, &support) {
            Ok(est) => Ok((subtract(block, &inverse_zigzag(&est.values, order)?)?, SpOutcome::Solved)),
            Err(Error::CapacityExceeded { .. }) => Ok((impute_flagged(block, flags), SpOutcome::Fallback)),
            Err(Error::Solver { .. }) => Ok((impute_flagged(block, flags), SpOutcome::SolverFailed)),
            Err(e) => Err(e),
        }
    }

    /// Runs the configured method over a whole image.
    pub fn denoise(&self, img: &Image) -> Result<Denoised> {
        let k = self.cfg.median_window;
        match self.cfg.method {
            Method::MedianOnly => Ok(Denoised { image: median_filter_parallel(img, k)?, stats: BlockStats::default() }),
            Method::Sca => {
                let out = self.sca_pass(img)?;
                Ok(Denoised { image: out.image.clamped(), stats: out.stats })
            }
            Method::SpSca => {
                let out = self.sp_pass(img, &self.cfg.detector.detect(img))?;
                Ok(Denoised { image: out.image.clamped(), stats: out.stats })
            }
            Method::Combined => {
                let pre = median_filter_parallel(img, k)?;
                let mid = self.sca_pass(&pre)?;
                let post = median_filter_parallel(&mid.image, k)?;
                Ok(Denoised { image: post.clamped(), stats: mid.stats })
            }
        }
    }

    /// Blockwise SCA without the final clamp.
    pub fn sca_pass(&self, img: &Image) -> Result<Denoised> {
        let (grid, blocks) = partition_blocks(img, self.cfg.block_size)?;
        let results: Vec<(Image, bool)> = blocks
            .par_iter()
            .map(|b| match self.denoise_block_sca(b) {
                Ok(out) => (out, false),
                Err(_) => (b.clone(), true),
            })
            .collect();
        let stats = BlockStats {
            total: results.len(),
            fallback: 0,
            solver_failed: results.iter().filter(|(_, failed)| *failed).count(),
        };
        let blocks: Vec<Image> = results.into_iter().map(|(b, _)| b).collect();
        Ok(Denoised { image: assemble_blocks(&grid, &blocks)?, stats })
    }

    /// Blockwise known-support reconstruction without the final clamp.
    pub fn sp_pass(&self, img: &Image, flags: &Mask) -> Result<Denoised> {
        if flags.height() != img.height() || flags.width() != img.width() {
            return invalid("flag mask shape does not match the image");
        }
        let n = self.cfg.block_size;
        let (grid, blocks) = partition_blocks(img, n)?;
        let (_, flag_blocks) = partition_blocks(&flags.to_image(), n)?;
        let results: Vec<(Image, SpOutcome)> = blocks
            .par_iter()
            .zip(flag_blocks.par_iter())
            .map(|(b, f)| self.denoise_block_sp(b, &Mask::from_image(f)))
            .collect::<Result<_>>()?;
        let stats = BlockStats {
            total: results.len(),
            fallback: results.iter().filter(|(_, o)| *o == SpOutcome::Fallback).count(),
            solver_failed: results.iter().filter(|(_, o)| *o == SpOutcome::SolverFailed).count(),
        };
        let blocks: Vec<Image> = results.into_iter().map(|(b, _)| b).collect();
        Ok(Denoised { image: assemble_blocks(&grid, &blocks)?, stats })
    }
}

fn subtract(block: &Image, error: &Image) -> Result<Image> {
    let data = block.data().iter().zip(error.data()).map(|(x, e)| x - e).collect();
    Image::from_vec(block.height(), block.width(), data)
}

/// Convenience wrapper: build a [`Denoiser`] and run it once.
pub fn denoise_image(img: &Image, cfg: &DenoiseConfig) -> Result<Denoised> {
    Denoiser::new(*cfg)?.denoise(img)
}
