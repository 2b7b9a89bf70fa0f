//! Impulse-noise removal for grayscale images by sparse recovery in the
//! block DCT domain.
//!
//! Natural image blocks are compressible: after a 2-D DCT and a zigzag scan,
//! the trailing coefficients are close to zero. Impulse noise breaks that,
//! and because each impulse touches a single pixel, the disturbance of the
//! trailing coefficients is a sparse linear image of the error. Recovering
//! the error is then an underdetermined sparse inverse problem per block.
//!
//! ```
//! use scadenoise::denoise::{denoise_image, DenoiseConfig, Method};
//! use scadenoise::noise::{corrupt, NoiseKind, NoiseSpec};
//! use scadenoise::synth::zero_tail_image;
//!
//! let clean = zero_tail_image(64, 64, 8, 2.0, 7)?;
//! let spec = NoiseSpec::new(NoiseKind::SaltPepper, 0.2, 1)?;
//! let noisy = corrupt(&clean, &spec)?.noisy;
//! let out = denoise_image(&noisy, &DenoiseConfig::with_method(Method::SpSca))?;
//! assert!(out.image.max_abs_diff(&clean)? < 1e-6);
//! # Ok::<(), scadenoise::Error>(())
//! ```

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod denoise;
pub mod error;
pub mod imaging;
pub mod noise;
pub mod solvers;
pub mod synth;
pub mod transforms;

pub use error::{Error, Result};
pub use imaging::{Image, Mask, Psnr};

// The guide's code listings run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/dct-and-zigzag.md")]
    mod dct_and_zigzag {}
    #[doc = include_str!("../../../book/src/sensing-matrix.md")]
    mod sensing_matrix {}
    #[doc = include_str!("../../../book/src/smoothed-l0.md")]
    mod smoothed_l0 {}
    #[doc = include_str!("../../../book/src/known-support.md")]
    mod known_support {}
    #[doc = include_str!("../../../book/src/pipelines.md")]
    mod pipelines {}
    #[doc = include_str!("../../../book/src/noise-and-metrics.md")]
    mod noise_and_metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
