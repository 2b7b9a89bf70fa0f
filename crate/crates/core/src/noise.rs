//! Seeded impulse-noise injection.
//!
//! Every pixel is corrupted independently with probability `level`. The
//! random stream is ChaCha8 seeded through `SeedableRng::seed_from_u64`, and
//! pixels are visited in row-major order. Each pixel consumes one uniform
//! `f64` for the corruption decision, then the draws of its replacement value
//! if it was hit.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::imaging::{Image, Mask};

/// Identifies the random generator behind [`corrupt`], for run metadata.
pub const RNG_DESCRIPTION: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64), row-major pixel order";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    /// Hit pixels take a uniform integer gray level in `[0, 255]` other than
    /// their own value.
    RandomValued,
    /// Hit pixels become 0 or 255 with equal probability.
    SaltPepper,
    /// Hit pixels become 0.
    Missing,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [NoiseKind::RandomValued, NoiseKind::SaltPepper, NoiseKind::Missing];

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::RandomValued => "random_valued",
            NoiseKind::SaltPepper => "salt_pepper",
            NoiseKind::Missing => "missing",
        }
    }

    /// Whether corrupted pixels are identifiable by value, which requires an
    /// interior-valued clean image.
    pub fn needs_interior(&self) -> bool {
        !matches!(self, NoiseKind::RandomValued)
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NoiseKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown noise kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub level: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, level: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&level) {
            return invalid(format!("noise level must lie in [0, 1], got {level}"));
        }
        Ok(Self { kind, level, seed })
    }
}

/// A corrupted image and the ground-truth set of replaced pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Corruption {
    pub noisy: Image,
    pub mask: Mask,
}

impl Corruption {
    /// The additive error image `noisy − clean`.
    pub fn error_image(&self, clean: &Image) -> Result<Image> {
        if !clean.same_shape(&self.noisy) {
            return invalid("clean image shape does not match the corruption");
        }
        let data = self.noisy.data().iter().zip(clean.data()).map(|(n, c)| n - c).collect();
        Image::from_vec(clean.height(), clean.width(), data)
    }
}

/// Applies `spec` to `img`.
pub fn corrupt(img: &Image, spec: &NoiseSpec) -> Result<Corruption> {
    if !(0.0..=1.0).contains(&spec.level) {
        return invalid(format!("noise level must lie in [0, 1], got {}", spec.level));
    }
    if spec.kind.needs_interior() && !img.is_interior_valued() {
        return invalid(format!("{} noise needs an image with every pixel in [1, 254]", spec.kind));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut noisy = img.clone();
    let mut mask = Mask::new(img.height(), img.width());
    for r in 0..img.height() {
        for c in 0..img.width() {
            if rng.gen::<f64>() >= spec.level {
                continue;
            }
            let original = img.get(r, c);
            let value = match spec.kind {
                NoiseKind::RandomValued => loop {
                    let v = f64::from(rng.gen_range(0..=255u8));
                    if v != original {
                        break v;
                    }
                },
                NoiseKind::SaltPepper => {
                    if rng.gen::<bool>() {
                        255.0
                    } else {
                        0.0
                    }
                }
                NoiseKind::Missing => 0.0,
            };
            noisy.set(r, c, value);
            mask.set(r, c, true);
        }
    }
    Ok(Corruption { noisy, mask })
}

/// Maps `[0, 255]` affinely onto `[1, 254]` and rounds, so that 0 and 255
/// never occur in the result.
pub fn remap_interior(img: &Image) -> Image {
    img.map(|p| (1.0 + p.clamp(0.0, 255.0) * 253.0 / 255.0).round())
}
