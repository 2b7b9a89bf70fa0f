//! Synthetic images whose blocks exactly satisfy the sparse-tail model.
//!
//! Each block is built in the coefficient domain: a DC level and random
//! low-frequency coefficients in the first `n` zigzag positions, zeros in the
//! rest, then inverted. If the block leaves `[1, 254]` the AC coefficients
//! are redrawn at half the amplitude. No rescaling is applied afterwards,
//! since that would not preserve the zero tail exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::imaging::{assemble_blocks, BlockGrid, Image};
use crate::transforms::{inverse_block_dct, inverse_zigzag, SensingSystem};

/// Starting AC amplitude in gray levels, before the `1 / (1 + u + v)` decay.
const AC_AMPLITUDE: f64 = 90.0;

/// Redraws allowed per block before giving up.
pub const MAX_ATTEMPTS: usize = 64;

/// One interior-valued block with zero tail for `sys`.
pub fn zero_tail_block(sys: &SensingSystem, rng: &mut impl Rng, max_attempts: usize) -> Result<Image> {
    let n = sys.block_size();
    let order = sys.order();
    let mean: f64 = rng.gen_range(40.0..215.0);
    let mut amplitude = AC_AMPLITUDE;
    for _ in 0..max_attempts {
        let mut coeffs = vec![0.0; sys.block_len()];
        coeffs[0] = n as f64 * mean;
        for (i, c) in coeffs.iter_mut().enumerate().take(sys.retained()).skip(1) {
            let (u, v) = order.position(i);
            *c = rng.gen_range(-1.0..1.0) * amplitude / (1 + u + v) as f64;
        }
        let block = inverse_block_dct(&inverse_zigzag(&coeffs, order)?, sys.basis())?;
        if block.is_interior_valued() {
            return Ok(block);
        }
        amplitude *= 0.5;
    }
    Err(Error::Synthesis(format!("no block landed in [1, 254] after {max_attempts} draws")))
}

/// A `height`×`width` image tiled by independent [`zero_tail_block`]s.
/// Both sides must be multiples of `block_size`.
pub fn zero_tail_image(height: usize, width: usize, block_size: usize, compression_ratio: f64, seed: u64) -> Result<Image> {
    if block_size == 0 || !height.is_multiple_of(block_size) || !width.is_multiple_of(block_size) {
        return invalid(format!("image {height}x{width} is not tiled by {block_size}x{block_size} blocks"));
    }
    let sys = SensingSystem::with_compression_ratio(block_size, compression_ratio)?;
    let grid = BlockGrid::new(height, width, block_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = (0..grid.block_count())
        .map(|_| zero_tail_block(&sys, &mut rng, MAX_ATTEMPTS))
        .collect::<Result<Vec<_>>>()?;
    assemble_blocks(&grid, &blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::partition_blocks;
    use crate::transforms::{block_dct, zigzag};

    #[test]
    fn tails_vanish_and_range_holds() {
        let img = zero_tail_image(64, 48, 8, 2.0, 1).unwrap();
        assert!(img.is_interior_valued());
        let sys = SensingSystem::new(8, 32).unwrap();
        let (_, blocks) = partition_blocks(&img, 8).unwrap();
        for b in blocks {
            let scan = zigzag(&block_dct(&b, sys.basis()).unwrap(), sys.order()).unwrap();
            assert!(scan[32..].iter().all(|v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn reproducible() {
        assert_eq!(zero_tail_image(32, 32, 8, 4.0, 9).unwrap(), zero_tail_image(32, 32, 8, 4.0, 9).unwrap());
        assert_ne!(zero_tail_image(32, 32, 8, 4.0, 9).unwrap(), zero_tail_image(32, 32, 8, 4.0, 10).unwrap());
    }

    #[test]
    fn size_must_tile() {
        assert!(zero_tail_image(30, 32, 8, 2.0, 0).is_err());
    }

    #[test]
    fn bounded_attempts() {
        let sys = SensingSystem::new(8, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(zero_tail_block(&sys, &mut rng, 0), Err(Error::Synthesis(_))));
    }
}
