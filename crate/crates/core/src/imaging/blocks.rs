use super::Image;
use crate::error::{invalid, Result};

/// Geometry of a tiling of an image into `block_size`-square blocks.
///
/// Images whose sides are not multiples of the block size are extended at the
/// bottom and right by mirror reflection that does not repeat the edge pixel
/// (`... c b a | b c ...`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGrid {
    pub block_size: usize,
    pub rows: usize,
    pub cols: usize,
    pub height: usize,
    pub width: usize,
    pub pad_bottom: usize,
    pub pad_right: usize,
}

impl BlockGrid {
    pub fn new(height: usize, width: usize, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return invalid("block size must be at least 1");
        }
        let rows = height.div_ceil(block_size);
        let cols = width.div_ceil(block_size);
        Ok(Self {
            block_size,
            rows,
            cols,
            height,
            width,
            pad_bottom: rows * block_size - height,
            pad_right: cols * block_size - width,
        })
    }

    pub fn block_count(&self) -> usize {
        self.rows * self.cols
    }
}

/// Index into a reflected extension of `0..len`.
fn reflect(i: usize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len - 1);
    let j = i % period;
    if j < len {
        j
    } else {
        period - j
    }
}

/// Cuts `img` into `block_size`-square blocks in row-major block order.
pub fn partition_blocks(img: &Image, block_size: usize) -> Result<(BlockGrid, Vec<Image>)> {
    let grid = BlockGrid::new(img.height(), img.width(), block_size)?;
    let n = block_size;
    let mut blocks = Vec::with_capacity(grid.block_count());
    for br in 0..grid.rows {
        for bc in 0..grid.cols {
            let block = Image::from_fn(n, n, |r, c| {
                img.get(reflect(br * n + r, img.height()), reflect(bc * n + c, img.width()))
            })?;
            blocks.push(block);
        }
    }
    Ok((grid, blocks))
}

/// Reassembles blocks produced by [`partition_blocks`], discarding padding.
pub fn assemble_blocks(grid: &BlockGrid, blocks: &[Image]) -> Result<Image> {
    if blocks.len() != grid.block_count() {
        return invalid(format!("expected {} blocks, got {}", grid.block_count(), blocks.len()));
    }
    let n = grid.block_size;
    if let Some(bad) = blocks.iter().find(|b| b.height() != n || b.width() != n) {
        return invalid(format!("expected {n}x{n} blocks, got {}x{}", bad.height(), bad.width()));
    }
    Image::from_fn(grid.height, grid.width, |r, c| blocks[(r / n) * grid.cols + c / n].get(r % n, c % n))
}
