//! Grayscale images, block tiling, PGM I/O, median filtering and PSNR.
//!
//! Pixels are `f64` gray levels on the nominal `[0, 255]` scale. Nothing in
//! the pipeline quantizes until [`write_pgm`], so intermediate stages can
//! carry negative or above-range values and exact DCT-domain zeros survive.

mod blocks;
mod median;
mod metrics;
mod pgm;

pub use blocks::{assemble_blocks, partition_blocks, BlockGrid};
pub use median::{median_filter, median_filter_parallel};
pub use metrics::{mse, psnr, Psnr};
pub use pgm::{read_pgm, write_pgm};

use crate::error::{invalid, Result};

/// A row-major grayscale image with real-valued pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Image {
    /// An all-zero image.
    pub fn zeros(height: usize, width: usize) -> Result<Self> {
        Self::filled(height, width, 0.0)
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        if height == 0 || width == 0 {
            return invalid(format!("image dimensions must be positive, got {height}x{width}"));
        }
        Ok(Self { height, width, data: vec![value; height * width] })
    }

    /// Wraps row-major pixel data.
    pub fn from_vec(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return invalid(format!("image dimensions must be positive, got {height}x{width}"));
        }
        if data.len() != height * width {
            return invalid(format!(
                "pixel buffer has {} entries, expected {}x{} = {}",
                data.len(),
                height,
                width,
                height * width
            ));
        }
        Ok(Self { height, width, data })
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::from_vec(height, width, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Pixel at `(row, col)`. Panics when out of bounds.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.height && col < self.width, "pixel ({row}, {col}) out of bounds");
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.height && col < self.width, "pixel ({row}, {col}) out of bounds");
        self.data[row * self.width + col] = value;
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.height == other.height && self.width == other.width
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image { height: self.height, width: self.width, data: self.data.iter().map(|&p| f(p)).collect() }
    }

    /// Clamps every pixel into `[0, 255]`.
    pub fn clamped(&self) -> Image {
        self.map(|p| p.clamp(0.0, 255.0))
    }

    /// Clamps into `[0, 255]` and rounds to the nearest integer, i.e. what a
    /// PGM round trip produces.
    pub fn quantized(&self) -> Image {
        self.map(|p| p.clamp(0.0, 255.0).round())
    }

    /// True when every pixel lies in `[0, 255]`.
    pub fn is_file_valid(&self) -> bool {
        self.data.iter().all(|p| (0.0..=255.0).contains(p))
    }

    /// True when every pixel lies in `[1, 254]`, so that 0 and 255 can only
    /// come from corruption.
    pub fn is_interior_valued(&self) -> bool {
        self.data.iter().all(|p| (1.0..=254.0).contains(p))
    }

    /// Largest absolute pixel difference.
    pub fn max_abs_diff(&self, other: &Image) -> Result<f64> {
        if !self.same_shape(other) {
            return invalid(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.height, self.width, other.height, other.width
            ));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

/// A boolean per-pixel flag map, e.g. the set of corrupted pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    height: usize,
    width: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(height: usize, width: usize) -> Self {
        Self { height, width, data: vec![false; height * width] }
    }

    pub fn from_vec(height: usize, width: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != height * width {
            return invalid(format!("mask buffer has {} entries, expected {}", data.len(), height * width));
        }
        Ok(Self { height, width, data })
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self { height, width, data }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// The mask as a 0/1 image, which lets it share the block tiling code.
    pub fn to_image(&self) -> Image {
        Image {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }

    /// Inverse of [`Mask::to_image`]: any pixel above 0.5 is set.
    pub fn from_image(img: &Image) -> Self {
        Self { height: img.height, width: img.width, data: img.data.iter().map(|&p| p > 0.5).collect() }
    }
}
