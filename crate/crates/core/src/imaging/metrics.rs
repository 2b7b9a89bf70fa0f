use std::cmp::Ordering;
use std::fmt;

use super::Image;
use crate::error::{invalid, Result};

/// Peak signal-to-noise ratio in decibels against a peak of 255.
///
/// Identical images have zero mean squared error; that case is the
/// `Infinite` variant rather than a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Psnr::Infinite)
    }

    /// Decibels, with `Infinite` mapped to `f64::INFINITY`.
    pub fn db(&self) -> f64 {
        match *self {
            Psnr::Finite(v) => v,
            Psnr::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for Psnr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.db().partial_cmp(&other.db())
    }
}

/// Formats as decibels with four decimals, or `inf`.
impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v:.4}"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

/// Mean squared pixel difference.
pub fn mse(reference: &Image, estimate: &Image) -> Result<f64> {
    if !reference.same_shape(estimate) {
        return invalid(format!(
            "psnr needs equal shapes, got {}x{} and {}x{}",
            reference.height(),
            reference.width(),
            estimate.height(),
            estimate.width()
        ));
    }
    let sum: f64 = reference.data().iter().zip(estimate.data()).map(|(s, e)| (s - e) * (s - e)).sum();
    Ok(sum / reference.len() as f64)
}

/// `10 log10(255² / MSE)`.
pub fn psnr(reference: &Image, estimate: &Image) -> Result<Psnr> {
    let mse = mse(reference, estimate)?;
    if mse == 0.0 {
        return Ok(Psnr::Infinite);
    }
    Ok(Psnr::Finite(10.0 * (255.0f64 * 255.0 / mse).log10()))
}
