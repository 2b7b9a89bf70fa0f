//! Block DCT, zigzag scanning, and the sensing matrices that turn error
//! recovery into a sparse linear inverse problem.
//!
//! For an `N`×`N` block write `m = N²`. Scanning the 2-D DCT of a block in
//! zigzag order gives a length-`m` coefficient vector; the clean image is
//! modelled as having zeros in the last `m - n` of those coefficients. The
//! [`SensingSystem`] holds the `m`×`m` matrix `G` with
//! `zigzag(dct(E)) = G · zigzag(E)` for every block `E`, and its bottom
//! `m - n` rows `H`, which map a pixel-domain error block straight to the
//! tail coefficients it disturbs.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::imaging::Image;

/// The orthonormal `N`×`N` DCT-II matrix.
///
/// Row `k` is the `k`-th cosine: `T[k][j] = α(k) cos((2j + 1) k π / 2N)`
/// with `α(0) = √(1/N)` and `α(k) = √(2/N)` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct DctBasis {
    size: usize,
    matrix: DMatrix<f64>,
    transpose: DMatrix<f64>,
}

impl DctBasis {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return invalid("DCT size must be at least 1");
        }
        let matrix = DMatrix::from_fn(size, size, |k, j| {
            alpha(k, size) * ((2 * j + 1) as f64 * k as f64 * PI / (2 * size) as f64).cos()
        });
        let transpose = matrix.transpose();
        Ok(Self { size, matrix, transpose })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The matrix `T`; rows are frequencies, columns are sample positions.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn transpose(&self) -> &DMatrix<f64> {
        &self.transpose
    }

    /// `T[freq][pos]`.
    #[inline]
    pub fn entry(&self, freq: usize, pos: usize) -> f64 {
        self.matrix[(freq, pos)]
    }
}

/// Normalization of the `k`-th DCT row.
pub fn alpha(k: usize, size: usize) -> f64 {
    if k == 0 {
        (1.0 / size as f64).sqrt()
    } else {
        (2.0 / size as f64).sqrt()
    }
}

/// Shorthand for [`DctBasis::new`].
pub fn dct_basis(size: usize) -> Result<DctBasis> {
    DctBasis::new(size)
}

fn block_matrix(block: &Image, size: usize) -> Result<DMatrix<f64>> {
    if block.height() != size || block.width() != size {
        return invalid(format!("expected a {size}x{size} block, got {}x{}", block.height(), block.width()));
    }
    Ok(DMatrix::from_row_slice(size, size, block.data()))
}

fn matrix_image(m: &DMatrix<f64>) -> Image {
    Image::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)]).expect("non-empty matrix")
}

/// Forward 2-D DCT, `T · S · Tᵀ`.
pub fn block_dct(block: &Image, basis: &DctBasis) -> Result<Image> {
    let s = block_matrix(block, basis.size)?;
    Ok(matrix_image(&(&basis.matrix * s * &basis.transpose)))
}

/// Inverse 2-D DCT, `Tᵀ · C · T`.
pub fn inverse_block_dct(coeffs: &Image, basis: &DctBasis) -> Result<Image> {
    let c = block_matrix(coeffs, basis.size)?;
    Ok(matrix_image(&(&basis.transpose * c * &basis.matrix)))
}

/// The JPEG zigzag scan of an `N`×`N` block.
///
/// Anti-diagonals `d = u + v` are visited in increasing order. Odd diagonals
/// run from `(0, d)` downward to the left, even diagonals from `(d, 0)`
/// upward to the right, so the scan begins `(0,0), (0,1), (1,0), (2,0), ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZigzagOrder {
    size: usize,
    positions: Vec<(usize, usize)>,
}

impl ZigzagOrder {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return invalid("zigzag size must be at least 1");
        }
        let mut positions = Vec::with_capacity(size * size);
        for d in 0..(2 * size - 1) {
            let lo = d.saturating_sub(size - 1);
            let hi = d.min(size - 1);
            if d % 2 == 1 {
                positions.extend((lo..=hi).map(|u| (u, d - u)));
            } else {
                positions.extend((lo..=hi).rev().map(|u| (u, d - u)));
            }
        }
        Ok(Self { size, positions })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of positions, `N²`.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `(row, col)` of scan index `i`.
    #[inline]
    pub fn position(&self, i: usize) -> (usize, usize) {
        self.positions[i]
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }
}

/// Shorthand for [`ZigzagOrder::new`].
pub fn zigzag_order(size: usize) -> Result<ZigzagOrder> {
    ZigzagOrder::new(size)
}

/// Reads a block in zigzag order.
pub fn zigzag(block: &Image, order: &ZigzagOrder) -> Result<Vec<f64>> {
    if block.height() != order.size || block.width() != order.size {
        return invalid(format!(
            "expected a {0}x{0} block, got {1}x{2}",
            order.size,
            block.height(),
            block.width()
        ));
    }
    Ok(order.positions.iter().map(|&(u, v)| block.get(u, v)).collect())
}

/// Scatters a zigzag-ordered vector back into a block.
pub fn inverse_zigzag(values: &[f64], order: &ZigzagOrder) -> Result<Image> {
    if values.len() != order.len() {
        return invalid(format!("expected {} zigzag values, got {}", order.len(), values.len()));
    }
    let mut block = Image::zeros(order.size, order.size)?;
    for (&(u, v), &x) in order.positions.iter().zip(values) {
        block.set(u, v, x);
    }
    Ok(block)
}

/// Number of retained (low-frequency) coefficients for compression ratio
/// `cr`: `round(N² / cr)`, clamped to `[1, N² - 1]`.
pub fn retained_count(block_size: usize, compression_ratio: f64) -> Result<usize> {
    if !(compression_ratio > 1.0) || !compression_ratio.is_finite() {
        return invalid(format!("compression ratio must be a finite value > 1, got {compression_ratio}"));
    }
    let m = block_size * block_size;
    if m < 2 {
        return invalid(format!("block size {block_size} leaves no room for observations"));
    }
    let n = (m as f64 / compression_ratio).round() as usize;
    Ok(n.clamp(1, m - 1))
}

/// The matrices `G` (`m`×`m`) and `H` (bottom `m - n` rows of `G`) for one
/// block geometry.
///
/// Column `j` of `G` corresponds to pixel `(u(j), v(j))`, row `i` to DCT
/// coefficient `(u(i), v(i))`, and by separability
/// `G[i][j] = T[u(i)][u(j)] · T[v(i)][v(j)]`.
#[derive(Debug, Clone)]
pub struct SensingSystem {
    basis: DctBasis,
    order: ZigzagOrder,
    retained: usize,
    g: DMatrix<f64>,
    h: DMatrix<f64>,
}

impl SensingSystem {
    pub fn new(block_size: usize, retained: usize) -> Result<Self> {
        let basis = DctBasis::new(block_size)?;
        let order = ZigzagOrder::new(block_size)?;
        let m = order.len();
        if retained == 0 || retained >= m {
            return invalid(format!("retained count must lie in [1, {}], got {retained}", m.saturating_sub(1)));
        }
        let g = zigzag_dct_matrix(&basis, &order)?;
        let h = g.rows(retained, m - retained).into_owned();
        Ok(Self { basis, order, retained, g, h })
    }

    /// Geometry from a compression ratio instead of an explicit count.
    pub fn with_compression_ratio(block_size: usize, compression_ratio: f64) -> Result<Self> {
        Self::new(block_size, retained_count(block_size, compression_ratio)?)
    }

    pub fn block_size(&self) -> usize {
        self.basis.size
    }

    /// `m = N²`.
    pub fn block_len(&self) -> usize {
        self.order.len()
    }

    /// `n`, the count of leading zigzag coefficients left unconstrained.
    pub fn retained(&self) -> usize {
        self.retained
    }

    /// `m - n`, the number of observation equations per block.
    pub fn observations(&self) -> usize {
        self.block_len() - self.retained
    }

    pub fn basis(&self) -> &DctBasis {
        &self.basis
    }

    pub fn order(&self) -> &ZigzagOrder {
        &self.order
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }
}

/// The full `m`×`m` matrix `G` mapping `zigzag(E)` to `zigzag(dct(E))`.
pub fn zigzag_dct_matrix(basis: &DctBasis, order: &ZigzagOrder) -> Result<DMatrix<f64>> {
    if basis.size != order.size {
        return invalid(format!("basis size {} does not match zigzag size {}", basis.size, order.size));
    }
    let m = order.len();
    Ok(DMatrix::from_fn(m, m, |i, j| {
        let (ui, vi) = order.position(i);
        let (uj, vj) = order.position(j);
        basis.entry(ui, uj) * basis.entry(vi, vj)
    }))
}

/// Shorthand for [`SensingSystem::new`].
pub fn sensing_system(block_size: usize, retained: usize) -> Result<SensingSystem> {
    SensingSystem::new(block_size, retained)
}
