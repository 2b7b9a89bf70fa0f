//! Sparse solutions of underdetermined systems `H z = x`.
//!
//! [`Sl0Solver`] recovers a sparse `z` when the positions of its nonzeros are
//! unknown, using the smoothed-ℓ0 method: the count of nonzeros is replaced by
//! `m - Σ exp(-zᵢ² / 2σ²)`, which is maximized by projected gradient ascent
//! while `σ` shrinks geometrically. [`least_squares_known_support`] handles the
//! easier case in which the support is given and only the amplitudes are
//! unknown.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Relative feasibility tolerance `‖H z − x‖₂ ≤ FEASIBILITY_TOL · (1 + ‖x‖₂)`.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Tolerance for treating `H Hᵀ` as the identity.
const ORTHONORMAL_TOL: f64 = 1e-10;

/// Reciprocal condition number below which a system counts as rank deficient.
const RCOND_MIN: f64 = 1e-10;

/// Annealing schedule for the smoothed-ℓ0 iteration.
///
/// `σ` starts at twice the largest magnitude of the minimum-norm solution and
/// is multiplied by `sigma_decrease` after each level until it falls below
/// `sigma_min`. At each level `inner_iterations` steps of
/// `z ← z − mu · z ⊙ exp(−z² / 2σ²)` are each followed by projection onto
/// `{z : H z = x}`.
///
/// With `polish` set, the annealed estimate is finished by a least-squares
/// refit on the smallest set of its largest entries (fewer than the number of
/// observations) that satisfies `H z = x` to the feasibility tolerance. This
/// removes the residue annealing leaves on zero entries, including entries
/// that stopped moving once sigma fell far below them. Without such a set the
/// annealed estimate is returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl0Params {
    pub sigma_min: f64,
    pub sigma_decrease: f64,
    pub mu: f64,
    pub inner_iterations: usize,
    pub polish: bool,
}

impl Default for Sl0Params {
    fn default() -> Self {
        Self { sigma_min: 0.01, sigma_decrease: 0.5, mu: 2.0, inner_iterations: 3, polish: true }
    }
}

impl Sl0Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_decrease > 0.0 && self.sigma_decrease < 1.0) {
            return invalid(format!("sigma_decrease must lie in (0, 1), got {}", self.sigma_decrease));
        }
        if !(self.sigma_min > 0.0) || !self.sigma_min.is_finite() {
            return invalid(format!("sigma_min must be positive, got {}", self.sigma_min));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return invalid(format!("mu must be positive, got {}", self.mu));
        }
        if self.inner_iterations == 0 {
            return invalid("inner_iterations must be at least 1");
        }
        Ok(())
    }
}

/// A sparse error vector: amplitudes plus the indices considered nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEstimate {
    pub values: Vec<f64>,
    pub support: Vec<usize>,
}

impl ErrorEstimate {
    pub fn zeros(len: usize) -> Self {
        Self { values: vec![0.0; len], support: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Smoothed-ℓ0 solver for a fixed matrix `H` with full row rank.
///
/// The iteration runs in column-normalized coordinates `y = D z`, where `D`
/// holds the column norms of `H`, so that every unknown is equally visible
/// to the minimum-norm start. The support of `y` and `z` is the same. The
/// projector `Ĥ⁺ = Ĥᵀ (Ĥ Ĥᵀ)⁻¹` of the normalized matrix `Ĥ = H D⁻¹` is
/// computed once at construction; when the normalized rows happen to be
/// orthonormal this reduces to `Ĥᵀ`.
#[derive(Debug, Clone)]
pub struct Sl0Solver {
    h: DMatrix<f64>,
    scaled: DMatrix<f64>,
    pinv: DMatrix<f64>,
    col_norms: Vec<f64>,
    orthonormal_rows: bool,
}

impl Sl0Solver {
    pub fn new(h: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = h.shape();
        if rows == 0 || rows >= cols {
            return invalid(format!("expected a wide matrix, got {rows}x{cols}"));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return invalid("matrix has non-finite entries");
        }
        let orthonormal_rows = is_identity(&(&h * h.transpose()));
        let col_norms: Vec<f64> = h.column_iter().map(|c| c.norm()).collect();
        if let Some(j) = col_norms.iter().position(|&n| n == 0.0) {
            return Err(Error::Solver { reason: format!("column {j} is zero"), condition: f64::INFINITY });
        }
        let mut scaled = h.clone();
        for (mut col, &norm) in scaled.column_iter_mut().zip(&col_norms) {
            col /= norm;
        }
        let pinv = right_pseudo_inverse(&scaled)?;
        Ok(Self { h, scaled, pinv, col_norms, orthonormal_rows })
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// Whether `H Hᵀ = I` held to within 1e-10 at construction.
    pub fn has_orthonormal_rows(&self) -> bool {
        self.orthonormal_rows
    }

    pub fn column_norms(&self) -> &[f64] {
        &self.col_norms
    }

    pub fn observations(&self) -> usize {
        self.h.nrows()
    }

    pub fn unknowns(&self) -> usize {
        self.h.ncols()
    }

    fn rhs(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.h.nrows() {
            return invalid(format!("expected {} observations, got {}", self.h.nrows(), x.len()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return invalid("observation vector has non-finite entries");
        }
        Ok(DVector::from_column_slice(x))
    }

    /// Runs the smoothed-ℓ0 iteration and returns a feasible `z`.
    pub fn solve(&self, x: &[f64], params: &Sl0Params) -> Result<Vec<f64>> {
        params.validate()?;
        let x = self.rhs(x)?;
        let mut y = &self.pinv * &x;
        let mut sigma = 2.0 * y.amax();
        let mut residual = DVector::zeros(x.len());
        while sigma > params.sigma_min {
            let inv_two_var = 1.0 / (2.0 * sigma * sigma);
            for _ in 0..params.inner_iterations {
                y.apply(|yi| *yi -= params.mu * *yi * (-*yi * *yi * inv_two_var).exp());
                self.scaled.mul_to(&y, &mut residual);
                residual -= &x;
                y -= &self.pinv * &residual;
            }
            sigma *= params.sigma_decrease;
        }
        let bound = FEASIBILITY_TOL * (1.0 + x.norm());
        if params.polish {
            if let Some(refit) = self.refit(&y, &x, bound) {
                return Ok(refit);
            }
        }
        let z: Vec<f64> = y.iter().zip(&self.col_norms).map(|(yi, n)| yi / n).collect();
        let res = (&self.h * DVector::from_column_slice(&z) - &x).norm();
        if !(res <= bound) {
            return Err(Error::Solver {
                reason: format!("projection lost feasibility: residual {res:.3e} > {bound:.3e}"),
                condition: f64::NAN,
            });
        }
        Ok(z)
    }

    /// Sparsest least-squares fit on nested supports: the `s` largest
    /// entries of `y`, for growing `s` below the number of observations.
    fn refit(&self, y: &DVector<f64>, x: &DVector<f64>, bound: f64) -> Option<Vec<f64>> {
        let rows = self.h.nrows();
        let mut order: Vec<usize> = (0..y.len()).collect();
        order.sort_by(|&a, &b| y[b].abs().total_cmp(&y[a].abs()));
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(rows);
        let mut support = Vec::with_capacity(rows);
        let mut r = x.clone();
        for &j in &order {
            if r.norm() <= 0.5 * bound || support.len() + 1 >= rows {
                break;
            }
            let mut v = self.h.column(j).into_owned();
            // Two Gram-Schmidt passes keep the basis orthonormal.
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&v);
                    v.axpy(-c, q, 1.0);
                }
            }
            let nv = v.norm();
            if nv <= 1e-8 * self.col_norms[j] {
                continue;
            }
            v /= nv;
            let c = v.dot(&r);
            r.axpy(-c, &v, 1.0);
            basis.push(v);
            support.push(j);
        }
        if r.norm() > 0.5 * bound {
            return None;
        }
        support.sort_unstable();
        let est = least_squares_known_support(&self.h, x.as_slice(), &support).ok()?;
        let res = (&self.h * DVector::from_column_slice(&est.values) - x).norm();
        (res <= bound).then_some(est.values)
    }
}

fn is_identity(m: &DMatrix<f64>) -> bool {
    (m - DMatrix::identity(m.nrows(), m.ncols())).amax() < ORTHONORMAL_TOL
}

/// `Aᵀ (A Aᵀ)⁻¹` for a wide matrix of full row rank.
fn right_pseudo_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let gram = a * a.transpose();
    if is_identity(&gram) {
        return Ok(a.transpose());
    }
    let sv = gram.clone().singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(lo > RCOND_MIN * hi) {
        return Err(Error::Solver { reason: "matrix is rank deficient".into(), condition });
    }
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Solver { reason: "Gram matrix is not positive definite".into(), condition })?;
    Ok(a.transpose() * chol.inverse())
}

/// One-shot smoothed-ℓ0 solve; prefer [`Sl0Solver`] when `H` is reused.
pub fn sl0_solve(h: &DMatrix<f64>, x: &[f64], params: &Sl0Params) -> Result<Vec<f64>> {
    Sl0Solver::new(h.clone())?.solve(x, params)
}

/// Least-squares amplitudes on a known support.
///
/// Keeps only the columns of `H` indexed by `support` and returns the
/// pseudo-inverse solution of the resulting tall system, scattered back into
/// a length-`H.ncols()` vector that is zero off the support.
pub fn least_squares_known_support(h: &DMatrix<f64>, x: &[f64], support: &[usize]) -> Result<ErrorEstimate> {
    let (rows, cols) = h.shape();
    if x.len() != rows {
        return invalid(format!("expected {rows} observations, got {}", x.len()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return invalid("observation vector has non-finite entries");
    }
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != support.len() {
        return invalid("support has repeated indices");
    }
    if let Some(&bad) = sorted.last().filter(|&&i| i >= cols) {
        return invalid(format!("support index {bad} out of range for {cols} columns"));
    }
    if sorted.is_empty() {
        return Ok(ErrorEstimate::zeros(cols));
    }
    if sorted.len() > rows {
        return Err(Error::CapacityExceeded { support: sorted.len(), capacity: rows });
    }

    let truncated = h.select_columns(sorted.iter());
    let svd = truncated.svd(true, true);
    let (lo, hi) = (svd.singular_values.min(), svd.singular_values.max());
    if !(lo > RCOND_MIN * hi) {
        return Err(Error::Solver {
            reason: format!("truncated matrix ({rows}x{}) is rank deficient", sorted.len()),
            condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        });
    }
    let w = svd
        .solve(&DVector::from_column_slice(x), 0.0)
        .map_err(|e| Error::Solver { reason: e.to_string(), condition: hi / lo })?;

    let mut values = vec![0.0; cols];
    for (&i, &wi) in sorted.iter().zip(w.iter()) {
        values[i] = wi;
    }
    Ok(ErrorEstimate { values, support: sorted })
}

/// Keeps entries with `|zᵢ| > tau` and zeroes the rest.
pub fn threshold_to_sparse(z: &[f64], tau: f64) -> ErrorEstimate {
    let mut values = vec![0.0; z.len()];
    let mut support = Vec::new();
    for (i, &zi) in z.iter().enumerate() {
        if zi.abs() > tau {
            values[i] = zi;
            support.push(i);
        }
    }
    ErrorEstimate { values, support }
}
