//! Periodic computational domain.

use std::sync::Arc;

use crate::error::{QhdError, Result};
use crate::scalar::Scalar;

/// Uniform periodic grid on the torus `[0, L)^dim`.
///
/// The same resolution `N` and extent `L` are used along every axis. The
/// associated wavenumbers follow the standard DFT convention
/// `k = 2*pi*m/L` with `m = 0, 1, ..., N/2-1, -N/2, ..., -1`.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    dim: usize,
    length: T,
    points: usize,
    /// Signed DFT wavenumbers, length `N`, `wavenumbers[0] == 0`.
    wavenumbers: Vec<T>,
    /// Wavenumbers used to build derivative multipliers: identical to
    /// `wavenumbers` except the Nyquist entry is zeroed, so that every
    /// spectral derivative of a real field is real and the composition
    /// identities (laplacian = div o grad, ...) hold exactly.
    deriv_wavenumbers: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    /// Signed mode index for storage index `i`: `0..N/2-1` then `-N/2..-1`.
    pub fn signed_index(&self, i: usize) -> i64 {
        if i < self.points / 2 {
            i as i64
        } else {
            i as i64 - self.points as i64
        }
    }

    /// Largest mode magnitude kept by the 2/3-rule mask: modes with
    /// `3*|m| > N` are zeroed by dealiasing.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.points / 3) as i64
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    /// Grid spacing `h = L/N`.
    pub fn spacing(&self) -> T {
        self.length / T::from_usize(self.points).unwrap()
    }

    /// Total number of grid points, `N^dim`.
    pub fn num_points(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    /// Quadrature weight of one grid point, `h^dim`.
    pub fn cell_volume(&self) -> T {
        self.spacing().powi(self.dim as i32)
    }

    /// Domain volume `L^dim`.
    pub fn volume(&self) -> T {
        self.length.powi(self.dim as i32)
    }

    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    pub(crate) fn deriv_wavenumbers(&self) -> &[T] {
        &self.deriv_wavenumbers
    }

    /// Physical coordinate of index `i` along any axis.
    pub fn coord(&self, i: usize) -> T {
        self.spacing() * T::from_usize(i).unwrap()
    }

    /// Decompose a flat row-major index into per-axis indices.
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let n = self.points;
        match self.dim {
            1 => [flat, 0, 0],
            2 => [flat / n, flat % n, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    /// Position vector of a flat index (unused axes are zero).
    pub fn position(&self, flat: usize) -> [T; 3] {
        let idx = self.unravel(flat);
        let mut x = [T::zero(); 3];
        for (a, xa) in x.iter_mut().enumerate().take(self.dim) {
            *xa = self.coord(idx[a]);
        }
        x
    }
}

impl<T: Scalar> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points && self.length == other.length
    }
}

/// Build a periodic grid.
///
/// `N` must be even and at least 8; the highest (Nyquist) mode is
/// sign-ambiguous on a real grid and is therefore excluded from derivative
/// multipliers.
pub fn make_grid<T: Scalar>(dim: usize, length: T, points: usize) -> Result<Arc<Grid<T>>> {
    if !(1..=3).contains(&dim) {
        return Err(QhdError::BadDimension(dim));
    }
    if !(length > T::zero()) || !length.is_finite() {
        return Err(QhdError::NonPositiveLength(length.as_f64()));
    }
    if !points.is_multiple_of(2) {
        return Err(QhdError::OddResolution(points));
    }
    if points < 8 {
        return Err(QhdError::ResolutionTooSmall(points));
    }

    let base = T::lit(2.0) * T::PI() / length;
    let mut wavenumbers = Vec::with_capacity(points);
    let mut deriv = Vec::with_capacity(points);
    for i in 0..points {
        let m = if i < points / 2 {
            i as i64
        } else {
            i as i64 - points as i64
        };
        let k = base * T::from_i64(m).unwrap();
        wavenumbers.push(k);
        deriv.push(if i == points / 2 { T::zero() } else { k });
    }

    Ok(Arc::new(Grid {
        dim,
        length,
        points,
        wavenumbers,
        deriv_wavenumbers: deriv,
    }))
}
