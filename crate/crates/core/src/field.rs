//! Real-valued fields sampled on a periodic grid.

use std::sync::Arc;

use crate::error::{QhdError, Result};
use crate::grid::Grid;
use crate::scalar::Scalar;

/// Scalar samples, one per grid point, row-major.
#[derive(Debug, Clone)]
pub struct ScalarField<T> {
    grid: Arc<Grid<T>>,
    data: Vec<T>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self {
            grid: Arc::clone(grid),
            data: vec![T::zero(); grid.num_points()],
        }
    }

    pub fn constant(grid: &Arc<Grid<T>>, value: T) -> Self {
        Self {
            grid: Arc::clone(grid),
            data: vec![value; grid.num_points()],
        }
    }

    pub fn from_data(grid: &Arc<Grid<T>>, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.num_points() {
            return Err(QhdError::InvalidConfig(format!(
                "field length {} does not match grid with {} points",
                data.len(),
                grid.num_points()
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            data,
        })
    }

    /// Sample a function of position.
    pub fn from_fn(grid: &Arc<Grid<T>>, f: impl Fn([T; 3]) -> T) -> Self {
        let data = (0..grid.num_points()).map(|i| f(grid.position(i))).collect();
        Self {
            grid: Arc::clone(grid),
            data,
        }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        debug_assert!(self.grid.as_ref() == other.grid.as_ref());
        Self {
            grid: Arc::clone(&self.grid),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale_in_place(&mut self, c: T) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    /// `self += c * other`, elementwise.
    pub fn add_scaled(&mut self, other: &Self, c: T) {
        debug_assert!(self.grid.as_ref() == other.grid.as_ref());
        for (v, &o) in self.data.iter_mut().zip(&other.data) {
            *v += c * o;
        }
    }

    pub fn min_value(&self) -> T {
        self.data.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Grid mean, `(1/N^d) * sum(f)`.
    pub fn mean(&self) -> T {
        self.data.iter().copied().sum::<T>() / T::from_usize(self.data.len()).unwrap()
    }

    /// Quadrature of the field over the torus, `h^d * sum(f)`.
    pub fn integral(&self) -> T {
        self.data.iter().copied().sum::<T>() * self.grid.cell_volume()
    }

    /// Discrete L2 norm, `sqrt(h^d * sum(f^2))`.
    pub fn l2_norm(&self) -> T {
        (self.data.iter().map(|&v| v * v).sum::<T>() * self.grid.cell_volume()).sqrt()
    }
}

/// `dim` scalar components.
#[derive(Debug, Clone)]
pub struct VectorField<T> {
    components: Vec<ScalarField<T>>,
}

impl<T: Scalar> VectorField<T> {
    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self {
            components: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn from_components(components: Vec<ScalarField<T>>) -> Self {
        debug_assert!(!components.is_empty());
        debug_assert_eq!(components.len(), components[0].grid().dim());
        Self { components }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, j: usize) -> &ScalarField<T> {
        &self.components[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut ScalarField<T> {
        &mut self.components[j]
    }

    pub fn components(&self) -> &[ScalarField<T>] {
        &self.components
    }

    pub fn map(&self, f: impl Fn(&ScalarField<T>) -> ScalarField<T>) -> Self {
        Self {
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: T) {
        for (v, o) in self.components.iter_mut().zip(&other.components) {
            v.add_scaled(o, c);
        }
    }

    pub fn scale_in_place(&mut self, c: T) {
        for v in &mut self.components {
            v.scale_in_place(c);
        }
    }

    /// Pointwise dot product with another vector field.
    pub fn dot(&self, other: &Self) -> ScalarField<T> {
        let mut out = ScalarField::zeros(self.grid());
        for (a, b) in self.components.iter().zip(&other.components) {
            for ((o, &x), &y) in out.data_mut().iter_mut().zip(a.data()).zip(b.data()) {
                *o += x * y;
            }
        }
        out
    }

    /// Pointwise squared magnitude, `|v|^2`.
    pub fn norm_sq(&self) -> ScalarField<T> {
        self.dot(self)
    }

    pub fn max_abs(&self) -> T {
        self.components
            .iter()
            .fold(T::zero(), |m, c| m.max(c.max_abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }
}

/// `dim x dim` scalar components, row-major: entry `(i, j)` at `i*dim + j`.
#[derive(Debug, Clone)]
pub struct TensorField<T> {
    dim: usize,
    components: Vec<ScalarField<T>>,
}

impl<T: Scalar> TensorField<T> {
    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        let dim = grid.dim();
        Self {
            dim,
            components: (0..dim * dim).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField<T> {
        &self.components[i * self.dim + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut ScalarField<T> {
        &mut self.components[i * self.dim + j]
    }

    /// Pointwise trace.
    pub fn trace(&self) -> ScalarField<T> {
        let mut out = ScalarField::zeros(self.grid());
        for i in 0..self.dim {
            out.add_scaled(self.entry(i, i), T::one());
        }
        out
    }

    /// Pointwise Frobenius inner square, `sum_ij M_ij^2`.
    pub fn frobenius_sq(&self) -> ScalarField<T> {
        let mut out = ScalarField::zeros(self.grid());
        for c in &self.components {
            for (o, &v) in out.data_mut().iter_mut().zip(c.data()) {
                *o += v * v;
            }
        }
        out
    }

    /// Max over the grid of `|M - M^T|` entries.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let d = self.entry(i, j).zip_map(self.entry(j, i), |a, b| a - b);
                worst = worst.max(d.max_abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn quadrature_of_sin_squared() {
        let g = make_grid::<f64>(1, 2.0 * std::f64::consts::PI, 32).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0].sin());
        // integral of sin^2 over [0, 2pi) is pi; the trapezoid rule is exact
        // for band-limited integrands on a periodic grid
        let sq = f.map(|v| v * v);
        assert!((sq.integral() - std::f64::consts::PI).abs() < 1e-12);
        assert!((f.l2_norm() - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(f.mean().abs() < 1e-14);
    }

    #[test]
    fn rejects_wrong_length() {
        let g = make_grid::<f64>(1, 1.0, 8).unwrap();
        assert!(ScalarField::from_data(&g, vec![0.0; 7]).is_err());
    }

    #[test]
    fn vector_dot_and_norm() {
        let g = make_grid::<f64>(2, 1.0, 8).unwrap();
        let v = VectorField::from_components(vec![
            ScalarField::constant(&g, 3.0),
            ScalarField::constant(&g, 4.0),
        ]);
        assert_eq!(v.norm_sq().data()[0], 25.0);
        assert_eq!(v.max_abs(), 4.0);
    }
}
