//! FFT-based differential operators and dealiasing.
//!
//! All derivatives are computed by multiplying DFT coefficients with the
//! signed wavenumbers of the grid. The Nyquist wavenumber is zeroed in the
//! derivative tables (its sign is ambiguous on a real grid), which makes the
//! composition identities `laplacian = divergence o grad` and
//! `laplacian_grad = grad o laplacian` hold exactly in exact arithmetic.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::field::{ScalarField, TensorField, VectorField};
use crate::grid::Grid;
use crate::scalar::Scalar;

/// Cached FFT plans and masks for one grid.
///
/// Operators are pure functions of their inputs; the workspace itself is
/// immutable after construction and can be shared across threads.
pub struct SpectralWorkspace<T: Scalar> {
    grid: Arc<Grid<T>>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    /// Per-axis-index keep flag of the 2/3-rule mask.
    keep: Vec<bool>,
}

impl<T: Scalar> SpectralWorkspace<T> {
    pub fn new(grid: &Arc<Grid<T>>) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.points_per_axis();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let keep = (0..n)
            .map(|i| 3 * grid.signed_index(i).unsigned_abs() as usize <= n)
            .collect();
        Self {
            grid: Arc::clone(grid),
            fwd,
            inv,
            keep,
        }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    fn fft_all_axes(&self, data: &mut [Complex<T>], plan: &Arc<dyn Fft<T>>) {
        let n = self.grid.points_per_axis();
        let dim = self.grid.dim();
        let mut line = vec![Complex::new(T::zero(), T::zero()); n];
        let mut scratch =
            vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
        for axis in 0..dim {
            // stride between consecutive entries of a line along `axis`
            let stride = n.pow((dim - 1 - axis) as u32);
            let lines = data.len() / n;
            for l in 0..lines {
                // first element of line l: enumerate all index tuples with
                // the `axis` coordinate fixed to zero
                let block = stride * n;
                let base = (l / stride) * block + (l % stride);
                if stride == 1 {
                    line.copy_from_slice(&data[base..base + n]);
                } else {
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                if stride == 1 {
                    data[base..base + n].copy_from_slice(&line);
                } else {
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
    }

    /// Normalized DFT coefficients `c_k` with `f(x) = sum_k c_k exp(i k.x)`.
    pub(crate) fn forward(&self, f: &ScalarField<T>) -> Vec<Complex<T>> {
        let mut data: Vec<Complex<T>> = f
            .data()
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .collect();
        self.fft_all_axes(&mut data, &self.fwd);
        let scale = T::one() / T::from_usize(self.grid.num_points()).unwrap();
        for v in &mut data {
            *v = *v * scale;
        }
        data
    }

    pub(crate) fn inverse(&self, mut spec: Vec<Complex<T>>) -> ScalarField<T> {
        self.fft_all_axes(&mut spec, &self.inv);
        ScalarField::from_data(&self.grid, spec.into_iter().map(|c| c.re).collect())
            .expect("length preserved by transforms")
    }

    /// Apply `factor(k)` to every coefficient, where `k` is the vector of
    /// derivative wavenumbers (Nyquist entries zeroed).
    fn multiplied(&self, spec: &[Complex<T>], factor: impl Fn(&[T; 3]) -> Complex<T>) -> Vec<Complex<T>> {
        let kd = self.grid.deriv_wavenumbers();
        let mut out = Vec::with_capacity(spec.len());
        for (flat, &c) in spec.iter().enumerate() {
            let idx = self.grid.unravel(flat);
            let mut k = [T::zero(); 3];
            for a in 0..self.grid.dim() {
                k[a] = kd[idx[a]];
            }
            out.push(c * factor(&k));
        }
        out
    }

    /// Spectral gradient; the Nyquist mode does not contribute.
    pub fn grad(&self, f: &ScalarField<T>) -> VectorField<T> {
        let spec = self.forward(f);
        let comps = (0..self.grid.dim())
            .map(|j| {
                self.inverse(self.multiplied(&spec, |k| Complex::new(T::zero(), k[j])))
            })
            .collect();
        VectorField::from_components(comps)
    }

    pub fn divergence(&self, v: &VectorField<T>) -> ScalarField<T> {
        let n = self.grid.num_points();
        let mut acc = vec![Complex::new(T::zero(), T::zero()); n];
        for j in 0..v.dim() {
            let spec = self.forward(v.component(j));
            let term = self.multiplied(&spec, |k| Complex::new(T::zero(), k[j]));
            for (a, t) in acc.iter_mut().zip(term) {
                *a = *a + t;
            }
        }
        self.inverse(acc)
    }

    pub fn laplacian(&self, f: &ScalarField<T>) -> ScalarField<T> {
        let spec = self.forward(f);
        self.inverse(self.multiplied(&spec, |k| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            Complex::new(-k2, T::zero())
        }))
    }

    /// Componentwise Laplacian of a vector field.
    pub fn laplacian_vec(&self, v: &VectorField<T>) -> VectorField<T> {
        v.map(|c| self.laplacian(c))
    }

    /// `grad(div v)` assembled directly in spectral space.
    pub fn grad_div(&self, v: &VectorField<T>) -> VectorField<T> {
        let n = self.grid.num_points();
        let mut div_spec = vec![Complex::new(T::zero(), T::zero()); n];
        for j in 0..v.dim() {
            let spec = self.forward(v.component(j));
            let term = self.multiplied(&spec, |k| Complex::new(T::zero(), k[j]));
            for (a, t) in div_spec.iter_mut().zip(term) {
                *a = *a + t;
            }
        }
        let comps = (0..v.dim())
            .map(|i| {
                self.inverse(self.multiplied(&div_spec, |k| Complex::new(T::zero(), k[i])))
            })
            .collect();
        VectorField::from_components(comps)
    }

    /// Hessian `H_ij = d_i d_j f`.
    pub fn hessian(&self, f: &ScalarField<T>) -> TensorField<T> {
        let spec = self.forward(f);
        let dim = self.grid.dim();
        let mut out = TensorField::zeros(&self.grid);
        for i in 0..dim {
            for j in i..dim {
                let h = self.inverse(self.multiplied(&spec, |k| Complex::new(-k[i] * k[j], T::zero())));
                if i != j {
                    *out.entry_mut(j, i) = h.clone();
                }
                *out.entry_mut(i, j) = h;
            }
        }
        out
    }

    /// `grad(laplacian f)` assembled directly in spectral space.
    pub fn laplacian_grad(&self, f: &ScalarField<T>) -> VectorField<T> {
        let spec = self.forward(f);
        let comps = (0..self.grid.dim())
            .map(|j| {
                self.inverse(self.multiplied(&spec, |k| {
                    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    Complex::new(T::zero(), -k2 * k[j])
                }))
            })
            .collect();
        VectorField::from_components(comps)
    }

    /// Jacobian `J_ij = d_i v_j`.
    pub fn jacobian(&self, v: &VectorField<T>) -> TensorField<T> {
        let dim = self.grid.dim();
        let mut out = TensorField::zeros(&self.grid);
        for j in 0..dim {
            let spec = self.forward(v.component(j));
            for i in 0..dim {
                *out.entry_mut(i, j) =
                    self.inverse(self.multiplied(&spec, |k| Complex::new(T::zero(), k[i])));
            }
        }
        out
    }

    /// Divergence over the first index, `(div S)_j = sum_i d_i S_ij`.
    pub fn div_tensor(&self, s: &TensorField<T>) -> VectorField<T> {
        let dim = self.grid.dim();
        let n = self.grid.num_points();
        let comps = (0..dim)
            .map(|j| {
                let mut acc = vec![Complex::new(T::zero(), T::zero()); n];
                for i in 0..dim {
                    let spec = self.forward(s.entry(i, j));
                    let term = self.multiplied(&spec, |k| Complex::new(T::zero(), k[i]));
                    for (a, t) in acc.iter_mut().zip(term) {
                        *a = *a + t;
                    }
                }
                self.inverse(acc)
            })
            .collect();
        VectorField::from_components(comps)
    }

    fn mode_kept(&self, flat: usize) -> bool {
        let idx = self.grid.unravel(flat);
        (0..self.grid.dim()).all(|a| self.keep[idx[a]])
    }

    /// 2/3-rule dealiasing: zero every mode with any `3|m| > N`.
    /// Applying it twice equals applying it once.
    pub fn dealias(&self, f: &ScalarField<T>) -> ScalarField<T> {
        let mut spec = self.forward(f);
        for (flat, c) in spec.iter_mut().enumerate() {
            if !self.mode_kept(flat) {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
        self.inverse(spec)
    }

    pub fn dealias_vec(&self, v: &VectorField<T>) -> VectorField<T> {
        v.map(|c| self.dealias(c))
    }
}
