//! Shared helpers for the integration suites: naive DFT oracles and
//! band-limited random fields, kept independent of the library's spectral
//! path.

// each test target compiles its own copy and uses a different subset
#![allow(dead_code)]

use std::sync::Arc;

use qhd_core::field::{ScalarField, VectorField};
use qhd_core::grid::Grid;

pub type C = (f64, f64); // complex as (re, im)

pub fn c_add(a: C, b: C) -> C {
    (a.0 + b.0, a.1 + b.1)
}

pub fn c_mul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Direct-summation DFT of 1D samples: coefficient of mode `m` normalized
/// so that `f(x) = sum_m c_m exp(i m x 2 pi / L)`.
pub fn naive_dft_1d(samples: &[f64], m: i64) -> C {
    let n = samples.len() as f64;
    let mut acc = (0.0, 0.0);
    for (j, &v) in samples.iter().enumerate() {
        let ang = -2.0 * std::f64::consts::PI * (m as f64) * (j as f64) / n;
        acc = c_add(acc, (v * ang.cos() / n, v * ang.sin() / n));
    }
    acc
}

/// Direct-summation spectral derivative of 1D samples on `[0, L)`:
/// different code path from the library FFT. The Nyquist mode carries no
/// derivative, matching the derivative of the real trigonometric
/// interpolant.
pub fn naive_spectral_derivative_1d(samples: &[f64], length: f64) -> Vec<f64> {
    let n = samples.len();
    let base = 2.0 * std::f64::consts::PI / length;
    let mut out = vec![0.0; n];
    for m in -(n as i64) / 2 + 1..(n as i64) / 2 {
        let c = naive_dft_1d(samples, m);
        let k = base * m as f64;
        let d = c_mul((0.0, k), c); // i k c
        for (j, o) in out.iter_mut().enumerate() {
            let ang = 2.0 * std::f64::consts::PI * (m as f64) * (j as f64) / n as f64;
            *o += d.0 * ang.cos() - d.1 * ang.sin();
        }
    }
    out
}

/// Random band-limited scalar field: a sum of `count` sine modes with
/// `1 <= |m| <= max_mode` per axis, deterministic in `seed`.
pub fn random_band_limited(
    grid: &Arc<Grid<f64>>,
    seed: u64,
    count: usize,
    max_mode: i64,
) -> ScalarField<f64> {
    // tiny multiplicative congruential generator; good enough for test data
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64) / ((1u64 << 53) as f64)
    };
    let dim = grid.dim();
    let base = 2.0 * std::f64::consts::PI / grid.length();
    let mut modes = Vec::new();
    for _ in 0..count {
        let mut m = [0i64; 3];
        for mm in m.iter_mut().take(dim) {
            *mm = (next() * (2.0 * max_mode as f64 + 1.0)).floor() as i64 - max_mode;
        }
        if m.iter().all(|&v| v == 0) {
            m[0] = 1;
        }
        let amp = 0.2 + 0.8 * next();
        let phase = 2.0 * std::f64::consts::PI * next();
        modes.push((m, amp, phase));
    }
    ScalarField::from_fn(grid, move |x| {
        let mut acc = 0.0;
        for &(m, amp, phase) in &modes {
            let mut arg = phase;
            for a in 0..dim {
                arg += base * m[a] as f64 * x[a];
            }
            acc += amp * arg.sin();
        }
        acc
    })
}

pub fn random_band_limited_vector(
    grid: &Arc<Grid<f64>>,
    seed: u64,
    count: usize,
    max_mode: i64,
) -> VectorField<f64> {
    VectorField::from_components(
        (0..grid.dim())
            .map(|j| random_band_limited(grid, seed.wrapping_add(101 * j as u64 + 7), count, max_mode))
            .collect(),
    )
}

pub fn max_abs_diff(a: &ScalarField<f64>, b: &ScalarField<f64>) -> f64 {
    a.zip_map(b, |x, y| x - y).max_abs()
}

pub fn rel_l2_diff(a: &VectorField<f64>, b: &VectorField<f64>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (ca, cb) in a.components().iter().zip(b.components()) {
        let d = ca.zip_map(cb, |x, y| x - y);
        num += d.l2_norm().powi(2);
        den += ca.l2_norm().powi(2);
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}
