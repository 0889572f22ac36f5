//! Norms, energy functionals and runtime regime monitors.
//!
//! All Sobolev-type quantities are computed spectrally via Parseval. A
//! seminorm of order `m` is `(sum over |alpha| = m of ||d^alpha f||^2)^(1/2)`
//! without multinomial weights, matching a term-by-term expansion into
//! partial derivatives.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;

use crate::error::{QhdError, Result};
use crate::field::{ScalarField, VectorField};
use crate::integrate::Trajectory;
use crate::scalar::Scalar;
use crate::spectral::SpectralWorkspace;
use crate::state::{PhysParams, State, VACUUM_FLOOR};

/// All multi-indices of the given total order over `dim` axes.
fn multi_indices(dim: usize, order: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    match dim {
        1 => out.push([order, 0, 0]),
        2 => {
            for a in 0..=order {
                out.push([a, order - a, 0]);
            }
        }
        _ => {
            for a in 0..=order {
                for b in 0..=(order - a) {
                    out.push([a, b, order - a - b]);
                }
            }
        }
    }
    out
}

/// Parseval multiplier of an order-`m` seminorm at wavenumber `k`:
/// `sum over |alpha| = m of prod_a k_a^(2 alpha_a)`.
fn seminorm_multiplier<T: Scalar>(k: &[T; 3], alphas: &[[usize; 3]]) -> T {
    let mut total = T::zero();
    for alpha in alphas {
        let mut p = T::one();
        for a in 0..3 {
            if alpha[a] > 0 {
                p *= k[a].powi(2 * alpha[a] as i32);
            }
        }
        total += p;
    }
    total
}

fn mode_wavevector<T: Scalar>(ws: &SpectralWorkspace<T>, flat: usize) -> [T; 3] {
    let grid = ws.grid();
    let kd = grid.deriv_wavenumbers();
    let idx = grid.unravel(flat);
    let mut k = [T::zero(); 3];
    for a in 0..grid.dim() {
        k[a] = kd[idx[a]];
    }
    k
}

/// Homogeneous Sobolev seminorm of order `<= 5`.
pub fn sobolev_seminorm<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    f: &ScalarField<T>,
    order: usize,
) -> T {
    assert!(order <= 5, "seminorm order limited to 5");
    let spec = ws.forward(f);
    let alphas = multi_indices(ws.grid().dim(), order);
    let mut acc = T::zero();
    for (flat, c) in spec.iter().enumerate() {
        let k = mode_wavevector(ws, flat);
        acc += seminorm_multiplier(&k, &alphas) * c.norm_sqr();
    }
    (acc * ws.grid().volume()).sqrt()
}

/// Seminorm of a vector field: square-sum over components.
pub fn sobolev_seminorm_vec<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    v: &VectorField<T>,
    order: usize,
) -> T {
    let mut acc = T::zero();
    for c in v.components() {
        let s = sobolev_seminorm(ws, c, order);
        acc += s * s;
    }
    acc.sqrt()
}

/// Full `H^k` norm of the triple `(rho, u, theta)`:
/// square-sum of all seminorms of order `0..=k` over all fields.
pub(crate) fn triple_fields_hk<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    rho: &ScalarField<T>,
    u: &VectorField<T>,
    theta: &ScalarField<T>,
    k: usize,
) -> T {
    let specs: Vec<Vec<Complex<T>>> = std::iter::once(ws.forward(rho))
        .chain(u.components().iter().map(|c| ws.forward(c)))
        .chain(std::iter::once(ws.forward(theta)))
        .collect();
    let alphas: Vec<Vec<[usize; 3]>> = (0..=k)
        .map(|j| multi_indices(ws.grid().dim(), j))
        .collect();
    let mut acc = T::zero();
    for flat in 0..specs[0].len() {
        let kvec = mode_wavevector(ws, flat);
        let mag: T = specs.iter().map(|s| s[flat].norm_sqr()).sum();
        for a in &alphas {
            acc += seminorm_multiplier(&kvec, a) * mag;
        }
    }
    (acc * ws.grid().volume()).sqrt()
}

/// The composite norms of order 0..=k and the dissipation rates, computed
/// in one spectral pass. Returned by [`spectral_summary`].
pub(crate) struct SpectralSummary<T> {
    /// Combined seminorms of `(rho, u, theta)` for orders 1..=3.
    pub seminorms: [T; 3],
    /// Composite norms of orders 0..=3 (squared recursion evaluated
    /// spectrally).
    pub triple: [T; 4],
    /// `sum_{m=1..4} || d^m (rho, u, theta, hbar grad u, hbar grad rho) ||^2`.
    pub dissipation_rate: T,
    /// `|| grad (rho, u, theta) ||^2`, the first-order part alone.
    pub grad_rate: T,
    /// `|| hbar lap (rho, u) ||^2`.
    pub hbar_lap_rate: T,
}

pub(crate) fn spectral_summary<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    state: &State<T>,
    hbar: T,
) -> SpectralSummary<T> {
    let spec_rho = ws.forward(&state.rho);
    let spec_u: Vec<_> = state.u.components().iter().map(|c| ws.forward(c)).collect();
    let spec_theta = ws.forward(&state.theta);

    let dim = ws.grid().dim();
    let alphas: Vec<Vec<[usize; 3]>> = (0..=4).map(|j| multi_indices(dim, j)).collect();
    let h2 = hbar * hbar;
    let h4 = h2 * h2;

    let mut semi_sq = [T::zero(); 3];
    let mut triple_sq = [T::zero(); 4];
    let mut diss = T::zero();
    let mut grad_rate = T::zero();
    let mut hbar_lap_rate = T::zero();

    for flat in 0..spec_rho.len() {
        let kvec = mode_wavevector(ws, flat);
        let k2 = kvec[0] * kvec[0] + kvec[1] * kvec[1] + kvec[2] * kvec[2];
        let s_rho = spec_rho[flat].norm_sqr();
        let s_u: T = spec_u.iter().map(|s| s[flat].norm_sqr()).sum();
        let s_theta = spec_theta[flat].norm_sqr();
        let s_all = s_rho + s_u + s_theta;

        // composite norm of (d^alpha rho, d^alpha u, d^alpha theta) at
        // order 0: L2 of the triple, plus grad rho, plus hbar-weighted
        // grad(rho, u), plus hbar^2 lap rho
        let base = s_all + k2 * s_rho + h2 * k2 * (s_rho + s_u) + h4 * k2 * k2 * s_rho;

        let mut mults = [T::zero(); 5];
        for (j, a) in alphas.iter().enumerate() {
            mults[j] = seminorm_multiplier(&kvec, a);
        }
        for j in 0..=3 {
            triple_sq[j] += mults[j] * base;
            if j >= 1 {
                semi_sq[j - 1] += mults[j] * s_all;
            }
        }
        let diss_base = s_all + h2 * k2 * (s_u + s_rho);
        for &mult in mults.iter().skip(1) {
            diss += mult * diss_base;
        }
        grad_rate += k2 * s_all;
        hbar_lap_rate += h2 * k2 * k2 * (s_rho + s_u);
    }

    let vol = ws.grid().volume();
    let mut seminorms = [T::zero(); 3];
    for j in 0..3 {
        seminorms[j] = (semi_sq[j] * vol).sqrt();
    }
    let mut triple = [T::zero(); 4];
    let mut run = T::zero();
    for j in 0..=3 {
        run += triple_sq[j];
        triple[j] = (run * vol).sqrt();
    }
    SpectralSummary {
        seminorms,
        triple,
        dissipation_rate: diss * vol,
        grad_rate: grad_rate * vol,
        hbar_lap_rate: hbar_lap_rate * vol,
    }
}

/// Composite norm of order `k <= 3`.
///
/// The order-0 norm squares to `||(rho,u,theta)||^2 + ||grad rho||^2 +
/// ||hbar grad(rho,u)||^2 + ||hbar^2 lap rho||^2`, and each higher order
/// adds the same functional of all derivatives of that order.
pub fn triple_norm<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    state: &State<T>,
    params: &PhysParams<T>,
    k: usize,
) -> T {
    triple_norm_with_hbar(ws, state, params.hbar, k)
}

pub(crate) fn triple_norm_with_hbar<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    state: &State<T>,
    hbar: T,
    k: usize,
) -> T {
    assert!(k <= 3, "composite norm defined for k <= 3");
    spectral_summary(ws, state, hbar).triple[k]
}

/// Entropy variable `s = (1+theta)/(1+rho)^(2/3) - 1`.
pub fn entropy_s<T: Scalar>(state: &State<T>) -> Result<ScalarField<T>> {
    let min = state.min_density();
    if !(min > T::lit(VACUUM_FLOOR)) {
        return Err(QhdError::VacuumApproach {
            min_density: min.as_f64(),
            floor: VACUUM_FLOOR,
        });
    }
    let two_thirds = T::lit(2.0 / 3.0);
    Ok(state
        .theta
        .zip_map(&state.rho, move |t, r| {
            (T::one() + t) / (T::one() + r).powf(two_thirds) - T::one()
        }))
}

/// Reconstruct `theta` from `(rho, s)`; inverse of [`entropy_s`].
pub fn theta_from_entropy<T: Scalar>(
    rho: &ScalarField<T>,
    s: &ScalarField<T>,
) -> ScalarField<T> {
    let two_thirds = T::lit(2.0 / 3.0);
    s.zip_map(rho, move |sv, r| {
        (T::one() + sv) * (T::one() + r).powf(two_thirds) - T::one()
    })
}

/// Pointwise energy density
/// `E0 = (3(1+s)/2)((1+rho)^(5/3) - 1 - 5 rho/3) + ((1+rho)/2)|u|^2
///  + s rho + (3(1+rho)/4) s^2` with `R = 1` and `s` the entropy variable.
pub fn e0_point<T: Scalar>(rho: T, u_sq: T, theta: T) -> T {
    let one = T::one();
    let five_thirds = T::lit(5.0 / 3.0);
    let two_thirds = T::lit(2.0 / 3.0);
    let n = one + rho;
    let s = (one + theta) / n.powf(two_thirds) - one;
    T::lit(1.5) * (one + s) * (n.powf(five_thirds) - one - five_thirds * rho)
        + T::lit(0.5) * n * u_sq
        + s * rho
        + T::lit(0.75) * n * s * s
}

/// Energy density field and its grid integral.
pub fn energy_e0<T: Scalar>(state: &State<T>) -> Result<(T, ScalarField<T>)> {
    let min = state.min_density();
    if !(min > T::lit(VACUUM_FLOOR)) {
        return Err(QhdError::VacuumApproach {
            min_density: min.as_f64(),
            floor: VACUUM_FLOOR,
        });
    }
    let u_sq = state.u.norm_sq();
    let mut density = ScalarField::zeros(state.grid());
    for (((d, &r), &k2), &t) in density
        .data_mut()
        .iter_mut()
        .zip(state.rho.data())
        .zip(u_sq.data())
        .zip(state.theta.data())
    {
        *d = e0_point(r, k2, t);
    }
    let integral = density.integral();
    Ok((integral, density))
}

/// Sampled two-sided positivity check of the energy density: returns
/// `(inf, sup)` of `E0 / (rho^2 + |u|^2 + theta^2)` over random pointwise
/// states with `|rho|, |theta| <= rho_bound` and `|u_i| <= u_bound`.
pub fn e0_ratio_bounds<T: Scalar>(
    n_samples: usize,
    rho_bound: T,
    u_bound: T,
    seed: u64,
) -> Result<(T, T)> {
    if rho_bound > T::lit(0.5) {
        return Err(QhdError::InvalidParams(
            "positivity check requires rho_bound <= 1/2".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rb = rho_bound.as_f64();
    let ub = u_bound.as_f64();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let mut seen = false;
    for _ in 0..n_samples {
        let rho = T::lit(sample_sym(&mut rng, rb));
        let theta = T::lit(sample_sym(&mut rng, rb));
        let mut u_sq = T::zero();
        for _ in 0..3 {
            let ui = T::lit(sample_sym(&mut rng, ub));
            u_sq += ui * ui;
        }
        let denom = rho * rho + u_sq + theta * theta;
        if denom == T::zero() {
            continue;
        }
        seen = true;
        let ratio = e0_point(rho, u_sq, theta) / denom;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    if !seen {
        return Err(QhdError::DegenerateSample);
    }
    Ok((lo, hi))
}

fn sample_sym(rng: &mut ChaCha8Rng, bound: f64) -> f64 {
    if bound == 0.0 {
        0.0
    } else {
        rng.random_range(-bound..=bound)
    }
}

/// One row of the energy report.
#[derive(Debug, Clone)]
pub struct EnergyRecord<T> {
    pub time: T,
    /// Total mass `integral of (1 + rho)`.
    pub mass: T,
    pub l2_rho: T,
    pub l2_u: T,
    pub l2_theta: T,
    /// Combined seminorms of `(rho, u, theta)`, orders 1..3.
    pub h: [T; 3],
    /// Composite norms of orders 0..3.
    pub triple: [T; 4],
    /// Integral of the energy density.
    pub e0: T,
    /// Instantaneous dissipation integrand.
    pub diss_rate: T,
    /// Trapezoid cumulative of `diss_rate` from the first snapshot.
    pub diss_cum: T,
    /// Cumulative `integral of ||grad (rho, u, theta)||^2`.
    pub diss_grad_cum: T,
    /// Cumulative `integral of ||hbar lap (rho, u)||^2`.
    pub diss_hbar_cum: T,
    pub max_abs_rho: T,
    pub max_abs_theta: T,
    /// True while `max|rho| <= 1/2` and `max|theta| <= 1/2`.
    pub regime_ok: bool,
}

/// Time series of diagnostics over a trajectory.
#[derive(Debug, Clone)]
pub struct EnergyReport<T> {
    pub records: Vec<EnergyRecord<T>>,
    /// Weight of the dissipation integral in the boundedness check.
    pub nu: T,
    /// Constant of the boundedness check.
    pub c_bound: T,
    /// Whether `triple3(t)^2 + nu * D(t) <= c_bound * triple3(0)^2` held at
    /// every snapshot.
    pub bound_holds: bool,
}

pub const ENERGY_CSV_HEADER: &str =
    "time,mass,l2_rho,l2_u,l2_theta,h1,h2,h3,triple0,triple1,triple2,triple3,e0,diss_cum,flag_regime";

impl<T: Scalar> EnergyReport<T> {
    /// Serialize as CSV in the documented fixed column order.
    /// `flag_regime` is 1 while the solution stays inside the validated
    /// regime.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{ENERGY_CSV_HEADER}")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.time.as_f64(),
                r.mass.as_f64(),
                r.l2_rho.as_f64(),
                r.l2_u.as_f64(),
                r.l2_theta.as_f64(),
                r.h[0].as_f64(),
                r.h[1].as_f64(),
                r.h[2].as_f64(),
                r.triple[0].as_f64(),
                r.triple[1].as_f64(),
                r.triple[2].as_f64(),
                r.triple[3].as_f64(),
                r.e0.as_f64(),
                r.diss_cum.as_f64(),
                u8::from(r.regime_ok),
            )?;
        }
        Ok(())
    }
}

pub(crate) fn record_for_state<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    state: &State<T>,
    params: &PhysParams<T>,
) -> Result<(EnergyRecord<T>, SpectralSummary<T>)> {
    let summary = spectral_summary(ws, state, params.hbar);
    let (e0, _) = energy_e0(state)?;
    let record = EnergyRecord {
        time: state.time,
        mass: state.total_mass(),
        l2_rho: state.rho.l2_norm(),
        l2_u: {
            let mut acc = T::zero();
            for c in state.u.components() {
                let n = c.l2_norm();
                acc += n * n;
            }
            acc.sqrt()
        },
        l2_theta: state.theta.l2_norm(),
        h: summary.seminorms,
        triple: summary.triple,
        e0,
        diss_rate: summary.dissipation_rate,
        diss_cum: T::zero(),
        diss_grad_cum: T::zero(),
        diss_hbar_cum: T::zero(),
        max_abs_rho: state.rho.max_abs(),
        max_abs_theta: state.theta.max_abs(),
        regime_ok: state.in_regime(),
    };
    Ok((record, summary))
}

/// Per-snapshot diagnostics plus the cumulative dissipation integral
/// (trapezoid rule at snapshot cadence), with the configured boundedness
/// check `triple3(t)^2 + nu * D(t) <= c_bound * triple3(0)^2`.
pub fn energy_budget<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    trajectory: &Trajectory<T>,
    params: &PhysParams<T>,
    nu: T,
    c_bound: T,
) -> Result<EnergyReport<T>> {
    let snaps = &trajectory.snapshots;
    if snaps.len() < 2 {
        return Err(QhdError::TooFewSnapshots {
            needed: 2,
            got: snaps.len(),
        });
    }
    let mut records: Vec<EnergyRecord<T>> = Vec::with_capacity(snaps.len());
    let mut prev_summary: Option<SpectralSummary<T>> = None;
    for state in snaps {
        let (mut rec, summary) = record_for_state(ws, state, params)?;
        if let (Some(prev), Some(ps)) = (records.last(), prev_summary.as_ref()) {
            let half_dt = T::lit(0.5) * (rec.time - prev.time);
            rec.diss_cum =
                prev.diss_cum + half_dt * (ps.dissipation_rate + summary.dissipation_rate);
            rec.diss_grad_cum =
                prev.diss_grad_cum + half_dt * (ps.grad_rate + summary.grad_rate);
            rec.diss_hbar_cum =
                prev.diss_hbar_cum + half_dt * (ps.hbar_lap_rate + summary.hbar_lap_rate);
        }
        prev_summary = Some(summary);
        records.push(rec);
    }
    let t0 = records[0].triple[3];
    let budget = c_bound * t0 * t0;
    let bound_holds = records
        .iter()
        .all(|r| r.triple[3] * r.triple[3] + nu * r.diss_cum <= budget);
    Ok(EnergyReport {
        records,
        nu,
        c_bound,
        bound_holds,
    })
}
