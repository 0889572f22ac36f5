//! Vanishing-Planck-constant experiment: run a family of simulations with
//! identical data and grids, differing only in `hbar`, and fit the decay of
//! their distance to the classical baseline.

use rayon::prelude::*;

use crate::config::SimConfig;
use crate::diagnostics::triple_fields_hk;
use crate::error::{QhdError, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::make_grid;
use crate::integrate::{simulate_on, stable_dt, StepMode, TerminalStatus, Trajectory};
use crate::scalar::Scalar;
use crate::spectral::SpectralWorkspace;
use crate::state::{initial_state, State};

/// Difference of two aligned states: `(rho_a - rho_b, u_a - u_b,
/// theta_a - theta_b)` on a shared grid.
#[derive(Debug, Clone)]
pub struct DiffFields<T> {
    pub rho: ScalarField<T>,
    pub u: VectorField<T>,
    pub theta: ScalarField<T>,
    pub time: T,
}

impl<T: Scalar> DiffFields<T> {
    pub fn between(a: &State<T>, b: &State<T>) -> Result<Self> {
        if a.grid().as_ref() != b.grid().as_ref() {
            return Err(QhdError::MisalignedTrajectories(
                "states live on different grids".into(),
            ));
        }
        let mut rho = a.rho.clone();
        rho.add_scaled(&b.rho, -T::one());
        let mut u = a.u.clone();
        u.add_scaled(&b.u, -T::one());
        let mut theta = a.theta.clone();
        theta.add_scaled(&b.theta, -T::one());
        Ok(Self {
            rho,
            u,
            theta,
            time: a.time,
        })
    }
}

/// One member of an `hbar` family.
pub struct FamilyMember<T> {
    pub hbar: T,
    pub trajectory: Trajectory<T>,
}

/// Shared fixed time step of a family, chosen as the minimum stable step
/// over all members and snapped to divide the output cadence, so every
/// member lands on the same snapshot times.
pub fn family_dt<T: Scalar>(config: &SimConfig<T>, hbar_list: &[T]) -> Result<T> {
    let grid = make_grid(config.grid_dim, config.grid_length, config.grid_points)?;
    let ws = SpectralWorkspace::new(&grid);
    let state0 = initial_state(&ws, &config.init)?;
    let mut dt = config.dt_max;
    for &hbar in hbar_list {
        let params = config.params.with_hbar(hbar);
        dt = dt.min(stable_dt(&state0, &params, &grid, config.cfl_safety));
    }
    let every = config.output_every;
    let m = (every / dt).ceil();
    Ok(every / m)
}

/// Run the family. A zero member (the classical baseline) is added when the
/// list does not contain one. Members integrate concurrently; the baseline
/// must complete for the family to be usable.
pub fn run_family<T: Scalar>(
    config: &SimConfig<T>,
    hbar_list: &[T],
) -> Result<Vec<FamilyMember<T>>> {
    let mut hbars: Vec<T> = hbar_list.to_vec();
    for &h in hbars.iter() {
        if !(h >= T::zero()) || !h.is_finite() {
            return Err(QhdError::InvalidParams(format!(
                "hbar values must be finite and nonnegative, got {}",
                h.as_f64()
            )));
        }
    }
    if !hbars.iter().any(|&h| h == T::zero()) {
        hbars.push(T::zero());
    }
    hbars.sort_by(|a, b| a.partial_cmp(b).unwrap());
    hbars.dedup();

    let dt = family_dt(config, &hbars)?;
    let grid = make_grid(config.grid_dim, config.grid_length, config.grid_points)?;
    let ws = SpectralWorkspace::new(&grid);

    let members: Result<Vec<FamilyMember<T>>> = hbars
        .par_iter()
        .map(|&hbar| {
            let mut member_cfg = config.clone();
            member_cfg.params = config.params.with_hbar(hbar);
            let out = simulate_on(&ws, &member_cfg, StepMode::Fixed(dt))?;
            Ok(FamilyMember {
                hbar,
                trajectory: out.trajectory,
            })
        })
        .collect();
    let members = members?;

    let baseline = members
        .iter()
        .find(|m| m.hbar == T::zero())
        .expect("baseline inserted above");
    if baseline.trajectory.status.is_abort() {
        return Err(QhdError::SimulationAborted(format!(
            "classical baseline ended with status {}",
            baseline.trajectory.status.as_str()
        )));
    }
    Ok(members)
}

/// Per-snapshot `H^1`/`H^2` distances between two aligned trajectories and
/// their suprema over the shared snapshot set.
#[derive(Debug, Clone)]
pub struct DiffNorms<T> {
    pub times: Vec<T>,
    pub h1: Vec<T>,
    pub h2: Vec<T>,
    pub sup_h1: T,
    pub sup_h2: T,
}

pub fn diff_norms<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    a: &Trajectory<T>,
    b: &Trajectory<T>,
) -> Result<DiffNorms<T>> {
    if a.snapshots.len() != b.snapshots.len() {
        return Err(QhdError::MisalignedTrajectories(format!(
            "snapshot counts differ: {} vs {}",
            a.snapshots.len(),
            b.snapshots.len()
        )));
    }
    let tol = T::lit(1e-9);
    let mut out = DiffNorms {
        times: Vec::with_capacity(a.snapshots.len()),
        h1: Vec::with_capacity(a.snapshots.len()),
        h2: Vec::with_capacity(a.snapshots.len()),
        sup_h1: T::zero(),
        sup_h2: T::zero(),
    };
    for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
        if (sa.time - sb.time).abs() > tol * (T::one() + sa.time.abs()) {
            return Err(QhdError::MisalignedTrajectories(format!(
                "snapshot times differ: {} vs {}",
                sa.time.as_f64(),
                sb.time.as_f64()
            )));
        }
        let d = DiffFields::between(sa, sb)?;
        let h1 = triple_fields_hk(ws, &d.rho, &d.u, &d.theta, 1);
        let h2 = triple_fields_hk(ws, &d.rho, &d.u, &d.theta, 2);
        out.sup_h1 = out.sup_h1.max(h1);
        out.sup_h2 = out.sup_h2.max(h2);
        out.times.push(sa.time);
        out.h1.push(h1);
        out.h2.push(h2);
    }
    Ok(out)
}

/// Least-squares line through `(log hbar, log error)`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual of `log error` about the line.
    pub residual: T,
    pub points_used: usize,
}

/// Fit `log(error)` against `log(hbar)`, excluding points at or below ten
/// times the noise floor. Requires at least 4 input pairs and at least 2
/// surviving points.
pub fn fit_loglog<T: Scalar>(pairs: &[(T, T)], noise_floor: T) -> Result<LineFit<T>> {
    if pairs.len() < 4 {
        return Err(QhdError::InsufficientPoints(pairs.len()));
    }
    let threshold = T::lit(10.0) * noise_floor;
    let kept: Vec<(T, T)> = pairs
        .iter()
        .copied()
        .filter(|&(h, e)| h > T::zero() && e > threshold && e > T::zero())
        .collect();
    if kept.len() < 2 {
        return Err(QhdError::AllBelowNoiseFloor);
    }
    let n = T::from_usize(kept.len()).unwrap();
    let mut sx = T::zero();
    let mut sy = T::zero();
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for &(h, e) in &kept {
        let x = h.ln();
        let y = e.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mut rss = T::zero();
    for &(h, e) in &kept {
        let r = e.ln() - (slope * h.ln() + intercept);
        rss += r * r;
    }
    Ok(LineFit {
        slope,
        intercept,
        residual: (rss / n).sqrt(),
        points_used: kept.len(),
    })
}

/// Fitted convergence rates of a family.
#[derive(Debug, Clone)]
pub struct RateFit<T> {
    pub hbar_values: Vec<T>,
    /// Sup-over-time `H^1` error per member.
    pub errors_h1: Vec<T>,
    /// Sup-over-time `H^2` error per member.
    pub errors_h2: Vec<T>,
    pub h1: LineFit<T>,
    pub h2: LineFit<T>,
    pub noise_floor_h1: T,
    pub noise_floor_h2: T,
    /// `log10(max hbar / min hbar)` over the positive members.
    pub decade_span: T,
}

pub fn fit_rate<T: Scalar>(
    hbar_values: Vec<T>,
    errors_h1: Vec<T>,
    errors_h2: Vec<T>,
    noise_floor_h1: T,
    noise_floor_h2: T,
) -> Result<RateFit<T>> {
    let pairs1: Vec<(T, T)> = hbar_values.iter().copied().zip(errors_h1.iter().copied()).collect();
    let pairs2: Vec<(T, T)> = hbar_values.iter().copied().zip(errors_h2.iter().copied()).collect();
    let h1 = fit_loglog(&pairs1, noise_floor_h1)?;
    let h2 = fit_loglog(&pairs2, noise_floor_h2)?;
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for &h in &hbar_values {
        if h > T::zero() {
            lo = lo.min(h);
            hi = hi.max(h);
        }
    }
    let decade_span = (hi / lo).log10();
    Ok(RateFit {
        hbar_values,
        errors_h1,
        errors_h2,
        h1,
        h2,
        noise_floor_h1,
        noise_floor_h2,
        decade_span,
    })
}

/// Integrator noise floor: distance between two classical runs at `dt` and
/// `dt/2`, which bounds how small a semiclassical gap can be resolved.
pub fn noise_floor<T: Scalar>(config: &SimConfig<T>, dt: T) -> Result<(T, T)> {
    let grid = make_grid(config.grid_dim, config.grid_length, config.grid_points)?;
    let ws = SpectralWorkspace::new(&grid);
    let mut classical = config.clone();
    classical.params = config.params.with_hbar(T::zero());
    let full = simulate_on(&ws, &classical, StepMode::Fixed(dt))?;
    let halved = simulate_on(&ws, &classical, StepMode::Fixed(dt / T::lit(2.0)))?;
    let d = diff_norms(&ws, &full.trajectory, &halved.trajectory)?;
    Ok((d.sup_h1, d.sup_h2))
}

/// One row of the results table.
#[derive(Debug, Clone)]
pub struct StudyRow<T> {
    pub hbar: T,
    pub sup_h1: T,
    pub sup_h2: T,
    pub status: TerminalStatus,
}

/// Full experiment outcome.
pub struct LimitStudy<T> {
    pub rows: Vec<StudyRow<T>>,
    pub fit: RateFit<T>,
    pub shared_dt: T,
}

/// Run the family, measure distances to the baseline, estimate the noise
/// floor, and fit both rates.
pub fn limit_study<T: Scalar>(config: &SimConfig<T>, hbar_list: &[T]) -> Result<LimitStudy<T>> {
    let members = run_family(config, hbar_list)?;
    let dt = family_dt(
        config,
        &members.iter().map(|m| m.hbar).collect::<Vec<_>>(),
    )?;
    let grid = make_grid(config.grid_dim, config.grid_length, config.grid_points)?;
    let ws = SpectralWorkspace::new(&grid);
    let baseline = members
        .iter()
        .find(|m| m.hbar == T::zero())
        .expect("run_family guarantees a baseline");

    let mut rows = Vec::new();
    let mut hbars = Vec::new();
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    for m in &members {
        if m.hbar == T::zero() {
            continue;
        }
        let d = diff_norms(&ws, &m.trajectory, &baseline.trajectory)?;
        rows.push(StudyRow {
            hbar: m.hbar,
            sup_h1: d.sup_h1,
            sup_h2: d.sup_h2,
            status: m.trajectory.status,
        });
        hbars.push(m.hbar);
        e1.push(d.sup_h1);
        e2.push(d.sup_h2);
    }
    let (nf1, nf2) = noise_floor(config, dt)?;
    let fit = fit_rate(hbars, e1, e2, nf1, nf2)?;
    Ok(LimitStudy {
        rows,
        fit,
        shared_dt: dt,
    })
}

pub const STUDY_CSV_HEADER: &str = "hbar,sup_h1_err,sup_h2_err,status";

pub fn study_csv<T: Scalar>(rows: &[StudyRow<T>]) -> String {
    let mut out = String::from(STUDY_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.hbar.as_f64(),
            r.sup_h1.as_f64(),
            r.sup_h2.as_f64(),
            r.status.as_str()
        ));
    }
    out
}

pub fn fit_report<T: Scalar>(fit: &RateFit<T>, shared_dt: T) -> String {
    format!(
        "slope_h1 = {}\nintercept_h1 = {}\nresidual_h1 = {}\npoints_used_h1 = {}\n\
         slope_h2 = {}\nintercept_h2 = {}\nresidual_h2 = {}\npoints_used_h2 = {}\n\
         noise_floor_h1 = {}\nnoise_floor_h2 = {}\ndecade_span = {}\nshared_dt = {}\n",
        fit.h1.slope.as_f64(),
        fit.h1.intercept.as_f64(),
        fit.h1.residual.as_f64(),
        fit.h1.points_used,
        fit.h2.slope.as_f64(),
        fit.h2.intercept.as_f64(),
        fit.h2.residual.as_f64(),
        fit.h2.points_used,
        fit.noise_floor_h1.as_f64(),
        fit.noise_floor_h2.as_f64(),
        fit.decade_span.as_f64(),
        shared_dt.as_f64(),
    )
}
