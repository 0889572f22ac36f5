//! Explicit fourth-order Runge-Kutta time stepping.
//!
//! Desk-scale grids keep the explicit stability constraints affordable, and
//! the scheme's stability region covers the stretch of the imaginary axis
//! needed by the dispersive quantum term, so no implicit solves with the
//! variable coefficient `1/(1+rho)` are required.

use std::sync::Arc;

use crate::config::SimConfig;
use crate::diagnostics::{energy_budget, EnergyReport};
use crate::dynamics::{rhs_classical, rhs_quantum, Rhs};
use crate::error::{QhdError, Result};
use crate::grid::{make_grid, Grid};
use crate::scalar::Scalar;
use crate::spectral::SpectralWorkspace;
use crate::state::{initial_state, PhysParams, State};

/// Advective CFL constant: the scheme is stable for
/// `dt (|u| + c_s) k_max <~ 2.8`; with `k_max = pi/h` this allows
/// `dt <~ 0.9 h/(|u|+c_s)`, and 0.5 leaves margin for nonlinearity.
pub const CFL_ADVECTIVE: f64 = 0.5;
/// Viscous constant: stability needs `dt nu k_max^2 <~ 2.8`, i.e.
/// `dt <~ 0.28 h^2/nu` without dealiasing.
pub const CFL_VISCOUS: f64 = 0.25;
/// Dispersive constant for the third-order quantum term; the `h^3/hbar`
/// bound is conservative against the linearized dispersion relation.
pub const CFL_DISPERSIVE: f64 = 1.0;

/// Step-size control state.
#[derive(Debug, Clone, Copy)]
pub struct StepControl<T> {
    /// Safety factor in `(0, 1]` multiplying the stability estimate.
    pub safety: T,
    /// Hard upper bound on the step.
    pub dt_max: T,
    /// Step selected for the next update; always positive and at most
    /// `dt_max`.
    pub dt_current: T,
}

impl<T: Scalar> StepControl<T> {
    pub fn new(safety: T, dt_max: T) -> Result<Self> {
        if !(safety > T::zero() && safety <= T::one()) {
            return Err(QhdError::InvalidConfig(
                "step safety factor must lie in (0, 1]".into(),
            ));
        }
        if !(dt_max > T::zero()) {
            return Err(QhdError::InvalidConfig("dt_max must be positive".into()));
        }
        Ok(Self {
            safety,
            dt_max,
            dt_current: dt_max,
        })
    }

    /// Choose the next step from a stability estimate and an upper limit
    /// (e.g. the distance to the next output time).
    pub fn select(&mut self, stable: T, limit: T) -> T {
        let dt = stable.min(self.dt_max).min(limit);
        debug_assert!(dt > T::zero());
        self.dt_current = dt;
        dt
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    /// Reached `t_max` inside the validated regime.
    Completed,
    /// Reached `t_max` but `max(|rho|, |theta|)` exceeded 1/2 at some point.
    RegimeExit,
    /// `1 + rho` hit the vacuum floor.
    VacuumAbort,
    /// A non-finite value appeared.
    NonfiniteAbort,
}

impl TerminalStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminalStatus::Completed => "completed",
            TerminalStatus::RegimeExit => "regime_exit",
            TerminalStatus::VacuumAbort => "vacuum_abort",
            TerminalStatus::NonfiniteAbort => "nonfinite_abort",
        }
    }

    pub fn is_abort(&self) -> bool {
        matches!(
            self,
            TerminalStatus::VacuumAbort | TerminalStatus::NonfiniteAbort
        )
    }
}

/// Snapshots at the configured cadence plus run metadata.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    /// States at strictly increasing times, the first at `t = 0`.
    pub snapshots: Vec<State<T>>,
    pub status: TerminalStatus,
    /// First time the regime bound was violated, if ever.
    pub regime_exit_time: Option<T>,
    pub steps: usize,
    /// Largest relative drift of the total mass seen at any step.
    pub max_rel_mass_drift: T,
    /// Largest L2 norm of `(rho, u, theta)` seen at any step; cheap
    /// blow-up monitor sampled more often than the snapshot cadence.
    pub max_l2: T,
}

impl<T: Scalar> Trajectory<T> {
    pub fn final_state(&self) -> &State<T> {
        self.snapshots.last().expect("trajectory holds t = 0")
    }
}

/// Largest step satisfying the advective, viscous and (for `hbar > 0`)
/// dispersive stability bounds for the current state, times `safety`.
pub fn stable_dt<T: Scalar>(
    state: &State<T>,
    params: &PhysParams<T>,
    grid: &Grid<T>,
    safety: T,
) -> T {
    let h = grid.spacing();
    let max_u = state.u.max_abs();
    let min_n = state.min_density().max(T::lit(1e-6));
    let dt_adv = T::lit(CFL_ADVECTIVE) * h / (max_u + PhysParams::<T>::sound_speed());
    let nu_eff = params
        .mu
        .max(params.mu + params.lambda)
        .max(T::lit(2.0 / 3.0) * params.kappa)
        / min_n;
    let dt_visc = T::lit(CFL_VISCOUS) * h * h / nu_eff;
    let mut dt = dt_adv.min(dt_visc);
    if params.is_quantum() {
        dt = dt.min(T::lit(CFL_DISPERSIVE) * h * h * h / params.hbar);
    }
    safety * dt
}

/// One classic four-stage step. `rhs_fn` is evaluated at the stage states;
/// any dealiasing policy lives inside it.
pub fn rk4_step<T, F>(
    ws: &SpectralWorkspace<T>,
    state: &State<T>,
    dt: T,
    params: &PhysParams<T>,
    rhs_fn: &F,
) -> Result<State<T>>
where
    T: Scalar,
    F: Fn(&SpectralWorkspace<T>, &State<T>, &PhysParams<T>) -> Result<Rhs<T>>,
{
    let half = T::lit(0.5);
    let k1 = rhs_fn(ws, state, params)?;
    let mut stage = state.add_scaled_rhs(&k1, half * dt);
    stage.time = state.time + half * dt;
    let k2 = rhs_fn(ws, &stage, params)?;
    let mut stage = state.add_scaled_rhs(&k2, half * dt);
    stage.time = state.time + half * dt;
    let k3 = rhs_fn(ws, &stage, params)?;
    let mut stage = state.add_scaled_rhs(&k3, dt);
    stage.time = state.time + dt;
    let k4 = rhs_fn(ws, &stage, params)?;

    let two = T::lit(2.0);
    let slope = Rhs::combine(&[(T::one(), &k1), (two, &k2), (two, &k3), (T::one(), &k4)]);
    let mut next = state.add_scaled_rhs(&slope, dt / T::lit(6.0));
    next.time = state.time + dt;
    if !next.is_finite() {
        return Err(QhdError::NonFinite("state after time step"));
    }
    Ok(next)
}

/// Step-size policy of a run.
#[derive(Debug, Clone, Copy)]
pub enum StepMode<T> {
    /// Recompute the stable step from the current state every step.
    Adaptive,
    /// Use the given step verbatim (the caller aligns it with the output
    /// cadence); used by the family harness so runs share a time grid.
    Fixed(T),
}

/// Simulation result: the trajectory plus per-snapshot diagnostics.
/// The report is absent only when the run aborted before the second
/// snapshot.
pub struct SimOutput<T> {
    pub trajectory: Trajectory<T>,
    pub report: Option<EnergyReport<T>>,
}

/// Default constants of the energy boundedness flag in the report.
pub const BOUND_NU: f64 = 1.0;
pub const BOUND_C: f64 = 8.0;

/// Integrate the configured system to `t_max`.
///
/// Uses the quantum right-hand side when `hbar > 0` and the classical one
/// otherwise. The run aborts only on vacuum approach or non-finite values;
/// leaving the smallness regime is recorded but does not stop the run.
pub fn simulate<T: Scalar>(config: &SimConfig<T>) -> Result<SimOutput<T>> {
    let grid = make_grid(config.grid_dim, config.grid_length, config.grid_points)?;
    let ws = SpectralWorkspace::new(&grid);
    simulate_on(&ws, config, StepMode::Adaptive)
}

/// As [`simulate`] but with an explicit step mode and a caller-provided
/// workspace (so families can share grids).
pub fn simulate_on<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    config: &SimConfig<T>,
    mode: StepMode<T>,
) -> Result<SimOutput<T>> {
    config.validate()?;
    let grid = Arc::clone(ws.grid());
    if grid.dim() != config.grid_dim
        || grid.points_per_axis() != config.grid_points
        || grid.length() != config.grid_length
    {
        return Err(QhdError::InvalidConfig(
            "workspace grid does not match configuration".into(),
        ));
    }
    let params = config.params;
    let state0 = initial_state(ws, &config.init)?;

    let quantum = params.is_quantum();
    let dealias = config.dealias;
    let rhs_fn = move |ws: &SpectralWorkspace<T>, s: &State<T>, p: &PhysParams<T>| {
        if quantum {
            rhs_quantum(ws, s, p, dealias)
        } else {
            rhs_classical(ws, s, p, dealias)
        }
    };

    let mut state = state0;
    state.time = T::zero();
    let mass0 = state.total_mass();
    let triple_l2 = |s: &State<T>| {
        let mut acc = s.rho.l2_norm().powi(2) + s.theta.l2_norm().powi(2);
        for c in s.u.components() {
            acc += c.l2_norm().powi(2);
        }
        acc.sqrt()
    };
    let mut trajectory = Trajectory {
        snapshots: vec![state.clone()],
        status: TerminalStatus::Completed,
        regime_exit_time: None,
        steps: 0,
        max_rel_mass_drift: T::zero(),
        max_l2: triple_l2(&state),
    };
    if config.regime_checks && !state.in_regime() {
        trajectory.regime_exit_time = Some(state.time);
    }

    let t_max = config.t_max;
    let every = config.output_every;
    let mut next_snap_index: usize = 1;
    let tiny = T::lit(1e-12);
    let mut control = StepControl::new(config.cfl_safety, config.dt_max)?;

    'time_loop: while state.time < t_max - tiny * t_max.max(T::one()) {
        let target = (every * T::from_usize(next_snap_index).unwrap()).min(t_max);
        while state.time < target - tiny * target.max(T::one()) {
            let dt_limit = target - state.time;
            let dt = match mode {
                StepMode::Adaptive => control.select(
                    stable_dt(&state, &params, &grid, control.safety),
                    dt_limit,
                ),
                StepMode::Fixed(dt) => dt.min(dt_limit),
            };
            match rk4_step(ws, &state, dt, &params, &rhs_fn) {
                Ok(next) => state = next,
                Err(QhdError::VacuumApproach { .. }) => {
                    trajectory.status = TerminalStatus::VacuumAbort;
                    break 'time_loop;
                }
                Err(QhdError::NonFinite(_)) => {
                    trajectory.status = TerminalStatus::NonfiniteAbort;
                    break 'time_loop;
                }
                Err(e) => return Err(e),
            }
            trajectory.steps += 1;
            let drift = ((state.total_mass() - mass0) / mass0).abs();
            trajectory.max_rel_mass_drift = trajectory.max_rel_mass_drift.max(drift);
            trajectory.max_l2 = trajectory.max_l2.max(triple_l2(&state));
            if config.regime_checks
                && trajectory.regime_exit_time.is_none()
                && !state.in_regime()
            {
                trajectory.regime_exit_time = Some(state.time);
            }
        }
        // land exactly on the cadence grid so family members align bitwise
        state.time = target;
        trajectory.snapshots.push(state.clone());
        next_snap_index += 1;
    }

    if trajectory.status == TerminalStatus::Completed && trajectory.regime_exit_time.is_some() {
        trajectory.status = TerminalStatus::RegimeExit;
    }

    let report = if trajectory.snapshots.len() >= 2 {
        Some(energy_budget(
            ws,
            &trajectory,
            &params,
            T::lit(BOUND_NU),
            T::lit(BOUND_C),
        )?)
    } else {
        None
    };
    Ok(SimOutput {
        trajectory,
        report,
    })
}
