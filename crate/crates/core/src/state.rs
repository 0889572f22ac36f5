//! Solution state, physical parameters and initial data.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics;
use crate::error::{QhdError, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::scalar::Scalar;
use crate::spectral::SpectralWorkspace;

/// Density perturbations with `1 + rho` at or below this value abort the run.
/// The validated regime keeps `|rho| <= 1/2`, so reaching 0.1 means the
/// solution has left it decisively.
pub const VACUUM_FLOOR: f64 = 0.1;

/// Physical parameters of the viscous quantum hydrodynamic system.
///
/// The particle mass is fixed to 1, the adiabatic exponent to 5/3 and the
/// gas constant to 1. `hbar = 0` selects the classical system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams<T> {
    /// Scaled Planck constant, `>= 0`.
    pub hbar: T,
    /// Primary viscosity, `> 0`.
    pub mu: T,
    /// Second viscosity; only `2*mu + 3*lambda > 0` is required.
    pub lambda: T,
    /// Heat conductivity, `> 0`.
    pub kappa: T,
}

impl<T: Scalar> PhysParams<T> {
    pub fn new(hbar: T, mu: T, lambda: T, kappa: T) -> Result<Self> {
        if !(hbar >= T::zero()) {
            return Err(QhdError::InvalidParams(format!(
                "hbar must be nonnegative, got {}",
                hbar.as_f64()
            )));
        }
        if !(mu > T::zero()) {
            return Err(QhdError::InvalidParams(format!(
                "mu must be positive, got {}",
                mu.as_f64()
            )));
        }
        if !(kappa > T::zero()) {
            return Err(QhdError::InvalidParams(format!(
                "kappa must be positive, got {}",
                kappa.as_f64()
            )));
        }
        let two_mu_three_lambda = T::lit(2.0) * mu + T::lit(3.0) * lambda;
        if !(two_mu_three_lambda > T::zero()) {
            return Err(QhdError::InvalidParams(format!(
                "2*mu + 3*lambda must be positive, got {}",
                two_mu_three_lambda.as_f64()
            )));
        }
        if !(hbar.is_finite() && mu.is_finite() && lambda.is_finite() && kappa.is_finite()) {
            return Err(QhdError::InvalidParams("non-finite parameter".into()));
        }
        Ok(Self {
            hbar,
            mu,
            lambda,
            kappa,
        })
    }

    /// Defaults used when a config leaves them unspecified.
    pub fn defaults() -> Self {
        Self {
            hbar: T::zero(),
            mu: T::one(),
            lambda: T::zero(),
            kappa: T::one(),
        }
    }

    pub fn with_hbar(mut self, hbar: T) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn gamma() -> T {
        T::lit(5.0 / 3.0)
    }

    /// Linear sound speed at the constant state, `sqrt(gamma)` with R = 1.
    pub fn sound_speed() -> T {
        Self::gamma().sqrt()
    }

    pub fn is_quantum(&self) -> bool {
        self.hbar > T::zero()
    }
}

/// Perturbation unknowns `(rho, u, theta) = (n - 1, u, T - 1)` at one time.
#[derive(Debug, Clone)]
pub struct State<T> {
    pub rho: ScalarField<T>,
    pub u: VectorField<T>,
    pub theta: ScalarField<T>,
    pub time: T,
}

impl<T: Scalar> State<T> {
    pub fn zero(grid: &Arc<Grid<T>>) -> Self {
        Self {
            rho: ScalarField::zeros(grid),
            u: VectorField::zeros(grid),
            theta: ScalarField::zeros(grid),
            time: T::zero(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        self.rho.grid()
    }

    /// Smallest value of the total density `1 + rho`.
    pub fn min_density(&self) -> T {
        T::one() + self.rho.min_value()
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.u.is_finite() && self.theta.is_finite()
    }

    /// True while `max|rho| <= 1/2` and `max|theta| <= 1/2`.
    pub fn in_regime(&self) -> bool {
        let half = T::lit(0.5);
        self.rho.max_abs() <= half && self.theta.max_abs() <= half
    }

    /// Total mass of the fluid, `integral of (1 + rho)`.
    pub fn total_mass(&self) -> T {
        self.grid().volume() + self.rho.integral()
    }

    /// `self + c * rhs` evaluated fieldwise, leaving `time` untouched.
    pub(crate) fn add_scaled_rhs(&self, rhs: &crate::dynamics::Rhs<T>, c: T) -> Self {
        let mut out = self.clone();
        out.rho.add_scaled(&rhs.d_rho, c);
        out.u.add_scaled(&rhs.d_u, c);
        out.theta.add_scaled(&rhs.d_theta, c);
        out
    }
}

/// Which unknown a mode perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldTarget {
    Rho,
    /// Velocity component index, `< dim`.
    U(usize),
    Theta,
}

/// A single trigonometric mode, `amplitude * sin(k.x + phase)` with
/// `k = 2*pi*m/L`.
#[derive(Debug, Clone)]
pub struct ModeSpec<T> {
    pub field: FieldTarget,
    /// Integer wavevector; entries beyond the grid dimension must be zero.
    pub wavevector: [i64; 3],
    pub amplitude: T,
    pub phase: T,
}

/// Initial data description: trigonometric modes normalized to a target
/// size in the solver's composite norm.
#[derive(Debug, Clone)]
pub struct InitSpec<T> {
    /// Target size of the order-3 composite norm of the initial state,
    /// measured at `hbar = 0` so the data does not depend on the run's
    /// Planck constant.
    pub eps: T,
    /// Constant offset added to `rho` after normalization.
    pub mean_rho: T,
    pub modes: Vec<ModeSpec<T>>,
}

impl<T: Scalar> InitSpec<T> {
    /// One density mode `eps * sin(2 pi x / L)`-shaped; the workhorse for
    /// small experiments.
    pub fn single_rho_mode(eps: T) -> Self {
        Self {
            eps,
            mean_rho: T::zero(),
            modes: vec![ModeSpec {
                field: FieldTarget::Rho,
                wavevector: [1, 0, 0],
                amplitude: T::one(),
                phase: T::zero(),
            }],
        }
    }

    /// Deterministic random low-mode data for all three unknowns.
    pub fn random(eps: T, per_field: usize, max_mode: i64, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        let targets: Vec<FieldTarget> = std::iter::once(FieldTarget::Rho)
            .chain((0..dim).map(FieldTarget::U))
            .chain(std::iter::once(FieldTarget::Theta))
            .collect();
        for &field in &targets {
            for _ in 0..per_field {
                let mut wavevector = [0i64; 3];
                for w in wavevector.iter_mut().take(dim) {
                    *w = rng.random_range(-max_mode..=max_mode);
                }
                if wavevector.iter().all(|&m| m == 0) {
                    wavevector[0] = 1;
                }
                modes.push(ModeSpec {
                    field,
                    wavevector,
                    amplitude: T::lit(rng.random_range(0.2..1.0)),
                    phase: T::lit(rng.random_range(0.0..std::f64::consts::TAU)),
                });
            }
        }
        Self {
            eps,
            mean_rho: T::zero(),
            modes,
        }
    }
}

/// Build the initial state from a mode specification.
///
/// The mode sum is rescaled so that the order-3 composite norm (at
/// `hbar = 0`) equals `eps` exactly, then `mean_rho` is added. Modes at or
/// above the 2/3 dealiasing cutoff are rejected.
pub fn initial_state<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    spec: &InitSpec<T>,
) -> Result<State<T>> {
    let grid = ws.grid();
    let cutoff = grid.dealias_cutoff();
    for mode in &spec.modes {
        for a in 0..3 {
            let m = mode.wavevector[a];
            if a >= grid.dim() && m != 0 {
                return Err(QhdError::InvalidConfig(format!(
                    "mode uses axis {a} on a {}-dimensional grid",
                    grid.dim()
                )));
            }
            if m.abs() > cutoff {
                return Err(QhdError::ModeAboveCutoff {
                    index: m,
                    cutoff,
                });
            }
        }
        if let FieldTarget::U(j) = mode.field {
            if j >= grid.dim() {
                return Err(QhdError::InvalidConfig(format!(
                    "velocity component {j} on a {}-dimensional grid",
                    grid.dim()
                )));
            }
        }
    }

    let mut state = State::zero(grid);
    let base = T::lit(2.0) * T::PI() / grid.length();
    for mode in &spec.modes {
        let target = match mode.field {
            FieldTarget::Rho => &mut state.rho,
            FieldTarget::U(j) => state.u.component_mut(j),
            FieldTarget::Theta => &mut state.theta,
        };
        let add = ScalarField::from_fn(grid, |x| {
            let mut arg = mode.phase;
            for (&m, &xa) in mode.wavevector.iter().zip(&x).take(grid.dim()) {
                arg += base * T::from_i64(m).unwrap() * xa;
            }
            mode.amplitude * arg.sin()
        });
        target.add_scaled(&add, T::one());
    }

    if spec.eps > T::zero() {
        let norm = diagnostics::triple_norm_with_hbar(ws, &state, T::zero(), 3);
        if norm > T::zero() {
            let scale = spec.eps / norm;
            state.rho.scale_in_place(scale);
            state.u.scale_in_place(scale);
            state.theta.scale_in_place(scale);
        }
    } else {
        state = State::zero(grid);
    }

    if spec.mean_rho != T::zero() {
        for v in state.rho.data_mut() {
            *v += spec.mean_rho;
        }
    }

    if !state.is_finite() {
        return Err(QhdError::NonFinite("initial state"));
    }
    if !(state.min_density() > T::zero()) {
        return Err(QhdError::InvalidConfig(format!(
            "initial data reaches vacuum: min(1+rho) = {}",
            state.min_density().as_f64()
        )));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    fn ws(n: usize) -> SpectralWorkspace<f64> {
        SpectralWorkspace::new(&make_grid::<f64>(1, 2.0 * PI, n).unwrap())
    }

    #[test]
    fn param_validation() {
        assert!(PhysParams::new(0.0, 1.0, 0.0, 1.0).is_ok());
        assert!(PhysParams::new(-0.1, 1.0, 0.0, 1.0).is_err());
        assert!(PhysParams::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(PhysParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        // 2*mu + 3*lambda = 2 - 3 < 0
        assert!(PhysParams::new(0.0, 1.0, -1.0, 1.0).is_err());
        // slightly negative lambda is fine
        assert!(PhysParams::new(0.0, 1.0, -0.5, 1.0).is_ok());
    }

    #[test]
    fn zero_amplitude_gives_zero_state() {
        let ws = ws(16);
        let spec = InitSpec::single_rho_mode(0.0);
        let s = initial_state(&ws, &spec).unwrap();
        assert_eq!(s.rho.max_abs(), 0.0);
        assert_eq!(s.u.max_abs(), 0.0);
        assert_eq!(s.theta.max_abs(), 0.0);
    }

    #[test]
    fn mode_at_half_resolution_is_rejected() {
        let ws = ws(16);
        let mut spec = InitSpec::single_rho_mode(0.01);
        spec.modes[0].wavevector = [8, 0, 0];
        assert!(matches!(
            initial_state(&ws, &spec),
            Err(QhdError::ModeAboveCutoff { index: 8, cutoff: 5 })
        ));
    }

    #[test]
    fn single_mode_norm_matches_closed_form() {
        // For rho = A sin(x) on [0, 2pi), every seminorm of every order is
        // A^2 pi, so the squared order-3 composite norm at hbar = 0 is
        // 4 * (A^2 pi + A^2 pi) = 8 pi A^2. Normalizing to eps therefore
        // gives amplitude A = eps / sqrt(8 pi).
        let ws = ws(64);
        let eps = 0.01;
        let s = initial_state(&ws, &InitSpec::single_rho_mode(eps)).unwrap();
        let expected_amp = eps / (8.0 * PI).sqrt();
        // peak of |sin| on the grid is at x = pi/2 which is a grid point
        assert!((s.rho.max_abs() - expected_amp).abs() < 1e-14);
        let norm = diagnostics::triple_norm_with_hbar(&ws, &s, 0.0, 3);
        assert!((norm - eps).abs() < 1e-14);
    }

    #[test]
    fn mean_rho_is_added_after_normalization() {
        let ws = ws(32);
        let mut spec = InitSpec::single_rho_mode(0.01);
        spec.mean_rho = 0.05;
        let s = initial_state(&ws, &spec).unwrap();
        assert!((s.rho.mean() - 0.05).abs() < 1e-14);
    }

    #[test]
    fn initial_data_must_stay_above_vacuum() {
        let ws = ws(32);
        let mut spec = InitSpec::single_rho_mode(0.01);
        spec.mean_rho = -1.01;
        assert!(matches!(
            initial_state(&ws, &spec),
            Err(QhdError::InvalidConfig(_))
        ));
    }
}
