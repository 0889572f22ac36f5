//! Right-hand sides of the quantum and classical systems, and the
//! constituent physical terms.
//!
//! The unknowns are the perturbations `(rho, u, theta)` around the constant
//! state `(n, u, T) = (1, 0, 1)`. Rational coefficients such as
//! `1/(1+rho)` are evaluated pointwise in physical space; every derivative
//! is spectral. When dealiasing is enabled it is applied once to each
//! assembled equation, not to intermediates: the rational nonlinearities
//! cannot be dealiased exactly anyway, and a single terminal truncation
//! keeps aliasing growth bounded.

use crate::error::{QhdError, Result};
use crate::field::{ScalarField, TensorField, VectorField};
use crate::scalar::Scalar;
use crate::spectral::SpectralWorkspace;
use crate::state::{PhysParams, State, VACUUM_FLOOR};

/// Time derivatives of the three unknowns.
#[derive(Debug, Clone)]
pub struct Rhs<T> {
    pub d_rho: ScalarField<T>,
    pub d_u: VectorField<T>,
    pub d_theta: ScalarField<T>,
}

impl<T: Scalar> Rhs<T> {
    pub fn is_finite(&self) -> bool {
        self.d_rho.is_finite() && self.d_u.is_finite() && self.d_theta.is_finite()
    }

    /// Weighted sum of slopes, used by the time integrator.
    pub fn combine(terms: &[(T, &Rhs<T>)]) -> Rhs<T> {
        let grid = terms[0].1.d_rho.grid();
        let mut out = Rhs {
            d_rho: ScalarField::zeros(grid),
            d_u: VectorField::zeros(grid),
            d_theta: ScalarField::zeros(grid),
        };
        for &(c, rhs) in terms {
            out.d_rho.add_scaled(&rhs.d_rho, c);
            out.d_u.add_scaled(&rhs.d_u, c);
            out.d_theta.add_scaled(&rhs.d_theta, c);
        }
        out
    }
}

/// Moment fields of the conservation-form system: momentum density,
/// stress tensor, energy density and heat flux.
#[derive(Debug, Clone)]
pub struct Moments<T> {
    /// Momentum density `Pi = n u` (unit mass).
    pub momentum: VectorField<T>,
    /// Stress `P_ij = -n T delta_ij + (hbar^2 n / 12) d_i d_j log n`.
    pub stress: TensorField<T>,
    /// Energy density `W = (3/2) n T + (1/2) n |u|^2 - (hbar^2 n / 24) lap(log n)`.
    pub energy: ScalarField<T>,
    /// Heat flux `q = -kappa grad T`.
    pub heat_flux: VectorField<T>,
}

/// Total density `1 + rho`, guarded against the vacuum floor.
fn total_density<T: Scalar>(rho: &ScalarField<T>) -> Result<ScalarField<T>> {
    let n = rho.map(|r| T::one() + r);
    let min = n.min_value();
    if !(min > T::lit(VACUUM_FLOOR)) {
        return Err(QhdError::VacuumApproach {
            min_density: min.as_f64(),
            floor: VACUUM_FLOOR,
        });
    }
    Ok(n)
}

/// Newtonian viscous stress `S = mu (grad u + (grad u)^T) + lambda (div u) I`.
pub fn stress_tensor<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    u: &VectorField<T>,
    mu: T,
    lambda: T,
) -> TensorField<T> {
    let jac = ws.jacobian(u);
    let div_u = jac.trace();
    let dim = u.dim();
    let mut s = TensorField::zeros(u.grid());
    for i in 0..dim {
        for j in 0..dim {
            let mut entry = jac.entry(i, j).zip_map(jac.entry(j, i), |a, b| mu * (a + b));
            if i == j {
                entry.add_scaled(&div_u, lambda);
            }
            *s.entry_mut(i, j) = entry;
        }
    }
    s
}

/// Quantum force of the momentum equation in its two-term form:
/// `(hbar^2/12) lap(grad rho)/(1+rho)
///  - (hbar^2/3) div(grad sqrt(1+rho) (x) grad sqrt(1+rho))/(1+rho)`.
pub fn bohm_force<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    rho: &ScalarField<T>,
    hbar: T,
) -> Result<VectorField<T>> {
    let n = total_density(rho)?;
    if hbar == T::zero() {
        return Ok(VectorField::zeros(rho.grid()));
    }
    let h2 = hbar * hbar;
    let inv_n = n.map(|v| T::one() / v);

    let lap_grad = ws.laplacian_grad(rho);
    let sqrt_n = n.map(T::sqrt);
    let g = ws.grad(&sqrt_n);
    let dim = rho.grid().dim();
    let mut outer = TensorField::zeros(rho.grid());
    for i in 0..dim {
        for j in 0..dim {
            *outer.entry_mut(i, j) = g.component(i).zip_map(g.component(j), |a, b| a * b);
        }
    }
    let div_outer = ws.div_tensor(&outer);

    let c12 = h2 / T::lit(12.0);
    let c3 = h2 / T::lit(3.0);
    let comps = (0..dim)
        .map(|j| {
            let mut out = lap_grad.component(j).zip_map(&inv_n, |a, w| c12 * a * w);
            let corr = div_outer.component(j).zip_map(&inv_n, |a, w| c3 * a * w);
            out.add_scaled(&corr, -T::one());
            out
        })
        .collect();
    Ok(VectorField::from_components(comps))
}

/// Conservative form of the same force,
/// `(hbar^2/12) div((1+rho) grad^2 log(1+rho)) / (1+rho)`.
///
/// Identical to [`bohm_force`] in exact arithmetic; kept as an independent
/// evaluation route for verification.
pub fn bohm_force_conservative<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    rho: &ScalarField<T>,
    hbar: T,
) -> Result<VectorField<T>> {
    let n = total_density(rho)?;
    if hbar == T::zero() {
        return Ok(VectorField::zeros(rho.grid()));
    }
    let inv_n = n.map(|v| T::one() / v);
    let log_n = n.map(T::ln);
    let hess = ws.hessian(&log_n);
    let dim = rho.grid().dim();
    let mut weighted = TensorField::zeros(rho.grid());
    for i in 0..dim {
        for j in 0..dim {
            *weighted.entry_mut(i, j) = hess.entry(i, j).zip_map(&n, |h, w| h * w);
        }
    }
    let div = ws.div_tensor(&weighted);
    let c = hbar * hbar / T::lit(12.0);
    Ok(div.map(|comp| comp.zip_map(&inv_n, |a, w| c * a * w)))
}

/// Quantum contribution to the temperature equation,
/// `(hbar^2 / (36 (1+rho))) div((1+rho) lap u)`.
pub fn quantum_heat_term<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    rho: &ScalarField<T>,
    u: &VectorField<T>,
    hbar: T,
) -> Result<ScalarField<T>> {
    let n = total_density(rho)?;
    if hbar == T::zero() {
        return Ok(ScalarField::zeros(rho.grid()));
    }
    let lap_u = ws.laplacian_vec(u);
    let weighted = VectorField::from_components(
        lap_u
            .components()
            .iter()
            .map(|c| c.zip_map(&n, |a, w| a * w))
            .collect(),
    );
    let div = ws.divergence(&weighted);
    let c = hbar * hbar / T::lit(36.0);
    Ok(div.zip_map(&n, |d, w| c * d / w))
}

/// Viscous heating `2/(3(1+rho)) * [ (mu/2)|grad u + (grad u)^T|^2
/// + lambda (div u)^2 ]`.
pub fn viscous_heating<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    rho: &ScalarField<T>,
    u: &VectorField<T>,
    mu: T,
    lambda: T,
) -> Result<ScalarField<T>> {
    let n = total_density(rho)?;
    let jac = ws.jacobian(u);
    heating_from_jacobian(&n, &jac, mu, lambda)
}

fn heating_from_jacobian<T: Scalar>(
    n: &ScalarField<T>,
    jac: &TensorField<T>,
    mu: T,
    lambda: T,
) -> Result<ScalarField<T>> {
    let dim = jac.dim();
    let mut sym_sq = ScalarField::zeros(n.grid());
    for i in 0..dim {
        for j in 0..dim {
            let s = jac.entry(i, j).zip_map(jac.entry(j, i), |a, b| a + b);
            for (acc, &v) in sym_sq.data_mut().iter_mut().zip(s.data()) {
                *acc += v * v;
            }
        }
    }
    let div_u = jac.trace();
    let half = T::lit(0.5);
    let two_thirds = T::lit(2.0 / 3.0);
    let mut out = ScalarField::zeros(n.grid());
    for (((o, &s2), &d), &w) in out
        .data_mut()
        .iter_mut()
        .zip(sym_sq.data())
        .zip(div_u.data())
        .zip(n.data())
    {
        *o = two_thirds * (half * mu * s2 + lambda * d * d) / w;
    }
    Ok(out)
}

// --- individual term groups -------------------------------------------------
//
// These are the building blocks of the assembled equations; they are also
// evaluated one at a time by the manufactured-solution verification.

/// `u . grad f`
pub(crate) fn advect_scalar<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    u: &VectorField<T>,
    f: &ScalarField<T>,
) -> ScalarField<T> {
    u.dot(&ws.grad(f))
}

/// `(1 + rho) div u`
pub(crate) fn compression<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    rho: &ScalarField<T>,
    u: &VectorField<T>,
) -> ScalarField<T> {
    ws.divergence(u).zip_map(rho, |d, r| (T::one() + r) * d)
}

/// `(u . grad) u`
pub(crate) fn advect_velocity<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    u: &VectorField<T>,
) -> VectorField<T> {
    let jac = ws.jacobian(u);
    let dim = u.dim();
    let comps = (0..dim)
        .map(|j| {
            let mut acc = ScalarField::zeros(u.grid());
            for i in 0..dim {
                let term = u.component(i).zip_map(jac.entry(i, j), |a, b| a * b);
                acc.add_scaled(&term, T::one());
            }
            acc
        })
        .collect();
    VectorField::from_components(comps)
}

/// `grad theta + (1+theta)/(1+rho) grad rho`
pub(crate) fn pressure_gradient<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    rho: &ScalarField<T>,
    theta: &ScalarField<T>,
) -> VectorField<T> {
    let grad_theta = ws.grad(theta);
    let grad_rho = ws.grad(rho);
    let coeff = theta.zip_map(rho, |t, r| (T::one() + t) / (T::one() + r));
    let comps = (0..rho.grid().dim())
        .map(|j| {
            let mut out = grad_theta.component(j).clone();
            let p = grad_rho.component(j).zip_map(&coeff, |g, c| g * c);
            out.add_scaled(&p, T::one());
            out
        })
        .collect();
    VectorField::from_components(comps)
}

/// `[mu lap u + (mu+lambda) grad div u] / (1+rho)`
pub(crate) fn viscosity_term<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    rho: &ScalarField<T>,
    u: &VectorField<T>,
    mu: T,
    lambda: T,
) -> VectorField<T> {
    let lap = ws.laplacian_vec(u);
    let gd = ws.grad_div(u);
    let mu_lambda = mu + lambda;
    let comps = (0..u.dim())
        .map(|j| {
            let mut out = lap.component(j).map(|v| mu * v);
            out.add_scaled(gd.component(j), mu_lambda);
            out.zip_map(rho, |v, r| v / (T::one() + r))
        })
        .collect();
    VectorField::from_components(comps)
}

/// `2 kappa lap theta / (3 (1+rho))`
pub(crate) fn heat_diffusion<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    rho: &ScalarField<T>,
    theta: &ScalarField<T>,
    kappa: T,
) -> ScalarField<T> {
    let c = T::lit(2.0 / 3.0) * kappa;
    ws.laplacian(theta)
        .zip_map(rho, |l, r| c * l / (T::one() + r))
}

/// `(2/3) (1+theta) div u`
pub(crate) fn theta_compression<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    theta: &ScalarField<T>,
    u: &VectorField<T>,
) -> ScalarField<T> {
    let c = T::lit(2.0 / 3.0);
    ws.divergence(u).zip_map(theta, |d, t| c * (T::one() + t) * d)
}

// --- assembled right-hand sides ----------------------------------------------

fn assemble_rhs<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    state: &State<T>,
    params: &PhysParams<T>,
    include_quantum: bool,
    dealias: bool,
) -> Result<Rhs<T>> {
    let n = total_density(&state.rho)?;
    let quantum = include_quantum && params.is_quantum();

    // continuity: d_rho = -u.grad(rho) - (1+rho) div u
    let mut d_rho = advect_scalar(ws, &state.u, &state.rho);
    d_rho.add_scaled(&compression(ws, &state.rho, &state.u), T::one());
    d_rho.scale_in_place(-T::one());

    // momentum
    let mut d_u = viscosity_term(ws, &state.rho, &state.u, params.mu, params.lambda);
    let adv_u = advect_velocity(ws, &state.u);
    let press = pressure_gradient(ws, &state.rho, &state.theta);
    d_u.add_scaled(&adv_u, -T::one());
    d_u.add_scaled(&press, -T::one());
    if quantum {
        let bohm = bohm_force(ws, &state.rho, params.hbar)?;
        d_u.add_scaled(&bohm, T::one());
    }

    // temperature
    let mut d_theta = heat_diffusion(ws, &state.rho, &state.theta, params.kappa);
    d_theta.add_scaled(&advect_scalar(ws, &state.u, &state.theta), -T::one());
    d_theta.add_scaled(&theta_compression(ws, &state.theta, &state.u), -T::one());
    let jac = ws.jacobian(&state.u);
    let heating = heating_from_jacobian(&n, &jac, params.mu, params.lambda)?;
    d_theta.add_scaled(&heating, T::one());
    if quantum {
        let qh = quantum_heat_term(ws, &state.rho, &state.u, params.hbar)?;
        d_theta.add_scaled(&qh, T::one());
    }

    let mut rhs = Rhs {
        d_rho,
        d_u,
        d_theta,
    };
    if dealias {
        rhs.d_rho = ws.dealias(&rhs.d_rho);
        rhs.d_u = ws.dealias_vec(&rhs.d_u);
        rhs.d_theta = ws.dealias(&rhs.d_theta);
    }
    if !rhs.is_finite() {
        return Err(QhdError::NonFinite("assembled right-hand side"));
    }
    Ok(rhs)
}

/// Right-hand side of the quantum system.
pub fn rhs_quantum<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    state: &State<T>,
    params: &PhysParams<T>,
    dealias: bool,
) -> Result<Rhs<T>> {
    assemble_rhs(ws, state, params, true, dealias)
}

/// Right-hand side of the classical system (all quantum terms absent).
pub fn rhs_classical<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    state: &State<T>,
    params: &PhysParams<T>,
    dealias: bool,
) -> Result<Rhs<T>> {
    assemble_rhs(ws, state, params, false, dealias)
}

/// Diagnostic moment fields of the conservation-form system.
pub fn moment_fields<T: Scalar>(
    ws: &SpectralWorkspace<T>,
    state: &State<T>,
    params: &PhysParams<T>,
) -> Result<Moments<T>> {
    let n = total_density(&state.rho)?;
    let temp = state.theta.map(|t| T::one() + t);
    let dim = state.grid().dim();

    let momentum = VectorField::from_components(
        state
            .u
            .components()
            .iter()
            .map(|c| c.zip_map(&n, |v, w| v * w))
            .collect(),
    );

    let mut stress = TensorField::zeros(state.grid());
    let nt = n.zip_map(&temp, |a, b| a * b);
    for i in 0..dim {
        *stress.entry_mut(i, i) = nt.map(|v| -v);
    }
    let quantum = params.is_quantum();
    let h2 = params.hbar * params.hbar;
    let mut lap_log_n = ScalarField::zeros(state.grid());
    if quantum {
        let log_n = n.map(T::ln);
        let hess = ws.hessian(&log_n);
        let c = h2 / T::lit(12.0);
        for i in 0..dim {
            for j in 0..dim {
                let q = hess.entry(i, j).zip_map(&n, |h, w| c * h * w);
                stress.entry_mut(i, j).add_scaled(&q, T::one());
            }
        }
        lap_log_n = hess.trace();
    }

    let kin = state.u.norm_sq();
    let three_halves = T::lit(1.5);
    let half = T::lit(0.5);
    let c24 = h2 / T::lit(24.0);
    let mut energy = ScalarField::zeros(state.grid());
    for ((((e, &w), &t), &k2), &ll) in energy
        .data_mut()
        .iter_mut()
        .zip(n.data())
        .zip(temp.data())
        .zip(kin.data())
        .zip(lap_log_n.data())
    {
        *e = three_halves * w * t + half * w * k2 - c24 * w * ll;
    }

    let heat_flux = ws.grad(&temp).map(|c| c.map(|v| -params.kappa * v));

    let m = Moments {
        momentum,
        stress,
        energy,
        heat_flux,
    };
    if !(m.momentum.is_finite() && m.stress.is_finite() && m.energy.is_finite() && m.heat_flux.is_finite()) {
        return Err(QhdError::NonFinite("moment fields"));
    }
    Ok(m)
}
