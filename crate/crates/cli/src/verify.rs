//! Runtime verification suite: exercises the operator identities and
//! pointwise algebra of the solver on the requested grid, reporting one
//! measured value per check.

use std::f64::consts::PI;
use std::sync::Arc;

use qhd_core::diagnostics::{e0_point, entropy_s, sobolev_seminorm, theta_from_entropy};
use qhd_core::dynamics::{
    bohm_force, bohm_force_conservative, quantum_heat_term, rhs_classical, rhs_quantum,
    stress_tensor,
};
use qhd_core::field::{ScalarField, VectorField};
use qhd_core::grid::{make_grid, Grid};
use qhd_core::integrate::{rk4_step, stable_dt};
use qhd_core::spectral::SpectralWorkspace;
use qhd_core::state::{initial_state, InitSpec, PhysParams, State};
use qhd_core::{QhdError, Result};

pub struct CheckOutcome {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: &'static str, measured: f64, tolerance: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        measured,
        tolerance,
        pass: measured <= tolerance,
    }
}

fn max_diff(a: &ScalarField<f64>, b: &ScalarField<f64>) -> f64 {
    a.zip_map(b, |x, y| x - y).max_abs()
}

fn band_limited(grid: &Arc<Grid<f64>>, seed: u64) -> ScalarField<f64> {
    let spec = InitSpec::<f64>::random(0.05, 3, 4, grid.dim(), seed);
    let ws = SpectralWorkspace::new(grid);
    initial_state(&ws, &spec).map(|s| s.rho).unwrap()
}

pub fn run_all(n: usize, seed: u64) -> Result<Vec<CheckOutcome>> {
    if !n.is_multiple_of(2) {
        return Err(QhdError::OddResolution(n));
    }
    if n < 8 {
        return Err(QhdError::ResolutionTooSmall(n));
    }
    let grid = make_grid::<f64>(1, 2.0 * PI, n)?;
    let ws = SpectralWorkspace::new(&grid);
    let mut out = Vec::new();

    // derivative exactness on a monomial
    let f = ScalarField::from_fn(&grid, |x| (3.0 * x[0] + 0.4).sin());
    let d1 = ScalarField::from_fn(&grid, |x| 3.0 * (3.0 * x[0] + 0.4).cos());
    out.push(check(
        "gradient matches analytic derivative",
        max_diff(ws.grad(&f).component(0), &d1),
        1e-10,
    ));

    // composition identities
    let g = band_limited(&grid, seed.wrapping_add(1));
    out.push(check(
        "laplacian equals divergence of gradient",
        max_diff(&ws.laplacian(&g), &ws.divergence(&ws.grad(&g))),
        1e-12,
    ));
    let v = {
        let mut v = VectorField::zeros(&grid);
        *v.component_mut(0) = band_limited(&grid, seed.wrapping_add(2));
        v
    };
    out.push(check(
        "grad_div equals composed grad o div",
        {
            let fused = ws.grad_div(&v);
            let composed = ws.grad(&ws.divergence(&v));
            max_diff(fused.component(0), composed.component(0))
        },
        1e-12,
    ));
    out.push(check(
        "laplacian_grad equals composed grad o laplacian",
        {
            let fused = ws.laplacian_grad(&g);
            let composed = ws.grad(&ws.laplacian(&g));
            max_diff(fused.component(0), composed.component(0))
        },
        1e-12,
    ));

    // Parseval: spectral L2 against quadrature L2
    out.push(check(
        "Parseval: spectral vs quadrature L2",
        (sobolev_seminorm(&ws, &g, 0) - g.l2_norm()).abs() / g.l2_norm().max(1e-300),
        1e-12,
    ));

    // dealiasing
    let rough = ScalarField::from_fn(&grid, |x| {
        (x[0] * (n as f64 / 2.0)).cos() + (2.0 * x[0]).sin()
    });
    let once = ws.dealias(&rough);
    out.push(check(
        "dealias is idempotent",
        max_diff(&once, &ws.dealias(&once)),
        1e-13,
    ));

    // stress tensor structure
    let (mu, lambda) = (1.1, -0.2);
    let s = stress_tensor(&ws, &v, mu, lambda);
    out.push(check("stress tensor is symmetric", s.asymmetry(), 1e-13));
    let trace_expect = ws
        .divergence(&v)
        .map(|d| (2.0 * mu + 1.0 * lambda) * d);
    out.push(check(
        "stress trace identity",
        max_diff(&s.trace(), &trace_expect),
        1e-12,
    ));

    // quantum force: the two printed forms
    let rho_smooth = ScalarField::from_fn(&grid, |x| 0.1 * x[0].sin());
    let a = bohm_force(&ws, &rho_smooth, 0.7)?;
    let b = bohm_force_conservative(&ws, &rho_smooth, 0.7)?;
    let rel = {
        let d = a.component(0).zip_map(b.component(0), |x, y| x - y);
        d.l2_norm() / a.component(0).l2_norm().max(1e-300)
    };
    out.push(check("quantum force dual-form identity", rel, 1e-8));

    // quantum heat term against its product-rule expansion
    let u_field = {
        let mut u = VectorField::zeros(&grid);
        *u.component_mut(0) = ScalarField::from_fn(&grid, |x| 0.05 * (2.0 * x[0] + 1.0).sin());
        u
    };
    let qh = quantum_heat_term(&ws, &rho_smooth, &u_field, 0.7)?;
    let lap_u = ws.laplacian_vec(&u_field);
    let grad_rho = ws.grad(&rho_smooth);
    let dot = grad_rho.dot(&lap_u);
    let div_lap = ws.divergence(&lap_u);
    let mut expanded = ScalarField::zeros(&grid);
    for (((e, &d), &gdot), &r) in expanded
        .data_mut()
        .iter_mut()
        .zip(div_lap.data())
        .zip(dot.data())
        .zip(rho_smooth.data())
    {
        *e = 0.49 / 36.0 * (d + gdot / (1.0 + r));
    }
    out.push(check(
        "quantum heat equals product-rule expansion",
        qh.zip_map(&expanded, |x, y| x - y).l2_norm() / qh.l2_norm().max(1e-300),
        1e-8,
    ));

    // classical reduction and equilibrium
    let spec = InitSpec::random(0.05, 3, 4, 1, seed.wrapping_add(3));
    let state = initial_state(&ws, &spec)?;
    let params0 = PhysParams::new(0.0, 1.0, 0.1, 1.0)?;
    let rq = rhs_quantum(&ws, &state, &params0, true)?;
    let rc = rhs_classical(&ws, &state, &params0, true)?;
    let reduction = max_diff(&rq.d_rho, &rc.d_rho)
        .max(max_diff(rq.d_u.component(0), rc.d_u.component(0)))
        .max(max_diff(&rq.d_theta, &rc.d_theta));
    out.push(check("classical reduction at hbar = 0", reduction, 1e-14));

    let params_q = PhysParams::new(0.3, 1.0, 0.1, 1.0)?;
    let rhs0 = rhs_quantum(&ws, &State::zero(&grid), &params_q, true)?;
    out.push(check(
        "constant equilibrium is a fixed point",
        rhs0.d_rho
            .max_abs()
            .max(rhs0.d_u.max_abs())
            .max(rhs0.d_theta.max_abs()),
        0.0,
    ));

    let rq2 = rhs_quantum(&ws, &state, &params_q, true)?;
    out.push(check(
        "continuity slope has zero mean",
        rq2.d_rho.mean().abs(),
        1e-14,
    ));

    // entropy round trip
    let ent = entropy_s(&state)?;
    let back = theta_from_entropy(&state.rho, &ent);
    out.push(check(
        "entropy variable round trip",
        max_diff(&back, &state.theta),
        1e-12,
    ));

    // energy density: kinetic-only slice has ratio exactly 1/2
    let ratio = e0_point(0.0, 0.3f64 * 0.3, 0.0) / (0.3f64 * 0.3);
    out.push(check(
        "energy density kinetic slice ratio - 1/2",
        (ratio - 0.5).abs(),
        0.0,
    ));

    // one stable step conserves mass
    let mut spec2 = InitSpec::random(0.05, 3, 4, 1, seed.wrapping_add(4));
    spec2.mean_rho = 0.03;
    let state2 = initial_state(&ws, &spec2)?;
    let dt = stable_dt(&state2, &params_q, &grid, 0.5);
    let rhs_fn = |w: &SpectralWorkspace<f64>, s: &State<f64>, p: &PhysParams<f64>| {
        rhs_quantum(w, s, p, true)
    };
    let next = rk4_step(&ws, &state2, dt, &params_q, &rhs_fn)?;
    out.push(check(
        "one step conserves total mass",
        ((next.total_mass() - state2.total_mass()) / state2.total_mass()).abs(),
        1e-13,
    ));

    Ok(out)
}
