//! Energy functionals of the free-surface problem, evaluated from surface
//! traces only.
//!
//! The bulk Dirichlet integral is reduced to the boundary by the divergence
//! theorem and computed two independent ways: a Dirichlet-to-Neumann trace
//! route that uses nothing but the potential data, and an
//! integration-by-parts route that additionally invokes the kinematic
//! condition. Their agreement is a property of true solutions, not an
//! assumption; the volumetric ground truth lives in the oracle module.

use crate::oracle::relative_defect;
use crate::solver::{SolverError, SurfaceState, WaveParameters, WaveSolution};
use crate::spectral::{self, PeriodicGrid};
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("state is degenerate or non-finite: {0}")]
    BadState(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Spectral(#[from] crate::spectral::SpectralError),
}

/// The energy ledger of one surface state.
///
/// `dirichlet` is the full bulk integral of `|grad phi|^2`; the energies
/// are exactly half their integrals. `surface_integral` carries the plain
/// `T`-weighted area excess, and `surface_energy` half of it, so both
/// printed conventions are available downstream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyReport {
    pub dirichlet: f64,
    /// `g * integral of eta^2 dx`.
    pub potential_integral: f64,
    /// `T * integral of (sqrt(1 + eta_x^2) - 1) dx`.
    pub surface_integral: f64,
    /// `d * integral of |grad phi(x, -d)|^2 dx`; 0 for infinite depth.
    pub bottom_integral: f64,
    pub kinetic_energy: f64,
    pub potential_energy: f64,
    pub surface_energy: f64,
    /// Quadrature metadata.
    pub samples: usize,
    pub half_length: f64,
    pub tail_elevation: f64,
    pub tail_gradient: f64,
    pub has_bottom: bool,
}

/// Two-route evaluation of the kinetic-energy reduction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KineticCrosscheck {
    /// Boundary-trace route: flux of `phi` through the surface.
    pub trace_value: f64,
    /// Integration-by-parts route `-c * integral of [phi] eta_x dx`.
    pub pohozaev1_value: f64,
    pub relative_gap: f64,
    /// Cleared when the gap exceeds the tolerance: the trace data then
    /// cannot belong to a steady solution.
    pub consistent: bool,
    pub tolerance: f64,
}

fn check_finite(label: &str, values: &[f64]) -> Result<(), EnergyError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(EnergyError::BadState(format!("non-finite {label}")))
    }
}

/// Surface gradients `(phi_x, phi_y)` of the decaying-frame potential,
/// reconstructed from the traces via the complex velocity.
pub(crate) fn surface_gradients(state: &SurfaceState) -> Result<(Vec<f64>, Vec<f64>), EnergyError> {
    let grid = state.grid();
    let n = grid.n();
    let phi_per = state.phi_trace_periodic();
    let slope = state.phi_trace_slope();
    let psi = spectral::apply_symbol(
        grid,
        &phi_per,
        crate::solver::conjugate_trace_symbol(state.conformal_depth()),
    );
    let phi_xi: Vec<f64> = spectral::derivative(grid, &phi_per)?
        .iter()
        .map(|v| v + slope)
        .collect();
    let psi_xi = spectral::derivative(grid, &psi)?;
    let x_xi = state.x_xi();
    let y_xi = state.y_xi();
    let jac = state.jacobian();
    let mut phi_x = vec![0.0; n];
    let mut phi_y = vec![0.0; n];
    for j in 0..n {
        phi_x[j] = (phi_xi[j] * x_xi[j] + psi_xi[j] * y_xi[j]) / jac[j];
        phi_y[j] = (phi_xi[j] * y_xi[j] - psi_xi[j] * x_xi[j]) / jac[j];
    }
    Ok((phi_x, phi_y))
}

/// Dirichlet integral by the boundary-trace route: the conformally
/// invariant surface flux `integral of phi * phi_zeta dxi`, with `phi_zeta`
/// obtained from the Dirichlet-to-Neumann multiplier alone.
fn dirichlet_trace_route(state: &SurfaceState) -> Result<f64, EnergyError> {
    let grid = state.grid();
    let phi_per = state.phi_trace_periodic();
    check_finite("potential trace", &phi_per)?;
    let flux = spectral::apply_symbol(
        grid,
        &phi_per,
        crate::solver::dtn_symbol(state.conformal_depth()),
    );
    let phi_full = state.phi_trace();
    let integrand: Vec<f64> = phi_full.iter().zip(&flux).map(|(p, f)| p * f).collect();
    Ok(spectral::quad_periodic(grid, &integrand)?)
}

/// Dirichlet integral by the integration-by-parts route
/// `-c * integral of [phi] eta_x dx = -c * integral of phi y_xi dxi`.
fn dirichlet_pohozaev_route(state: &SurfaceState) -> Result<f64, EnergyError> {
    let grid = state.grid();
    let phi = state.phi_trace();
    let integrand: Vec<f64> = phi
        .iter()
        .zip(state.y_xi())
        .map(|(p, yx)| -state.speed() * p * yx)
        .collect();
    Ok(spectral::quad_periodic(grid, &integrand)?)
}

/// Bottom contribution `d * integral of |grad phi(x, -d)|^2 dx` via the
/// conformal bottom traces with the flat-bottom simplification.
fn bottom_route(state: &SurfaceState, depth_physical: f64) -> Result<f64, EnergyError> {
    let grid = state.grid();
    let h = state
        .conformal_depth()
        .ok_or_else(|| EnergyError::BadState("bottom term needs a finite-depth state".into()))?;
    let phi_per = state.phi_trace_periodic();
    let slope = state.phi_trace_slope();
    let b = state.mean_stretch();
    let sech = move |k: f64| {
        let e = (-(k * h).abs()).exp();
        Complex::new(2.0 * e / (1.0 + e * e), 0.0)
    };
    // bottom traces: the periodic parts damp by sech(k h), the linear parts
    // of the map and potential pass through unchanged
    let phi_xi_per = spectral::derivative(grid, &phi_per)?;
    let phi_xi_bottom: Vec<f64> = spectral::apply_symbol(grid, &phi_xi_per, sech)
        .iter()
        .map(|v| v + slope)
        .collect();
    let ty = {
        let y_xi = spectral::derivative(grid, state.elevation())?;
        spectral::apply_symbol(
            grid,
            &y_xi,
            crate::solver::conjugation_symbol(state.conformal_depth()),
        )
    };
    let x_xi_bottom: Vec<f64> = spectral::apply_symbol(grid, &ty, sech)
        .iter()
        .map(|v| 1.0 + b + v)
        .collect();
    let integrand: Vec<f64> = phi_xi_bottom
        .iter()
        .zip(&x_xi_bottom)
        .map(|(p, x)| depth_physical * p * p / x)
        .collect();
    Ok(spectral::quad_periodic(grid, &integrand)?)
}

/// Computes the energy ledger of a solution from its surface traces.
pub fn energy_report(solution: &WaveSolution) -> Result<EnergyReport, EnergyError> {
    let state = &solution.state;
    let params = &solution.params;
    let grid = state.grid();

    let min_j = state.jacobian().iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_j > 0.0) {
        return Err(EnergyError::BadState(format!("degenerate surface, min J = {min_j}")));
    }
    check_finite("elevation", state.elevation())?;

    let dirichlet = dirichlet_trace_route(state)?;

    let y = state.elevation();
    let x_xi = state.x_xi();
    let pot_integrand: Vec<f64> = (0..grid.n())
        .map(|j| params.gravity * y[j] * y[j] * x_xi[j])
        .collect();
    let potential_integral = spectral::quad_periodic(grid, &pot_integrand)?;

    let surf_integrand: Vec<f64> = (0..grid.n())
        .map(|j| params.surface_tension * (state.jacobian()[j].sqrt() - x_xi[j]))
        .collect();
    let surface_integral = spectral::quad_periodic(grid, &surf_integrand)?;

    let bottom_integral = match params.depth {
        Some(d) => bottom_route(state, d)?,
        None => 0.0,
    };

    let (phi_x, phi_y) = surface_gradients(state)?;
    let tail_gradient = phi_x[0].hypot(phi_y[0]);

    Ok(EnergyReport {
        dirichlet,
        potential_integral,
        surface_integral,
        bottom_integral,
        kinetic_energy: 0.5 * dirichlet,
        potential_energy: 0.5 * potential_integral,
        surface_energy: 0.5 * surface_integral,
        samples: grid.n(),
        half_length: grid.half_length(),
        tail_elevation: state.tail_elevation(),
        tail_gradient,
        has_bottom: params.depth.is_some(),
    })
}

/// Compares the two independent reductions of the Dirichlet integral.
///
/// For a converged solution the routes agree to discretization level. For
/// trace data that does not satisfy the kinematic condition they separate,
/// and the report flags the pair as not belonging to a solution.
pub fn kinetic_crosscheck(
    solution: &WaveSolution,
    tolerance: f64,
) -> Result<KineticCrosscheck, EnergyError> {
    let trace_value = dirichlet_trace_route(&solution.state)?;
    let pohozaev1_value = dirichlet_pohozaev_route(&solution.state)?;
    let relative_gap = relative_defect(trace_value, pohozaev1_value);
    Ok(KineticCrosscheck {
        trace_value,
        pohozaev1_value,
        relative_gap,
        consistent: relative_gap <= tolerance,
        tolerance,
    })
}

/// Builds a pseudo-solution carrying arbitrary potential-trace data on a
/// flat surface; demonstrates that the crosscheck separates for data that
/// is not a steady wave.
pub fn flat_trace_state(
    grid: PeriodicGrid,
    trace: Vec<f64>,
    speed: f64,
) -> Result<WaveSolution, EnergyError> {
    use crate::solver::SolveStatus;
    if trace.len() != grid.n() {
        return Err(EnergyError::BadState("trace length mismatch".into()));
    }
    check_finite("potential trace", &trace)?;
    let state = SurfaceState::with_flat_surface_trace(grid, trace, speed);
    Ok(WaveSolution {
        params: WaveParameters {
            gravity: 1.0,
            surface_tension: 0.0,
            speed,
            depth: None,
            dimension: 2,
        },
        state,
        residual_norm: f64::INFINITY,
        newton_iterations: 0,
        amplitude: 0.0,
        status: SolveStatus::Converged,
        residual_history: Vec::new(),
        bernoulli_shift: 0.0,
    })
}
