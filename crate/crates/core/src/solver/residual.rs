//! Independent physical-variables validation of computed waves.
//!
//! The solver works entirely in conformal variables; nothing here trusts
//! that formulation. The velocity field is reconstructed from the stored
//! potential trace by extension multipliers, and the kinematic and dynamic
//! boundary conditions are evaluated pointwise in physical variables, with
//! an interior finite-difference Laplacian check and tail diagnostics.

use super::{conjugate_trace_symbol, SolverError, WaveSolution};
use crate::spectral::{self, MultiplierSymbol, PeriodicGrid};
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Where the interior harmonicity check samples the bulk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualSampling {
    /// Depth fractions in (0, 1) of the sampling levels, relative to the
    /// conformal depth (finite) or to a tenth of the half-period (deep).
    pub interior_fractions: Vec<f64>,
}

impl Default for ResidualSampling {
    fn default() -> Self {
        Self { interior_fractions: vec![0.15, 0.4, 0.7] }
    }
}

/// Max-norm defects of the steady free-surface system in physical form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `phi_y - (phi_x - c) eta_x` at the surface.
    pub kinematic_defect: f64,
    /// `|grad phi|^2/2 - c phi_x + g eta - T kappa` at the surface.
    pub bernoulli_defect: f64,
    /// Five-point finite-difference Laplacian of the reconstructed bulk
    /// potential at the sampled levels (step = one grid spacing).
    pub harmonicity_defect: f64,
    /// Field magnitude at the domain edges.
    pub decay_defect: f64,
}

/// Evaluates the physical-form residuals of a solution candidate.
///
/// Works from the potential trace and surface geometry alone; the
/// conjugate trace is re-derived from the potential (not taken from the
/// state), so a sign error anywhere in the conformal plumbing shows up as
/// a kinematic or Bernoulli defect here.
pub fn physical_residual(
    solution: &WaveSolution,
    sampling: &ResidualSampling,
) -> Result<ResidualReport, SolverError> {
    let state = &solution.state;
    let grid = state.grid();
    let n = grid.n();
    let params = &solution.params;

    let min_j = state.jacobian().iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_j > 0.0) {
        return Err(SolverError::DegenerateSurface { min_jacobian: min_j });
    }
    for &f in &sampling.interior_fractions {
        if !(f > 0.0 && f < 1.0) {
            return Err(SolverError::InvalidParameters(format!(
                "interior sampling fraction must lie in (0, 1), got {f}"
            )));
        }
    }

    let depth = state.conformal_depth();
    let c = params.speed;

    // the decaying-frame trace splits into a periodic part plus a linear
    // piece c*b*xi whose spectral derivative is the constant slope
    let phi_per = state.phi_trace_periodic();
    let slope = state.phi_trace_slope();

    // conjugate trace re-derived from the potential, not taken from the
    // state; the linear piece pairs with c*b*zeta, flat along the surface
    let psi = spectral::apply_symbol(grid, &phi_per, conjugate_trace_symbol(depth));
    let phi_xi: Vec<f64> = spectral::derivative(grid, &phi_per)?
        .iter()
        .map(|v| v + slope)
        .collect();
    let psi_xi = spectral::derivative(grid, &psi)?;

    let x_xi = state.x_xi();
    let y_xi = state.y_xi();
    let jac = state.jacobian();

    // complex velocity: phi_x - i phi_y = (phi_xi + i psi_xi) / (x_xi + i y_xi)
    let mut phi_x = vec![0.0; n];
    let mut phi_y = vec![0.0; n];
    for j in 0..n {
        phi_x[j] = (phi_xi[j] * x_xi[j] + psi_xi[j] * y_xi[j]) / jac[j];
        phi_y[j] = (phi_xi[j] * y_xi[j] - psi_xi[j] * x_xi[j]) / jac[j];
    }

    // surface slope and curvature in physical variables
    let eta_x: Vec<f64> = (0..n).map(|j| y_xi[j] / x_xi[j]).collect();
    let eta_x_xi = spectral::derivative(grid, &eta_x)?;
    let y = state.elevation();
    let g = params.gravity;
    let t = params.surface_tension;

    let mut kinematic_defect = 0.0f64;
    let mut bernoulli_defect = 0.0f64;
    for j in 0..n {
        let kin = phi_y[j] - (phi_x[j] - c) * eta_x[j];
        kinematic_defect = kinematic_defect.max(kin.abs());
        let eta_xx = eta_x_xi[j] / x_xi[j];
        let kappa = eta_xx / (1.0 + eta_x[j] * eta_x[j]).powf(1.5);
        let bern = 0.5 * (phi_x[j] * phi_x[j] + phi_y[j] * phi_y[j]) - c * phi_x[j]
            + g * y[j]
            - t * kappa;
        bernoulli_defect = bernoulli_defect.max(bern.abs());
    }

    let harmonicity_defect =
        harmonicity_check(grid, &phi_per, slope, depth, &sampling.interior_fractions)?;

    // decay at the domain edges (2% window around |xi| = L): elevation and
    // perturbation velocity, the quantities required to vanish at infinity
    let window = (n / 50).max(1);
    let mut decay_defect = 0.0f64;
    for j in (0..window).chain(n - window..n) {
        decay_defect = decay_defect
            .max(y[j].abs())
            .max(phi_x[j].abs())
            .max(phi_y[j].abs());
    }

    Ok(ResidualReport { kinematic_defect, bernoulli_defect, harmonicity_defect, decay_defect })
}

/// Five-point FD Laplacian of the extended potential in conformal
/// coordinates (harmonicity is conformally invariant). The step equals the
/// grid spacing, so the check tightens under refinement.
fn harmonicity_check(
    grid: &PeriodicGrid,
    phi_per: &[f64],
    slope: f64,
    depth: Option<f64>,
    fractions: &[f64],
) -> Result<f64, SolverError> {
    let delta = grid.spacing();
    let h_eff = match depth {
        Some(h) => h,
        None => grid.half_length() / 10.0,
    };
    // the linear piece c*b*xi is harmonic with an exactly-zero five-point
    // Laplacian, so only the periodic part needs extending
    let _ = slope;
    let extend = |level: f64| -> Vec<f64> {
        let sym = match depth {
            Some(h) => MultiplierSymbol::StripExtension { depth: h, level },
            None => MultiplierSymbol::HalfPlaneExtension { level },
        };
        spectral::apply_symbol(grid, phi_per, |k| sym.eval(k))
    };
    let shift = |samples: &[f64], offset: f64| -> Vec<f64> {
        spectral::apply_symbol(grid, samples, |k| {
            Complex::new((k * offset).cos(), (k * offset).sin())
        })
    };

    let mut worst = 0.0f64;
    for &frac in fractions {
        let mut zeta = -frac * h_eff;
        // keep the vertical stencil inside the fluid layer
        zeta = zeta.min(-2.0 * delta);
        if let Some(h) = depth {
            zeta = zeta.max(-h + 2.0 * delta);
        }
        if zeta + delta > 0.0 {
            continue;
        }
        let center = extend(zeta);
        let north = extend(zeta + delta);
        let south = extend(zeta - delta);
        let east = shift(&center, delta);
        let west = shift(&center, -delta);
        for j in 0..grid.n() {
            let lap = (north[j] + south[j] + east[j] + west[j] - 4.0 * center[j])
                / (delta * delta);
            worst = worst.max(lap.abs());
        }
    }
    Ok(worst)
}

/// Re-evaluates the physical residual on a copy of `solution` whose
/// elevation is perturbed; used by sensitivity tests.
#[cfg(test)]
pub(crate) fn perturbed_solution(
    solution: &WaveSolution,
    bump: impl Fn(f64) -> f64,
) -> Result<WaveSolution, SolverError> {
    let state = &solution.state;
    let y: Vec<f64> = state
        .elevation()
        .iter()
        .zip(state.grid().nodes())
        .map(|(&v, &xi)| v + bump(xi))
        .collect();
    let new_state = super::SurfaceState::build(
        state.grid().clone(),
        y,
        state.conformal_depth(),
        state.speed(),
    )?;
    Ok(WaveSolution {
        params: solution.params,
        state: new_state,
        residual_norm: solution.residual_norm,
        newton_iterations: solution.newton_iterations,
        amplitude: solution.amplitude,
        status: solution.status,
        residual_history: solution.residual_history.clone(),
        bernoulli_shift: solution.bernoulli_shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{
        initial_guess, solve_steady, Formulation, GuessKind, SolveStatus, SolverConfig,
        SurfaceState, WaveParameters,
    };

    fn finite_params(g: f64, d: f64) -> WaveParameters {
        WaveParameters {
            gravity: g,
            surface_tension: 0.0,
            speed: 0.0,
            depth: Some(d),
            dimension: 2,
        }
    }

    #[test]
    fn trivial_solution_has_tiny_defects() {
        let grid = PeriodicGrid::new(256, 40.0).unwrap();
        let params = finite_params(1.0, 1.0);
        let sol = WaveSolution {
            params,
            state: SurfaceState::trivial(grid, Some(1.0), 1.0),
            residual_norm: 0.0,
            newton_iterations: 0,
            amplitude: 0.0,
            status: SolveStatus::Converged,
            residual_history: vec![0.0],
            bernoulli_shift: 0.0,
        };
        let rep = physical_residual(&sol, &ResidualSampling::default()).unwrap();
        assert!(rep.kinematic_defect <= 1e-12);
        assert!(rep.bernoulli_defect <= 1e-12);
        assert!(rep.harmonicity_defect <= 1e-12);
        assert!(rep.decay_defect <= 1e-12);
    }

    #[test]
    fn converged_finite_wave_passes_physical_check() {
        let grid = PeriodicGrid::new(2048, 40.0).unwrap();
        let params = finite_params(1.0, 1.0);
        let guess = initial_guess(GuessKind::Kdv { amplitude: 0.1 }, &params, &grid).unwrap();
        let sol =
            solve_steady(Formulation::Finite, &params, &SolverConfig::default(), &guess).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged);
        let rep = physical_residual(&sol, &ResidualSampling::default()).unwrap();
        assert!(rep.kinematic_defect <= 1e-8, "kinematic {}", rep.kinematic_defect);
        assert!(rep.bernoulli_defect <= 1e-8, "bernoulli {}", rep.bernoulli_defect);
    }

    #[test]
    fn corrupted_solution_is_detected() {
        let grid = PeriodicGrid::new(1024, 40.0).unwrap();
        let params = finite_params(1.0, 1.0);
        let guess = initial_guess(GuessKind::Kdv { amplitude: 0.1 }, &params, &grid).unwrap();
        let sol =
            solve_steady(Formulation::Finite, &params, &SolverConfig::default(), &guess).unwrap();
        // smooth 1e-3 bump near the crest
        let bad = perturbed_solution(&sol, |xi| 1e-3 * (-(xi * xi)).exp()).unwrap();
        let rep = physical_residual(&bad, &ResidualSampling::default()).unwrap();
        assert!(rep.bernoulli_defect >= 1e-4, "bernoulli {}", rep.bernoulli_defect);
    }

    #[test]
    fn sampling_fractions_are_validated() {
        let grid = PeriodicGrid::new(128, 40.0).unwrap();
        let params = finite_params(1.0, 1.0);
        let sol = WaveSolution {
            params,
            state: SurfaceState::trivial(grid, Some(1.0), 1.0),
            residual_norm: 0.0,
            newton_iterations: 0,
            amplitude: 0.0,
            status: SolveStatus::Converged,
            residual_history: vec![0.0],
            bernoulli_shift: 0.0,
        };
        let bad = ResidualSampling { interior_fractions: vec![1.5] };
        assert!(physical_residual(&sol, &bad).is_err());
    }
}
