//! Natural-parameter continuation along wave families.

use super::{
    min_speed_deep, solve_steady, Formulation, SolveStatus, SolverConfig, SolverError,
    SurfaceState, WaveParameters, WaveSolution,
};
use crate::spectral::{self, PeriodicGrid};
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Which scalar the branch marches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContinuationDriver {
    /// Crest elevation of a finite-depth wave.
    Amplitude,
    /// Wave speed of a deep-water wave.
    Speed,
    /// Surface tension of a deep-water wave, holding `c / c_min(T)` fixed.
    TensionAtFixedSpeedRatio,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContinuationConfig {
    pub steps: usize,
    /// Step halving stops once the step falls below this fraction of the
    /// nominal step.
    pub step_floor: f64,
    /// Amplitude below which a nontrivial target counts as collapsed.
    pub trivial_amplitude: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self { steps: 10, step_floor: 1.0 / 64.0, trivial_amplitude: 1e-10 }
    }
}

/// Termination of a continuation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchStatus {
    Completed,
    /// Singular Jacobian encountered.
    Fold,
    CollapsedToTrivial,
    StepUnderflow,
}

/// A traversed branch with per-step diagnostics.
#[derive(Debug, Clone)]
pub struct Branch {
    pub solutions: Vec<WaveSolution>,
    pub parameter_values: Vec<f64>,
    pub status: BranchStatus,
}

fn driver_value(driver: ContinuationDriver, solution: &WaveSolution) -> f64 {
    match driver {
        ContinuationDriver::Amplitude => solution.state.crest(),
        ContinuationDriver::Speed => solution.params.speed,
        ContinuationDriver::TensionAtFixedSpeedRatio => solution.params.surface_tension,
    }
}

/// Marches from `start` to `target` in the driver parameter with step
/// halving on failure, warm-starting each solve from the previous wave.
pub fn continue_branch(
    start: &WaveSolution,
    driver: ContinuationDriver,
    target: f64,
    config: &ContinuationConfig,
    solver_config: &SolverConfig,
) -> Result<Branch, SolverError> {
    if !start.status.is_usable() {
        return Err(SolverError::InvalidParameters(
            "continuation must start from a converged solution".into(),
        ));
    }
    let mut solutions = vec![start.clone()];
    let mut parameter_values = vec![driver_value(driver, start)];
    if config.steps == 0 {
        return Ok(Branch { solutions, parameter_values, status: BranchStatus::Completed });
    }

    let p_start = driver_value(driver, start);
    let nominal = (target - p_start) / config.steps as f64;
    if nominal == 0.0 {
        return Ok(Branch { solutions, parameter_values, status: BranchStatus::Completed });
    }
    let min_step = config.step_floor * nominal.abs();

    let mut current = start.clone();
    let mut p = p_start;
    let mut step = nominal;
    let mut status = BranchStatus::Completed;

    while (target - p).abs() > 1e-14 * (1.0 + target.abs()) {
        // do not overshoot the target
        if (p + step - p_start).abs() > (target - p_start).abs() {
            step = target - p;
        }
        let p_next = p + step;
        match attempt_step(&current, driver, p_next, solver_config) {
            Ok(sol) if sol.status == SolveStatus::Converged => {
                let collapsed = sol.amplitude < config.trivial_amplitude
                    && driver_target_is_nontrivial(driver, p_next);
                p = p_next;
                parameter_values.push(p);
                current = sol.clone();
                solutions.push(sol);
                if collapsed {
                    status = BranchStatus::CollapsedToTrivial;
                    break;
                }
            }
            outcome => {
                if let Ok(sol) = &outcome {
                    if sol.status == SolveStatus::SingularJacobian {
                        status = BranchStatus::Fold;
                        break;
                    }
                }
                step *= 0.5;
                if step.abs() < min_step {
                    status = BranchStatus::StepUnderflow;
                    break;
                }
            }
        }
    }
    Ok(Branch { solutions, parameter_values, status })
}

fn driver_target_is_nontrivial(driver: ContinuationDriver, value: f64) -> bool {
    match driver {
        ContinuationDriver::Amplitude => value.abs() > 0.0,
        // a nontrivial wave is the goal at any speed/tension
        ContinuationDriver::Speed | ContinuationDriver::TensionAtFixedSpeedRatio => true,
    }
}

fn attempt_step(
    prev: &WaveSolution,
    driver: ContinuationDriver,
    value: f64,
    solver_config: &SolverConfig,
) -> Result<WaveSolution, SolverError> {
    let grid = prev.state.grid().clone();
    match driver {
        ContinuationDriver::Amplitude => {
            let params = prev.params;
            let crest_prev = prev.state.crest();
            let scale = if crest_prev.abs() > 1e-14 { value / crest_prev } else { 0.0 };
            let y: Vec<f64> = prev.state.elevation().iter().map(|v| v * scale).collect();
            let d = params.depth.ok_or_else(|| {
                SolverError::InvalidParameters("amplitude driver requires finite depth".into())
            })?;
            let h0 = d + spectral::mean(&y);
            let guess = SurfaceState::build(grid, y, Some(h0), prev.params.speed)?;
            solve_steady(Formulation::Finite, &params, solver_config, &guess)
        }
        ContinuationDriver::Speed => {
            let params = WaveParameters { speed: value, ..prev.params };
            let guess = SurfaceState::build(grid, prev.state.elevation().to_vec(), None, value)?;
            solve_steady(Formulation::Deep, &params, solver_config, &guess)
        }
        ContinuationDriver::TensionAtFixedSpeedRatio => {
            let (c_min_old, _) = min_speed_deep(&prev.params)?;
            let ratio = prev.params.speed / c_min_old;
            let probe = WaveParameters { surface_tension: value, ..prev.params };
            let (c_min_new, _) = min_speed_deep(&probe)?;
            let c_new = ratio * c_min_new;
            let params =
                WaveParameters { surface_tension: value, speed: c_new, ..prev.params };
            let guess = SurfaceState::build(grid, prev.state.elevation().to_vec(), None, c_new)?;
            solve_steady(Formulation::Deep, &params, solver_config, &guess)
        }
    }
}

/// Re-solves `solution` on `new_grid`, warm-started from the trigonometric
/// interpolant of the old elevation. Same half-length uses exact spectral
/// padding; a changed half-length falls back to direct Fourier summation.
pub fn resample_solution(
    solution: &WaveSolution,
    new_grid: &PeriodicGrid,
    formulation: Formulation,
    solver_config: &SolverConfig,
) -> Result<WaveSolution, SolverError> {
    if solution.status == SolveStatus::TrivialByPolicy {
        return solve_steady(
            formulation,
            &solution.params,
            solver_config,
            &SurfaceState::trivial(
                new_grid.clone(),
                solution.state.conformal_depth(),
                solution.params.speed,
            ),
        );
    }
    let y = resample_samples(solution.state.grid(), solution.state.elevation(), new_grid);
    let depth = match formulation {
        Formulation::Deep => None,
        Formulation::Finite => {
            let d = solution.params.depth.ok_or_else(|| {
                SolverError::InvalidParameters("finite resample requires depth".into())
            })?;
            Some(d + spectral::mean(&y))
        }
    };
    let guess = SurfaceState::build(new_grid.clone(), y, depth, solution.params.speed)?;
    solve_steady(formulation, &solution.params, solver_config, &guess)
}

/// Evaluates the trig interpolant of `samples` at the nodes of `new_grid`.
/// Nodes beyond the old half-period map to the old edge value rather than
/// the wrapped periodic copy, so enlarging the domain extends a localized
/// wave by its own tail level instead of duplicating it.
pub(crate) fn resample_samples(
    old_grid: &PeriodicGrid,
    samples: &[f64],
    new_grid: &PeriodicGrid,
) -> Vec<f64> {
    let n_old = old_grid.n();
    let l_old = old_grid.half_length();
    let spec = spectral::fft_real(samples);
    let scale = 1.0 / n_old as f64;
    let edge_value = samples[0];
    new_grid
        .nodes()
        .iter()
        .map(|&xi| {
            if xi.abs() >= l_old {
                return edge_value;
            }
            let mut acc = spec[0].re * scale;
            for m in 1..n_old / 2 {
                let k = old_grid.wavenumber(m);
                // bin m carries exp(i k (xi + L)): fold the (-1)^m phase in
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let phase = Complex::new(0.0, k * xi).exp();
                acc += 2.0 * sign * (spec[m] * phase).re * scale;
            }
            // Nyquist kept real
            let m_nyq = n_old / 2;
            let sign = if m_nyq % 2 == 0 { 1.0 } else { -1.0 };
            let k_nyq = std::f64::consts::PI * m_nyq as f64 / l_old;
            acc += sign * spec[m_nyq].re * (k_nyq * xi).cos() * scale;
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{initial_guess as guess_fn, GuessKind};
    use approx::assert_abs_diff_eq;

    fn finite_params(g: f64, d: f64) -> WaveParameters {
        WaveParameters {
            gravity: g,
            surface_tension: 0.0,
            speed: 0.0,
            depth: Some(d),
            dimension: 2,
        }
    }

    fn small_finite_wave() -> WaveSolution {
        let grid = PeriodicGrid::new(512, 40.0).unwrap();
        let params = finite_params(1.0, 1.0);
        let guess = guess_fn(GuessKind::Kdv { amplitude: 0.1 }, &params, &grid).unwrap();
        solve_steady(Formulation::Finite, &params, &SolverConfig::default(), &guess).unwrap()
    }

    #[test]
    fn zero_steps_returns_start() {
        let start = small_finite_wave();
        let cfg = ContinuationConfig { steps: 0, ..Default::default() };
        let branch = continue_branch(
            &start,
            ContinuationDriver::Amplitude,
            0.3,
            &cfg,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(branch.status, BranchStatus::Completed);
        assert_eq!(branch.solutions.len(), 1);
        assert_abs_diff_eq!(branch.solutions[0].state.crest(), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn amplitude_branch_reaches_target() {
        let start = small_finite_wave();
        let cfg = ContinuationConfig { steps: 4, ..Default::default() };
        let branch = continue_branch(
            &start,
            ContinuationDriver::Amplitude,
            0.3,
            &cfg,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(branch.status, BranchStatus::Completed);
        let last = branch.solutions.last().unwrap();
        assert_eq!(last.status, SolveStatus::Converged);
        assert_abs_diff_eq!(last.state.crest(), 0.3, epsilon = 1e-10);
        // speed grows with amplitude along the branch
        for w in branch.solutions.windows(2) {
            assert!(w[1].params.speed > w[0].params.speed);
        }
    }

    #[test]
    fn resample_preserves_wave_within_roundoff() {
        let start = small_finite_wave();
        let fine = PeriodicGrid::new(1024, 40.0).unwrap();
        let resolved =
            resample_solution(&start, &fine, Formulation::Finite, &SolverConfig::default())
                .unwrap();
        assert_eq!(resolved.status, SolveStatus::Converged);
        assert!((resolved.params.speed - start.params.speed).abs() <= 1e-9);
        assert_abs_diff_eq!(resolved.state.crest(), 0.1, epsilon = 1e-10);
    }
}
