//! Fully nonlinear steady solitary waves in conformal variables.
//!
//! The free surface is parametrized by the conformal abscissa `xi`; the
//! surface elevation `y(xi)` is the unknown. The tangential map derivative
//! is `x_xi = 1 + T[y_xi]` where `T` is the Hilbert transform (infinite
//! depth) or the strip conjugation of symbol `-i coth(k h)` (conformal
//! depth `h`), and the steady Bernoulli condition becomes
//! `(c^2/2)(1/J - 1) + g y - T_st kappa = 0` with `J = x_xi^2 + y_xi^2`.
//! Correctness of this plumbing is never assumed: `physical_residual`
//! re-checks the kinematic and dynamic conditions in physical variables.

mod continuation;
mod guess;
mod newton;
mod residual;

pub use continuation::{
    continue_branch, resample_solution, Branch, BranchStatus, ContinuationConfig,
    ContinuationDriver,
};
pub use guess::{initial_guess, GuessKind};
pub use newton::{solve_steady, steady_residual_norm};
pub use residual::{physical_residual, ResidualReport, ResidualSampling};

use crate::spectral::{self, PeriodicGrid, SpectralError};
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("surface is degenerate: min J = {min_jacobian}")]
    DegenerateSurface { min_jacobian: f64 },
    #[error("initial guess out of range: {0}")]
    GuessOutOfRange(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Physical constants of a steady-wave problem.
///
/// `gravity` may be non-positive (the non-existence regime); solvers then
/// refuse to iterate. `depth = None` means infinite depth. `dimension` is
/// 2 for everything the solvers produce; 3 occurs only in coefficient
/// arithmetic and manufactured audits.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WaveParameters {
    pub gravity: f64,
    pub surface_tension: f64,
    pub speed: f64,
    pub depth: Option<f64>,
    pub dimension: usize,
}

impl WaveParameters {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !self.gravity.is_finite() || !self.speed.is_finite() {
            return Err(SolverError::InvalidParameters("non-finite g or c".into()));
        }
        if !(self.surface_tension >= 0.0) {
            return Err(SolverError::InvalidParameters(format!(
                "surface tension must be >= 0, got {}",
                self.surface_tension
            )));
        }
        if let Some(d) = self.depth {
            if !(d > 0.0) || !d.is_finite() {
                return Err(SolverError::InvalidParameters(format!(
                    "depth must be positive, got {d}"
                )));
            }
        }
        if self.dimension != 2 && self.dimension != 3 {
            return Err(SolverError::InvalidParameters(format!(
                "dimension must be 2 or 3, got {}",
                self.dimension
            )));
        }
        Ok(())
    }
}

/// Which steady formulation a solve runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formulation {
    /// Infinite depth, fixed wave speed; capillary-gravity.
    Deep,
    /// Finite depth, fixed crest elevation; speed and conformal depth are
    /// unknowns of the Newton system.
    Finite,
}

/// Discrete surface in conformal variables with derived trace data.
///
/// The map carries a mean-stretch gauge `x_xi = (1 + b) + T[y_xi]` with the
/// scalar `b` fixed by requiring unit stretch at the domain edge, so the far
/// field is a uniform stream at the carried (physical) speed and the
/// truncated problem keeps the infinite-domain Bernoulli constant.
#[derive(Debug, Clone)]
pub struct SurfaceState {
    grid: PeriodicGrid,
    /// Surface elevation at the grid nodes.
    y: Vec<f64>,
    /// Conformal strip depth; `None` for infinite depth.
    conformal_depth: Option<f64>,
    /// Wave speed used to build the traces.
    speed: f64,
    // derived
    mean_stretch: f64,
    x: Vec<f64>,
    x_xi: Vec<f64>,
    y_xi: Vec<f64>,
    jacobian: Vec<f64>,
    phi_trace: Vec<f64>,
    psi_trace: Vec<f64>,
}

/// Symbol of the conjugation operator `T`: `-i sgn(k)` for infinite depth,
/// `-i coth(k h)` on the strip; 0 at `k = 0`.
pub(crate) fn conjugation_symbol(depth: Option<f64>) -> impl Fn(f64) -> Complex<f64> + Copy {
    move |k: f64| {
        if k == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        match depth {
            None => Complex::new(0.0, -k.signum()),
            Some(h) => {
                let e = (-2.0 * (k * h).abs()).exp();
                let coth = (1.0 + e) / (1.0 - e) * k.signum();
                Complex::new(0.0, -coth)
            }
        }
    }
}

/// Symbol of the trace map `phi -> psi` for decaying (or Neumann-bottom)
/// harmonic conjugates: `i tanh(k h)`, degenerating to `i sgn(k)`.
pub(crate) fn conjugate_trace_symbol(depth: Option<f64>) -> impl Fn(f64) -> Complex<f64> + Copy {
    move |k: f64| {
        if k == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        match depth {
            None => Complex::new(0.0, k.signum()),
            Some(h) => Complex::new(0.0, (k * h).tanh()),
        }
    }
}

/// Symbol of the conformal Dirichlet-to-Neumann map `phi -> phi_zeta` at
/// the surface: `|k|` deep, `k tanh(k h)` on the strip.
pub(crate) fn dtn_symbol(depth: Option<f64>) -> impl Fn(f64) -> Complex<f64> + Copy {
    move |k: f64| match depth {
        None => Complex::new(k.abs(), 0.0),
        Some(h) => Complex::new(k * (k * h).tanh(), 0.0),
    }
}

impl SurfaceState {
    /// Builds a state from elevation samples, recomputing all derived data.
    /// Fails if the surface folds over (`J <= 0` somewhere).
    pub fn build(
        grid: PeriodicGrid,
        y: Vec<f64>,
        conformal_depth: Option<f64>,
        speed: f64,
    ) -> Result<Self, SolverError> {
        if y.len() != grid.n() {
            return Err(SpectralError::LengthMismatch { got: y.len(), want: grid.n() }.into());
        }
        if let Some(h) = conformal_depth {
            if !(h > 0.0) || !h.is_finite() {
                return Err(SolverError::InvalidParameters(format!(
                    "conformal depth must be positive, got {h}"
                )));
            }
        }
        let t = conjugation_symbol(conformal_depth);
        let y_xi = spectral::derivative(&grid, &y)?;
        let ty = spectral::apply_symbol(&grid, &y_xi, t);
        // edge-stretch closure: x_xi = 1 exactly at |xi| = L
        let mean_stretch = -ty[0];
        let x_xi: Vec<f64> = ty.iter().map(|v| 1.0 + mean_stretch + v).collect();
        let x_tilde = spectral::apply_symbol(&grid, &y, t);
        let x: Vec<f64> = grid
            .nodes()
            .iter()
            .zip(&x_tilde)
            .map(|(xi, xt)| (1.0 + mean_stretch) * xi + xt)
            .collect();
        let jacobian = jacobian_from_parts(mean_stretch, &ty, &y_xi);
        let min_j = jacobian.iter().copied().fold(f64::INFINITY, f64::min);
        // graph representability: the profile must stay single-valued
        let min_x_xi = x_xi.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min_j > 0.0) || !(min_x_xi > 0.0) {
            return Err(SolverError::DegenerateSurface { min_jacobian: min_j.min(min_x_xi) });
        }
        // decaying-frame potential trace c * (x - xi); its periodic part is
        // c * (b xi + T[y]) folded so spectral derivatives see no seam jump
        let phi_trace: Vec<f64> = x
            .iter()
            .zip(grid.nodes())
            .map(|(&xv, &xi)| speed * (xv - xi))
            .collect();
        let psi_trace: Vec<f64> = y.iter().map(|v| speed * v).collect();
        Ok(Self {
            grid,
            y,
            conformal_depth,
            speed,
            mean_stretch,
            x,
            x_xi,
            y_xi,
            jacobian,
            phi_trace,
            psi_trace,
        })
    }

    /// The flat state `y = 0` (with `phi = 0`), which solves the steady
    /// equations exactly for every parameter set.
    pub fn trivial(grid: PeriodicGrid, conformal_depth: Option<f64>, speed: f64) -> Self {
        let n = grid.n();
        let zeros = vec![0.0; n];
        let ones = vec![1.0; n];
        Self {
            x: grid.nodes().to_vec(),
            grid,
            y: zeros.clone(),
            conformal_depth,
            speed,
            mean_stretch: 0.0,
            x_xi: ones.clone(),
            y_xi: zeros.clone(),
            jacobian: ones,
            phi_trace: zeros.clone(),
            psi_trace: zeros,
        }
    }

    /// Flat state carrying prescribed potential-trace data; for audits
    /// that feed a non-solution trace through the energy machinery.
    pub fn with_flat_surface_trace(grid: PeriodicGrid, trace: Vec<f64>, speed: f64) -> Self {
        let mut state = Self::trivial(grid, None, speed);
        state.phi_trace = trace;
        state
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn elevation(&self) -> &[f64] {
        &self.y
    }

    pub fn conformal_depth(&self) -> Option<f64> {
        self.conformal_depth
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Physical horizontal coordinate `x(xi)`.
    pub fn x_physical(&self) -> &[f64] {
        &self.x
    }

    pub fn x_xi(&self) -> &[f64] {
        &self.x_xi
    }

    pub fn y_xi(&self) -> &[f64] {
        &self.y_xi
    }

    /// `J = x_xi^2 + y_xi^2`.
    pub fn jacobian(&self) -> &[f64] {
        &self.jacobian
    }

    /// Mean-stretch gauge scalar `b` of the conformal map.
    pub fn mean_stretch(&self) -> f64 {
        self.mean_stretch
    }

    /// Velocity-potential trace `c (x - xi)` in the decaying frame. Not
    /// periodic: it tends to equal-and-opposite constants at the edges;
    /// spectral work must use [`SurfaceState::phi_trace_periodic`] plus the
    /// linear slope `c * b`.
    pub fn phi_trace(&self) -> &[f64] {
        &self.phi_trace
    }

    /// Periodic part of the potential trace, `phi - c b xi`.
    pub fn phi_trace_periodic(&self) -> Vec<f64> {
        let cb = self.speed * self.mean_stretch;
        self.phi_trace
            .iter()
            .zip(self.grid.nodes())
            .map(|(&p, &xi)| p - cb * xi)
            .collect()
    }

    /// Slope `c b` of the linear part of the potential trace.
    pub fn phi_trace_slope(&self) -> f64 {
        self.speed * self.mean_stretch
    }

    /// Stream-function trace `c y`.
    pub fn psi_trace(&self) -> &[f64] {
        &self.psi_trace
    }

    /// `max y - min y`.
    pub fn amplitude(&self) -> f64 {
        let max = self.y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.y.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// Elevation at the center node `xi = 0`.
    pub fn crest(&self) -> f64 {
        self.y[self.grid.n() / 2]
    }

    /// `|y|` at the domain edge, the truncation-tail diagnostic.
    pub fn tail_elevation(&self) -> f64 {
        self.y[0].abs()
    }

    /// Resolution certificate for the elevation samples.
    pub fn spectral_decay(&self) -> f64 {
        spectral::spectral_decay_ratio(&self.grid, &self.y)
    }
}

/// `J = (1 + b + ty)^2 + y_xi^2` assembled from the perturbation parts with
/// dealiased squares, so the trivial state gives exactly 1.
pub(crate) fn jacobian_from_parts(stretch: f64, ty: &[f64], y_xi: &[f64]) -> Vec<f64> {
    let ty2 = spectral::product_dealiased(ty, ty);
    let yx2 = spectral::product_dealiased(y_xi, y_xi);
    let s1 = 1.0 + stretch;
    (0..ty.len())
        .map(|j| 1.0 + (2.0 * stretch + stretch * stretch) + 2.0 * s1 * ty[j] + ty2[j] + yx2[j])
        .collect()
}

/// How a solve terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    /// `g <= 0`: the solver refuses to iterate and returns the flat state.
    TrivialByPolicy,
    MaxIterationsExceeded,
    /// Newton matrix numerically singular (fold indicator).
    SingularJacobian,
    /// Line search could not reduce the residual.
    LineSearchStall,
}

impl SolveStatus {
    pub fn is_usable(&self) -> bool {
        matches!(self, SolveStatus::Converged | SolveStatus::TrivialByPolicy)
    }
}

/// A discrete steady-wave candidate plus solver diagnostics.
#[derive(Debug, Clone)]
pub struct WaveSolution {
    pub params: WaveParameters,
    pub state: SurfaceState,
    pub residual_norm: f64,
    pub newton_iterations: usize,
    pub amplitude: f64,
    pub status: SolveStatus,
    pub residual_history: Vec<f64>,
    /// Bernoulli-head correction `B - c^2/2` of the truncated problem
    /// (finite depth only; solver diagnostic, vanishing as `L` grows).
    pub bernoulli_shift: f64,
}

/// Newton-solver knobs; the defaults reproduce every documented run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Max-norm tolerance on the discrete steady equations.
    pub tol: f64,
    pub max_newton: usize,
    /// Backtracking factor of the line search.
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-11, max_newton: 50, backtrack: 0.5, max_backtracks: 24 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol > 0.0) {
            return Err(SolverError::InvalidParameters("tol must be positive".into()));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(SolverError::InvalidParameters(
                "backtrack factor must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Linear phase speed `c(k)` of infinitesimal waves.
///
/// Deep water: `sqrt(g/k + T k)`; finite depth multiplies the squared
/// speed by `tanh(k d)`.
pub fn linear_speed(k: f64, params: &WaveParameters) -> Result<f64, SolverError> {
    params.validate()?;
    if !(k > 0.0) {
        return Err(SolverError::InvalidParameters(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    let c2 = (params.gravity / k + params.surface_tension * k)
        * params.depth.map_or(1.0, |d| (k * d).tanh());
    if c2 < 0.0 {
        return Err(SolverError::InvalidParameters(format!(
            "no real linear wave at k = {k} for g = {}, T = {}",
            params.gravity, params.surface_tension
        )));
    }
    Ok(c2.sqrt())
}

/// Minimum of `c(k)` over `k > 0` for deep capillary-gravity waves,
/// attained at `k = sqrt(g/T)`: returns `(c_min, k_min)`.
pub fn min_speed_deep(params: &WaveParameters) -> Result<(f64, f64), SolverError> {
    params.validate()?;
    if params.depth.is_some() {
        return Err(SolverError::InvalidParameters(
            "c_min is defined here for infinite depth only".into(),
        ));
    }
    if !(params.gravity > 0.0) || !(params.surface_tension > 0.0) {
        return Err(SolverError::InvalidParameters(
            "c_min needs g > 0 and T > 0".into(),
        ));
    }
    let k_min = (params.gravity / params.surface_tension).sqrt();
    let c_min = (2.0 * (params.gravity * params.surface_tension).sqrt()).sqrt();
    Ok((c_min, k_min))
}
