//! Newton iteration on the conformal steady equations.
//!
//! The unknowns are the cosine coefficients of the (even) elevation, so
//! symmetry is exact by construction and the linearized operator has
//! closed-form columns: differentiation and the conjugation operator are
//! diagonal on the cosine/sine pair. The Jacobian is assembled densely and
//! factored by partial-pivoting LU.
//!
//! Deep water solves for the coefficients at fixed speed. Finite depth
//! fixes the crest elevation instead, adds the speed as an unknown, and
//! substitutes the conformal depth `h = d + mean(y)`, which matches the
//! mean physical depth to `d` identically.

use super::{
    conjugation_symbol, Formulation, SolveStatus, SolverConfig, SolverError, SurfaceState,
    WaveParameters, WaveSolution,
};
use crate::spectral::{self, PeriodicGrid};
use faer::linalg::solvers::Solve;
use faer::Mat;
use rustfft::num_complex::Complex;

/// Cosine-basis bookkeeping for the even subspace of a periodic grid.
struct EvenBasis {
    n: usize,
    /// Number of cosine modes, `N/2 + 1`.
    modes: usize,
    /// Wavenumbers `pi m / L`.
    k: Vec<f64>,
    cos_tab: Vec<f64>,
    sin_tab: Vec<f64>,
}

impl EvenBasis {
    fn new(grid: &PeriodicGrid) -> Self {
        let n = grid.n();
        let modes = n / 2 + 1;
        let k = (0..modes).map(|m| grid.wavenumber(m)).collect();
        let mut cos_tab = vec![0.0; n];
        let mut sin_tab = vec![0.0; n];
        for r in 0..n {
            let th = 2.0 * std::f64::consts::PI * r as f64 / n as f64;
            cos_tab[r] = th.cos();
            sin_tab[r] = th.sin();
        }
        Self { n, modes, k, cos_tab, sin_tab }
    }

    /// Full-grid index of half-grid point `i` (at `xi = i * spacing`).
    fn full_index(&self, i: usize) -> usize {
        (self.n / 2 + i) % self.n
    }
}

/// Projects full-grid samples onto the cosine basis about `xi = 0`;
/// any odd component is discarded.
fn coeffs_from_values(grid: &PeriodicGrid, y: &[f64]) -> Vec<f64> {
    let n = grid.n();
    let spec = spectral::fft_real(y);
    let mut coeffs = vec![0.0; n / 2 + 1];
    let nf = n as f64;
    coeffs[0] = spec[0].re / nf;
    for (m, c) in coeffs.iter_mut().enumerate().take(n / 2).skip(1) {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        *c = 2.0 * sign * spec[m].re / nf;
    }
    let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    coeffs[n / 2] = sign * spec[n / 2].re / nf;
    coeffs
}

fn values_from_coeffs(basis: &EvenBasis, coeffs: &[f64]) -> Vec<f64> {
    let n = basis.n;
    let half = n / 2;
    let mut y = vec![0.0; n];
    for i in 0..=half {
        let mut acc = 0.0;
        let mut r = 0usize;
        for &c in coeffs {
            acc += c * basis.cos_tab[r];
            r += i;
            if r >= n {
                r -= n;
            }
        }
        y[(half + i) % n] = acc;
        y[half - i] = acc;
    }
    y
}

/// Everything the residual pipeline produces at one state; reused by the
/// Jacobian assembly at accepted iterates.
struct ResidualData {
    /// Bernoulli residual on the full grid.
    residual: Vec<f64>,
    y: Vec<f64>,
    y_xi: Vec<f64>,
    y_xixi: Vec<f64>,
    /// `x_xi - 1 = T[y_xi]`.
    ty: Vec<f64>,
    /// `x_xixi = T[y_xixi]`.
    tyxi: Vec<f64>,
    jacobian: Vec<f64>,
    /// Curvature `kappa` (zero vector when T = 0).
    kappa: Vec<f64>,
    min_j: f64,
}

fn bernoulli_residual(
    grid: &PeriodicGrid,
    y: Vec<f64>,
    depth: Option<f64>,
    speed: f64,
    gravity: f64,
    tension: f64,
    bernoulli_shift: f64,
    stretch: f64,
) -> ResidualData {
    let tsym = conjugation_symbol(depth);
    let y_xi = spectral::apply_symbol(grid, &y, |k| Complex::new(0.0, k));
    let ty = spectral::apply_symbol(grid, &y_xi, tsym);
    let y_xixi = spectral::apply_symbol(grid, &y_xi, |k| Complex::new(0.0, k));
    let tyxi = spectral::apply_symbol(grid, &y_xixi, tsym);
    let n = grid.n();

    // J - 1 assembled from perturbation parts: exactly 0 on the flat state
    let s1 = 1.0 + stretch;
    let s2 = 2.0 * stretch + stretch * stretch;
    let ty2 = spectral::product_dealiased(&ty, &ty);
    let yx2 = spectral::product_dealiased(&y_xi, &y_xi);
    let jm1: Vec<f64> = (0..n)
        .map(|j| s2 + 2.0 * s1 * ty[j] + ty2[j] + yx2[j])
        .collect();
    let jac: Vec<f64> = jm1.iter().map(|v| 1.0 + v).collect();
    let min_j = jac.iter().copied().fold(f64::INFINITY, f64::min);

    let kappa: Vec<f64> = if tension != 0.0 {
        let p1 = spectral::product_dealiased(&ty, &y_xixi);
        let p2 = spectral::product_dealiased(&y_xi, &tyxi);
        (0..n)
            .map(|j| (s1 * y_xixi[j] + p1[j] - p2[j]) / jac[j].powf(1.5))
            .collect()
    } else {
        vec![0.0; n]
    };

    let half_c2 = 0.5 * speed * speed;
    let residual: Vec<f64> = (0..n)
        .map(|j| {
            -half_c2 * jm1[j] / jac[j] + gravity * y[j] - tension * kappa[j] - bernoulli_shift
        })
        .collect();

    ResidualData { residual, y, y_xi, y_xixi, ty, tyxi, jacobian: jac, kappa, min_j }
}

/// Unknown layout of a solve. Both layouts carry the mean-stretch gauge
/// `b` closed by `x_xi(L) = 1`, which makes the far field an exactly
/// uniform stream at the carried speed and removes the O(1/L) return
/// current a periodized solitary wave otherwise drags along.
enum Unknowns {
    /// `[coefficients, b]`; fixed speed.
    Deep,
    /// `[coefficients, c, shift, b]`; crest and edge level pinned, the
    /// Bernoulli head freed, and `h (1 + b) = d + mean(y)` anchoring the
    /// flat bottom a depth `d` below the far-field surface level.
    Finite { depth: f64, crest: f64 },
}

struct System<'a> {
    grid: &'a PeriodicGrid,
    basis: &'a EvenBasis,
    params: &'a WaveParameters,
    unknowns: Unknowns,
}

impl System<'_> {
    fn dim(&self) -> usize {
        match self.unknowns {
            Unknowns::Deep => self.basis.modes + 1,
            Unknowns::Finite { .. } => self.basis.modes + 3,
        }
    }

    fn stretch_of(&self, u: &[f64]) -> f64 {
        match self.unknowns {
            Unknowns::Deep => u[self.basis.modes],
            Unknowns::Finite { .. } => u[self.basis.modes + 2],
        }
    }

    fn depth_of(&self, u: &[f64]) -> Option<f64> {
        match self.unknowns {
            Unknowns::Deep => None,
            Unknowns::Finite { depth, .. } => {
                Some((depth + u[0]) / (1.0 + self.stretch_of(u)))
            }
        }
    }

    fn speed_of(&self, u: &[f64]) -> f64 {
        match self.unknowns {
            Unknowns::Deep => self.params.speed,
            Unknowns::Finite { .. } => u[self.basis.modes],
        }
    }

    fn shift_of(&self, u: &[f64]) -> f64 {
        match self.unknowns {
            Unknowns::Deep => 0.0,
            Unknowns::Finite { .. } => u[self.basis.modes + 1],
        }
    }

    /// Returns `None` when the trial state is infeasible (folded surface
    /// or non-positive conformal depth), so the line search can reject it.
    fn evaluate(&self, u: &[f64]) -> Option<(Vec<f64>, ResidualData)> {
        let modes = self.basis.modes;
        let coeffs = &u[..modes];
        let stretch = self.stretch_of(u);
        if !(1.0 + stretch > 0.5) {
            return None;
        }
        let depth = self.depth_of(u);
        if let Some(h) = depth {
            if !(h > 0.0) {
                return None;
            }
        }
        let y = values_from_coeffs(self.basis, coeffs);
        let data = bernoulli_residual(
            self.grid,
            y,
            depth,
            self.speed_of(u),
            self.params.gravity,
            self.params.surface_tension,
            self.shift_of(u),
            stretch,
        );
        if !(data.min_j > 1e-10) || !data.residual.iter().all(|r| r.is_finite()) {
            return None;
        }
        let mut f = Vec::with_capacity(self.dim());
        for i in 0..modes {
            f.push(data.residual[self.basis.full_index(i)]);
        }
        if let Unknowns::Finite { crest, .. } = self.unknowns {
            // crest: y(0) = sum of coefficients; edge: y(L) = alternating sum
            let y0: f64 = coeffs.iter().sum();
            f.push(y0 - crest);
            let y_edge: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(m, &c)| if m % 2 == 0 { c } else { -c })
                .sum();
            f.push(y_edge);
        }
        // stretch closure: x_xi(L) = 1, i.e. b + T[y_xi](L) = 0
        f.push(stretch + data.ty[0]);
        Some((f, data))
    }

    fn assemble_jacobian(&self, u: &[f64], data: &ResidualData) -> Mat<f64> {
        let modes = self.basis.modes;
        let dim = self.dim();
        let n = self.basis.n;
        let c = self.speed_of(u);
        let t = self.params.surface_tension;
        let stretch = self.stretch_of(u);
        let depth = self.depth_of(u);

        // pointwise coefficient fields on the half grid
        let mut w_j = vec![0.0; modes];
        let mut a1 = vec![0.0; modes];
        let mut a2 = vec![0.0; modes];
        let mut a3 = vec![0.0; modes];
        let mut a4 = vec![0.0; modes];
        for i in 0..modes {
            let j = self.basis.full_index(i);
            let jac = data.jacobian[j];
            let x_xi = 1.0 + stretch + data.ty[j];
            let tj = t / jac.powf(1.5);
            let w = -0.5 * c * c / (jac * jac) + 1.5 * t * data.kappa[j] / jac;
            w_j[i] = w;
            a1[i] = 2.0 * w * data.y_xi[j] + tj * data.tyxi[j];
            a2[i] = -tj * x_xi;
            a3[i] = 2.0 * w * x_xi - tj * data.y_xixi[j];
            a4[i] = tj * data.y_xi[j];
        }

        let tau: Vec<f64> = (0..modes)
            .map(|m| {
                if m == 0 {
                    0.0
                } else {
                    match depth {
                        None => 1.0,
                        Some(h) => {
                            let e = (-2.0 * self.basis.k[m] * h).exp();
                            (1.0 + e) / (1.0 - e)
                        }
                    }
                }
            })
            .collect();

        let g = self.params.gravity;
        let mut mat = Mat::<f64>::zeros(dim, dim);
        let nyquist = modes - 1;
        // coefficient columns: closed-form mode responses
        for m in 0..modes {
            let km = self.basis.k[m];
            // the discrete derivative zeroes the Nyquist mode
            let (km_eff, km2_eff) = if m == nyquist { (0.0, 0.0) } else { (km, km * km) };
            let tm = tau[m];
            let mut r = 0usize;
            for i in 0..modes {
                let ct = self.basis.cos_tab[r];
                let st = self.basis.sin_tab[r];
                mat[(i, m)] = g * ct - a1[i] * km_eff * st - a2[i] * km2_eff * ct
                    + a3[i] * km_eff * tm * ct
                    - a4[i] * km2_eff * tm * st;
                r += m;
                if r >= n {
                    r -= n;
                }
            }
            // stretch-closure row: edge response of T[dy_xi]
            let edge_sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            mat[(dim - 1, m)] = km_eff * tm * edge_sign;
        }

        // direction (dx_xi, dx_xixi) -> Bernoulli rows
        let push_map_column = |mat: &mut Mat<f64>, col: usize, dx_xi: &dyn Fn(usize) -> f64,
                               dx_xixi: &dyn Fn(usize) -> f64| {
            for i in 0..modes {
                let j = self.basis.full_index(i);
                let jac = data.jacobian[j];
                let x_xi = 1.0 + stretch + data.ty[j];
                let tj = t / jac.powf(1.5);
                mat[(i, col)] += w_j[i].mul_add(2.0 * x_xi * dx_xi(j), 0.0)
                    - tj * (dx_xi(j) * data.y_xixi[j] - data.y_xi[j] * dx_xixi(j));
            }
        };

        match self.unknowns {
            Unknowns::Deep => {
                // stretch column: dx_xi = 1 uniformly
                let b_col = modes;
                push_map_column(&mut mat, b_col, &|_| 1.0, &|_| 0.0);
                mat[(dim - 1, b_col)] = 1.0;
            }
            Unknowns::Finite { .. } => {
                let h = depth.expect("finite system has a depth");
                let s1 = 1.0 + stretch;
                let dtdh = move |k: f64| {
                    if k == 0.0 {
                        return Complex::new(0.0, 0.0);
                    }
                    let e = (-(k * h).abs()).exp();
                    let csch = 2.0 * e / (1.0 - e * e);
                    Complex::new(0.0, k * csch * csch)
                };
                let da = spectral::apply_symbol(self.grid, &data.y_xi, dtdh);
                let db = spectral::apply_symbol(self.grid, &data.y_xixi, dtdh);
                let edge = 0usize;

                // h = (d + c0) / (1 + b): chain through the mean mode
                let dh_dc0 = 1.0 / s1;
                push_map_column(
                    &mut mat,
                    0,
                    &|j| da[j] * dh_dc0,
                    &|j| db[j] * dh_dc0,
                );
                mat[(dim - 1, 0)] += da[edge] * dh_dc0;

                // speed and Bernoulli-head columns
                let c_col = modes;
                let shift_col = modes + 1;
                for i in 0..modes {
                    let j = self.basis.full_index(i);
                    mat[(i, c_col)] = c * (1.0 / data.jacobian[j] - 1.0);
                    mat[(i, shift_col)] = -1.0;
                }

                // stretch column, including its effect on h
                let b_col = modes + 2;
                let dh_db = -h / s1;
                push_map_column(
                    &mut mat,
                    b_col,
                    &|j| 1.0 + da[j] * dh_db,
                    &|j| db[j] * dh_db,
                );
                mat[(dim - 1, b_col)] = 1.0 + da[edge] * dh_db;

                // crest row y(0) and edge row y(L)
                for m in 0..modes {
                    mat[(modes, m)] = 1.0;
                    mat[(modes + 1, m)] = if m % 2 == 0 { 1.0 } else { -1.0 };
                }
            }
        }
        mat
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

fn trivial_solution(
    params: &WaveParameters,
    grid: &PeriodicGrid,
    depth: Option<f64>,
    status: SolveStatus,
) -> WaveSolution {
    WaveSolution {
        params: *params,
        state: SurfaceState::trivial(grid.clone(), depth, params.speed),
        residual_norm: 0.0,
        newton_iterations: 0,
        amplitude: 0.0,
        status,
        residual_history: vec![0.0],
        bernoulli_shift: 0.0,
    }
}

/// Newton iteration with backtracking line search on the conformal steady
/// equations.
///
/// Non-convergence is not an error: the returned solution carries the last
/// iterate, the residual history and a status distinguishing stalls from a
/// singular Jacobian (fold). Hard errors are reserved for invalid input.
/// At `g <= 0` the solver refuses to iterate and returns the flat state
/// with [`SolveStatus::TrivialByPolicy`]: the identities force triviality
/// there, so iteration could only manufacture a spurious candidate.
pub fn solve_steady(
    formulation: Formulation,
    params: &WaveParameters,
    config: &SolverConfig,
    guess: &SurfaceState,
) -> Result<WaveSolution, SolverError> {
    params.validate()?;
    config.validate()?;
    if params.dimension != 2 {
        return Err(SolverError::InvalidParameters(
            "steady solves are two-dimensional (n = 2)".into(),
        ));
    }
    let grid = guess.grid().clone();

    if params.gravity <= 0.0 {
        let depth = match formulation {
            Formulation::Deep => None,
            Formulation::Finite => params.depth,
        };
        return Ok(trivial_solution(params, &grid, depth, SolveStatus::TrivialByPolicy));
    }

    let basis = EvenBasis::new(&grid);
    let unknowns = match formulation {
        Formulation::Deep => {
            if params.depth.is_some() {
                return Err(SolverError::InvalidParameters(
                    "deep formulation with finite depth parameter".into(),
                ));
            }
            Unknowns::Deep
        }
        Formulation::Finite => {
            let depth = params.depth.ok_or_else(|| {
                SolverError::InvalidParameters("finite formulation requires depth".into())
            })?;
            Unknowns::Finite { depth, crest: guess.crest() }
        }
    };
    let system = System { grid: &grid, basis: &basis, params, unknowns };

    let mut u = coeffs_from_values(&grid, guess.elevation());
    if let Unknowns::Finite { .. } = system.unknowns {
        u.push(guess.speed());
        u.push(0.0);
    }
    u.push(guess.mean_stretch());

    let (mut f, mut data) = system
        .evaluate(&u)
        .ok_or(SolverError::DegenerateSurface { min_jacobian: 0.0 })?;
    let mut norm = max_norm(&f);
    let mut history = vec![norm];
    let mut status = SolveStatus::MaxIterationsExceeded;
    let mut iterations = 0;

    for iter in 0..config.max_newton {
        if norm <= config.tol {
            status = SolveStatus::Converged;
            break;
        }
        iterations = iter + 1;
        let mat = system.assemble_jacobian(&u, &data);
        let dim = system.dim();
        let mut rhs = Mat::<f64>::zeros(dim, 1);
        for (i, &fi) in f.iter().enumerate() {
            rhs[(i, 0)] = -fi;
        }
        let lu = mat.partial_piv_lu();
        let step = lu.solve(&rhs);
        // singularity check: the LU solve must actually invert the matrix
        let mut ok = true;
        let mut residual_check = 0.0f64;
        let mut step_scale = 0.0f64;
        for i in 0..dim {
            if !step[(i, 0)].is_finite() {
                ok = false;
                break;
            }
            step_scale = step_scale.max(step[(i, 0)].abs());
            let mut acc = 0.0;
            for j in 0..dim {
                acc += mat[(i, j)] * step[(j, 0)];
            }
            residual_check = residual_check.max((acc - rhs[(i, 0)]).abs());
        }
        if !ok || residual_check > 1e-6 * (norm + step_scale).max(1.0) {
            status = SolveStatus::SingularJacobian;
            break;
        }

        let mut accepted = false;
        let mut scale = 1.0;
        for _ in 0..=config.max_backtracks {
            let trial: Vec<f64> =
                u.iter().enumerate().map(|(j, &v)| v + scale * step[(j, 0)]).collect();
            if let Some((tf, tdata)) = system.evaluate(&trial) {
                let tnorm = max_norm(&tf);
                if tnorm < norm {
                    u = trial;
                    f = tf;
                    data = tdata;
                    norm = tnorm;
                    accepted = true;
                    break;
                }
            }
            scale *= config.backtrack;
        }
        history.push(norm);
        if !accepted {
            status = SolveStatus::LineSearchStall;
            break;
        }
    }
    if norm <= config.tol {
        status = SolveStatus::Converged;
    }

    let depth = system.depth_of(&u);
    let speed = system.speed_of(&u);
    let bernoulli_shift = system.shift_of(&u);
    let state = SurfaceState::build(grid, data.y.clone(), depth, speed)?;
    let amplitude = state.amplitude();
    Ok(WaveSolution {
        params: WaveParameters { speed, ..*params },
        state,
        residual_norm: norm,
        newton_iterations: iterations,
        amplitude,
        status,
        residual_history: history,
        bernoulli_shift,
    })
}

/// Evaluates the discrete steady-equation residual of an arbitrary state,
/// in max-norm. Exactly zero on the trivial state.
pub fn steady_residual_norm(
    state: &SurfaceState,
    params: &WaveParameters,
    bernoulli_shift: f64,
) -> f64 {
    let data = bernoulli_residual(
        state.grid(),
        state.elevation().to_vec(),
        state.conformal_depth(),
        state.speed(),
        params.gravity,
        params.surface_tension,
        bernoulli_shift,
        state.mean_stretch(),
    );
    max_norm(&data.residual)
}
