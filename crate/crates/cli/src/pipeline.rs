//! Solve-and-audit pipeline shared by the solve, converge and sweep
//! commands, and the audit recomputation used by `audit`.

use crate::config::Resolved;
use crate::manifest::{
    manifest_paths, profile_csv, run_basename, solution_summary, write_atomic, DiscretizationEcho,
    RunManifest, Timestamps, MANIFEST_SCHEMA,
};
use anyhow::{Context, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};
use wavebench_core::audit::{
    corollary_verdict, identity_residual, proof_terms, IdentityRegime, IdentityReport, TermReport,
    Verdict,
};
use wavebench_core::energy::{energy_report, kinetic_crosscheck, EnergyReport, KineticCrosscheck};
use wavebench_core::solver::{
    initial_guess, physical_residual, solve_steady, Formulation, GuessKind, ResidualReport,
    ResidualSampling, SurfaceState, WaveParameters, WaveSolution,
};
use wavebench_core::spectral::PeriodicGrid;

/// Verdict tolerance on the Dirichlet integral of a trivial candidate.
pub const VERDICT_TOL: f64 = 1e-9;
/// Crosscheck tolerance between the two Dirichlet reductions.
pub const CROSSCHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct AuditBundle {
    pub energy: EnergyReport,
    pub identity: IdentityReport,
    pub terms: Option<TermReport>,
    pub verdict: Option<Verdict>,
    pub kinetic_crosscheck: KineticCrosscheck,
    pub physical_residual: Option<ResidualReport>,
}

/// Recomputes every audit of a solution candidate.
pub fn audit_solution(solution: &WaveSolution, with_physical: bool) -> Result<AuditBundle> {
    let energy = energy_report(solution)?;
    let identity = identity_residual(&energy, &solution.params)?;
    let terms = if solution.status.is_usable() && solution.params.dimension == 2 {
        Some(proof_terms(solution)?)
    } else {
        None
    };
    let verdict = if identity.regime == IdentityRegime::DeepNoTension {
        Some(corollary_verdict(&identity, &energy, VERDICT_TOL)?)
    } else {
        None
    };
    let crosscheck = kinetic_crosscheck(solution, CROSSCHECK_TOL)?;
    let physical = if with_physical {
        Some(physical_residual(solution, &ResidualSampling::default())?)
    } else {
        None
    };
    Ok(AuditBundle {
        energy,
        identity,
        terms,
        verdict,
        kinetic_crosscheck: crosscheck,
        physical_residual: physical,
    })
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// Builds the seed state for a solve request.
pub fn build_guess(
    formulation: Formulation,
    params: &WaveParameters,
    crest: Option<f64>,
    grid: &PeriodicGrid,
) -> Result<SurfaceState> {
    match formulation {
        Formulation::Finite => {
            let amplitude =
                crest.context("finite-depth solves need a crest amplitude (--a)")?;
            Ok(initial_guess(GuessKind::Kdv { amplitude }, params, grid)?)
        }
        Formulation::Deep => {
            if params.gravity > 0.0 && params.surface_tension > 0.0 {
                let (c_min, _) =
                    wavebench_core::solver::min_speed_deep(params)?;
                if params.speed < c_min {
                    return Ok(initial_guess(
                        GuessKind::Wavepacket { speed: params.speed },
                        params,
                        grid,
                    )?);
                }
            }
            // no localized seed exists: start from the flat state
            Ok(SurfaceState::trivial(grid.clone(), None, params.speed))
        }
    }
}

pub struct RunOutcome {
    pub solution: WaveSolution,
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

/// Direct Newton from the standard seed; when that stalls on a nontrivial
/// target, walk there by natural-parameter continuation from an easier
/// point on the same branch.
pub fn solve_with_fallback(
    formulation: Formulation,
    params: &WaveParameters,
    crest: Option<f64>,
    resolved: &Resolved,
    grid: &PeriodicGrid,
) -> Result<WaveSolution> {
    use wavebench_core::solver::{continue_branch, ContinuationDriver};

    let guess = build_guess(formulation, params, crest, grid)?;
    let direct = solve_steady(formulation, params, &resolved.solver, &guess)?;
    if direct.status.is_usable() {
        return Ok(direct);
    }
    let branch = match formulation {
        Formulation::Finite => {
            let target = crest.context("finite fallback needs a crest")?;
            let start_crest = target / 4.0;
            let start_guess = build_guess(formulation, params, Some(start_crest), grid)?;
            let start = solve_steady(formulation, params, &resolved.solver, &start_guess)?;
            if !start.status.is_usable() {
                return Ok(direct);
            }
            continue_branch(
                &start,
                ContinuationDriver::Amplitude,
                target,
                &resolved.continuation,
                &resolved.solver,
            )?
        }
        Formulation::Deep => {
            if !(params.gravity > 0.0 && params.surface_tension > 0.0) {
                return Ok(direct);
            }
            let (c_min, _) = wavebench_core::solver::min_speed_deep(params)?;
            if !(params.speed < c_min) {
                return Ok(direct);
            }
            // begin closer to the bifurcation point, where the wave is small
            let c_start = params.speed + 0.75 * (c_min - params.speed);
            let start_params = WaveParameters { speed: c_start, ..*params };
            let start_guess = build_guess(formulation, &start_params, None, grid)?;
            let start = solve_steady(formulation, &start_params, &resolved.solver, &start_guess)?;
            if !start.status.is_usable() {
                return Ok(direct);
            }
            continue_branch(
                &start,
                ContinuationDriver::Speed,
                params.speed,
                &resolved.continuation,
                &resolved.solver,
            )?
        }
    };
    let last = branch.solutions.last().expect("branch keeps its start");
    if branch.status == wavebench_core::solver::BranchStatus::Completed
        && last.status.is_usable()
    {
        Ok(last.clone())
    } else {
        Ok(direct)
    }
}

/// Solve, audit, persist: one parameter point end to end.
pub fn run_point(
    formulation: Formulation,
    params: &WaveParameters,
    crest: Option<f64>,
    resolved: &Resolved,
    out_dir: &Path,
) -> Result<RunOutcome> {
    let grid = PeriodicGrid::new(resolved.samples, resolved.half_length)?;
    let solution = solve_with_fallback(formulation, params, crest, resolved, &grid)?;
    let audits = audit_solution(&solution, solution.status.is_usable())?;

    let base = run_basename(formulation, params, crest);
    let (manifest_path, profile_path, profile_name) =
        manifest_paths(out_dir, &base, resolved.samples, resolved.half_length);

    let manifest = RunManifest {
        schema: MANIFEST_SCHEMA.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamps: Timestamps { created_unix_ms: now_ms() },
        formulation,
        parameters: *params,
        discretization: DiscretizationEcho {
            samples: resolved.samples,
            half_length: resolved.half_length,
            tol: resolved.solver.tol,
            max_newton: resolved.solver.max_newton,
        },
        solution: solution_summary(&solution),
        energy: audits.energy.clone(),
        identity: audits.identity.clone(),
        terms: audits.terms.clone(),
        verdict: audits.verdict.clone(),
        physical_residual: audits.physical_residual.clone(),
        profile: profile_name,
    };

    write_atomic(&profile_path, &profile_csv(&solution))?;
    let mut manifest_json = serde_json::to_string_pretty(&manifest)?;
    manifest_json.push('\n');
    write_atomic(&manifest_path, &manifest_json)?;

    Ok(RunOutcome { solution, manifest, manifest_path })
}
