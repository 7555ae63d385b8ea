//! Workbench CLI: solve steady solitary waves, audit their integral
//! identities, run refinement ladders and parameter sweeps, and exercise
//! the closed-form harmonic oracles.
//!
//! Exit codes: 0 success, 2 invalid input, 3 non-convergence, 4 internal.

mod config;
mod manifest;
mod pipeline;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{parse_ladder, resolve, FileConfig, Resolved};
use pipeline::{audit_solution, run_point};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use wavebench_core::oracle::{
    green_identity_audit, ManufacturedField, OracleResolution,
};
use wavebench_core::solver::{
    resample_solution, Formulation, SolveStatus, WaveParameters, WaveSolution,
};

/// Marker for usage-level failures (exit code 2).
#[derive(Debug)]
struct InvalidInput(anyhow::Error);

impl fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for InvalidInput {}

fn invalid<T>(err: anyhow::Error) -> Result<T> {
    Err(InvalidInput(err).into())
}

#[derive(Debug, Parser)]
#[command(name = "wavebench", version, about = "steady solitary-wave workbench")]
struct Cli {
    /// Configuration file (TOML); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for manifests and profiles.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Sample count N (even).
    #[arg(long = "N")]
    samples: Option<usize>,

    /// Half-period L; the domain is [-L, L).
    #[arg(long = "L")]
    half_length: Option<f64>,

    /// Newton tolerance (max-norm).
    #[arg(long)]
    tol: Option<f64>,

    /// Newton iteration cap.
    #[arg(long)]
    max_newton: Option<usize>,
}

#[derive(Debug, Args)]
struct DeepArgs {
    /// Gravitational acceleration g (g <= 0 enters the non-existence regime).
    #[arg(long = "g", allow_hyphen_values = true)]
    gravity: f64,

    /// Surface tension coefficient T >= 0.
    #[arg(long = "T", default_value_t = 0.0)]
    tension: f64,

    /// Wave speed c.
    #[arg(long = "c")]
    speed: f64,
}

#[derive(Debug, Args)]
struct FiniteArgs {
    /// Gravitational acceleration g.
    #[arg(long = "g", allow_hyphen_values = true)]
    gravity: f64,

    /// Fluid depth d > 0.
    #[arg(long = "d")]
    depth: f64,

    /// Crest elevation a (the continuation parameter).
    #[arg(long = "a")]
    crest: f64,

    /// Surface tension coefficient T >= 0.
    #[arg(long = "T", default_value_t = 0.0)]
    tension: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one steady wave and persist manifest + profile.
    Solve {
        #[command(subcommand)]
        problem: SolveProblem,
    },
    /// Recompute every audit from a persisted manifest + profile.
    Audit {
        manifest: PathBuf,

        /// Write the audit JSON here as well as to stdout.
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
    /// Run a refinement ladder and report residual-vs-resolution series.
    Converge {
        #[command(subcommand)]
        problem: ConvergeProblem,
    },
    /// Fan out over a parameter list; one manifest per point.
    Sweep {
        #[command(subcommand)]
        problem: SweepProblem,
    },
    /// Closed-form harmonic-field audits, independent of any solver.
    Oracle {
        #[command(subcommand)]
        kind: OracleKind,
    },
}

#[derive(Debug, Subcommand)]
enum SolveProblem {
    /// Deep-water capillary-gravity wave at fixed speed.
    Deep {
        #[command(flatten)]
        physics: DeepArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Finite-depth wave at fixed crest elevation.
    Finite {
        #[command(flatten)]
        physics: FiniteArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Subcommand)]
enum ConvergeProblem {
    Deep {
        #[command(flatten)]
        physics: DeepArgs,
        /// Ladder rungs NxL, comma separated: 512x40,1024x40,2048x40.
        /// Falls back to the config file's ladder.
        #[arg(long)]
        ladder: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
    Finite {
        #[command(flatten)]
        physics: FiniteArgs,
        #[arg(long)]
        ladder: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Subcommand)]
enum SweepProblem {
    Deep {
        /// Speeds to solve, comma separated.
        #[arg(long = "c-list")]
        speeds: String,
        #[arg(long = "g", allow_hyphen_values = true)]
        gravity: f64,
        #[arg(long = "T", default_value_t = 0.0)]
        tension: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    Finite {
        /// Crest elevations to solve, comma separated.
        #[arg(long = "a-list")]
        crests: String,
        #[arg(long = "g", allow_hyphen_values = true)]
        gravity: f64,
        #[arg(long = "d")]
        depth: f64,
        #[arg(long = "T", default_value_t = 0.0)]
        tension: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Subcommand)]
enum OracleKind {
    /// Green-identity audit of a manufactured field on the half-space.
    Green {
        /// Field kind: pole2d, source3d or nonharmonic.
        #[arg(long)]
        field: String,

        /// Field strength.
        #[arg(long = "s", default_value_t = 1.0)]
        strength: f64,

        /// Singularity height above the surface.
        #[arg(long = "a", default_value_t = 1.0)]
        height: f64,

        /// Truncation radius.
        #[arg(long = "R", default_value_t = 100.0)]
        radius: f64,

        #[arg(long)]
        radial: Option<usize>,
        #[arg(long)]
        angular: Option<usize>,
        #[arg(long)]
        azimuthal: Option<usize>,

        /// Write the report here as well as to stdout.
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            if err.is::<InvalidInput>() {
                eprintln!("error: {err}");
                ExitCode::from(2)
            } else {
                eprintln!("internal error: {err:#}");
                ExitCode::from(4)
            }
        }
    }
}

fn status_code(status: SolveStatus) -> ExitCode {
    if status.is_usable() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    let file = match FileConfig::load(cli.config.as_deref()) {
        Ok(f) => f,
        Err(e) => return invalid(e),
    };
    match cli.command {
        Command::Solve { problem } => cmd_solve(problem, &file, cli.out),
        Command::Audit { manifest, out_file } => cmd_audit(&manifest, out_file.as_deref()),
        Command::Converge { problem } => cmd_converge(problem, &file, cli.out),
        Command::Sweep { problem } => cmd_sweep(problem, &file, cli.out),
        Command::Oracle { kind } => cmd_oracle(kind),
    }
}

fn resolve_or_usage(
    file: &FileConfig,
    grid: &GridArgs,
    out: Option<PathBuf>,
    ladder: Option<Vec<(usize, f64)>>,
) -> Result<Resolved> {
    match resolve(
        file,
        grid.samples,
        grid.half_length,
        grid.tol,
        grid.max_newton,
        out,
        ladder,
    ) {
        Ok(r) => Ok(r),
        Err(e) => invalid(e),
    }
}

fn deep_params(physics: &DeepArgs) -> Result<WaveParameters> {
    let params = WaveParameters {
        gravity: physics.gravity,
        surface_tension: physics.tension,
        speed: physics.speed,
        depth: None,
        dimension: 2,
    };
    if let Err(e) = params.validate() {
        return invalid(anyhow!(e));
    }
    Ok(params)
}

fn finite_params(physics: &FiniteArgs) -> Result<(WaveParameters, f64)> {
    let params = WaveParameters {
        gravity: physics.gravity,
        surface_tension: physics.tension,
        speed: (physics.gravity.max(0.0) * (physics.depth + physics.crest)).sqrt(),
        depth: Some(physics.depth),
        dimension: 2,
    };
    if let Err(e) = params.validate() {
        return invalid(anyhow!(e));
    }
    if !(physics.crest > 0.0) || physics.crest / physics.depth > 0.4 {
        if params.gravity > 0.0 {
            return invalid(anyhow!(
                "crest must satisfy 0 < a/d <= 0.4, got a = {}, d = {}",
                physics.crest,
                physics.depth
            ));
        }
    }
    Ok((params, physics.crest))
}

fn cmd_solve(problem: SolveProblem, file: &FileConfig, out: Option<PathBuf>) -> Result<ExitCode> {
    let (formulation, params, crest, resolved) = match &problem {
        SolveProblem::Deep { physics, grid } => {
            let resolved = resolve_or_usage(file, grid, out, None)?;
            (Formulation::Deep, deep_params(physics)?, None, resolved)
        }
        SolveProblem::Finite { physics, grid } => {
            let resolved = resolve_or_usage(file, grid, out, None)?;
            let (params, crest) = finite_params(physics)?;
            (Formulation::Finite, params, Some(crest), resolved)
        }
    };
    let out_dir = resolved.out_dir.clone();
    let outcome = run_point(formulation, &params, crest, &resolved, &out_dir)?;
    println!("{}", outcome.manifest.summary_line());
    println!("manifest: {}", outcome.manifest_path.display());
    Ok(status_code(outcome.solution.status))
}

fn cmd_audit(path: &std::path::Path, out_file: Option<&std::path::Path>) -> Result<ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return invalid(anyhow!("reading manifest {}: {e}", path.display())),
    };
    let parsed: manifest::RunManifest = match serde_json::from_str(&text) {
        Ok(m) => m,
        Err(e) => return invalid(anyhow!("parsing manifest {}: {e}", path.display())),
    };
    let solution = match manifest::reconstruct_solution(&parsed, path) {
        Ok(s) => s,
        Err(e) => return invalid(e),
    };
    let audits = audit_solution(&solution, solution.status.is_usable())?;

    #[derive(Serialize)]
    struct AuditOutput<'a> {
        schema: &'a str,
        source_manifest: String,
        #[serde(flatten)]
        audits: &'a pipeline::AuditBundle,
    }
    let mut json = serde_json::to_string_pretty(&AuditOutput {
        schema: "wavebench/audit/v1",
        source_manifest: path.display().to_string(),
        audits: &audits,
    })?;
    json.push('\n');
    print!("{json}");
    if let Some(dest) = out_file {
        manifest::write_atomic(dest, &json)?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct ConvergeRung {
    samples: usize,
    half_length: f64,
    status: SolveStatus,
    residual_norm: f64,
    identity_residual: f64,
    amplitude: f64,
    speed: f64,
    spectral_decay: f64,
}

#[derive(Debug, Serialize)]
struct ConvergeReport {
    schema: &'static str,
    formulation: Formulation,
    parameters: WaveParameters,
    rungs: Vec<ConvergeRung>,
    /// Identity residual non-increasing along the ladder (round-off floor
    /// 1e-9 relative).
    identity_monotone: bool,
    /// Relative amplitude drift across rungs that double the half-length.
    l_doubling_drift: Vec<f64>,
    failed_rung: Option<usize>,
}

fn cmd_converge(
    problem: ConvergeProblem,
    file: &FileConfig,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let (formulation, params, crest, ladder, resolved) = match &problem {
        ConvergeProblem::Deep { physics, ladder, grid } => {
            let flag_rungs = match ladder.as_deref().map(parse_ladder).transpose() {
                Ok(l) => l,
                Err(e) => return invalid(e),
            };
            let resolved = resolve_or_usage(file, grid, out, flag_rungs)?;
            let rungs = resolved.ladder.clone();
            (Formulation::Deep, deep_params(physics)?, None, rungs, resolved)
        }
        ConvergeProblem::Finite { physics, ladder, grid } => {
            let flag_rungs = match ladder.as_deref().map(parse_ladder).transpose() {
                Ok(l) => l,
                Err(e) => return invalid(e),
            };
            let resolved = resolve_or_usage(file, grid, out, flag_rungs)?;
            let rungs = resolved.ladder.clone();
            let (params, crest) = finite_params(physics)?;
            (Formulation::Finite, params, Some(crest), rungs, resolved)
        }
    };
    if ladder.len() < 3 {
        return invalid(anyhow!("ladder needs at least 3 rungs, got {}", ladder.len()));
    }

    let mut rungs = Vec::new();
    let mut previous: Option<WaveSolution> = None;
    let mut failed = None;
    for (idx, &(n, l)) in ladder.iter().enumerate() {
        let grid = wavebench_core::spectral::PeriodicGrid::new(n, l)?;
        let solution = match &previous {
            None => {
                let rung_resolved = Resolved { samples: n, half_length: l, ..resolved.clone() };
                let guess = pipeline::build_guess(formulation, &params, crest, &grid)?;
                wavebench_core::solver::solve_steady(
                    formulation,
                    &params,
                    &rung_resolved.solver,
                    &guess,
                )?
            }
            Some(prev) => resample_solution(prev, &grid, formulation, &resolved.solver)?,
        };
        let audits = audit_solution(&solution, false)?;
        rungs.push(ConvergeRung {
            samples: n,
            half_length: l,
            status: solution.status,
            residual_norm: solution.residual_norm,
            identity_residual: audits.identity.relative_residual,
            amplitude: solution.amplitude,
            speed: solution.params.speed,
            spectral_decay: solution.state.spectral_decay(),
        });
        if !solution.status.is_usable() {
            failed = Some(idx);
            break;
        }
        previous = Some(solution);
    }

    let floor = 1e-9;
    let identity_monotone = rungs
        .windows(2)
        .all(|w| w[1].identity_residual <= w[0].identity_residual || w[1].identity_residual <= floor);
    let mut l_doubling_drift = Vec::new();
    for w in rungs.windows(2) {
        if (w[1].half_length - 2.0 * w[0].half_length).abs() < 1e-12 {
            let drift = (w[1].amplitude - w[0].amplitude).abs()
                / w[0].amplitude.abs().max(1e-300);
            l_doubling_drift.push(drift);
        }
    }

    let report = ConvergeReport {
        schema: "wavebench/converge/v1",
        formulation,
        parameters: params,
        rungs,
        identity_monotone,
        l_doubling_drift,
        failed_rung: failed,
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    print!("{json}");
    let dest = resolved.out_dir.join(format!(
        "converge_{}.json",
        manifest::run_basename(formulation, &params, crest)
    ));
    manifest::write_atomic(&dest, &json)?;
    eprintln!("report: {}", dest.display());
    Ok(if failed.is_none() { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {v:?} in list"))
        })
        .collect()
}

fn cmd_sweep(problem: SweepProblem, file: &FileConfig, out: Option<PathBuf>) -> Result<ExitCode> {
    #[derive(Serialize)]
    struct SweepPoint {
        value: f64,
        status: SolveStatus,
        manifest: String,
        identity_residual: f64,
    }

    let (points, formulation): (Vec<(WaveParameters, Option<f64>, f64)>, Formulation) =
        match &problem {
            SweepProblem::Deep { speeds, gravity, tension, .. } => {
                let list = match parse_list(speeds) {
                    Ok(l) => l,
                    Err(e) => return invalid(e),
                };
                (
                    list.into_iter()
                        .map(|c| {
                            (
                                WaveParameters {
                                    gravity: *gravity,
                                    surface_tension: *tension,
                                    speed: c,
                                    depth: None,
                                    dimension: 2,
                                },
                                None,
                                c,
                            )
                        })
                        .collect(),
                    Formulation::Deep,
                )
            }
            SweepProblem::Finite { crests, gravity, depth, tension, .. } => {
                let list = match parse_list(crests) {
                    Ok(l) => l,
                    Err(e) => return invalid(e),
                };
                (
                    list.into_iter()
                        .map(|a| {
                            (
                                WaveParameters {
                                    gravity: *gravity,
                                    surface_tension: *tension,
                                    speed: (gravity.max(0.0) * (depth + a)).sqrt(),
                                    depth: Some(*depth),
                                    dimension: 2,
                                },
                                Some(a),
                                a,
                            )
                        })
                        .collect(),
                    Formulation::Finite,
                )
            }
        };
    let grid = match &problem {
        SweepProblem::Deep { grid, .. } | SweepProblem::Finite { grid, .. } => grid,
    };
    let resolved = resolve_or_usage(file, grid, out, None)?;
    for (params, _, _) in &points {
        if let Err(e) = params.validate() {
            return invalid(anyhow!(e));
        }
    }

    let out_dir = resolved.out_dir.clone();
    let results: Vec<Result<SweepPoint>> = points
        .par_iter()
        .map(|(params, crest, value)| {
            let outcome = run_point(formulation, params, *crest, &resolved, &out_dir)?;
            Ok(SweepPoint {
                value: *value,
                status: outcome.solution.status,
                manifest: outcome.manifest_path.display().to_string(),
                identity_residual: outcome.manifest.identity.relative_residual,
            })
        })
        .collect();

    let mut any_failed = false;
    let mut summary = Vec::new();
    for r in results {
        match r {
            Ok(point) => {
                any_failed |= !matches!(
                    point.status,
                    SolveStatus::Converged | SolveStatus::TrivialByPolicy
                );
                summary.push(point);
            }
            Err(e) => return Err(e),
        }
    }
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    print!("{json}");
    Ok(if any_failed { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

fn cmd_oracle(kind: OracleKind) -> Result<ExitCode> {
    match kind {
        OracleKind::Green {
            field,
            strength,
            height,
            radius,
            radial,
            angular,
            azimuthal,
            out_file,
        } => {
            let field = match field.as_str() {
                "pole2d" => ManufacturedField::pole2d(strength, height),
                "source3d" => ManufacturedField::source3d(strength, height),
                "nonharmonic" => ManufacturedField::nonharmonic(),
                other => {
                    return invalid(anyhow!(
                        "unknown field kind {other:?}; expected pole2d, source3d or nonharmonic"
                    ))
                }
            };
            let mut res = OracleResolution::default();
            if let Some(r) = radial {
                res.radial = r;
            }
            if let Some(a) = angular {
                res.angular = a;
            }
            if let Some(a) = azimuthal {
                res.azimuthal = a;
            }
            let report = match green_identity_audit(&field, radius, &res) {
                Ok(r) => r,
                Err(e) => return invalid(anyhow!(e)),
            };
            let mut json = serde_json::to_string_pretty(&report)?;
            json.push('\n');
            print!("{json}");
            if let Some(dest) = out_file {
                manifest::write_atomic(&dest, &json)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
