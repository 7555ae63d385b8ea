//! Run manifests and profile files.
//!
//! A manifest plus its profile CSV is self-contained: the audit command
//! rebuilds the surface state from them alone and reproduces every report
//! byte-for-byte. Timestamps live in their own object so determinism
//! checks can exclude them; all other serialization is deterministic.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use wavebench_core::audit::{IdentityReport, TermReport, Verdict};
use wavebench_core::energy::EnergyReport;
use wavebench_core::solver::{
    Formulation, ResidualReport, SolveStatus, SurfaceState, WaveParameters, WaveSolution,
};
use wavebench_core::spectral::PeriodicGrid;

pub const MANIFEST_SCHEMA: &str = "wavebench/manifest/v1";
pub const PROFILE_HEADER: &str = "xi,x,y,phi_trace,psi_trace";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timestamps {
    pub created_unix_ms: u128,
}

/// Echo of the discretization actually used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscretizationEcho {
    pub samples: usize,
    pub half_length: f64,
    pub tol: f64,
    pub max_newton: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub status: SolveStatus,
    pub residual_norm: f64,
    pub newton_iterations: usize,
    pub amplitude: f64,
    pub crest: f64,
    pub speed: f64,
    pub conformal_depth: Option<f64>,
    pub mean_stretch: f64,
    pub bernoulli_shift: f64,
    pub tail_elevation: f64,
    pub spectral_decay: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub timestamps: Timestamps,
    pub formulation: Formulation,
    pub parameters: WaveParameters,
    pub discretization: DiscretizationEcho,
    pub solution: SolutionSummary,
    pub energy: EnergyReport,
    pub identity: IdentityReport,
    pub terms: Option<TermReport>,
    pub verdict: Option<Verdict>,
    pub physical_residual: Option<ResidualReport>,
    /// Profile CSV file name, relative to the manifest.
    pub profile: String,
}

impl RunManifest {
    pub fn summary_line(&self) -> String {
        format!(
            "{:?} status={:?} residual={:.3e} c={:.12} amplitude={:.6e} identity_residual={:.3e}",
            self.formulation,
            self.solution.status,
            self.solution.residual_norm,
            self.solution.speed,
            self.solution.amplitude,
            self.identity.relative_residual,
        )
    }
}

pub fn solution_summary(solution: &WaveSolution) -> SolutionSummary {
    SolutionSummary {
        status: solution.status,
        residual_norm: solution.residual_norm,
        newton_iterations: solution.newton_iterations,
        amplitude: solution.amplitude,
        crest: solution.state.crest(),
        speed: solution.params.speed,
        conformal_depth: solution.state.conformal_depth(),
        mean_stretch: solution.state.mean_stretch(),
        bernoulli_shift: solution.bernoulli_shift,
        tail_elevation: solution.state.tail_elevation(),
        spectral_decay: solution.state.spectral_decay(),
    }
}

/// Writes `content` atomically: a temporary sibling is renamed over the
/// target so concurrent sweep points never observe partial files.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating output directory {}", parent.display()))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Serializes the surface profile with shortest round-trip float text, so
/// a re-audit reads back bit-identical samples.
pub fn profile_csv(solution: &WaveSolution) -> String {
    let state = &solution.state;
    let grid = state.grid();
    let mut out = String::with_capacity(grid.n() * 96);
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for j in 0..grid.n() {
        out.push_str(&format!(
            "{:?},{:?},{:?},{:?},{:?}\n",
            grid.nodes()[j],
            state.x_physical()[j],
            state.elevation()[j],
            state.phi_trace()[j],
            state.psi_trace()[j],
        ));
    }
    out
}

/// Reads a profile CSV back into `(xi, x, y, phi, psi)` columns.
pub fn read_profile(path: &Path) -> Result<Vec<[f64; 5]>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading profile {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == PROFILE_HEADER => {}
        other => bail!("unexpected profile header {other:?}"),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut row = [0.0; 5];
        let mut fields = line.split(',');
        for slot in &mut row {
            let field = fields
                .next()
                .with_context(|| format!("profile row {} is short", idx + 2))?;
            *slot = field
                .parse()
                .with_context(|| format!("bad float {field:?} in profile row {}", idx + 2))?;
        }
        if fields.next().is_some() {
            bail!("profile row {} has extra fields", idx + 2);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Rebuilds the discrete solution recorded by a manifest + profile pair.
pub fn reconstruct_solution(manifest: &RunManifest, manifest_path: &Path) -> Result<WaveSolution> {
    if manifest.schema != MANIFEST_SCHEMA {
        bail!("unsupported manifest schema {:?}", manifest.schema);
    }
    let profile_path = manifest_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&manifest.profile);
    let rows = read_profile(&profile_path)?;
    if rows.len() != manifest.discretization.samples {
        bail!(
            "profile has {} rows, manifest says {}",
            rows.len(),
            manifest.discretization.samples
        );
    }
    let grid = PeriodicGrid::new(
        manifest.discretization.samples,
        manifest.discretization.half_length,
    )?;
    let y: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let state = SurfaceState::build(
        grid,
        y,
        manifest.solution.conformal_depth,
        manifest.solution.speed,
    )?;
    let params = WaveParameters {
        speed: manifest.solution.speed,
        ..manifest.parameters
    };
    Ok(WaveSolution {
        params,
        state,
        residual_norm: manifest.solution.residual_norm,
        newton_iterations: manifest.solution.newton_iterations,
        amplitude: manifest.solution.amplitude,
        status: manifest.solution.status,
        residual_history: Vec::new(),
        bernoulli_shift: manifest.solution.bernoulli_shift,
    })
}

/// Deterministic base name for a run's output files.
pub fn run_basename(formulation: Formulation, params: &WaveParameters, crest: Option<f64>) -> String {
    let mut name = match formulation {
        Formulation::Deep => format!(
            "deep_g{}_T{}_c{}",
            params.gravity, params.surface_tension, params.speed
        ),
        Formulation::Finite => format!(
            "finite_g{}_d{}_a{}",
            params.gravity,
            params.depth.unwrap_or(f64::NAN),
            crest.unwrap_or(f64::NAN)
        ),
    };
    name = name.replace('-', "m").replace('.', "p");
    name
}

pub fn manifest_paths(dir: &Path, base: &str, n: usize, l: f64) -> (PathBuf, PathBuf, String) {
    let stem = format!("{base}_N{n}_L{}", format!("{l}").replace('.', "p"));
    let manifest = dir.join(format!("{stem}.json"));
    let profile_name = format!("{stem}.csv");
    let profile = dir.join(&profile_name);
    (manifest, profile, profile_name)
}
