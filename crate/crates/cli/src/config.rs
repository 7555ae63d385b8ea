//! Human-readable run configuration with full command-line override.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use wavebench_core::solver::SolverConfig;

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "WAVEBENCH_OUT";

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub continuation: ContinuationSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub converge: ConvergeSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub samples: usize,
    pub half_length: f64,
    pub tol: f64,
    pub max_newton: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { samples: 1024, half_length: 40.0, tol: 1e-11, max_newton: 50 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuationSection {
    pub steps: usize,
    pub step_floor: f64,
}

impl Default for ContinuationSection {
    fn default() -> Self {
        Self { steps: 10, step_floor: 1.0 / 64.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("wavebench-runs") }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSection {
    /// Refinement ladder as `(samples, half_length)` rungs.
    #[serde(default)]
    pub ladder: Vec<(usize, f64)>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                let cfg: FileConfig = toml::from_str(&text)
                    .with_context(|| format!("parsing config {}", p.display()))?;
                Ok(cfg)
            }
        }
    }
}

/// Fully resolved run settings: file config with flag overrides applied.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub samples: usize,
    pub half_length: f64,
    pub solver: SolverConfig,
    pub continuation: wavebench_core::solver::ContinuationConfig,
    pub out_dir: PathBuf,
    pub ladder: Vec<(usize, f64)>,
}

/// Validates every field and lists all failures at once.
pub fn resolve(
    file: &FileConfig,
    samples: Option<usize>,
    half_length: Option<f64>,
    tol: Option<f64>,
    max_newton: Option<usize>,
    out_dir: Option<PathBuf>,
    ladder: Option<Vec<(usize, f64)>>,
) -> Result<Resolved> {
    let samples = samples.unwrap_or(file.solver.samples);
    let half_length = half_length.unwrap_or(file.solver.half_length);
    let tol = tol.unwrap_or(file.solver.tol);
    let max_newton = max_newton.unwrap_or(file.solver.max_newton);
    let out_dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .or(out_dir)
        .unwrap_or_else(|| file.output.dir.clone());
    let ladder = ladder.unwrap_or_else(|| file.converge.ladder.clone());

    let mut problems = Vec::new();
    if samples % 2 != 0 || samples < 8 {
        problems.push(format!("samples must be even and at least 8, got {samples}"));
    }
    if !(half_length > 0.0) {
        problems.push(format!("half_length must be positive, got {half_length}"));
    }
    if !(tol > 0.0) {
        problems.push(format!("tol must be positive, got {tol}"));
    }
    if max_newton == 0 {
        problems.push("max_newton must be at least 1".into());
    }
    for &(n, l) in &ladder {
        if n % 2 != 0 || n < 8 || !(l > 0.0) {
            problems.push(format!("bad ladder rung ({n}, {l})"));
        }
    }
    if ladder.windows(2).any(|w| w[1].0 <= w[0].0) {
        problems.push("ladder must be strictly increasing in sample count".into());
    }
    if !problems.is_empty() {
        bail!("invalid configuration:\n  {}", problems.join("\n  "));
    }

    Ok(Resolved {
        samples,
        half_length,
        solver: SolverConfig { tol, max_newton, ..SolverConfig::default() },
        continuation: wavebench_core::solver::ContinuationConfig {
            steps: file.continuation.steps,
            step_floor: file.continuation.step_floor,
            ..Default::default()
        },
        out_dir,
        ladder,
    })
}

/// Parses `512x40,1024x40` ladder syntax.
pub fn parse_ladder(text: &str) -> Result<Vec<(usize, f64)>> {
    text.split(',')
        .map(|rung| {
            let (n, l) = rung
                .split_once('x')
                .with_context(|| format!("ladder rung {rung:?} is not NxL"))?;
            Ok((
                n.trim().parse().with_context(|| format!("bad sample count {n:?}"))?,
                l.trim().parse().with_context(|| format!("bad half-length {l:?}"))?,
            ))
        })
        .collect()
}
