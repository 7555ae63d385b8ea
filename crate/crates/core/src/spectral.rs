//! Periodic grids, Fourier-multiplier operators and spectrally accurate
//! quadrature on the truncated line `[-L, L)`.
//!
//! Everything downstream (wave solvers, energy ledger, identity audits)
//! reduces to multiplier algebra on these grids. Conventions fixed here:
//! the Hilbert transform satisfies `H[cos(k xi)] = sin(k xi)` for `k > 0`,
//! mean-free kinds (`hilbert`, `strip-conjugate`) send wavenumber 0 to 0,
//! and products of spectral quantities are dealiased by zero-padding
//! with factor 2.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

/// Smallest admissible sample count.
pub const MIN_SAMPLES: usize = 8;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("N must be even, got {0}")]
    OddSampleCount(usize),
    #[error("N must be at least {min}, got {got}", min = MIN_SAMPLES)]
    TooFewSamples { got: usize },
    #[error("half-period L must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("sample length {got} does not match grid size {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("invalid multiplier parameter: {0}")]
    InvalidSymbol(String),
}

/// Uniform periodic grid of `N` points on `[-L, L)`.
///
/// Node `j` sits exactly at `-L + 2 L j / N`; node `N/2` is exactly 0.
#[derive(Debug, Clone)]
pub struct PeriodicGrid {
    n: usize,
    half_length: f64,
    nodes: Vec<f64>,
}

impl PeriodicGrid {
    /// Builds a grid with exact node placement. `n` must be even and at
    /// least [`MIN_SAMPLES`]; `half_length` must be positive.
    pub fn new(n: usize, half_length: f64) -> Result<Self, SpectralError> {
        if n % 2 != 0 {
            return Err(SpectralError::OddSampleCount(n));
        }
        if n < MIN_SAMPLES {
            return Err(SpectralError::TooFewSamples { got: n });
        }
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(SpectralError::NonPositiveLength(half_length));
        }
        let nf = n as f64;
        let nodes = (0..n)
            .map(|j| -half_length + 2.0 * half_length * j as f64 / nf)
            .collect();
        Ok(Self { n, half_length, nodes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-period `L`; the domain is `[-L, L)`.
    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Grid spacing `2L / N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    /// Signed wavenumber of DFT bin `m`: `pi * m' / L` with `m'` folded
    /// into `[-N/2, N/2)`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        debug_assert!(m < self.n);
        let m_signed = if m <= self.n / 2 {
            m as f64
        } else {
            m as f64 - self.n as f64
        };
        std::f64::consts::PI * m_signed / self.half_length
    }

    /// Fundamental wavenumber `pi / L`.
    pub fn fundamental_wavenumber(&self) -> f64 {
        std::f64::consts::PI / self.half_length
    }

    fn check_samples(&self, samples: &[f64]) -> Result<(), SpectralError> {
        if samples.len() != self.n {
            return Err(SpectralError::LengthMismatch {
                got: samples.len(),
                want: self.n,
            });
        }
        for (j, &v) in samples.iter().enumerate() {
            if !v.is_finite() {
                return Err(SpectralError::NonFiniteSample(j));
            }
        }
        Ok(())
    }
}

/// Fourier-multiplier kinds used by the workbench.
///
/// `level` is a vertical coordinate (`zeta <= 0` below the surface),
/// `depth` the conformal strip depth (`> 0`). Extension symbols have
/// magnitude at most 1 for admissible levels; `hilbert` and
/// `strip-conjugate` are mean-free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiplierSymbol {
    /// d/dxi.
    Derivative,
    /// `H[cos(k xi)] = sin(k xi)` for `k > 0`; symbol `-i sgn(k)`.
    Hilbert,
    /// Harmonic extension from `zeta = 0` into the lower half-plane,
    /// evaluated at `zeta = level`; symbol `exp(|k| level)`.
    HalfPlaneExtension { level: f64 },
    /// Harmonic extension into the strip `-depth <= zeta <= 0` with a
    /// Neumann bottom; symbol `cosh(k (level + depth)) / cosh(k depth)`.
    StripExtension { depth: f64, level: f64 },
    /// Conjugate-trace operator on the strip; symbol `-i coth(k depth)`,
    /// 0 at wavenumber 0. Degenerates to `Hilbert` as `depth -> inf`.
    StripConjugate { depth: f64 },
    /// Trace at the strip bottom; symbol `sech(k depth)`.
    BottomTrace { depth: f64 },
}

impl MultiplierSymbol {
    fn validate(&self) -> Result<(), SpectralError> {
        let bad = |msg: String| Err(SpectralError::InvalidSymbol(msg));
        match *self {
            MultiplierSymbol::Derivative | MultiplierSymbol::Hilbert => Ok(()),
            MultiplierSymbol::HalfPlaneExtension { level } => {
                if !level.is_finite() || level > 0.0 {
                    bad(format!("half-plane extension needs level <= 0, got {level}"))
                } else {
                    Ok(())
                }
            }
            MultiplierSymbol::StripExtension { depth, level } => {
                if !(depth > 0.0) || !depth.is_finite() {
                    bad(format!("strip extension needs depth > 0, got {depth}"))
                } else if !level.is_finite() || level > 0.0 || level < -depth {
                    bad(format!(
                        "strip extension needs -depth <= level <= 0, got {level}"
                    ))
                } else {
                    Ok(())
                }
            }
            MultiplierSymbol::StripConjugate { depth } | MultiplierSymbol::BottomTrace { depth } => {
                if !(depth > 0.0) || !depth.is_finite() {
                    bad(format!("strip operator needs depth > 0, got {depth}"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Symbol value at signed wavenumber `k`.
    pub fn eval(&self, k: f64) -> Complex<f64> {
        match *self {
            MultiplierSymbol::Derivative => Complex::new(0.0, k),
            MultiplierSymbol::Hilbert => {
                if k == 0.0 {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::new(0.0, -k.signum())
                }
            }
            MultiplierSymbol::HalfPlaneExtension { level } => {
                Complex::new((k.abs() * level).exp(), 0.0)
            }
            MultiplierSymbol::StripExtension { depth, level } => {
                Complex::new(strip_extension_ratio(k.abs(), depth, level), 0.0)
            }
            MultiplierSymbol::StripConjugate { depth } => {
                if k == 0.0 {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::new(0.0, -coth(k * depth))
                }
            }
            MultiplierSymbol::BottomTrace { depth } => Complex::new(sech(k.abs() * depth), 0.0),
        }
    }
}

/// `cosh(a (level + depth)) / cosh(a depth)` for `a = |k| >= 0`, computed
/// in exponential form so large `a depth` cannot overflow.
fn strip_extension_ratio(a: f64, depth: f64, level: f64) -> f64 {
    debug_assert!(a >= 0.0);
    // = e^(a level) (1 + e^(-2a(level+depth))) / (1 + e^(-2a depth))
    (a * level).exp() * (1.0 + (-2.0 * a * (level + depth)).exp())
        / (1.0 + (-2.0 * a * depth).exp())
}

fn coth(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    let c = (1.0 + e) / (1.0 - e);
    if x < 0.0 {
        -c
    } else {
        c
    }
}

fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

fn fft_pair(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    static PLANS: OnceLock<Mutex<HashMap<usize, (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>>> =
        OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Unnormalized DFT of real samples.
pub(crate) fn fft_real(samples: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let (fwd, _) = fft_pair(samples.len());
    fwd.process(&mut buf);
    buf
}

/// Inverse of [`fft_real`]: divides by `n` and takes real parts.
pub(crate) fn ifft_to_real(mut spectrum: Vec<Complex<f64>>) -> Vec<f64> {
    let n = spectrum.len();
    let (_, inv) = fft_pair(n);
    inv.process(&mut spectrum);
    let scale = 1.0 / n as f64;
    spectrum.iter().map(|c| c.re * scale).collect()
}

/// Applies an arbitrary multiplier `sym(k)` to real samples. The Nyquist
/// bin keeps only the real part of the symbol so the output stays real.
pub(crate) fn apply_symbol<F>(grid: &PeriodicGrid, samples: &[f64], sym: F) -> Vec<f64>
where
    F: Fn(f64) -> Complex<f64>,
{
    let n = grid.n;
    let mut spec = fft_real(samples);
    for (m, value) in spec.iter_mut().enumerate() {
        let k = grid.wavenumber(m);
        let mut s = sym(k);
        if m == n / 2 {
            s = Complex::new(s.re, 0.0);
        }
        *value *= s;
    }
    ifft_to_real(spec)
}

/// Applies `symbol` to `samples` on `grid`; output is real to round-off.
pub fn apply_multiplier(
    grid: &PeriodicGrid,
    samples: &[f64],
    symbol: MultiplierSymbol,
) -> Result<Vec<f64>, SpectralError> {
    grid.check_samples(samples)?;
    symbol.validate()?;
    Ok(apply_symbol(grid, samples, |k| symbol.eval(k)))
}

/// d/dxi, the most common multiplier.
pub fn derivative(grid: &PeriodicGrid, samples: &[f64]) -> Result<Vec<f64>, SpectralError> {
    apply_multiplier(grid, samples, MultiplierSymbol::Derivative)
}

/// Trapezoidal rule `(2L/N) * sum`, spectrally accurate for smooth
/// periodic integrands.
pub fn quad_periodic(grid: &PeriodicGrid, samples: &[f64]) -> Result<f64, SpectralError> {
    grid.check_samples(samples)?;
    Ok(grid.spacing() * samples.iter().sum::<f64>())
}

fn pad_spectrum_double(spec: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let n = spec.len();
    let mut out = vec![Complex::new(0.0, 0.0); 2 * n];
    // doubling accounts for the 1/n normalization moving to 1/(2n)
    for m in 0..n / 2 {
        out[m] = 2.0 * spec[m];
    }
    for m in n / 2 + 1..n {
        out[m + n] = 2.0 * spec[m];
    }
    // split the Nyquist bin between +N/2 and -N/2
    out[n / 2] = spec[n / 2];
    out[2 * n - n / 2] = spec[n / 2];
    out
}

fn truncate_spectrum_half(spec2: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let n2 = spec2.len();
    let n = n2 / 2;
    let mut out = vec![Complex::new(0.0, 0.0); n];
    for m in 0..n / 2 {
        out[m] = 0.5 * spec2[m];
    }
    for m in n / 2 + 1..n {
        out[m] = 0.5 * spec2[m + n];
    }
    out[n / 2] = 0.5 * (spec2[n / 2] + spec2[n2 - n / 2]);
    out
}

/// Pointwise product of two spectral quantities, dealiased by zero-padding
/// with factor 2: modes beyond the grid are dropped, never wrapped.
pub(crate) fn product_dealiased(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    let fa = pad_spectrum_double(&fft_real(a));
    let fb = pad_spectrum_double(&fft_real(b));
    let va = ifft_to_real(fa);
    let vb = ifft_to_real(fb);
    let prod: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
    ifft_to_real(truncate_spectrum_half(&fft_real(&prod)))
}

/// Ratio of the largest spectral coefficient magnitude in the top third of
/// wavenumbers to the largest overall; the resolution certificate.
pub fn spectral_decay_ratio(grid: &PeriodicGrid, samples: &[f64]) -> f64 {
    let spec = fft_real(samples);
    let n = grid.n;
    let cutoff = n / 3;
    let mut max_all = 0.0f64;
    let mut max_tail = 0.0f64;
    for (m, c) in spec.iter().enumerate() {
        let m_abs = m.min(n - m);
        let mag = c.norm();
        max_all = max_all.max(mag);
        if m_abs >= cutoff {
            max_tail = max_tail.max(mag);
        }
    }
    if max_all == 0.0 {
        0.0
    } else {
        max_tail / max_all
    }
}

pub(crate) fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn grid_nodes_are_exact() {
        let g = PeriodicGrid::new(8, 1.0).unwrap();
        assert_eq!(g.nodes()[0], -1.0);
        assert_eq!(g.nodes()[4], 0.0);
        let g = PeriodicGrid::new(4096, 200.0).unwrap();
        assert_eq!(g.spacing(), 0.09765625);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(matches!(
            PeriodicGrid::new(7, 1.0),
            Err(SpectralError::OddSampleCount(7))
        ));
        assert!(matches!(
            PeriodicGrid::new(4, 1.0),
            Err(SpectralError::TooFewSamples { got: 4 })
        ));
        assert!(matches!(
            PeriodicGrid::new(64, 0.0),
            Err(SpectralError::NonPositiveLength(_))
        ));
        assert!(matches!(
            PeriodicGrid::new(64, -3.0),
            Err(SpectralError::NonPositiveLength(_))
        ));
    }

    #[test]
    fn hilbert_maps_cos_to_sin() {
        let l = 3.0;
        let g = PeriodicGrid::new(128, l).unwrap();
        let k = PI / l;
        let cos: Vec<f64> = g.nodes().iter().map(|&x| (k * x).cos()).collect();
        let sin: Vec<f64> = g.nodes().iter().map(|&x| (k * x).sin()).collect();
        let h = apply_multiplier(&g, &cos, MultiplierSymbol::Hilbert).unwrap();
        assert!(max_abs_diff(&h, &sin) <= 1e-12);
    }

    #[test]
    fn derivative_on_sine_eigenfunction() {
        let l = 2.0;
        let g = PeriodicGrid::new(64, l).unwrap();
        let k = PI / l;
        let f: Vec<f64> = g.nodes().iter().map(|&x| (k * x).sin()).collect();
        let expect: Vec<f64> = g.nodes().iter().map(|&x| k * (k * x).cos()).collect();
        let d = derivative(&g, &f).unwrap();
        assert!(max_abs_diff(&d, &expect) <= 1e-12);
    }

    #[test]
    fn half_plane_extension_damps_cos() {
        let l = PI;
        let g = PeriodicGrid::new(128, l).unwrap();
        let k = 3.0 * PI / l; // m = 3
        let f: Vec<f64> = g.nodes().iter().map(|&x| (k * x).cos()).collect();
        let ext = apply_multiplier(&g, &f, MultiplierSymbol::HalfPlaneExtension { level: -1.0 })
            .unwrap();
        let expect: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| (-k).exp() * (k * x).cos())
            .collect();
        assert!(max_abs_diff(&ext, &expect) <= 1e-12);
    }

    #[test]
    fn strip_extension_matches_cosh_ratio() {
        let l = 5.0;
        let h = 0.8;
        let zeta = -0.3;
        let g = PeriodicGrid::new(256, l).unwrap();
        let k = 4.0 * PI / l;
        let f: Vec<f64> = g.nodes().iter().map(|&x| (k * x).cos()).collect();
        let ext = apply_multiplier(
            &g,
            &f,
            MultiplierSymbol::StripExtension { depth: h, level: zeta },
        )
        .unwrap();
        let ratio = (k * (zeta + h)).cosh() / (k * h).cosh();
        let expect: Vec<f64> = g.nodes().iter().map(|&x| ratio * (k * x).cos()).collect();
        assert!(max_abs_diff(&ext, &expect) <= 1e-12);
    }

    #[test]
    fn bottom_trace_matches_sech() {
        let l = 5.0;
        let h = 1.3;
        let g = PeriodicGrid::new(256, l).unwrap();
        let k = 2.0 * PI / l;
        let f: Vec<f64> = g.nodes().iter().map(|&x| (k * x).cos()).collect();
        let bt = apply_multiplier(&g, &f, MultiplierSymbol::BottomTrace { depth: h }).unwrap();
        let expect: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| (k * x).cos() / (k * h).cosh())
            .collect();
        assert!(max_abs_diff(&bt, &expect) <= 1e-12);
    }

    #[test]
    fn strip_conjugate_tends_to_hilbert_in_deep_limit() {
        let g = PeriodicGrid::new(128, 4.0).unwrap();
        let f: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| (PI * x / 4.0).cos() + 0.3 * (3.0 * PI * x / 4.0).sin())
            .collect();
        let deep = apply_multiplier(&g, &f, MultiplierSymbol::Hilbert).unwrap();
        let strip =
            apply_multiplier(&g, &f, MultiplierSymbol::StripConjugate { depth: 50.0 }).unwrap();
        assert!(max_abs_diff(&deep, &strip) <= 1e-12);
    }

    #[test]
    fn quadrature_basics() {
        let l = 7.0;
        let g = PeriodicGrid::new(64, l).unwrap();
        let ones = vec![1.0; 64];
        assert_abs_diff_eq!(quad_periodic(&g, &ones).unwrap(), 2.0 * l, epsilon = 1e-12);
        let s: Vec<f64> = g.nodes().iter().map(|&x| (PI * x / l).sin()).collect();
        assert!(quad_periodic(&g, &s).unwrap().abs() <= 1e-13);
        let c2: Vec<f64> = g.nodes().iter().map(|&x| (PI * x / l).cos().powi(2)).collect();
        assert_abs_diff_eq!(quad_periodic(&g, &c2).unwrap(), l, epsilon = 1e-12);
    }

    #[test]
    fn apply_rejects_bad_samples() {
        let g = PeriodicGrid::new(16, 1.0).unwrap();
        let short = vec![0.0; 15];
        assert!(matches!(
            apply_multiplier(&g, &short, MultiplierSymbol::Hilbert),
            Err(SpectralError::LengthMismatch { got: 15, want: 16 })
        ));
        let mut bad = vec![0.0; 16];
        bad[3] = f64::NAN;
        assert!(matches!(
            apply_multiplier(&g, &bad, MultiplierSymbol::Hilbert),
            Err(SpectralError::NonFiniteSample(3))
        ));
        assert!(apply_multiplier(
            &g,
            &vec![0.0; 16],
            MultiplierSymbol::HalfPlaneExtension { level: 0.5 }
        )
        .is_err());
    }

    #[test]
    fn dealiased_product_of_cosines() {
        let l = 1.0;
        let n = 64;
        let g = PeriodicGrid::new(n, l).unwrap();
        // low mode: product fully representable
        let k = 4.0 * PI / l;
        let f: Vec<f64> = g.nodes().iter().map(|&x| (k * x).cos()).collect();
        let p = product_dealiased(&f, &f);
        let expect: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| 0.5 + 0.5 * (2.0 * k * x).cos())
            .collect();
        assert!(max_abs_diff(&p, &expect) <= 1e-12);

        // high mode: the 2k part exceeds Nyquist and must be dropped, not wrapped
        let m_hi = n / 2 - 2;
        let k_hi = m_hi as f64 * PI / l;
        let fh: Vec<f64> = g.nodes().iter().map(|&x| (k_hi * x).cos()).collect();
        let ph = product_dealiased(&fh, &fh);
        let expect_hi = vec![0.5; n];
        assert!(max_abs_diff(&ph, &expect_hi) <= 1e-12);
    }

    #[test]
    fn decay_ratio_flags_unresolved_data() {
        let g = PeriodicGrid::new(64, 1.0).unwrap();
        let smooth: Vec<f64> = g.nodes().iter().map(|&x| (PI * x).cos()).collect();
        assert!(spectral_decay_ratio(&g, &smooth) <= 1e-12);
        let rough: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| (PI * x).cos() + 0.5 * (30.0 * PI * x).cos())
            .collect();
        assert!(spectral_decay_ratio(&g, &rough) >= 0.4);
    }

    fn band_limited(seed: Vec<(f64, f64)>, grid: &PeriodicGrid) -> Vec<f64> {
        let l = grid.half_length();
        grid.nodes()
            .iter()
            .map(|&x| {
                seed.iter()
                    .enumerate()
                    .map(|(m, &(a, b))| {
                        let k = (m + 1) as f64 * PI / l;
                        a * (k * x).cos() + b * (k * x).sin()
                    })
                    .sum()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn multiplier_is_linear(
            seed_f in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
            seed_g in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let grid = PeriodicGrid::new(64, 2.0).unwrap();
            let f = band_limited(seed_f, &grid);
            let g = band_limited(seed_g, &grid);
            for sym in [
                MultiplierSymbol::Hilbert,
                MultiplierSymbol::Derivative,
                MultiplierSymbol::StripConjugate { depth: 0.7 },
            ] {
                let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
                let lhs = apply_multiplier(&grid, &combo, sym).unwrap();
                let ff = apply_multiplier(&grid, &f, sym).unwrap();
                let gg = apply_multiplier(&grid, &g, sym).unwrap();
                let rhs: Vec<f64> = ff.iter().zip(&gg).map(|(x, y)| a * x + b * y).collect();
                prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-10);
            }
        }

        #[test]
        fn hilbert_squared_is_minus_identity(
            seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
        ) {
            let grid = PeriodicGrid::new(64, 1.5).unwrap();
            let f = band_limited(seed, &grid); // zero-mean by construction
            let hh = apply_multiplier(
                &grid,
                &apply_multiplier(&grid, &f, MultiplierSymbol::Hilbert).unwrap(),
                MultiplierSymbol::Hilbert,
            )
            .unwrap();
            let neg: Vec<f64> = f.iter().map(|x| -x).collect();
            prop_assert!(max_abs_diff(&hh, &neg) <= 1e-11);
        }

        #[test]
        fn derivative_integrates_to_zero(
            seed in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 10),
        ) {
            let grid = PeriodicGrid::new(128, 4.0).unwrap();
            let f = band_limited(seed, &grid);
            let d = derivative(&grid, &f).unwrap();
            prop_assert!(quad_periodic(&grid, &d).unwrap().abs() <= 1e-11);
        }

        #[test]
        fn half_plane_extensions_compose(
            seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
            z1 in -2.0f64..0.0,
            z2 in -2.0f64..0.0,
        ) {
            let grid = PeriodicGrid::new(64, 3.0).unwrap();
            let f = band_limited(seed, &grid);
            let id = apply_multiplier(
                &grid, &f, MultiplierSymbol::HalfPlaneExtension { level: 0.0 }).unwrap();
            prop_assert!(max_abs_diff(&id, &f) <= 1e-11);
            let one = apply_multiplier(
                &grid,
                &apply_multiplier(&grid, &f, MultiplierSymbol::HalfPlaneExtension { level: z1 })
                    .unwrap(),
                MultiplierSymbol::HalfPlaneExtension { level: z2 },
            )
            .unwrap();
            let both = apply_multiplier(
                &grid, &f, MultiplierSymbol::HalfPlaneExtension { level: z1 + z2 }).unwrap();
            prop_assert!(max_abs_diff(&one, &both) <= 1e-11);
        }
    }
}
