//! Initial guesses seeding the Newton iteration.

use super::{min_speed_deep, SolverError, SurfaceState, WaveParameters};
use crate::spectral::{self, PeriodicGrid};

/// Wavepacket amplitude scale relative to the envelope decay rate, tuned so
/// plain Newton converges from the guess across the documented speed range.
const WAVEPACKET_AMPLITUDE_FACTOR: f64 = 1.4;

/// Seed profiles for the two formulations.
#[derive(Debug, Clone, Copy)]
pub enum GuessKind {
    /// `a sech^2(sqrt(3a/4d^3) xi)`, the long-wave solitary profile;
    /// requires finite depth and `0 < a/d <= 0.4`.
    Kdv { amplitude: f64 },
    /// Decaying modulated carrier at the minimum-speed wavenumber, the
    /// sign-changing capillary-gravity seed; requires `T > 0`, `c < c_min`.
    Wavepacket { speed: f64 },
}

/// Builds a smooth, even, mean-normalized seed surface.
pub fn initial_guess(
    kind: GuessKind,
    params: &WaveParameters,
    grid: &PeriodicGrid,
) -> Result<SurfaceState, SolverError> {
    params.validate()?;
    match kind {
        GuessKind::Kdv { amplitude } => {
            let d = params.depth.ok_or_else(|| {
                SolverError::GuessOutOfRange("kdv guess requires finite depth".into())
            })?;
            if !(amplitude > 0.0) || amplitude / d > 0.4 {
                return Err(SolverError::GuessOutOfRange(format!(
                    "kdv guess requires 0 < a/d <= 0.4, got a = {amplitude}, d = {d}"
                )));
            }
            let beta = (3.0 * amplitude / (4.0 * d * d * d)).sqrt();
            let l = grid.half_length();
            let edge = sech_sq(beta * l);
            // rescale so the crest is exactly `amplitude` and the edge exactly 0
            let y: Vec<f64> = grid
                .nodes()
                .iter()
                .map(|&xi| amplitude * (sech_sq(beta * xi) - edge) / (1.0 - edge))
                .collect();
            let speed = (params.gravity * (d + amplitude)).sqrt();
            let h0 = d + spectral::mean(&y);
            SurfaceState::build(grid.clone(), y, Some(h0), speed)
        }
        GuessKind::Wavepacket { speed } => {
            if !(params.surface_tension > 0.0) {
                return Err(SolverError::GuessOutOfRange(
                    "wavepacket guess requires T > 0".into(),
                ));
            }
            let (c_min, k0) = min_speed_deep(&WaveParameters { depth: None, ..*params })?;
            if !(speed < c_min) {
                return Err(SolverError::GuessOutOfRange(format!(
                    "wavepacket guess requires c < c_min = {c_min}, got {speed}"
                )));
            }
            // envelope decay from the steady packet balance
            // k0 (c_min - c) = (omega''/2) beta^2
            let om2 = omega_second_derivative(k0, params.gravity, params.surface_tension);
            let beta = (2.0 * k0 * (c_min - speed) / om2).sqrt();
            let amp = WAVEPACKET_AMPLITUDE_FACTOR * beta;
            let l = grid.half_length();
            let raw = |xi: f64| -amp / (beta * xi).cosh() * (k0 * xi).cos();
            let edge = raw(l);
            let y: Vec<f64> = grid.nodes().iter().map(|&xi| raw(xi) - edge).collect();
            SurfaceState::build(grid.clone(), y, None, speed)
        }
    }
}

fn sech_sq(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

/// `omega''(k)` for `omega = sqrt(g k + T k^3)`.
fn omega_second_derivative(k: f64, g: f64, t: f64) -> f64 {
    let om = (g * k + t * k * k * k).sqrt();
    let om1 = (g + 3.0 * t * k * k) / (2.0 * om);
    (6.0 * t * k * om - (g + 3.0 * t * k * k) * om1) / (2.0 * om * om)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn finite(g: f64, d: f64) -> WaveParameters {
        WaveParameters {
            gravity: g,
            surface_tension: 0.0,
            speed: 0.0,
            depth: Some(d),
            dimension: 2,
        }
    }

    #[test]
    fn kdv_guess_has_requested_crest() {
        let grid = PeriodicGrid::new(256, 40.0).unwrap();
        let s = initial_guess(GuessKind::Kdv { amplitude: 0.1 }, &finite(1.0, 1.0), &grid)
            .unwrap();
        assert_abs_diff_eq!(s.crest(), 0.1, epsilon = 1e-14);
        assert_eq!(s.tail_elevation(), 0.0);
    }

    #[test]
    fn kdv_guess_is_even_and_decreasing() {
        let grid = PeriodicGrid::new(256, 40.0).unwrap();
        let s = initial_guess(GuessKind::Kdv { amplitude: 0.2 }, &finite(1.0, 1.0), &grid)
            .unwrap();
        let y = s.elevation();
        let n = grid.n();
        for j in 1..n / 2 {
            assert_eq!(y[n / 2 + j], y[n / 2 - j]);
        }
        for j in n / 2..n - 1 {
            assert!(y[j + 1] < y[j], "not strictly decreasing at {j}");
        }
    }

    #[test]
    fn kdv_guess_rejects_out_of_range() {
        let grid = PeriodicGrid::new(128, 40.0).unwrap();
        assert!(matches!(
            initial_guess(GuessKind::Kdv { amplitude: 0.5 }, &finite(1.0, 1.0), &grid),
            Err(SolverError::GuessOutOfRange(_))
        ));
        let deep = WaveParameters {
            gravity: 1.0,
            surface_tension: 0.0,
            speed: 1.0,
            depth: None,
            dimension: 2,
        };
        assert!(initial_guess(GuessKind::Kdv { amplitude: 0.1 }, &deep, &grid).is_err());
    }

    #[test]
    fn wavepacket_guess_changes_sign() {
        let grid = PeriodicGrid::new(1024, 100.0).unwrap();
        let params = WaveParameters {
            gravity: 1.0,
            surface_tension: 1.0,
            speed: 1.3,
            depth: None,
            dimension: 2,
        };
        let s = initial_guess(GuessKind::Wavepacket { speed: 1.3 }, &params, &grid).unwrap();
        let min = s.elevation().iter().copied().fold(f64::INFINITY, f64::min);
        let max = s.elevation().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(min < 0.0 && 0.0 < max, "guess should change sign: [{min}, {max}]");
    }

    #[test]
    fn wavepacket_guess_rejects_supercritical_speed() {
        let grid = PeriodicGrid::new(128, 50.0).unwrap();
        let params = WaveParameters {
            gravity: 1.0,
            surface_tension: 1.0,
            speed: 1.5,
            depth: None,
            dimension: 2,
        };
        assert!(matches!(
            initial_guess(GuessKind::Wavepacket { speed: 1.5 }, &params, &grid),
            Err(SolverError::GuessOutOfRange(_))
        ));
    }
}
