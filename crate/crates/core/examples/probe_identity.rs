use wavebench_core::energy::*;
use wavebench_core::solver::*;
use wavebench_core::spectral::PeriodicGrid;

fn main() {
    let params = WaveParameters {
        gravity: 1.0, surface_tension: 1.0, speed: 1.3, depth: None, dimension: 2,
    };
    let mut prev: Option<WaveSolution> = None;
    for (n, l) in [(2048usize, 100.0f64), (4096, 200.0), (8192, 400.0), (16384, 800.0)] {
        let grid = PeriodicGrid::new(n, l).unwrap();
        let sol = match &prev {
            None => {
                let guess = initial_guess(GuessKind::Wavepacket { speed: 1.3 }, &params, &grid).unwrap();
                solve_steady(Formulation::Deep, &params, &SolverConfig::default(), &guess).unwrap()
            }
            Some(p) => resample_solution(p, &grid, Formulation::Deep, &SolverConfig::default()).unwrap(),
        };
        let e = energy_report(&sol).unwrap();
        let rel = (e.dirichlet - 1.5 * e.potential_integral - e.surface_integral).abs() / e.dirichlet;
        println!(
            "N={n:5} L={l:4} {:?} res={:.1e} amp={:.10} tail_y={:.2e} rel_id={:.3e} it={}",
            sol.status, sol.residual_norm, sol.amplitude, e.tail_elevation, rel, sol.newton_iterations
        );
        prev = Some(sol);
    }
}
