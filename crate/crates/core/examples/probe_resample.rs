use wavebench_core::solver::*;
use wavebench_core::spectral::PeriodicGrid;

fn main() {
    println!("--- finite depth, a=0.1, d=1, g=1 ---");
    for (n, l) in [(512usize, 40.0f64), (1024, 40.0), (1024, 80.0), (2048, 80.0), (2048, 160.0)] {
        let grid = PeriodicGrid::new(n, l).unwrap();
        let params = WaveParameters {
            gravity: 1.0, surface_tension: 0.0, speed: 0.0, depth: Some(1.0), dimension: 2,
        };
        let guess = initial_guess(GuessKind::Kdv { amplitude: 0.1 }, &params, &grid).unwrap();
        let sol = solve_steady(Formulation::Finite, &params, &SolverConfig::default(), &guess).unwrap();
        let rep = physical_residual(&sol, &ResidualSampling::default()).unwrap();
        println!(
            "N={n:4} L={l:4} {:?} c={:.14} shift={:+.2e} b={:+.3e} kin={:.2e} bern={:.2e} harm={:.2e} decay={:.2e} it={}",
            sol.status, sol.params.speed, sol.bernoulli_shift, sol.state.mean_stretch(),
            rep.kinematic_defect, rep.bernoulli_defect, rep.harmonicity_defect, rep.decay_defect,
            sol.newton_iterations
        );
    }
    println!("--- deep capillary-gravity, c=1.3, g=T=1 ---");
    for (n, l) in [(2048usize, 100.0f64), (2048, 200.0), (4096, 200.0)] {
        let grid = PeriodicGrid::new(n, l).unwrap();
        let params = WaveParameters {
            gravity: 1.0, surface_tension: 1.0, speed: 1.3, depth: None, dimension: 2,
        };
        let guess = initial_guess(GuessKind::Wavepacket { speed: 1.3 }, &params, &grid).unwrap();
        let sol = solve_steady(Formulation::Deep, &params, &SolverConfig::default(), &guess).unwrap();
        let rep = physical_residual(&sol, &ResidualSampling::default()).unwrap();
        println!(
            "N={n:4} L={l:4} {:?} amp={:.12} b={:+.3e} res={:.2e} kin={:.2e} bern={:.2e} harm={:.2e} decay={:.2e} it={}",
            sol.status, sol.amplitude, sol.state.mean_stretch(), sol.residual_norm,
            rep.kinematic_defect, rep.bernoulli_defect, rep.harmonicity_defect, rep.decay_defect,
            sol.newton_iterations
        );
    }
}
