//! Tune the trade-off weights of one method by exhaustive grid search.
//!
//! ```sh
//! cargo run --release --example grid_search
//! ```

use graphmend::graph::{laplacian, LaplacianKind, LaplacianSpec};
use graphmend::harness::grid_search;
use graphmend::solver::{
    baseline_config, BaselineMethod, LinearSolverKind, ObservationSet, SolverOptions,
};
use graphmend::synth::{add_noise, sample_mask, synthesize, NoiseSpec, SyntheticSpec};

fn main() -> graphmend::Result<()> {
    let spec = SyntheticSpec {
        nodes: 40,
        time_steps: 8,
        repeats: 3,
        seed: 21,
        ..SyntheticSpec::default()
    };
    let (graph, signal) = synthesize(&spec)?;
    let l = laplacian(&graph, &LaplacianSpec::plain(LaplacianKind::Combinatorial));
    let (n, m) = (signal.nrows(), signal.ncols());

    let mask = sample_mask(n, m, 0.3, 4)?;
    let noisy = add_noise(&signal, &NoiseSpec::Gaussian { std: 0.1 }, 4);
    let obs = ObservationSet::new(noisy.component_mul(&mask), mask, Some(signal.clone()))?;

    let options = SolverOptions {
        rho: 0.2,
        max_iters: 300,
        primal_tol: 1e-4,
        linear_solver: LinearSolverKind::KroneckerCg,
        cg_tol: 1e-8,
        ..SolverOptions::default()
    };

    let alphas = [0.0, 1e-3, 1e-2, 1e-1, 1.0];
    let betas = [0.0, 0.1, 0.3, 1.0, 3.0];
    for method in [BaselineMethod::Sobolev, BaselineMethod::ProposedL2] {
        let base = baseline_config(method);
        let (alpha, beta, best) = grid_search(
            &obs, &l, method, &base, &alphas, &betas, &options, None,
        )?;
        println!("{:<12} best (alpha, beta) = ({alpha}, {beta}), rmse {best:.4}", method.name());
    }
    Ok(())
}
