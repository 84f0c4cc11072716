//! Assemble and run an experiment plan programmatically: two methods, two
//! sampling rates, seeded trials, tuned weights, CSV output.
//!
//! The same plan can be stored as JSON and run via
//! `graphmend benchmark --plan plan.json`.
//!
//! ```sh
//! cargo run --release --example benchmark_plan
//! ```

use graphmend::harness::{run_plan, DataSource, ExperimentPlan, MethodSpec};
use graphmend::solver::{BaselineMethod, LinearSolverKind, SolverOptions};
use graphmend::synth::{NoiseSpec, SyntheticSpec};

fn main() -> graphmend::Result<()> {
    let plan = ExperimentPlan {
        data: DataSource::Synthetic {
            spec: SyntheticSpec {
                nodes: 40,
                time_steps: 8,
                repeats: 3,
                seed: 11,
                ..SyntheticSpec::default()
            },
        },
        methods: vec![
            MethodSpec::plain(BaselineMethod::Sobolev),
            MethodSpec {
                beta_grid: Some(vec![0.1, 0.3, 1.0]),
                ..MethodSpec::plain(BaselineMethod::ProposedL2)
            },
        ],
        sampling_rates: vec![0.2, 0.4],
        noise_levels: vec![NoiseSpec::Gaussian { std: 0.1 }],
        trials: 3,
        tuning_trials: Some(1),
        alpha_grid: vec![1e-3, 1e-2, 1e-1],
        beta_grid: vec![0.0, 0.1, 1.0],
        master_seed: 1,
        record_timing: true,
        laplacian: None,
        solver: SolverOptions {
            rho: 0.2,
            max_iters: 400,
            primal_tol: 1e-4,
            linear_solver: LinearSolverKind::KroneckerCg,
            cg_tol: 1e-8,
            ..SolverOptions::default()
        },
        output: None,
    };

    println!("plan as JSON:\n{}\n", serde_json::to_string_pretty(&plan).unwrap());

    let summary = run_plan(&plan)?;
    print!("{}", summary.csv);
    eprintln!();
    for g in &summary.groups {
        eprintln!(
            "{} @ rate {}: rmse {:.4} +- {:.4}  (tuned alpha {}, beta {})",
            g.label, g.sampling_rate, g.mean_rmse, g.std_rmse, g.alpha, g.beta
        );
    }
    Ok(())
}
