//! Command-line front end: synthetic data emission, single recoveries,
//! benchmark plans, and grid search.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when the solver
//! diverges during `recover`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;

use graphmend::datasets::{
    load_bundle, make_observation, save_coords_csv, save_signal_csv, NanPolicy,
};
use graphmend::graph::{build_knn_graph, laplacian, EdgeWeighting, LaplacianKind, LaplacianSpec};
use graphmend::harness::{grid_search, rmse, run_plan, solve_with_config, ExperimentPlan};
use graphmend::solver::{
    baseline_config, BaselineMethod, LinearSolverKind, RhoPolicy, SolverOptions, WeightMode,
};
use graphmend::synth::{generate_coords, generate_signal, sample_mask, NoiseSpec, SyntheticSpec};
use graphmend::Error;

#[derive(Parser)]
#[command(
    name = "graphmend",
    about = "Recover time-varying graph signals from partial, noisy observations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic bundle (signal + coordinates CSV).
    Synth(SynthArgs),
    /// Run one recovery on a signal/coordinates pair.
    Recover(RecoverArgs),
    /// Execute a JSON experiment plan and write its result table.
    Benchmark(BenchmarkArgs),
    /// Exhaustive (alpha, beta) search for one method on one instance.
    Grid(GridArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100)]
    nodes: usize,
    #[arg(long, default_value_t = 10)]
    time_steps: usize,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Palindromic repetitions; 0 emits the plain block.
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 5)]
    knn: usize,
    #[arg(long, default_value_t = 100.0)]
    area: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_signal: PathBuf,
    #[arg(long)]
    out_coords: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Signal CSV (rows = vertices, columns = time instances).
    #[arg(long)]
    signal: PathBuf,
    /// Coordinates CSV with header id,x,y.
    #[arg(long)]
    coords: PathBuf,
    /// GS, Tikhonov, TGSR, LRDS, Sobolev, LRGTS, ProposedL2 or ProposedL1.
    #[arg(long)]
    method: BaselineMethod,
    /// Sampling rate in (0, 1].
    #[arg(long)]
    rate: f64,
    /// none, gaussian:STD or laplace:SCALE.
    #[arg(long, default_value = "none")]
    noise: NoiseSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Linear solver for the quadratic subproblems.
    #[arg(long, value_parser = parse_solver, default_value = "auto")]
    solver: LinearSolverKind,
    #[arg(long, default_value_t = 5)]
    knn: usize,
    /// combinatorial or normalized.
    #[arg(long, value_parser = parse_laplacian, default_value = "combinatorial")]
    laplacian: LaplacianKind,
    /// ADMM step size (fixed policy).
    #[arg(long)]
    rho: Option<f64>,
    /// Use the descent-guaranteed step size instead of a fixed one.
    #[arg(long, default_value_t = false)]
    guaranteed_rho: bool,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Relative residual target of the inner conjugate-gradient solver.
    #[arg(long, default_value_t = 1e-10)]
    cg_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    cg_max_iters: usize,
}

impl SolveArgs {
    fn options(&self) -> SolverOptions {
        let mut options = SolverOptions {
            max_iters: self.max_iters,
            primal_tol: self.tol,
            linear_solver: self.solver,
            cg_tol: self.cg_tol,
            cg_max_iters: self.cg_max_iters,
            ..SolverOptions::default()
        };
        if let Some(rho) = self.rho {
            options.rho = rho;
            options.rho1 = rho;
            options.rho2 = rho;
        }
        if self.guaranteed_rho {
            options.rho_policy = RhoPolicy::GuaranteedDescent;
        }
        options
    }

    fn load(&self) -> Result<(DMatrix<f64>, graphmend::datasets::DatasetBundle), Error> {
        let bundle = load_bundle(&self.signal, &self.coords, NanPolicy::Mask)?;
        let graph = build_knn_graph(
            bundle.coords(),
            self.knn,
            EdgeWeighting::InverseSquareDistance,
        )?;
        let l = laplacian(&graph, &LaplacianSpec::plain(self.laplacian));
        Ok((l, bundle))
    }
}

#[derive(Args)]
struct RecoverArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Smoothness weight.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Low-rank weight (forced to 0 for methods without a low-rank term).
    #[arg(long, default_value_t = 1e-4)]
    beta: f64,
    /// Output CSV for the recovered matrix.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// JSON plan file.
    #[arg(long)]
    plan: PathBuf,
    /// Overrides the plan's output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Comma-separated alpha grid.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Comma-separated beta grid.
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
}

fn parse_solver(s: &str) -> Result<LinearSolverKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "auto" => Ok(LinearSolverKind::Auto),
        "direct" => Ok(LinearSolverKind::DirectCholesky),
        "cg" => Ok(LinearSolverKind::KroneckerCg),
        other => Err(format!("unknown solver '{other}' (auto, direct, cg)")),
    }
}

fn parse_laplacian(s: &str) -> Result<LaplacianKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "combinatorial" => Ok(LaplacianKind::Combinatorial),
        "normalized" | "symmetric_normalized" => Ok(LaplacianKind::SymmetricNormalized),
        other => Err(format!(
            "unknown laplacian '{other}' (combinatorial, normalized)"
        )),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Diverged { .. } | Error::CgDidNotConverge { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Synth(args) => synth(args),
        Command::Recover(args) => recover(args),
        Command::Benchmark(args) => benchmark(args),
        Command::Grid(args) => grid(args),
    }
}

fn synth(args: SynthArgs) -> Result<(), Error> {
    let spec = SyntheticSpec {
        nodes: args.nodes,
        time_steps: args.time_steps,
        kappa: args.kappa,
        knn_k: args.knn,
        area: args.area,
        repeats: args.repeats,
        seed: args.seed,
    };
    let coords = generate_coords(&spec);
    let graph = build_knn_graph(&coords, spec.knn_k, EdgeWeighting::InverseSquareDistance)?;
    let signal = generate_signal(&spec, &graph)?;
    save_signal_csv(&args.out_signal, &signal)?;
    save_coords_csv(&args.out_coords, &coords)?;
    println!(
        "wrote {}x{} signal to {} and coordinates to {}",
        signal.nrows(),
        signal.ncols(),
        args.out_signal.display(),
        args.out_coords.display()
    );
    Ok(())
}

fn recover(args: RecoverArgs) -> Result<(), Error> {
    let (l, bundle) = args.solve.load()?;
    let (n, m) = bundle.dims();
    let mask = sample_mask(n, m, args.solve.rate, args.solve.seed)?;
    let obs = make_observation(&bundle, &mask, &args.solve.noise, args.solve.seed)?;

    let mut config = baseline_config(args.solve.method);
    config.alpha = args.alpha;
    if args.solve.method.has_low_rank() {
        config.beta = args.beta;
        if args.beta == 0.0 {
            config.weight_mode = WeightMode::NoLowRank;
        }
    }

    let result = solve_with_config(&obs, &l, &config, &args.solve.options())?;
    save_signal_csv(&args.out, &result.x_hat)?;

    let valid = bundle.has_gaps().then(|| bundle.valid());
    let err = rmse(bundle.signal(), &result.x_hat, valid)?;
    println!(
        "method {} rate {} noise {:?} seed {}: rmse {err:.6}, {} iterations, converged {}",
        args.solve.method,
        args.solve.rate,
        args.solve.noise,
        args.solve.seed,
        result.iterations,
        result.converged
    );
    Ok(())
}

fn benchmark(args: BenchmarkArgs) -> Result<(), Error> {
    let mut plan = ExperimentPlan::load(&args.plan)?;
    if let Some(out) = args.out {
        plan.output = Some(out.display().to_string());
    }
    let summary = run_plan(&plan)?;
    match &plan.output {
        Some(path) => eprintln!("wrote results to {path}"),
        None => print!("{}", summary.csv),
    }
    for g in &summary.groups {
        eprintln!(
            "{} rate {} noise {}: rmse {:.4} +- {:.4} (alpha {}, beta {})",
            g.label, g.sampling_rate, g.noise_param, g.mean_rmse, g.std_rmse, g.alpha, g.beta
        );
    }
    Ok(())
}

fn grid(args: GridArgs) -> Result<(), Error> {
    let (l, bundle) = args.solve.load()?;
    let (n, m) = bundle.dims();
    let mask = sample_mask(n, m, args.solve.rate, args.solve.seed)?;
    let obs = make_observation(&bundle, &mask, &args.solve.noise, args.solve.seed)?;

    let alphas = args
        .alphas
        .unwrap_or_else(graphmend::harness::default_alpha_grid);
    let betas = args
        .betas
        .unwrap_or_else(graphmend::harness::default_beta_grid);
    let base = baseline_config(args.solve.method);
    let valid = bundle.has_gaps().then(|| bundle.valid());
    let (alpha, beta, best) = grid_search(
        &obs,
        &l,
        args.solve.method,
        &base,
        &alphas,
        &betas,
        &args.solve.options(),
        valid,
    )?;
    println!("best alpha {alpha}, best beta {beta}, rmse {best:.6}");
    Ok(())
}
