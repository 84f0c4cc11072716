//! Experiment harness: plans, grid search, RMSE, result tables.
//!
//! A plan names the methods to compare, the sampling rates and noise levels
//! to sweep, the trade-off grids to tune over, and how many seeded trials
//! to average. Running it produces a CSV with one row per trial plus a
//! `mean` row per group, with every row carrying the full parameterization
//! that produced it. All randomness derives from the master seed (trial `i`
//! uses `master_seed + i`), so a rerun of the same plan yields the same
//! table byte for byte, provided timing capture is disabled.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{load_bundle, make_observation, DatasetBundle, NanPolicy};
use crate::error::{Error, Result};
use crate::graph::{build_knn_graph, laplacian, EdgeWeighting, LaplacianKind, LaplacianSpec};
use crate::solver::{
    admm_l1, admm_l2, baseline_config, solve_quadratic, BaselineMethod, Fidelity, ModelConfig,
    ObservationSet, RecoveryResult, SolverOptions, WeightMode,
};
use crate::synth::{sample_mask, synthesize, NoiseSpec, SyntheticSpec};

/// Root mean square error over the valid entries.
///
/// With no validity mask every entry counts and the denominator is
/// `sqrt(n * m)`; with one, only entries where the mask is positive score.
pub fn rmse(
    x: &DMatrix<f64>,
    x_hat: &DMatrix<f64>,
    valid: Option<&DMatrix<f64>>,
) -> Result<f64> {
    if x.shape() != x_hat.shape() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", x.nrows(), x.ncols()),
            got: format!("{}x{}", x_hat.nrows(), x_hat.ncols()),
        });
    }
    match valid {
        None => {
            let count = (x.nrows() * x.ncols()) as f64;
            Ok(((x - x_hat).norm_squared() / count).sqrt())
        }
        Some(mask) => {
            if mask.shape() != x.shape() {
                return Err(Error::ShapeMismatch {
                    expected: format!("{}x{}", x.nrows(), x.ncols()),
                    got: format!("{}x{}", mask.nrows(), mask.ncols()),
                });
            }
            let mut sum = 0.0;
            let mut count = 0usize;
            for ((a, b), v) in x.iter().zip(x_hat.iter()).zip(mask.iter()) {
                if *v > 0.0 {
                    sum += (a - b) * (a - b);
                    count += 1;
                }
            }
            if count == 0 {
                return Err(Error::InvalidParameter(
                    "validity mask excludes every entry".into(),
                ));
            }
            Ok((sum / count as f64).sqrt())
        }
    }
}

/// Default tuning grid for the smoothness weight.
pub fn default_alpha_grid() -> Vec<f64> {
    vec![0.0, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0]
}

/// Wider smoothness grid for noise-level sweeps.
pub fn noise_sweep_alpha_grid() -> Vec<f64> {
    vec![0.0, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 1e2, 1e3, 1e4]
}

/// Default tuning grid for the low-rank weight.
pub fn default_beta_grid() -> Vec<f64> {
    vec![0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0]
}

/// Optional per-method parameter overrides, for ablations and sensitivity
/// sweeps.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamOverrides {
    pub theta: Option<f64>,
    pub frac_k: Option<usize>,
    pub epsilon: Option<f64>,
    pub order_r: Option<f64>,
    pub sigma_erf: Option<f64>,
    pub gamma: Option<f64>,
    pub tau: Option<usize>,
}

impl ParamOverrides {
    fn apply(&self, config: &mut ModelConfig) {
        if let Some(v) = self.theta {
            config.theta = v;
        }
        if let Some(v) = self.frac_k {
            config.frac_k = v;
        }
        if let Some(v) = self.epsilon {
            config.epsilon = v;
        }
        if let Some(v) = self.order_r {
            config.order_r = v;
        }
        if let Some(v) = self.sigma_erf {
            config.sigma_erf = v;
        }
        if let Some(v) = self.gamma {
            config.gamma = v;
        }
        if let Some(v) = self.tau {
            config.tau = v;
        }
    }
}

/// One curve in the sweep: a named method, optional grid overrides, and an
/// optional label for the output table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method: BaselineMethod,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub beta_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub overrides: ParamOverrides,
}

impl MethodSpec {
    pub fn plain(method: BaselineMethod) -> Self {
        Self {
            method,
            label: None,
            alpha_grid: None,
            beta_grid: None,
            overrides: ParamOverrides::default(),
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.method.name().to_string())
    }
}

/// Where the ground-truth data comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DataSource {
    Synthetic { spec: SyntheticSpec },
    Files {
        signal: String,
        coords: String,
        #[serde(default = "default_file_knn")]
        knn_k: usize,
    },
}

fn default_file_knn() -> usize {
    5
}

/// Which Laplacian the solver uses (the synthetic generator always uses
/// the combinatorial one internally).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianChoice {
    Combinatorial,
    SymmetricNormalized,
}

impl From<LaplacianChoice> for LaplacianKind {
    fn from(c: LaplacianChoice) -> Self {
        match c {
            LaplacianChoice::Combinatorial => LaplacianKind::Combinatorial,
            LaplacianChoice::SymmetricNormalized => LaplacianKind::SymmetricNormalized,
        }
    }
}

/// A full experiment: data, methods, sweeps, tuning grids, seeding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub data: DataSource,
    pub methods: Vec<MethodSpec>,
    pub sampling_rates: Vec<f64>,
    #[serde(default = "default_noise_levels")]
    pub noise_levels: Vec<NoiseSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Trials used to evaluate each grid point during tuning; defaults to
    /// all of them.
    #[serde(default)]
    pub tuning_trials: Option<usize>,
    #[serde(default = "default_alpha_grid")]
    pub alpha_grid: Vec<f64>,
    #[serde(default = "default_beta_grid")]
    pub beta_grid: Vec<f64>,
    #[serde(default)]
    pub master_seed: u64,
    /// When false (the default) the time column is written as zero so that
    /// reruns of the same plan produce byte-identical tables.
    #[serde(default)]
    pub record_timing: bool,
    /// Solver Laplacian; defaults to combinatorial for synthetic data and
    /// symmetric normalized for files.
    #[serde(default)]
    pub laplacian: Option<LaplacianChoice>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub output: Option<String>,
}

fn default_noise_levels() -> Vec<NoiseSpec> {
    vec![NoiseSpec::None]
}

fn default_trials() -> usize {
    10
}

impl ExperimentPlan {
    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse {
            path: "plan".into(),
            msg: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(&path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.as_ref().display().to_string(),
            msg: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("plan has no methods".into()));
        }
        if self.sampling_rates.is_empty() {
            return Err(Error::InvalidParameter("plan has no sampling rates".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("need at least one trial".into()));
        }
        if self.alpha_grid.is_empty() || self.beta_grid.is_empty() {
            return Err(Error::InvalidParameter("tuning grids must be non-empty".into()));
        }
        if let Some(t) = self.tuning_trials
            && (t == 0 || t > self.trials)
        {
            return Err(Error::InvalidParameter(
                "tuning trials must be between 1 and the trial count".into(),
            ));
        }
        Ok(())
    }

    fn tuning_trials(&self) -> usize {
        self.tuning_trials.unwrap_or(self.trials)
    }
}

/// Ground truth plus the Laplacian the solvers will use.
pub struct PreparedData {
    pub bundle: DatasetBundle,
    pub laplacian: DMatrix<f64>,
}

/// Materializes the plan's data source.
pub fn prepare_data(plan: &ExperimentPlan) -> Result<PreparedData> {
    match &plan.data {
        DataSource::Synthetic { spec } => {
            let (graph, signal) = synthesize(spec)?;
            let kind = plan
                .laplacian
                .map(LaplacianKind::from)
                .unwrap_or(LaplacianKind::Combinatorial);
            let l = laplacian(&graph, &LaplacianSpec::plain(kind));
            let bundle =
                DatasetBundle::new("synthetic", graph.coords().clone(), signal)?;
            Ok(PreparedData { bundle, laplacian: l })
        }
        DataSource::Files {
            signal,
            coords,
            knn_k,
        } => {
            let bundle = load_bundle(signal, coords, NanPolicy::Mask)?;
            let graph = build_knn_graph(
                bundle.coords(),
                *knn_k,
                EdgeWeighting::InverseSquareDistance,
            )?;
            let kind = plan
                .laplacian
                .map(LaplacianKind::from)
                .unwrap_or(LaplacianKind::SymmetricNormalized);
            let l = laplacian(&graph, &LaplacianSpec::plain(kind));
            Ok(PreparedData { bundle, laplacian: l })
        }
    }
}

/// Routes a configuration to the solver that handles it: the closed-form
/// quadratic path when there is no low-rank term and the fit is least
/// squares, otherwise the matching ADMM.
pub fn solve_with_config(
    obs: &ObservationSet,
    l: &DMatrix<f64>,
    config: &ModelConfig,
    options: &SolverOptions,
) -> Result<RecoveryResult> {
    match (config.fidelity, config.beta == 0.0) {
        (Fidelity::LeastSquares, true) => solve_quadratic(obs, l, config, options),
        (Fidelity::LeastSquares, false) => admm_l2(obs, l, config, options),
        (Fidelity::L1, _) => admm_l1(obs, l, config, options),
    }
}

fn config_at(base: &ModelConfig, method: BaselineMethod, alpha: f64, beta: f64) -> Result<ModelConfig> {
    let mut config = *base;
    config.alpha = alpha;
    config.beta = beta;
    if beta == 0.0 {
        config.weight_mode = WeightMode::NoLowRank;
    } else if !method.has_low_rank() {
        return Err(Error::InvalidParameter(format!(
            "{} has no low-rank term; beta must be zero",
            method.name()
        )));
    } else {
        config.weight_mode = baseline_config(method).weight_mode;
    }
    Ok(config)
}

/// One solve on one seeded mask/noise draw.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub rmse: f64,
    pub iterations: usize,
    pub time_s: f64,
    pub error: Option<String>,
}

fn run_cell(
    data: &PreparedData,
    config: &ModelConfig,
    options: &SolverOptions,
    rate: f64,
    noise: &NoiseSpec,
    seed: u64,
) -> CellOutcome {
    let (n, m) = data.bundle.dims();
    // wall time covers the solve only, not data preparation
    let mut time_s = 0.0;
    let outcome = sample_mask(n, m, rate, seed)
        .and_then(|mask| make_observation(&data.bundle, &mask, noise, seed))
        .and_then(|obs| {
            let start = Instant::now();
            let result = solve_with_config(&obs, &data.laplacian, config, options);
            time_s = start.elapsed().as_secs_f64();
            let result = result?;
            let err = rmse(
                data.bundle.signal(),
                &result.x_hat,
                data.bundle.has_gaps().then(|| data.bundle.valid()),
            )?;
            Ok((err, result.iterations))
        });
    match outcome {
        Ok((err, iterations)) => CellOutcome {
            rmse: err,
            iterations,
            time_s,
            error: None,
        },
        Err(e) => CellOutcome {
            rmse: f64::NAN,
            iterations: 0,
            time_s,
            error: Some(e.to_string()),
        },
    }
}

/// Exhaustive grid search on a single observation set; requires ground
/// truth. Grid points are visited in ascending `(alpha, beta)` order and
/// only strict improvements replace the incumbent, so ties resolve to the
/// lexicographically smallest pair.
#[allow(clippy::too_many_arguments)]
pub fn grid_search(
    obs: &ObservationSet,
    l: &DMatrix<f64>,
    method: BaselineMethod,
    base: &ModelConfig,
    alphas: &[f64],
    betas: &[f64],
    options: &SolverOptions,
    valid: Option<&DMatrix<f64>>,
) -> Result<(f64, f64, f64)> {
    let truth = obs.ground_truth().ok_or_else(|| {
        Error::InvalidParameter("grid search needs ground truth".into())
    })?;
    let mut alphas = alphas.to_vec();
    let mut betas = betas.to_vec();
    alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    betas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if !method.has_low_rank() {
        betas = vec![0.0];
    }

    let points: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    let scores: Vec<f64> = points
        .par_iter()
        .map(|&(a, b)| {
            let config = match config_at(base, method, a, b) {
                Ok(c) => c,
                Err(_) => return f64::INFINITY,
            };
            match solve_with_config(obs, l, &config, options) {
                Ok(result) => {
                    rmse(truth, &result.x_hat, valid).unwrap_or(f64::INFINITY)
                }
                Err(_) => f64::INFINITY,
            }
        })
        .collect();

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (&(a, b), &score) in points.iter().zip(scores.iter()) {
        if score < best.0 {
            best = (score, a, b);
        }
    }
    if best.0.is_infinite() {
        return Err(Error::SingularSystem(
            "every grid point failed to solve".into(),
        ));
    }
    Ok((best.1, best.2, best.0))
}

/// All trials of one (method, rate, noise) group at the tuned weights.
#[derive(Debug, Clone)]
pub struct GroupResult {
    pub label: String,
    pub sampling_rate: f64,
    pub noise_param: f64,
    pub alpha: f64,
    pub beta: f64,
    pub trials: Vec<CellOutcome>,
    pub mean_rmse: f64,
    pub std_rmse: f64,
    pub mean_iterations: f64,
    pub mean_time_s: f64,
}

/// Everything a plan run produces.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub groups: Vec<GroupResult>,
    pub csv: String,
}

impl RunSummary {
    pub fn group(&self, label: &str, rate: f64, noise_param: f64) -> Option<&GroupResult> {
        self.groups.iter().find(|g| {
            g.label == label && g.sampling_rate == rate && g.noise_param == noise_param
        })
    }
}

/// Runs the whole plan: per (method, rate, noise) group, tunes
/// `(alpha, beta)` by exhaustive search averaged over the tuning trials,
/// then evaluates every trial at the tuned weights. Failed cells are
/// recorded, not fatal. Writes the CSV to `plan.output` when set.
pub fn run_plan(plan: &ExperimentPlan) -> Result<RunSummary> {
    plan.validate()?;
    let data = prepare_data(plan)?;
    let tuning_trials = plan.tuning_trials();

    let mut groups = Vec::new();
    for spec in &plan.methods {
        let mut base = baseline_config(spec.method);
        spec.overrides.apply(&mut base);
        let mut alphas = spec
            .alpha_grid
            .clone()
            .unwrap_or_else(|| plan.alpha_grid.clone());
        let mut betas = if spec.method.has_low_rank() {
            spec.beta_grid
                .clone()
                .unwrap_or_else(|| plan.beta_grid.clone())
        } else {
            vec![0.0]
        };
        alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        betas.sort_by(|a, b| a.partial_cmp(b).unwrap());

        for &rate in &plan.sampling_rates {
            for noise in &plan.noise_levels {
                let group = run_group(
                    plan,
                    &data,
                    spec,
                    &base,
                    &alphas,
                    &betas,
                    rate,
                    noise,
                    tuning_trials,
                )?;
                groups.push(group);
            }
        }
    }

    let csv = render_csv(&groups, plan.record_timing);
    if let Some(path) = &plan.output {
        std::fs::write(path, &csv)?;
    }
    Ok(RunSummary { groups, csv })
}

#[allow(clippy::too_many_arguments)]
fn run_group(
    plan: &ExperimentPlan,
    data: &PreparedData,
    spec: &MethodSpec,
    base: &ModelConfig,
    alphas: &[f64],
    betas: &[f64],
    rate: f64,
    noise: &NoiseSpec,
    tuning_trials: usize,
) -> Result<GroupResult> {
    // tuning: mean RMSE per grid point over the tuning trials
    let points: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    let cells: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|p| (0..tuning_trials).map(move |t| (p, plan.master_seed + t as u64)))
        .collect();
    let outcomes: Vec<f64> = cells
        .par_iter()
        .map(|&(p, seed)| {
            let (a, b) = points[p];
            let config = match config_at(base, spec.method, a, b) {
                Ok(c) => c,
                Err(_) => return f64::INFINITY,
            };
            let cell = run_cell(data, &config, &plan.solver, rate, noise, seed);
            if cell.error.is_some() {
                f64::INFINITY
            } else {
                cell.rmse
            }
        })
        .collect();

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (p, &(a, b)) in points.iter().enumerate() {
        let scores = &outcomes[p * tuning_trials..(p + 1) * tuning_trials];
        let mean = scores.iter().sum::<f64>() / tuning_trials as f64;
        if mean < best.0 {
            best = (mean, a, b);
        }
    }
    if best.0.is_infinite() {
        return Err(Error::SingularSystem(format!(
            "no grid point solved for {} at rate {rate}",
            spec.label()
        )));
    }
    let (alpha, beta) = (best.1, best.2);
    let config = config_at(base, spec.method, alpha, beta)?;

    // evaluation at the tuned weights
    let trials: Vec<CellOutcome> = (0..plan.trials)
        .into_par_iter()
        .map(|t| {
            run_cell(
                data,
                &config,
                &plan.solver,
                rate,
                noise,
                plan.master_seed + t as u64,
            )
        })
        .collect();

    let ok: Vec<&CellOutcome> = trials.iter().filter(|c| c.error.is_none()).collect();
    let (mean_rmse, std_rmse, mean_iterations, mean_time_s) = if ok.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    } else {
        let k = ok.len() as f64;
        let mean = ok.iter().map(|c| c.rmse).sum::<f64>() / k;
        let var = if ok.len() > 1 {
            ok.iter().map(|c| (c.rmse - mean) * (c.rmse - mean)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        (
            mean,
            var.sqrt(),
            ok.iter().map(|c| c.iterations as f64).sum::<f64>() / k,
            ok.iter().map(|c| c.time_s).sum::<f64>() / k,
        )
    };

    Ok(GroupResult {
        label: spec.label(),
        sampling_rate: rate,
        noise_param: noise.parameter(),
        alpha,
        beta,
        trials,
        mean_rmse,
        std_rmse,
        mean_iterations,
        mean_time_s,
    })
}

/// CSV schema: `method,sampling_rate,noise_param,trial,alpha,beta,rmse,iters,time_s`.
pub fn render_csv(groups: &[GroupResult], record_timing: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "method,sampling_rate,noise_param,trial,alpha,beta,rmse,iters,time_s"
    );
    let time_of = |t: f64| if record_timing { format!("{t:.6}") } else { "0".to_string() };
    for g in groups {
        for (t, cell) in g.trials.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                g.label,
                g.sampling_rate,
                g.noise_param,
                t,
                g.alpha,
                g.beta,
                cell.rmse,
                cell.iterations,
                time_of(cell.time_s)
            );
        }
        let _ = writeln!(
            out,
            "{},{},{},mean,{},{},{},{},{}",
            g.label,
            g.sampling_rate,
            g.noise_param,
            g.alpha,
            g.beta,
            g.mean_rmse,
            g.mean_iterations,
            time_of(g.mean_time_s)
        );
    }
    out
}
