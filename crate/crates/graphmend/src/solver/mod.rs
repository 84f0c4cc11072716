//! The unified recovery model and its solvers.
//!
//! One configuration type covers the whole family
//!
//! ```text
//! min_X  fit(Y - J .* X) + alpha/2 * tr(D^T X^T (L+eps I)^r X D)
//!        + beta * R(X) + gamma/2 * tr(X L_t X^T)
//! ```
//!
//! where the fit is either least squares or an l1 norm, `D` is a
//! (fractional-order) temporal difference, and `R` is the adaptively
//! weighted nuclear penalty. Classical baselines are specific corners of
//! this space, exposed through [`BaselineMethod`]. Three solvers cover it:
//!
//! - [`admm_l2`]: ADMM with iterative reweighting for the least-squares
//!   model with a low-rank term.
//! - [`admm_l1`]: the robust variant with an l1 fit and a second splitting
//!   variable.
//! - [`solve_quadratic`]: the closed-form path when `beta = 0` and the
//!   model is a pure quadratic.

mod admm;
mod baselines;
mod linear;
mod operator;
mod quadratic;

pub use admm::{admm_l1, admm_l2};
pub use baselines::{baseline_config, BaselineMethod};
pub use linear::{LinearSolverKind, DIRECT_SOLVE_LIMIT};
pub use operator::{smooth_matvec, ModelOperators, SmoothnessOperator, TemporalRegularizer};
pub use quadratic::solve_quadratic;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lowrank;
use crate::solver::linear::{XSolver, XSystem};

/// Data fidelity of the recovery model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fidelity {
    LeastSquares,
    L1,
}

/// How the spectral weights of the nuclear penalty are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// `w_i = exp(-sigma_i(X)^2 / sigma^2)`, recomputed every iteration.
    ErfReweighted,
    /// All-ones weights: the plain nuclear norm.
    ConstantOnes,
    /// No low-rank term at all; requires `beta = 0`.
    NoLowRank,
}

/// Every knob of the unified model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    /// Weight of the spatial-temporal smoothness term.
    pub alpha: f64,
    /// Weight of the low-rank term.
    pub beta: f64,
    /// Weight of the temporal Tikhonov term.
    pub gamma: f64,
    /// Temporal difference order; `0` disables the difference entirely.
    pub theta: f64,
    /// Stencil band width for fractional `theta`.
    pub frac_k: usize,
    /// Order of the temporal Laplacian (used only when `gamma > 0`).
    pub tau: usize,
    /// Shift of the spatial Laplacian power.
    pub epsilon: f64,
    /// Order of the spatial Laplacian power; `1` with `epsilon = 0` keeps
    /// the plain Laplacian.
    pub order_r: f64,
    /// Filtering parameter of the ERF penalty.
    pub sigma_erf: f64,
    pub fidelity: Fidelity,
    pub weight_mode: WeightMode,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("theta", self.theta),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if (self.weight_mode == WeightMode::NoLowRank) != (self.beta == 0.0) {
            return Err(Error::InvalidParameter(
                "beta = 0 exactly when the weight mode disables the low-rank term".into(),
            ));
        }
        if self.beta > 0.0 && (self.sigma_erf.is_nan() || self.sigma_erf <= 0.0) {
            return Err(Error::InvalidParameter(
                "sigma_erf must be positive".into(),
            ));
        }
        if self.theta > 0.0 && self.theta.fract() != 0.0 && self.frac_k < 1 {
            return Err(Error::InvalidParameter(
                "fractional orders need a band width of at least 1".into(),
            ));
        }
        if self.gamma > 0.0 && self.tau == 0 {
            return Err(Error::InvalidParameter(
                "temporal Laplacian order must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of stencil coefficients minus one: integer orders carry
    /// exactly `theta + 1` nonzero coefficients, fractional orders truncate
    /// at `frac_k`.
    pub fn effective_band(&self) -> usize {
        if self.theta.fract() == 0.0 {
            self.theta as usize
        } else {
            self.frac_k
        }
    }
}

/// Observed data: measurements, sampling mask, optional ground truth.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    y: DMatrix<f64>,
    mask: DMatrix<f64>,
    ground_truth: Option<DMatrix<f64>>,
}

impl ObservationSet {
    /// Validates that the mask is binary and `y` vanishes off the mask.
    pub fn new(
        y: DMatrix<f64>,
        mask: DMatrix<f64>,
        ground_truth: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        if y.shape() != mask.shape() {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", y.nrows(), y.ncols()),
                got: format!("{}x{}", mask.nrows(), mask.ncols()),
            });
        }
        if let Some(t) = &ground_truth
            && t.shape() != y.shape()
        {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", y.nrows(), y.ncols()),
                got: format!("{}x{}", t.nrows(), t.ncols()),
            });
        }
        for (j, y_val) in mask.iter().zip(y.iter()) {
            if *j != 0.0 && *j != 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "mask entries must be 0 or 1, got {j}"
                )));
            }
            if *j == 0.0 && *y_val != 0.0 {
                return Err(Error::InvalidParameter(
                    "observations must be zero at unsampled entries".into(),
                ));
            }
            if !y_val.is_finite() {
                return Err(Error::InvalidParameter(
                    "observations must be finite".into(),
                ));
            }
        }
        Ok(Self {
            y,
            mask,
            ground_truth,
        })
    }

    /// Masks a complete signal: `y = mask .* signal`.
    pub fn from_signal(signal: &DMatrix<f64>, mask: DMatrix<f64>) -> Result<Self> {
        let y = signal.component_mul(&mask);
        Self::new(y, mask, Some(signal.clone()))
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn mask(&self) -> &DMatrix<f64> {
        &self.mask
    }

    pub fn ground_truth(&self) -> Option<&DMatrix<f64>> {
        self.ground_truth.as_ref()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.y.nrows(), self.y.ncols())
    }

    pub fn observed_count(&self) -> usize {
        self.mask.iter().filter(|&&v| v == 1.0).count()
    }
}

/// How the ADMM step size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoPolicy {
    /// Use the step sizes stored in the options verbatim.
    #[default]
    Fixed,
    /// Set the step size to `1.01 *` the Lipschitz bound of the smooth
    /// part, the regime in which the augmented Lagrangian provably
    /// decreases every iteration.
    GuaranteedDescent,
}

/// Iteration controls shared by the solvers.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// ADMM step size for the least-squares algorithm.
    pub rho: f64,
    /// Step size on the fit constraint of the l1 algorithm.
    pub rho1: f64,
    /// Step size on the consensus constraint of the l1 algorithm.
    pub rho2: f64,
    pub rho_policy: RhoPolicy,
    pub max_iters: usize,
    /// Stop when both the consensus residual and the relative change of
    /// the iterate fall below this.
    pub primal_tol: f64,
    pub linear_solver: LinearSolverKind,
    /// Relative residual target of the inner conjugate-gradient solve.
    pub cg_tol: f64,
    pub cg_max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rho: 1e-6,
            rho1: 1e-6,
            rho2: 1e-6,
            rho_policy: RhoPolicy::Fixed,
            max_iters: 2000,
            primal_tol: 1e-6,
            linear_solver: LinearSolverKind::Auto,
            cg_tol: 1e-10,
            cg_max_iters: 10_000,
        }
    }
}

/// Per-iteration observables of a solver run.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    pub objective: f64,
    pub augmented_lagrangian: f64,
    /// Consensus residual `||X - Z||_F`.
    pub primal_residual: f64,
    /// Fit residual `||J .* X - Y - V||_F` of the l1 algorithm.
    pub fit_residual: Option<f64>,
    /// Movement `||X_next - X||_F` of the iterate.
    pub step_norm: f64,
    /// Cumulative wall time when the iteration finished.
    pub elapsed_s: f64,
}

/// A recovered signal plus everything needed to audit the run.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub x_hat: DMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub diagnostics: Vec<IterationRecord>,
    /// Scaled dual variable of the consensus constraint at termination
    /// (absent for the closed-form quadratic path).
    pub z_hat: Option<DMatrix<f64>>,
}

impl RecoveryResult {
    pub fn final_primal_residual(&self) -> Option<f64> {
        self.diagnostics.last().map(|d| d.primal_residual)
    }
}

/// The low-rank penalty named by the weight mode, evaluated on a sorted
/// singular spectrum: the ERF norm when reweighting, the plain nuclear
/// norm for constant weights, nothing otherwise.
pub(crate) fn lowrank_penalty_of_values(
    values: &nalgebra::DVector<f64>,
    config: &ModelConfig,
) -> f64 {
    if config.beta == 0.0 {
        return 0.0;
    }
    match config.weight_mode {
        WeightMode::ErfReweighted => {
            config.beta
                * values
                    .iter()
                    .map(|&v| lowrank::erf_integral(v, config.sigma_erf))
                    .sum::<f64>()
        }
        WeightMode::ConstantOnes => config.beta * values.sum(),
        WeightMode::NoLowRank => 0.0,
    }
}

/// Objective value of the model at `x`.
pub fn objective_value(
    x: &DMatrix<f64>,
    obs: &ObservationSet,
    config: &ModelConfig,
    ops: &ModelOperators,
) -> Result<f64> {
    let residual = obs.mask().component_mul(x) - obs.y();
    let fit = match config.fidelity {
        Fidelity::LeastSquares => 0.5 * residual.norm_squared(),
        Fidelity::L1 => residual.iter().map(|v| v.abs()).sum(),
    };
    let smooth = 0.5 * config.alpha * ops.smoothness.quadratic_form(x);
    let temporal = match (&ops.temporal_reg, config.gamma > 0.0) {
        (Some(reg), true) => 0.5 * config.gamma * reg.quadratic_form(x),
        _ => 0.0,
    };
    let lowrank_term = if config.beta > 0.0 {
        let values = lowrank::SingularSpectrum::values_of(x);
        lowrank_penalty_of_values(&values, config)
    } else {
        0.0
    };
    Ok(fit + smooth + temporal + lowrank_term)
}

/// The smooth part `f(X)`: fit plus quadratic regularizers, without the
/// low-rank term.
pub(crate) fn smooth_objective(
    x: &DMatrix<f64>,
    obs: &ObservationSet,
    config: &ModelConfig,
    ops: &ModelOperators,
) -> f64 {
    let residual = obs.mask().component_mul(x) - obs.y();
    let fit = 0.5 * residual.norm_squared();
    let smooth = 0.5 * config.alpha * ops.smoothness.quadratic_form(x);
    let temporal = match (&ops.temporal_reg, config.gamma > 0.0) {
        (Some(reg), true) => 0.5 * config.gamma * reg.quadratic_form(x),
        _ => 0.0,
    };
    fit + smooth + temporal
}

/// Gradient of the smooth part: `J .* X - Y + alpha * Ls X DD^T
/// (+ gamma * X L_t)`.
pub fn smooth_gradient(
    x: &DMatrix<f64>,
    obs: &ObservationSet,
    config: &ModelConfig,
    ops: &ModelOperators,
) -> DMatrix<f64> {
    let mut grad = obs.mask().component_mul(x) - obs.y();
    if config.alpha > 0.0 {
        grad += ops.smoothness.apply(x) * config.alpha;
    }
    if let (Some(reg), true) = (&ops.temporal_reg, config.gamma > 0.0) {
        grad += x * reg.matrix() * config.gamma;
    }
    grad
}

/// Augmented Lagrangian of the consensus splitting at `(x, z, z_hat)` with
/// step size `rho` (scaled dual form).
pub fn augmented_lagrangian(
    x: &DMatrix<f64>,
    z: &DMatrix<f64>,
    z_hat: &DMatrix<f64>,
    obs: &ObservationSet,
    config: &ModelConfig,
    ops: &ModelOperators,
    rho: f64,
) -> Result<f64> {
    let f = smooth_objective(x, obs, config, ops);
    let penalty = if config.beta > 0.0 {
        let values = lowrank::SingularSpectrum::values_of(z);
        lowrank_penalty_of_values(&values, config)
    } else {
        0.0
    };
    let gap = x - z;
    Ok(f + penalty + rho * z_hat.dot(&gap) + 0.5 * rho * gap.norm_squared())
}

/// Upper bound on the Lipschitz constant of the smooth part's gradient:
/// `1 + alpha * lambda_max(DD^T) * lambda_max((L+eps I)^r) + gamma *
/// lambda_max(L_t)`. The leading 1 covers the sampling diagonal, whose
/// spectral norm is at most one.
pub fn lipschitz_estimate(config: &ModelConfig, ops: &ModelOperators) -> f64 {
    let mut bound = 1.0 + config.alpha * ops.smoothness.max_curvature();
    if let (Some(reg), true) = (&ops.temporal_reg, config.gamma > 0.0) {
        bound += config.gamma * reg.max_eigenvalue();
    }
    bound
}

/// Solves the least-squares X-subproblem
/// `(diag(vec(J)) + alpha A^T A + rho I) vec(X) = vec(Y) + rho vec(target)`
/// by the path selected in `options`.
pub fn solve_x_subproblem(
    obs: &ObservationSet,
    op: &SmoothnessOperator,
    alpha: f64,
    rho: f64,
    rhs_target: &DMatrix<f64>,
    options: &SolverOptions,
) -> Result<DMatrix<f64>> {
    if rho <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive, got {rho}"
        )));
    }
    let system = XSystem {
        mask: obs.mask(),
        op,
        temporal_reg: None,
        alpha,
        gamma: 0.0,
        mask_weight: 1.0,
        ridge: rho,
    };
    let rhs = obs.y() + rhs_target * rho;
    let mut solver = XSolver::build(&system, options)?;
    solver.solve(&system, &rhs)
}
