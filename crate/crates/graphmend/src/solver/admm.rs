//! The two ADMM solvers.
//!
//! Both split the low-rank term off through a consensus variable `Z` and
//! linearize the ERF penalty into a weighted nuclear norm whose weights are
//! refreshed from the running iterate, so the `Z`-step is a weighted
//! singular value thresholding. The least-squares variant keeps the fit in
//! the `X`-step; the robust variant splits the fit off as well through an
//! entrywise soft-thresholded variable `V` on the observed entries.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lowrank::{self, SingularSpectrum, WeightVector};
use crate::solver::linear::{XSolver, XSystem};
use crate::solver::operator::ModelOperators;
use crate::solver::{
    lipschitz_estimate, lowrank_penalty_of_values, smooth_objective, Fidelity, IterationRecord,
    ModelConfig, ObservationSet, RecoveryResult, RhoPolicy, SolverOptions, WeightMode,
};

/// Multiplier on the Lipschitz bound in the guaranteed-descent regime.
const GUARANTEED_RHO_MARGIN: f64 = 1.01;

fn pick_rho(fixed: f64, config: &ModelConfig, ops: &ModelOperators, options: &SolverOptions) -> f64 {
    match options.rho_policy {
        RhoPolicy::Fixed => fixed,
        RhoPolicy::GuaranteedDescent => GUARANTEED_RHO_MARGIN * lipschitz_estimate(config, ops),
    }
}

/// Spectral weights for the current iterate per the configured mode.
fn spectral_weights(
    x_values: &DVector<f64>,
    config: &ModelConfig,
) -> Result<WeightVector> {
    match config.weight_mode {
        WeightMode::ErfReweighted => lowrank::erf_weights(x_values, config.sigma_erf),
        WeightMode::ConstantOnes | WeightMode::NoLowRank => {
            Ok(WeightVector::ones(x_values.len()))
        }
    }
}

/// One weighted-SVT step on `m`, returning the thresholded matrix together
/// with its singular values (already known from the shrink).
fn svt_step(
    m: &DMatrix<f64>,
    thresholds: &DVector<f64>,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if thresholds.iter().all(|&t| t == 0.0) {
        let values = SingularSpectrum::values_of(m);
        return Ok((m.clone(), values));
    }
    let spectrum = SingularSpectrum::decompose(m);
    let shrunk = DVector::from_fn(thresholds.len(), |i, _| {
        (spectrum.values()[i] - thresholds[i]).max(0.0)
    });
    Ok((spectrum.reassemble(&shrunk), shrunk))
}

fn check_finite(x: &DMatrix<f64>, iteration: usize) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Diverged { iteration });
    }
    Ok(())
}

/// Least-squares recovery by ADMM with iterative reweighting.
///
/// Per iteration: weights from the spectrum of the current `X`, a weighted
/// SVT for `Z`, one structured linear solve for `X`, and the scaled dual
/// update `Z_hat += X - Z`. Stops when both the consensus residual
/// `||X - Z||` and the relative change of `X` drop below the tolerance.
pub fn admm_l2(
    obs: &ObservationSet,
    l: &DMatrix<f64>,
    config: &ModelConfig,
    options: &SolverOptions,
) -> Result<RecoveryResult> {
    if config.fidelity != Fidelity::LeastSquares {
        return Err(Error::InvalidParameter(
            "this solver handles the least-squares fidelity; use the l1 solver instead".into(),
        ));
    }
    let (n, m) = obs.dims();
    let ops = ModelOperators::assemble(l, m, config)?;
    let rho = pick_rho(options.rho, config, &ops, options);
    if rho <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive, got {rho}"
        )));
    }

    // Z starts equal to X and the dual at zero; the first Z-step only
    // reads X + Z_hat, so Z itself is rebuilt every iteration.
    let mut x = obs.y().clone();
    let mut z_hat = DMatrix::<f64>::zeros(n, m);
    let mut x_values = SingularSpectrum::values_of(&x);

    let system = XSystem {
        mask: obs.mask(),
        op: &ops.smoothness,
        temporal_reg: ops.temporal_reg.as_ref(),
        alpha: config.alpha,
        gamma: config.gamma,
        mask_weight: 1.0,
        ridge: rho,
    };
    let mut solver = XSolver::build(&system, options)?;

    let mut diagnostics = Vec::new();
    let mut converged = false;
    let start = Instant::now();

    for iteration in 1..=options.max_iters {
        let weights = spectral_weights(&x_values, config)?;
        let thresholds = weights.scaled(config.beta / rho);
        let (z, z_values) = svt_step(&(&x + &z_hat), &thresholds)?;

        let rhs = obs.y() + (&z - &z_hat) * rho;
        let x_new = solver.solve(&system, &rhs)?;
        check_finite(&x_new, iteration)?;

        z_hat += &x_new - &z;

        let primal_residual = (&x_new - &z).norm();
        let dx = (&x_new - &x).norm();
        let x_norm_prev = x.norm();
        x = x_new;
        x_values = SingularSpectrum::values_of(&x);

        let f = smooth_objective(&x, obs, config, &ops);
        let objective = f + lowrank_penalty_of_values(&x_values, config);
        let gap = &x - &z;
        let augmented = f
            + lowrank_penalty_of_values(&z_values, config)
            + rho * z_hat.dot(&gap)
            + 0.5 * rho * gap.norm_squared();
        diagnostics.push(IterationRecord {
            objective,
            augmented_lagrangian: augmented,
            primal_residual,
            fit_residual: None,
            step_norm: dx,
            elapsed_s: start.elapsed().as_secs_f64(),
        });

        let consensus = primal_residual / x.norm().max(1.0);
        let movement = dx / x_norm_prev.max(1.0);
        if consensus.max(movement) < options.primal_tol {
            converged = true;
            break;
        }
    }

    let iterations = diagnostics.len();
    Ok(RecoveryResult {
        x_hat: x,
        iterations,
        converged,
        diagnostics,
        z_hat: Some(z_hat),
    })
}

/// Robust recovery with an l1 fit, by ADMM over two splitting variables.
///
/// `V` carries the fit residual on the observed entries and is updated by
/// entrywise soft thresholding; `Z` and `X` follow the same pattern as the
/// least-squares solver with the two step sizes `rho1` (fit constraint) and
/// `rho2` (consensus constraint).
pub fn admm_l1(
    obs: &ObservationSet,
    l: &DMatrix<f64>,
    config: &ModelConfig,
    options: &SolverOptions,
) -> Result<RecoveryResult> {
    if config.fidelity != Fidelity::L1 {
        return Err(Error::InvalidParameter(
            "this solver handles the l1 fidelity; use the least-squares solver instead".into(),
        ));
    }
    let (n, m) = obs.dims();
    let ops = ModelOperators::assemble(l, m, config)?;
    let rho1 = pick_rho(options.rho1, config, &ops, options);
    let rho2 = pick_rho(options.rho2, config, &ops, options);
    if rho1 <= 0.0 || rho2 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step sizes must be positive, got rho1 = {rho1}, rho2 = {rho2}"
        )));
    }

    let mut x = obs.y().clone();
    let mut z_hat = DMatrix::<f64>::zeros(n, m);
    let mut v_hat = DMatrix::<f64>::zeros(n, m);
    let mut x_values = SingularSpectrum::values_of(&x);

    let system = XSystem {
        mask: obs.mask(),
        op: &ops.smoothness,
        temporal_reg: ops.temporal_reg.as_ref(),
        alpha: config.alpha,
        gamma: config.gamma,
        mask_weight: rho1,
        ridge: rho2,
    };
    let mut solver = XSolver::build(&system, options)?;

    let mut diagnostics = Vec::new();
    let mut converged = false;
    let start = Instant::now();

    for iteration in 1..=options.max_iters {
        let weights = spectral_weights(&x_values, config)?;

        // V-step: prox of the l1 norm at the masked fit residual. Entries
        // off the mask stay exactly zero.
        let masked_x = obs.mask().component_mul(&x);
        let v = lowrank::shrink_matrix(&(&masked_x - obs.y() + &v_hat), 1.0 / rho1)
            .component_mul(obs.mask());

        let thresholds = weights.scaled(config.beta / rho2);
        let (z, z_values) = svt_step(&(&x + &z_hat), &thresholds)?;

        let fit_part = obs
            .mask()
            .component_mul(&(obs.y() + &v - &v_hat));
        let rhs = fit_part * rho1 + (&z - &z_hat) * rho2;
        let x_new = solver.solve(&system, &rhs)?;
        check_finite(&x_new, iteration)?;

        let masked_x_new = obs.mask().component_mul(&x_new);
        let fit_gap = &masked_x_new - obs.y() - &v;
        v_hat += &fit_gap;
        z_hat += &x_new - &z;

        let primal_residual = (&x_new - &z).norm();
        let fit_residual = fit_gap.norm();
        let dx = (&x_new - &x).norm();
        let x_norm_prev = x.norm();
        x = x_new;
        x_values = SingularSpectrum::values_of(&x);

        let l1_fit: f64 = (&masked_x_new - obs.y()).iter().map(|r| r.abs()).sum();
        let smooth_reg = 0.5 * config.alpha * ops.smoothness.quadratic_form(&x)
            + match (&ops.temporal_reg, config.gamma > 0.0) {
                (Some(reg), true) => 0.5 * config.gamma * reg.quadratic_form(&x),
                _ => 0.0,
            };
        let objective = l1_fit + smooth_reg + lowrank_penalty_of_values(&x_values, config);
        let v_l1: f64 = v.iter().map(|r| r.abs()).sum();
        let gap = &x - &z;
        let augmented = v_l1
            + smooth_reg
            + lowrank_penalty_of_values(&z_values, config)
            + rho1 * v_hat.dot(&fit_gap)
            + 0.5 * rho1 * fit_residual * fit_residual
            + rho2 * z_hat.dot(&gap)
            + 0.5 * rho2 * gap.norm_squared();
        diagnostics.push(IterationRecord {
            objective,
            augmented_lagrangian: augmented,
            primal_residual,
            fit_residual: Some(fit_residual),
            step_norm: dx,
            elapsed_s: start.elapsed().as_secs_f64(),
        });

        let consensus = primal_residual / x.norm().max(1.0);
        let fit_rel = fit_residual / obs.y().norm().max(1.0);
        let movement = dx / x_norm_prev.max(1.0);
        if consensus.max(fit_rel).max(movement) < options.primal_tol {
            converged = true;
            break;
        }
    }

    let iterations = diagnostics.len();
    Ok(RecoveryResult {
        x_hat: x,
        iterations,
        converged,
        diagnostics,
        z_hat: Some(z_hat),
    })
}
