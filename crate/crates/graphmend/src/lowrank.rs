//! Adaptive low-rank machinery: the error-function norm of a spectrum, the
//! exponential weights its linearization produces, and the weighted singular
//! value thresholding step that solves the resulting proximal subproblem.
//!
//! The ERF norm of a matrix is `sum_i integral_0^{sigma_i} exp(-t^2/s^2) dt`
//! over its singular values. For small `s` the integrand saturates quickly
//! and large singular values stop being penalized; as `s` grows the norm
//! approaches the plain nuclear norm. Its linearization at the current
//! iterate yields weights `w_i = exp(-sigma_i^2 / s^2)` that are
//! non-decreasing whenever the spectrum is non-increasing, which is exactly
//! the validity condition of the weighted nuclear norm proximal step.

use nalgebra::{DMatrix, DVector};
use statrs::function::erf::erf;

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772453850905516;

/// Singular values of a matrix in non-increasing order, with the factors
/// kept for reconstruction.
#[derive(Debug, Clone)]
pub struct SingularSpectrum {
    values: DVector<f64>,
    u: DMatrix<f64>,
    v_t: DMatrix<f64>,
}

impl SingularSpectrum {
    /// Thin SVD with all `min(n, m)` singular values.
    pub fn decompose(matrix: &DMatrix<f64>) -> Self {
        let svd = nalgebra::SVD::new(matrix.clone(), true, true);
        let mut s = Self {
            values: svd.singular_values,
            u: svd.u.expect("requested U"),
            v_t: svd.v_t.expect("requested V^T"),
        };
        s.sort_descending();
        s
    }

    /// Singular values only; cheaper when the factors are not needed.
    pub fn values_of(matrix: &DMatrix<f64>) -> DVector<f64> {
        let svd = nalgebra::SVD::new(matrix.clone(), false, false);
        let mut v: Vec<f64> = svd.singular_values.iter().cloned().collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        DVector::from_vec(v)
    }

    fn sort_descending(&mut self) {
        let p = self.values.len();
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| self.values[b].partial_cmp(&self.values[a]).unwrap());
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return;
        }
        let values = DVector::from_fn(p, |i, _| self.values[order[i]]);
        let u = DMatrix::from_fn(self.u.nrows(), p, |r, c| self.u[(r, order[c])]);
        let v_t = DMatrix::from_fn(p, self.v_t.ncols(), |r, c| self.v_t[(order[r], c)]);
        self.values = values;
        self.u = u;
        self.v_t = v_t;
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    /// Rebuilds `U * diag(values) * V^T` with the given values in place of
    /// the originals.
    pub fn reassemble(&self, values: &DVector<f64>) -> DMatrix<f64> {
        let p = values.len();
        let mut scaled = self.u.clone();
        for c in 0..p {
            scaled.column_mut(c).scale_mut(values[c]);
        }
        scaled * &self.v_t
    }
}

/// Nonnegative weights aligned with a singular spectrum.
#[derive(Debug, Clone)]
pub struct WeightVector(pub DVector<f64>);

impl WeightVector {
    pub fn ones(p: usize) -> Self {
        Self(DVector::from_element(p, 1.0))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn scaled(&self, factor: f64) -> DVector<f64> {
        &self.0 * factor
    }
}

/// The ERF norm `sum_i (s * sqrt(pi) / 2) * erf(sigma_i / s)`, which equals
/// the defining integral `sum_i integral_0^{sigma_i} exp(-t^2 / s^2) dt`
/// exactly.
pub fn erf_norm(matrix: &DMatrix<f64>, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let values = SingularSpectrum::values_of(matrix);
    Ok(values.iter().map(|&v| erf_integral(v, sigma)).sum())
}

/// `integral_0^{upper} exp(-t^2 / sigma^2) dt` in closed form.
pub fn erf_integral(upper: f64, sigma: f64) -> f64 {
    sigma * SQRT_PI / 2.0 * erf(upper / sigma)
}

/// Adaptive weights `w_i = exp(-sigma_i^2 / sigma^2)` from a spectrum.
///
/// Non-increasing singular values give non-decreasing weights in `[0, 1]`.
pub fn erf_weights(values: &DVector<f64>, sigma: f64) -> Result<WeightVector> {
    check_sigma(sigma)?;
    Ok(WeightVector(
        values.map(|v| (-(v * v) / (sigma * sigma)).exp()),
    ))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "erf filtering parameter must be positive, got {sigma}"
        )));
    }
    Ok(())
}

/// Soft threshold: `sign(x) * max(|x| - xi, 0)`.
pub fn shrink(x: f64, xi: f64) -> f64 {
    x.signum() * (x.abs() - xi).max(0.0)
}

/// Entrywise soft threshold of a matrix.
pub fn shrink_matrix(m: &DMatrix<f64>, xi: f64) -> DMatrix<f64> {
    m.map(|x| shrink(x, xi))
}

/// Weighted singular value thresholding.
///
/// Computes the SVD of `matrix`, replaces each singular value by
/// `max(sigma_i - thresholds[i], 0)` and reassembles. For non-decreasing
/// thresholds this is the exact minimizer of
/// `sum_i t_i * sigma_i(Z) + 1/2 * ||Z - matrix||_F^2`; decreasing
/// thresholds invalidate the closed form and are rejected.
pub fn weighted_svt(matrix: &DMatrix<f64>, thresholds: &DVector<f64>) -> Result<DMatrix<f64>> {
    let p = matrix.nrows().min(matrix.ncols());
    if thresholds.len() != p {
        return Err(Error::ShapeMismatch {
            expected: format!("{p} thresholds"),
            got: format!("{}", thresholds.len()),
        });
    }
    for i in 0..p {
        let t = thresholds[i];
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "threshold {i} must be nonnegative, got {t}"
            )));
        }
        if i > 0 && t < thresholds[i - 1] {
            return Err(Error::DecreasingThresholds { index: i });
        }
    }
    if thresholds.iter().all(|&t| t == 0.0) {
        return Ok(matrix.clone());
    }
    let spectrum = SingularSpectrum::decompose(matrix);
    let shrunk = DVector::from_fn(p, |i, _| (spectrum.values()[i] - thresholds[i]).max(0.0));
    Ok(spectrum.reassemble(&shrunk))
}

/// Sum of singular values.
pub fn nuclear_norm(matrix: &DMatrix<f64>) -> f64 {
    SingularSpectrum::values_of(matrix).sum()
}
