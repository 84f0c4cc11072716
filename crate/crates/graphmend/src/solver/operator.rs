//! The structured quadratic operators of the recovery model.
//!
//! The smoothness term couples a spatial matrix power `(L + eps*I)^r` with a
//! temporal difference Gram matrix `D * D^T`. Its action on a signal matrix
//! is `(L + eps*I)^r * X * (D D^T)`, which is the reshaped action of the
//! Kronecker normal matrix on `vec(X)` without ever materializing the
//! `nm x nm` product. Spectral decompositions of both factors are kept
//! because the iterative solver preconditions with them and the step-size
//! bound needs the extreme eigenvalues.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::SymmetricSpectrum;
use crate::solver::ModelConfig;
use crate::temporal::{build_difference_matrix, temporal_laplacian};

/// Spatial power plus temporal difference, with cached spectra.
#[derive(Debug, Clone)]
pub struct SmoothnessOperator {
    full_power: DMatrix<f64>,
    half_power: DMatrix<f64>,
    difference: DMatrix<f64>,
    gram: DMatrix<f64>,
    spatial: SpectralCache,
    temporal: SpectralCache,
}

#[derive(Debug, Clone)]
pub(crate) struct SpectralCache {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralCache {
    fn identity(dim: usize) -> Self {
        Self {
            eigenvalues: DVector::from_element(dim, 1.0),
            eigenvectors: DMatrix::identity(dim, dim),
        }
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().cloned().fold(0.0, f64::max)
    }
}

impl SmoothnessOperator {
    /// Builds the operator for an `n x m` problem from the base spatial
    /// Laplacian `l` and the model parameters (`epsilon`, `order_r`,
    /// `theta`, `frac_k`).
    ///
    /// `theta = 0` keeps the temporal factor at the identity. Integer
    /// `theta` uses exactly `theta` + 1 stencil coefficients; fractional
    /// orders truncate at `frac_k`.
    pub fn new(l: &DMatrix<f64>, m: usize, config: &ModelConfig) -> Result<Self> {
        if l.nrows() != l.ncols() {
            return Err(Error::ShapeMismatch {
                expected: "square Laplacian".into(),
                got: format!("{}x{}", l.nrows(), l.ncols()),
            });
        }
        let spectrum = SymmetricSpectrum::new(l)?;
        crate::graph::sobolev_powers(l, config.epsilon, config.order_r)?; // parameter validation
        let lam = spectrum.eigenvalues.map(|v| v.max(0.0) + config.epsilon);
        let full_vals = lam.map(|v| v.powf(config.order_r));
        let half_vals = lam.map(|v| v.powf(config.order_r / 2.0));
        let full_power = &spectrum.eigenvectors
            * DMatrix::from_diagonal(&full_vals)
            * spectrum.eigenvectors.transpose();
        let half_power = &spectrum.eigenvectors
            * DMatrix::from_diagonal(&half_vals)
            * spectrum.eigenvectors.transpose();
        let spatial = SpectralCache {
            eigenvalues: full_vals,
            eigenvectors: spectrum.eigenvectors,
        };

        let (difference, gram, temporal) = if config.theta == 0.0 {
            (
                DMatrix::identity(m, m),
                DMatrix::identity(m, m),
                SpectralCache::identity(m),
            )
        } else {
            let k = config.effective_band();
            let diff = build_difference_matrix(m, config.theta, k)?;
            let gram = diff.gram();
            let spec = SymmetricSpectrum::new(&gram)?;
            (
                diff.matrix().clone(),
                gram,
                SpectralCache {
                    eigenvalues: spec.eigenvalues.map(|v| v.max(0.0)),
                    eigenvectors: spec.eigenvectors,
                },
            )
        };

        Ok(Self {
            full_power,
            half_power,
            difference,
            gram,
            spatial,
            temporal,
        })
    }

    /// `(L + eps*I)^r`.
    pub fn full_power(&self) -> &DMatrix<f64> {
        &self.full_power
    }

    /// `(L + eps*I)^{r/2}`.
    pub fn half_power(&self) -> &DMatrix<f64> {
        &self.half_power
    }

    /// The temporal difference matrix `D` (identity for order zero).
    pub fn difference(&self) -> &DMatrix<f64> {
        &self.difference
    }

    /// `D * D^T`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn spatial_dim(&self) -> usize {
        self.full_power.nrows()
    }

    pub fn temporal_dim(&self) -> usize {
        self.gram.nrows()
    }

    pub(crate) fn spatial_cache(&self) -> &SpectralCache {
        &self.spatial
    }

    pub(crate) fn temporal_cache(&self) -> &SpectralCache {
        &self.temporal
    }

    /// Largest eigenvalue of the full Kronecker normal matrix.
    pub fn max_curvature(&self) -> f64 {
        self.spatial.max_eigenvalue() * self.temporal.max_eigenvalue()
    }

    pub(crate) fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.full_power * x * &self.gram
    }

    /// Smoothness quadratic form `tr(D^T X^T (L+eps I)^r X D)`.
    pub fn quadratic_form(&self, x: &DMatrix<f64>) -> f64 {
        x.dot(&self.apply(x))
    }
}

/// `(L + eps*I)^r * X * (D D^T)`: the action of the normal matrix of the
/// smoothness term on `X`, computed with two dense products.
pub fn smooth_matvec(op: &SmoothnessOperator, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.nrows() != op.spatial_dim() || x.ncols() != op.temporal_dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", op.spatial_dim(), op.temporal_dim()),
            got: format!("{}x{}", x.nrows(), x.ncols()),
        });
    }
    Ok(op.apply(x))
}

/// The optional temporal Tikhonov piece `L_t = D_tau D_tau^T` with its
/// spectrum, present only when the model weight `gamma` is positive.
#[derive(Debug, Clone)]
pub struct TemporalRegularizer {
    matrix: DMatrix<f64>,
    pub(crate) cache: SpectralCache,
}

impl TemporalRegularizer {
    pub fn new(m: usize, tau: usize) -> Result<Self> {
        let matrix = temporal_laplacian(m, tau)?;
        let spec = SymmetricSpectrum::new(&matrix)?;
        Ok(Self {
            matrix,
            cache: SpectralCache {
                eigenvalues: spec.eigenvalues.map(|v| v.max(0.0)),
                eigenvectors: spec.eigenvectors,
            },
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.cache.max_eigenvalue()
    }

    /// Temporal quadratic form `tr(X L_t X^T)`.
    pub fn quadratic_form(&self, x: &DMatrix<f64>) -> f64 {
        x.dot(&(x * &self.matrix))
    }
}

/// Everything the solvers derive from a model configuration and a base
/// Laplacian: the smoothness operator and, when `gamma > 0`, the temporal
/// regularizer.
#[derive(Debug, Clone)]
pub struct ModelOperators {
    pub smoothness: SmoothnessOperator,
    pub temporal_reg: Option<TemporalRegularizer>,
}

impl ModelOperators {
    pub fn assemble(l: &DMatrix<f64>, m: usize, config: &ModelConfig) -> Result<Self> {
        config.validate()?;
        let smoothness = SmoothnessOperator::new(l, m, config)?;
        let temporal_reg = if config.gamma > 0.0 {
            Some(TemporalRegularizer::new(m, config.tau)?)
        } else {
            None
        };
        Ok(Self {
            smoothness,
            temporal_reg,
        })
    }
}
