//! Spatial graphs and their Laplacian operators.
//!
//! Graphs are built from vertex coordinates with a k-nearest-neighbour rule
//! and stored as a dense weighted adjacency. From there the module derives
//! the combinatorial Laplacian `L = M - A`, the symmetric normalized variant
//! `I - M^{-1/2} A M^{-1/2}`, the positive-definite power `(L + eps*I)^r`
//! used as a high-order spatial smoother, and the pseudo-inverse square root
//! used by the synthetic signal generator.
//!
//! Everything here is a pure function of immutable inputs; matrices are
//! dense because every experiment in this crate runs at a few hundred
//! vertices at most.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Edge weighting rule for [`build_knn_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeWeighting {
    /// `w_ij = 1 / d(i, j)^2`.
    InverseSquareDistance,
    /// `w_ij = 1` for every kept edge.
    Binary,
}

/// Which Laplacian to form from the adjacency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    /// `L = M - A`, row sums zero.
    Combinatorial,
    /// `L = I - M^{-1/2} A M^{-1/2}`; isolated vertices get an identity row.
    SymmetricNormalized,
}

/// Laplacian choice plus the parameters of the positive-definite power
/// `(L + eps*I)^r` applied on top of it.
///
/// `sobolev_order = 1` with `sobolev_epsilon = 0` leaves the Laplacian
/// untouched, which is how the plain-`L` baselines are expressed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianSpec {
    pub kind: LaplacianKind,
    pub sobolev_epsilon: f64,
    pub sobolev_order: f64,
}

impl LaplacianSpec {
    pub fn plain(kind: LaplacianKind) -> Self {
        Self {
            kind,
            sobolev_epsilon: 0.0,
            sobolev_order: 1.0,
        }
    }

    pub fn sobolev(kind: LaplacianKind, epsilon: f64, order: f64) -> Self {
        Self {
            kind,
            sobolev_epsilon: epsilon,
            sobolev_order: order,
        }
    }
}

/// An undirected weighted spatial graph over point coordinates.
///
/// Invariants enforced at construction: symmetric nonnegative adjacency with
/// zero diagonal, degree vector equal to the adjacency row sums, and at
/// least one incident edge per vertex.
#[derive(Debug, Clone)]
pub struct SpatialGraph {
    coords: DMatrix<f64>,
    adjacency: DMatrix<f64>,
    degree: DVector<f64>,
}

impl SpatialGraph {
    /// Wraps an explicit adjacency, validating the structural invariants.
    pub fn from_parts(coords: DMatrix<f64>, adjacency: DMatrix<f64>) -> Result<Self> {
        let n = coords.nrows();
        if adjacency.nrows() != n || adjacency.ncols() != n {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{n} adjacency"),
                got: format!("{}x{}", adjacency.nrows(), adjacency.ncols()),
            });
        }
        let max_asym = max_asymmetry(&adjacency);
        if max_asym > 1e-12 {
            return Err(Error::NotSymmetric { max_asym });
        }
        for i in 0..n {
            if adjacency[(i, i)] != 0.0 {
                return Err(Error::InvalidGraph(format!(
                    "nonzero diagonal entry at vertex {i}"
                )));
            }
            for j in 0..n {
                let w = adjacency[(i, j)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidGraph(format!(
                        "invalid weight {w} at ({i}, {j})"
                    )));
                }
            }
        }
        let degree = DVector::from_iterator(n, adjacency.row_iter().map(|r| r.sum()));
        if let Some(i) = degree.iter().position(|&d| d == 0.0) {
            return Err(Error::InvalidGraph(format!("vertex {i} is isolated")));
        }
        Ok(Self {
            coords,
            adjacency,
            degree,
        })
    }

    pub fn n(&self) -> usize {
        self.coords.nrows()
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    /// Row sums of the adjacency.
    pub fn degree(&self) -> &DVector<f64> {
        &self.degree
    }
}

fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Builds the kNN graph over `coords` (one row per vertex).
///
/// Each vertex is linked to its `k` nearest Euclidean neighbours and the
/// edge set is symmetrized by union: the edge `{i, j}` exists if `j` is
/// among the neighbours of `i` or vice versa. Weights are a function of the
/// pairwise distance, so the union rule cannot produce an asymmetric weight.
pub fn build_knn_graph(
    coords: &DMatrix<f64>,
    k: usize,
    weighting: EdgeWeighting,
) -> Result<SpatialGraph> {
    let n = coords.nrows();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if n < k + 1 {
        return Err(Error::TooFewVertices { n, k, needed: k + 1 });
    }
    if coords.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "coordinates must be finite".into(),
        ));
    }

    let mut adjacency = DMatrix::<f64>::zeros(n, n);
    let mut dist2 = vec![(0usize, 0.0f64); n];
    for i in 0..n {
        for (j, slot) in dist2.iter_mut().enumerate() {
            let d2: f64 = (coords.row(i) - coords.row(j)).norm_squared();
            *slot = (j, d2);
        }
        dist2.swap_remove(i);
        // Stable tie-break on the vertex index keeps the construction
        // deterministic for degenerate point sets.
        dist2.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        for &(j, d2) in dist2.iter().take(k) {
            let w = match weighting {
                EdgeWeighting::Binary => 1.0,
                EdgeWeighting::InverseSquareDistance => {
                    if d2 == 0.0 {
                        return Err(Error::DuplicateCoordinates {
                            i: i.min(j),
                            j: i.max(j),
                        });
                    }
                    1.0 / d2
                }
            };
            adjacency[(i, j)] = w;
            adjacency[(j, i)] = w;
        }
        dist2.push((0, 0.0));
    }

    SpatialGraph::from_parts(coords.clone(), adjacency)
}

/// Forms the Laplacian named by `spec.kind` (the Sobolev fields are applied
/// separately via [`sobolev_transform`]).
pub fn laplacian(graph: &SpatialGraph, spec: &LaplacianSpec) -> DMatrix<f64> {
    let n = graph.n();
    let a = graph.adjacency();
    match spec.kind {
        LaplacianKind::Combinatorial => {
            let mut l = -a.clone();
            for i in 0..n {
                l[(i, i)] = graph.degree()[i];
            }
            l
        }
        LaplacianKind::SymmetricNormalized => {
            let inv_sqrt: DVector<f64> = graph
                .degree()
                .map(|d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 });
            let mut l = DMatrix::<f64>::identity(n, n);
            for i in 0..n {
                for j in 0..n {
                    if a[(i, j)] != 0.0 {
                        l[(i, j)] -= inv_sqrt[i] * a[(i, j)] * inv_sqrt[j];
                    }
                }
            }
            l
        }
    }
}

/// Spectral decomposition of a symmetric PSD matrix, shared by the
/// matrix-power routines below and by the solver's preconditioner.
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SymmetricSpectrum {
    pub fn new(matrix: &DMatrix<f64>) -> Result<Self> {
        let max_asym = max_asymmetry(matrix);
        let scale = matrix.amax().max(1.0);
        if max_asym > 1e-10 * scale {
            return Err(Error::NotSymmetric { max_asym });
        }
        let sym = nalgebra::SymmetricEigen::new(matrix.clone());
        Ok(Self {
            eigenvalues: sym.eigenvalues,
            eigenvectors: sym.eigenvectors,
        })
    }

    /// Applies `f` to every eigenvalue and reassembles `U f(Lambda) U^T`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&self.eigenvalues.map(f));
        &self.eigenvectors * d * self.eigenvectors.transpose()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().cloned().fold(f64::MIN, f64::max)
    }
}

/// `(L + eps*I)^r` computed exactly through the eigendecomposition.
///
/// `r` may be non-integer. `eps = 0` is accepted only for `r = 1`, where the
/// result is `L` itself; any genuine power requires `eps > 0` so the base is
/// positive definite.
pub fn sobolev_transform(l: &DMatrix<f64>, epsilon: f64, order: f64) -> Result<DMatrix<f64>> {
    let (full, _) = sobolev_powers(l, epsilon, order)?;
    Ok(full)
}

/// Returns both `(L + eps*I)^r` and its half power `(L + eps*I)^{r/2}`.
pub fn sobolev_powers(
    l: &DMatrix<f64>,
    epsilon: f64,
    order: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    validate_sobolev_params(epsilon, order)?;
    if epsilon == 0.0 && order == 1.0 {
        // Plain Laplacian; the half power still needs the eigensolve.
        let spectrum = SymmetricSpectrum::new(l)?;
        let half = spectrum.map(|lam| lam.max(0.0).sqrt());
        return Ok((l.clone(), half));
    }
    let spectrum = SymmetricSpectrum::new(l)?;
    // Eigensolves of PSD matrices can return tiny negative values; clamp
    // before shifting so fractional powers stay real.
    let full = spectrum.map(|lam| (lam.max(0.0) + epsilon).powf(order));
    let half = spectrum.map(|lam| (lam.max(0.0) + epsilon).powf(order / 2.0));
    Ok((full, half))
}

fn validate_sobolev_params(epsilon: f64, order: f64) -> Result<()> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sobolev epsilon must be nonnegative, got {epsilon}"
        )));
    }
    if !(order >= 1.0 && order.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sobolev order must be at least 1, got {order}"
        )));
    }
    if epsilon == 0.0 && order != 1.0 {
        return Err(Error::InvalidParameter(
            "sobolev epsilon must be positive when order != 1".into(),
        ));
    }
    Ok(())
}

/// Relative threshold below which an eigenvalue counts as zero in
/// [`pseudo_inverse_sqrt`]. Eigensolves never return exact zeros.
pub const NULLSPACE_RELATIVE_TOL: f64 = 1e-10;

/// `L^{-1/2}` on the range of `L`: eigenvalues within
/// `NULLSPACE_RELATIVE_TOL * lambda_max` of zero map to zero, the rest to
/// `lambda^{-1/2}`.
pub fn pseudo_inverse_sqrt(l: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let spectrum = SymmetricSpectrum::new(l)?;
    let lam_max = spectrum.max_eigenvalue();
    if lam_max <= 0.0 {
        return Ok(DMatrix::zeros(l.nrows(), l.ncols()));
    }
    let cutoff = NULLSPACE_RELATIVE_TOL * lam_max;
    Ok(spectrum.map(|lam| if lam.abs() <= cutoff { 0.0 } else { 1.0 / lam.sqrt() }))
}
