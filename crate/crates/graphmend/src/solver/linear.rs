//! Linear-system solvers for the quadratic subproblems.
//!
//! Every solve in this crate has the form
//!
//! ```text
//! (c_mask * diag(vec(J)) + alpha * (DD^T kron Ls) + gamma * (L_t kron I) + c_id * I) vec(X) = vec(B)
//! ```
//!
//! with `Ls = (L + eps*I)^r`. Two paths are provided. The direct path
//! assembles the `nm x nm` matrix once, Cholesky-factors it, and reuses the
//! factor for every right-hand side; it is the right tool while `n * m`
//! stays small. The iterative path never forms the big matrix: it runs
//! conjugate gradients with the structured matvec above and preconditions
//! with the Kronecker part (whose inverse is two small eigenbases and an
//! entrywise division), warm-starting from the previous iterate.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};
use crate::solver::operator::{SmoothnessOperator, TemporalRegularizer};
use crate::solver::SolverOptions;

/// Problem size up to which the dense direct factorization is preferred
/// when the caller asks for automatic selection.
pub const DIRECT_SOLVE_LIMIT: usize = 5000;

/// One quadratic system, borrowing the operators it is built from.
pub(crate) struct XSystem<'a> {
    pub mask: &'a DMatrix<f64>,
    pub op: &'a SmoothnessOperator,
    pub temporal_reg: Option<&'a TemporalRegularizer>,
    pub alpha: f64,
    pub gamma: f64,
    /// Coefficient of the sampling diagonal.
    pub mask_weight: f64,
    /// Coefficient of the identity.
    pub ridge: f64,
}

impl XSystem<'_> {
    pub fn dims(&self) -> (usize, usize) {
        (self.mask.nrows(), self.mask.ncols())
    }

    /// Action of the system matrix on a signal matrix.
    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x * self.ridge;
        if self.mask_weight != 0.0 {
            out.zip_zip_apply(self.mask, x, |o, j, v| *o += self.mask_weight * j * v);
        }
        if self.alpha > 0.0 {
            out += self.op.apply(x) * self.alpha;
        }
        if let (Some(reg), true) = (self.temporal_reg, self.gamma > 0.0) {
            out += x * reg.matrix() * self.gamma;
        }
        out
    }

    /// Dense assembly of the full `nm x nm` matrix (column-major `vec`).
    pub fn assemble_dense(&self) -> DMatrix<f64> {
        let (n, m) = self.dims();
        let dim = n * m;
        let mut big = DMatrix::<f64>::zeros(dim, dim);
        if self.alpha > 0.0 {
            let gram = self.op.gram();
            let spatial = self.op.full_power();
            for bj in 0..m {
                for bi in 0..m {
                    let w = self.alpha * gram[(bi, bj)];
                    if w == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        for i in 0..n {
                            big[(bi * n + i, bj * n + j)] += w * spatial[(i, j)];
                        }
                    }
                }
            }
        }
        if let (Some(reg), true) = (self.temporal_reg, self.gamma > 0.0) {
            let lt = reg.matrix();
            for bj in 0..m {
                for bi in 0..m {
                    let w = self.gamma * lt[(bi, bj)];
                    if w == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        big[(bi * n + i, bj * n + i)] += w;
                    }
                }
            }
        }
        for c in 0..m {
            for r in 0..n {
                let idx = c * n + r;
                big[(idx, idx)] += self.mask_weight * self.mask[(r, c)] + self.ridge;
            }
        }
        big
    }

    fn preconditioner(&self) -> KroneckerPreconditioner {
        let (n, m) = self.dims();
        let shift = self.ridge + self.mask_weight * self.mask.sum() / (n * m) as f64;
        let spatial = self.op.spatial_cache();
        // The alpha and gamma couplings share an eigenbasis only when the
        // temporal difference is the identity; otherwise the gamma part is
        // folded into the shift as its mean eigenvalue.
        let (temporal_basis, weights) = match (self.gamma > 0.0, self.temporal_reg) {
            (true, Some(reg)) if self.op.gram().is_identity(0.0) => {
                let w = DMatrix::from_fn(n, m, |i, j| {
                    self.alpha * spatial.eigenvalues[i] + self.gamma * reg.cache.eigenvalues[j]
                        + shift
                });
                (reg.cache.eigenvectors.clone(), w)
            }
            (true, Some(reg)) => {
                let temporal = self.op.temporal_cache();
                let mean_lt = reg.cache.eigenvalues.sum() / m as f64;
                let w = DMatrix::from_fn(n, m, |i, j| {
                    self.alpha * spatial.eigenvalues[i] * temporal.eigenvalues[j]
                        + self.gamma * mean_lt
                        + shift
                });
                (temporal.eigenvectors.clone(), w)
            }
            _ => {
                let temporal = self.op.temporal_cache();
                let w = DMatrix::from_fn(n, m, |i, j| {
                    self.alpha * spatial.eigenvalues[i] * temporal.eigenvalues[j] + shift
                });
                (temporal.eigenvectors.clone(), w)
            }
        };
        KroneckerPreconditioner {
            spatial_basis: spatial.eigenvectors.clone(),
            temporal_basis,
            inv_weights: weights.map(|w| 1.0 / w.max(f64::MIN_POSITIVE)),
        }
    }
}

/// Inverse of the Kronecker part plus a scalar shift, applied through the
/// two small eigenbases.
pub(crate) struct KroneckerPreconditioner {
    spatial_basis: DMatrix<f64>,
    temporal_basis: DMatrix<f64>,
    inv_weights: DMatrix<f64>,
}

impl KroneckerPreconditioner {
    fn apply(&self, r: &DMatrix<f64>) -> DMatrix<f64> {
        let mut coeffs = self.spatial_basis.transpose() * r * &self.temporal_basis;
        coeffs.component_mul_assign(&self.inv_weights);
        &self.spatial_basis * coeffs * self.temporal_basis.transpose()
    }
}

/// A reusable solver for one system matrix: either a cached Cholesky factor
/// or a preconditioned CG state with warm start.
pub(crate) enum XSolver {
    Direct {
        factor: Cholesky<f64, Dyn>,
        n: usize,
        m: usize,
    },
    ConjugateGradient {
        precond: KroneckerPreconditioner,
        tol: f64,
        max_iters: usize,
        warm: Option<DMatrix<f64>>,
    },
}

/// Explicit choice between the two solve paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolverKind {
    /// Direct factorization while `n * m <= DIRECT_SOLVE_LIMIT`, CG above.
    #[default]
    Auto,
    DirectCholesky,
    KroneckerCg,
}

impl XSolver {
    pub fn build(system: &XSystem<'_>, options: &SolverOptions) -> Result<Self> {
        let (n, m) = system.dims();
        let direct = match options.linear_solver {
            LinearSolverKind::DirectCholesky => true,
            LinearSolverKind::KroneckerCg => false,
            LinearSolverKind::Auto => n * m <= DIRECT_SOLVE_LIMIT,
        };
        if direct {
            let dense = system.assemble_dense();
            let factor = Cholesky::new(dense).ok_or_else(|| {
                Error::SingularSystem("dense system is not positive definite".into())
            })?;
            Ok(XSolver::Direct { factor, n, m })
        } else {
            Ok(XSolver::ConjugateGradient {
                precond: system.preconditioner(),
                tol: options.cg_tol,
                max_iters: options.cg_max_iters,
                warm: None,
            })
        }
    }

    pub fn solve(&mut self, system: &XSystem<'_>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self {
            XSolver::Direct { factor, n, m } => {
                let mut flat = nalgebra::DVector::from_column_slice(rhs.as_slice());
                factor.solve_mut(&mut flat);
                Ok(DMatrix::from_column_slice(*n, *m, flat.as_slice()))
            }
            XSolver::ConjugateGradient {
                precond,
                tol,
                max_iters,
                warm,
            } => {
                let x = pcg(system, rhs, warm.as_ref(), precond, *tol, *max_iters)?;
                *warm = Some(x.clone());
                Ok(x)
            }
        }
    }
}

fn pcg(
    system: &XSystem<'_>,
    rhs: &DMatrix<f64>,
    x0: Option<&DMatrix<f64>>,
    precond: &KroneckerPreconditioner,
    tol: f64,
    max_iters: usize,
) -> Result<DMatrix<f64>> {
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        return Ok(DMatrix::zeros(rhs.nrows(), rhs.ncols()));
    }
    let mut x = match x0 {
        Some(x0) => x0.clone(),
        None => DMatrix::zeros(rhs.nrows(), rhs.ncols()),
    };
    let mut r = rhs - system.apply(&x);
    if r.norm() <= tol * rhs_norm {
        return Ok(x);
    }
    let mut z = precond.apply(&r);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    for _ in 0..max_iters {
        let ap = system.apply(&p);
        let pap = p.dot(&ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::SingularSystem(format!(
                "conjugate gradient hit curvature {pap:.3e}"
            )));
        }
        let step = rz / pap;
        x += &p * step;
        r -= &ap * step;
        if r.norm() <= tol * rhs_norm {
            return Ok(x);
        }
        z = precond.apply(&r);
        let rz_next = r.dot(&z);
        let momentum = rz_next / rz;
        rz = rz_next;
        p = &z + &p * momentum;
    }
    Err(Error::CgDidNotConverge {
        residual: r.norm() / rhs_norm,
        iters: max_iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_knn_graph, laplacian, EdgeWeighting, LaplacianKind, LaplacianSpec};
    use crate::solver::{Fidelity, ModelConfig, WeightMode};
    use nalgebra::DMatrix;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn setup(
        n: usize,
        m: usize,
        theta: f64,
        seed: u64,
    ) -> (DMatrix<f64>, SmoothnessOperator, DMatrix<f64>) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let coords = DMatrix::from_fn(n, 2, |_, _| rng.random::<f64>() * 10.0);
        let g = build_knn_graph(&coords, 2, EdgeWeighting::Binary).unwrap();
        let l = laplacian(&g, &LaplacianSpec::plain(LaplacianKind::Combinatorial));
        let config = ModelConfig {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
            theta,
            frac_k: 3,
            tau: 1,
            epsilon: 0.1,
            order_r: 2.0,
            sigma_erf: 1e3,
            fidelity: Fidelity::LeastSquares,
            weight_mode: WeightMode::NoLowRank,
        };
        let op = SmoothnessOperator::new(&l, m, &config).unwrap();
        let mask = DMatrix::from_fn(n, m, |_, _| f64::from(rng.random::<f64>() < 0.6));
        (l, op, mask)
    }

    #[test]
    fn dense_assembly_matches_structured_apply() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (_, op, mask) = setup(5, 4, 1.8, 1);
        let system = XSystem {
            mask: &mask,
            op: &op,
            temporal_reg: None,
            alpha: 0.7,
            gamma: 0.0,
            mask_weight: 1.0,
            ridge: 0.3,
        };
        let x = DMatrix::from_fn(5, 4, |_, _| rng.random::<f64>() - 0.5);
        let dense = system.assemble_dense();
        let flat = nalgebra::DVector::from_column_slice(x.as_slice());
        let want = DMatrix::from_column_slice(5, 4, (&dense * flat).as_slice());
        let got = system.apply(&x);
        assert!((got - want).amax() <= 1e-11);
    }

    #[test]
    fn dense_assembly_includes_temporal_regularizer() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (_, op, mask) = setup(4, 5, 0.0, 2);
        let reg = TemporalRegularizer::new(5, 2).unwrap();
        let system = XSystem {
            mask: &mask,
            op: &op,
            temporal_reg: Some(&reg),
            alpha: 0.4,
            gamma: 0.9,
            mask_weight: 1.0,
            ridge: 0.1,
        };
        let x = DMatrix::from_fn(4, 5, |_, _| rng.random::<f64>() - 0.5);
        let dense = system.assemble_dense();
        let flat = nalgebra::DVector::from_column_slice(x.as_slice());
        let want = DMatrix::from_column_slice(4, 5, (&dense * flat).as_slice());
        let got = system.apply(&x);
        assert!((got - want).amax() <= 1e-11);
    }

    #[test]
    fn cg_matches_direct() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for (alpha, theta) in [(0.0, 1.0), (0.1, 1.0), (1.0, 1.8)] {
            let (_, op, mask) = setup(6, 5, theta, 11);
            let system = XSystem {
                mask: &mask,
                op: &op,
                temporal_reg: None,
                alpha,
                gamma: 0.0,
                mask_weight: 1.0,
                ridge: 1e-3,
            };
            let rhs = DMatrix::from_fn(6, 5, |_, _| rng.random::<f64>() - 0.5);

            let mut direct = XSolver::build(
                &system,
                &SolverOptions {
                    linear_solver: LinearSolverKind::DirectCholesky,
                    ..SolverOptions::default()
                },
            )
            .unwrap();
            let x_direct = direct.solve(&system, &rhs).unwrap();

            let mut cg = XSolver::build(
                &system,
                &SolverOptions {
                    linear_solver: LinearSolverKind::KroneckerCg,
                    cg_tol: 1e-12,
                    cg_max_iters: 5000,
                    ..SolverOptions::default()
                },
            )
            .unwrap();
            let x_cg = cg.solve(&system, &rhs).unwrap();

            let rel = (&x_direct - &x_cg).norm() / x_direct.norm();
            assert!(rel <= 1e-8, "alpha {alpha} theta {theta}: rel err {rel}");
        }
    }

    #[test]
    fn singular_system_detected() {
        // No smoothness and missing samples: the system cannot be solved.
        let (_, op, _) = setup(4, 3, 0.0, 21);
        let mask = DMatrix::from_fn(4, 3, |i, j| f64::from((i + j) % 2 == 0));
        let system = XSystem {
            mask: &mask,
            op: &op,
            temporal_reg: None,
            alpha: 0.0,
            gamma: 0.0,
            mask_weight: 1.0,
            ridge: 0.0,
        };
        match XSolver::build(&system, &SolverOptions::default()) {
            Err(Error::SingularSystem(_)) => {}
            Err(other) => panic!("unexpected error: {other}"),
            Ok(_) => panic!("expected a singular-system error"),
        }
    }
}
