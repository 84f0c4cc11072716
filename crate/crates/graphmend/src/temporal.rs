//! Fractional-order temporal difference operators.
//!
//! The forward difference of real order `theta` acts on the time axis of a
//! signal matrix through right-multiplication by a banded lower-triangular
//! Toeplitz matrix `D` whose band holds the signed generalized binomial
//! coefficients. Integer orders recover the familiar stencils: order 1 gives
//! `[1, -1]`, order 2 gives the temporal Laplacian stencil `[1, -2, 1]`.
//! The matrix uses a zero boundary condition: trailing columns simply
//! truncate the stencil.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Signed generalized binomial coefficients `C(0..=k)` of order `theta`.
///
/// `C(0) = 1` and `C(i) = C(i-1) * (i - 1 - theta) / i`, which is the stable
/// form of `(-1)^i * Gamma(theta+1) / (Gamma(i+1) * Gamma(theta+1-i))`. For
/// integer `theta = p` every coefficient beyond index `p` vanishes, so the
/// recurrence never evaluates a Gamma pole.
pub fn gl_coefficients(theta: f64, k: usize) -> Result<Vec<f64>> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "difference order must be positive, got {theta}"
        )));
    }
    if k < 1 {
        return Err(Error::InvalidParameter(
            "coefficient count k must be at least 1".into(),
        ));
    }
    let mut c = Vec::with_capacity(k + 1);
    c.push(1.0);
    for i in 1..=k {
        let prev = c[i - 1];
        c.push(prev * ((i as f64 - 1.0) - theta) / i as f64);
    }
    Ok(c)
}

/// A fractional-order forward difference matrix on `m` time instances.
#[derive(Debug, Clone)]
pub struct FractionalDifference {
    m: usize,
    theta: f64,
    coefficients: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl FractionalDifference {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Band width: number of coefficients minus one.
    pub fn band(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// The dense `m x m` lower-triangular Toeplitz matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `D * D^T`, the Gram matrix appearing in the smoothness term.
    pub fn gram(&self) -> DMatrix<f64> {
        &self.matrix * self.matrix.transpose()
    }
}

/// Assembles the `m x m` difference matrix of order `theta` with band `k`:
/// entry `(t, j) = C(t - j)` for `0 <= t - j <= k`, zero elsewhere.
pub fn build_difference_matrix(m: usize, theta: f64, k: usize) -> Result<FractionalDifference> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 time instances, got {m}"
        )));
    }
    if m <= k {
        return Err(Error::BandTooWide { m, k });
    }
    let coefficients = gl_coefficients(theta, k)?;
    let mut matrix = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        for (i, &c) in coefficients.iter().enumerate() {
            if j + i < m {
                matrix[(j + i, j)] = c;
            }
        }
    }
    Ok(FractionalDifference {
        m,
        theta,
        coefficients,
        matrix,
    })
}

/// Temporal Laplacian `L_t = D_tau * D_tau^T` of integer order `tau`.
pub fn temporal_laplacian(m: usize, tau: usize) -> Result<DMatrix<f64>> {
    if tau == 0 {
        return Err(Error::InvalidParameter(
            "temporal Laplacian order must be at least 1".into(),
        ));
    }
    let diff = build_difference_matrix(m, tau as f64, tau)?;
    Ok(diff.gram())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    /// Gamma-ratio oracle for the coefficients, independent of the
    /// recurrence. Poles of Gamma in the denominator yield zero.
    fn gamma_oracle(theta: f64, i: usize) -> f64 {
        use statrs::function::gamma::gamma;
        let denom_arg = theta + 1.0 - i as f64;
        if denom_arg <= 0.0 && (denom_arg - denom_arg.round()).abs() < 1e-12 {
            return 0.0;
        }
        let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * gamma(theta + 1.0) / (gamma(i as f64 + 1.0) * gamma(denom_arg))
    }

    #[test]
    fn first_order_coefficients() {
        assert_eq!(gl_coefficients(1.0, 1).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn second_order_coefficients() {
        let c = gl_coefficients(2.0, 2).unwrap();
        assert_relative_eq!(c[0], 1.0);
        assert_relative_eq!(c[1], -2.0);
        assert_relative_eq!(c[2], 1.0);
    }

    #[test]
    fn fractional_coefficients_1p8() {
        let c = gl_coefficients(1.8, 3).unwrap();
        let expect = [1.0, -1.8, 0.72, 0.048];
        for (got, want) in c.iter().zip(expect.iter()) {
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn integer_order_truncates_to_zero() {
        for p in 1..=4usize {
            let c = gl_coefficients(p as f64, p + 3).unwrap();
            for (i, &v) in c.iter().enumerate() {
                if i > p {
                    assert!(v.abs() <= 1e-12, "order {p}, index {i}: {v}");
                }
            }
        }
    }

    #[test]
    fn recurrence_matches_gamma_oracle() {
        for &theta in &[0.5, 1.3, 1.8, 2.7] {
            let c = gl_coefficients(theta, 6).unwrap();
            for (i, &got) in c.iter().enumerate() {
                let want = gamma_oracle(theta, i);
                assert!(
                    (got - want).abs() <= 1e-12,
                    "theta {theta} i {i}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn first_order_matrix_layout() {
        let d = build_difference_matrix(3, 1.0, 1).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        assert_relative_eq!(*d.matrix(), expect, epsilon = 1e-15);
    }

    #[test]
    fn second_order_matrix_layout() {
        let d = build_difference_matrix(4, 2.0, 2).unwrap();
        let m = d.matrix();
        let first_col = [1.0, -2.0, 1.0, 0.0];
        for (i, want) in first_col.iter().enumerate() {
            assert_relative_eq!(m[(i, 0)], want);
        }
        // Toeplitz along the band
        for t in 0..4 {
            for j in 0..4 {
                let want = if t >= j && t - j <= 2 {
                    d.coefficients()[t - j]
                } else {
                    0.0
                };
                assert_relative_eq!(m[(t, j)], want);
            }
        }
    }

    #[test]
    fn banded_structure_at_scale() {
        let d = build_difference_matrix(200, 1.8, 3).unwrap();
        let m = d.matrix();
        let mut nonzero_diagonals = std::collections::BTreeSet::new();
        for t in 0..200 {
            for j in 0..200 {
                let want = if t >= j && t - j <= 3 {
                    d.coefficients()[t - j]
                } else {
                    0.0
                };
                assert_eq!(m[(t, j)], want, "direct assembly mismatch at ({t}, {j})");
                if m[(t, j)] != 0.0 {
                    nonzero_diagonals.insert(t as i64 - j as i64);
                }
            }
        }
        assert_eq!(
            nonzero_diagonals.into_iter().collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
    }

    #[test]
    fn band_must_fit() {
        assert!(matches!(
            build_difference_matrix(3, 1.8, 3),
            Err(Error::BandTooWide { m: 3, k: 3 })
        ));
    }

    #[test]
    fn temporal_laplacian_order_one() {
        let lt = temporal_laplacian(3, 1).unwrap();
        let expect =
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        assert_relative_eq!(lt, expect, epsilon = 1e-14);
    }

    #[test]
    fn temporal_laplacian_is_gram_matrix() {
        let lt = temporal_laplacian(7, 2).unwrap();
        assert!((&lt - lt.transpose()).amax() <= 1e-14);
        let eig = nalgebra::SymmetricEigen::new(lt);
        assert!(eig.eigenvalues.iter().all(|&l| l >= -1e-12));
    }

    #[test]
    fn trace_identity_for_temporal_laplacian() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let x = DMatrix::from_fn(4, 5, |_, _| rng.random::<f64>() - 0.5);
        let lt = temporal_laplacian(5, 2).unwrap();
        let d = build_difference_matrix(5, 2.0, 2).unwrap();
        let trace = (&x * &lt * x.transpose()).trace();
        let frob = (&x * d.matrix()).norm_squared();
        assert!((trace - frob).abs() <= 1e-10 * frob.max(1.0));
    }

    #[test]
    fn frobenius_equals_trace_for_any_order() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for &theta in &[0.5, 1.0, 1.8, 2.7] {
            let x = DMatrix::from_fn(5, 4, |_, _| rng.random::<f64>() - 0.5);
            let d = build_difference_matrix(4, theta, 2).unwrap();
            let lhs = (&x * d.matrix()).norm_squared();
            let rhs = (d.matrix().transpose() * x.transpose() * &x * d.matrix()).trace();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn constant_signal_vanishes_except_boundary() {
        // With theta = 1 the stencil sums to zero, so a constant-in-time
        // signal survives only in the final column, where the zero boundary
        // truncates the stencil to C(0) alone.
        let d = build_difference_matrix(6, 1.0, 1).unwrap();
        let x = DMatrix::from_element(3, 6, 2.5);
        let out = &x * d.matrix();
        for i in 0..3 {
            for j in 0..5 {
                assert_relative_eq!(out[(i, j)], 0.0, epsilon = 1e-14);
            }
            assert_relative_eq!(out[(i, 5)], 2.5);
        }
    }
}
