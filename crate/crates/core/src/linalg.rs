//! Small vector and covariance-factorization helpers shared by the
//! generator, classifier, and calibration modules.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine similarity; zero vectors score 0.
pub(crate) fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

pub(crate) fn mean_of<'a, I>(vectors: I, dim: usize) -> Vec<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut acc = vec![0.0; dim];
    let mut count = 0usize;
    for v in vectors {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
        count += 1;
    }
    if count > 0 {
        for a in &mut acc {
            *a /= count as f64;
        }
    }
    acc
}

/// Lower-triangular factorization of a symmetric PSD matrix, tolerant of
/// zero pivots: a pivot within `tol` of zero zeroes out its column, so
/// semidefinite (including all-zero) matrices factor exactly. Returns
/// `None` when a pivot is negative beyond tolerance.
pub(crate) fn psd_cholesky(matrix: &DMatrix<f64>, tol: f64) -> Option<DMatrix<f64>> {
    let d = matrix.nrows();
    let mut factor = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        let mut diag = matrix[(j, j)];
        for k in 0..j {
            diag -= factor[(j, k)] * factor[(j, k)];
        }
        if diag > tol {
            let pivot = diag.sqrt();
            factor[(j, j)] = pivot;
            for i in (j + 1)..d {
                let mut off = matrix[(i, j)];
                for k in 0..j {
                    off -= factor[(i, k)] * factor[(j, k)];
                }
                factor[(i, j)] = off / pivot;
            }
        } else if diag >= -tol {
            // Zero pivot: column stays zero.
        } else {
            return None;
        }
    }
    Some(factor)
}

/// Produces a sampling factor L with L·Lᵀ ≈ covariance after repair.
///
/// Repair chain: symmetrize, tolerant Cholesky; failing that, add 1e-6 to
/// the diagonal and retry; failing that, clip eigenvalues below 1e-6 and
/// rebuild the factor from the eigendecomposition.
pub(crate) fn covariance_factor(covariance: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if covariance.iter().any(|x| !x.is_finite()) {
        return Err(Error::CovarianceNotRepairable(
            "non-finite entries".to_string(),
        ));
    }
    let sym = (covariance + covariance.transpose()) * 0.5;
    let max_diag = sym.diagonal().iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let tol = 1e-12 * max_diag.max(1.0);

    if let Some(factor) = psd_cholesky(&sym, tol) {
        return Ok(factor);
    }

    let d = sym.nrows();
    let bumped = &sym + DMatrix::<f64>::identity(d, d) * 1e-6;
    if let Some(factor) = psd_cholesky(&bumped, tol) {
        return Ok(factor);
    }

    let eigen = sym.symmetric_eigen();
    let mut factor = eigen.eigenvectors;
    for (j, &lambda) in eigen.eigenvalues.iter().enumerate() {
        if !lambda.is_finite() {
            return Err(Error::CovarianceNotRepairable(
                "non-finite eigenvalue".to_string(),
            ));
        }
        let clipped = lambda.max(1e-6).sqrt();
        for i in 0..factor.nrows() {
            factor[(i, j)] *= clipped;
        }
    }
    Ok(factor)
}

/// One multivariate normal draw: mean + factor · z, with z standard normal.
pub(crate) fn gaussian_draw<R: Rng>(mean: &[f64], factor: &DMatrix<f64>, rng: &mut R) -> Vec<f64> {
    let d = mean.len();
    let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let mut out = mean.to_vec();
    for i in 0..d {
        let mut acc = 0.0;
        for j in 0..d {
            acc += factor[(i, j)] * z[j];
        }
        out[i] += acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn psd_cholesky_reconstructs() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 3.0]);
        let l = psd_cholesky(&m, 1e-12).unwrap();
        let back = &l * l.transpose();
        for (a, b) in back.iter().zip(m.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn psd_cholesky_of_zero_is_zero() {
        let m = DMatrix::<f64>::zeros(3, 3);
        let l = psd_cholesky(&m, 1e-12).unwrap();
        assert!(l.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn psd_cholesky_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(psd_cholesky(&m, 1e-12).is_none());
    }

    #[test]
    fn covariance_factor_repairs_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let l = covariance_factor(&m).unwrap();
        let back = &l * l.transpose();
        // Repaired matrix is PSD: quadratic form non-negative.
        for v in [[1.0, -1.0], [1.0, 1.0], [0.3, -0.7]] {
            let q = back[(0, 0)] * v[0] * v[0]
                + 2.0 * back[(0, 1)] * v[0] * v[1]
                + back[(1, 1)] * v[1] * v[1];
            assert!(q >= -1e-9);
        }
    }

    #[test]
    fn covariance_factor_rejects_nan() {
        let m = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(covariance_factor(&m).is_err());
    }

    #[test]
    fn gaussian_draw_with_zero_factor_is_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let factor = DMatrix::<f64>::zeros(3, 3);
        let draw = gaussian_draw(&[1.0, 2.0, 3.0], &factor, &mut rng);
        assert_eq!(draw, vec![1.0, 2.0, 3.0]);
    }
}
