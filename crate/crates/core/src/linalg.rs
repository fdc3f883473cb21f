use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use crate::error::{Error, Result};

/// Condition estimates above this are treated as singular.
pub(crate) const MAX_CONDITION: f64 = 1e12;

/// Accumulates `Σ wᵢ aᵢ aᵢᵀ` over 4-vectors.
pub(crate) fn normal_matrix<'a>(rows: impl IntoIterator<Item = (&'a [f64; 4], f64)>) -> Matrix4<f64> {
    let mut n = Matrix4::zeros();
    for (row, w) in rows {
        let a = Vector4::from_column_slice(row);
        n += a * a.transpose() * w;
    }
    n
}

/// Ratio of extreme eigenvalues of a symmetric positive semidefinite matrix;
/// infinite when the smallest is not positive.
pub(crate) fn condition_estimate(n: &Matrix4<f64>) -> f64 {
    let eig = SymmetricEigen::new(*n).eigenvalues;
    let max = eig.max();
    let min = eig.min();
    if !(min > 0.0) || !max.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Numerical rank with eigenvalues below `1e-12 · λmax` counted as zero.
pub(crate) fn numerical_rank(n: &Matrix4<f64>) -> usize {
    let eig = SymmetricEigen::new(*n).eigenvalues;
    let max = eig.max();
    if !(max > 0.0) {
        return 0;
    }
    eig.iter().filter(|&&l| l > max / MAX_CONDITION).count()
}

/// Inverts a symmetric positive definite 4×4 normal matrix, rejecting it when
/// the condition estimate exceeds [`MAX_CONDITION`].
pub(crate) fn invert_normal(n: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let condition = condition_estimate(n);
    if condition > MAX_CONDITION {
        return Err(Error::DegenerateGeometry { condition });
    }
    n.cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::DegenerateGeometry { condition })
}
