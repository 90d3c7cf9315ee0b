use crate::error::{Error, Result};
use crate::numkit::{least_squares_solve, DenseMatrix, DenseVector};
use crate::scalar::Scalar;

/// Minimum-norm least-squares solution by SVD.
pub fn exact_solve<T: Scalar>(m_mat: &DenseMatrix<T>, b: &DenseVector<T>) -> Result<DenseVector<T>> {
    least_squares_solve(m_mat, b)
}

/// `‖M·x − b‖₂`.
pub fn residual<T: Scalar>(
    m_mat: &DenseMatrix<T>,
    b: &DenseVector<T>,
    x: &DenseVector<T>,
) -> Result<T> {
    if m_mat.rows() != b.len() {
        return Err(Error::dims(
            "residual",
            format!("M has {} rows, b has {}", m_mat.rows(), b.len()),
        ));
    }
    Ok(m_mat.matvec(x)?.sub(b)?.norm())
}

/// `approx / optimal`, with the zero-optimum case mapped to 1 when the
/// approximation is also (numerically) exact and to infinity otherwise.
pub fn residual_ratio(approx: f64, optimal: f64, b_norm: f64) -> f64 {
    let floor = 1e-12 * b_norm.max(1.0);
    if optimal <= floor {
        if approx <= floor {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        approx / optimal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_b() {
        let b = DenseVector::from_vec(vec![1.0_f64, -2.0, 4.0]);
        let x = exact_solve(&DenseMatrix::identity(3), &b).unwrap();
        assert!(x.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn residual_of_zero_is_norm_b() {
        let a = DenseMatrix::from_rows(&[[1.0_f64, 0.0], [0.0, 1.0], [1.0, 1.0]]);
        let b = DenseVector::from_vec(vec![3.0, 4.0, 0.0]);
        let r = residual(&a, &b, &DenseVector::zeros(2)).unwrap();
        assert_eq!(r, 5.0);
        assert!(residual(&a, &DenseVector::zeros(2), &DenseVector::zeros(2)).is_err());
    }

    #[test]
    fn min_norm_for_rank_deficient() {
        // columns equal: every x with x0 + x1 = 1 fits b exactly; the
        // minimum-norm one is (1/2, 1/2).
        let a = DenseMatrix::from_rows(&[[1.0_f64, 1.0], [2.0, 2.0]]);
        let b = DenseVector::from_vec(vec![1.0, 2.0]);
        let x = exact_solve(&a, &b).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12);
        let other = DenseVector::from_vec(vec![1.0, 0.0]);
        assert!(residual(&a, &b, &other).unwrap() < 1e-12);
        assert!(x.norm() <= other.norm());
    }

    #[test]
    fn ratio_edge_cases() {
        assert_eq!(residual_ratio(0.0, 0.0, 1.0), 1.0);
        assert_eq!(residual_ratio(1e-3, 0.0, 1.0), f64::INFINITY);
        assert_eq!(residual_ratio(2.0, 1.0, 1.0), 2.0);
    }
}
