//! Thin singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! The embedding matrices this crate works with are tall and narrow, so the
//! column-pair sweep costs `O(rows · cols²)` per sweep and converges in a
//! handful of sweeps. Column-oriented storage keeps each rotation contiguous.

use crate::error::{Error, Result};
use crate::numkit::matrix::{dot, norm, DenseMatrix, DenseVector};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 80;

/// `a = u · diag(sigma) · vt` with `u` of shape rows×cols.
#[derive(Debug, Clone)]
pub struct SvdResult<T> {
    pub u: DenseMatrix<T>,
    pub sigma: DenseVector<T>,
    pub vt: DenseMatrix<T>,
}

impl<T: Scalar> SvdResult<T> {
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let (n, m) = self.u.shape();
        DenseMatrix::from_fn(n, m, |i, j| {
            (0..m).fold(T::zero(), |acc, k| {
                acc + self.u[(i, k)] * self.sigma[k] * self.vt[(k, j)]
            })
        })
    }
}

/// Thin SVD of a matrix with at least as many rows as columns.
pub fn svd<T: Scalar>(a: &DenseMatrix<T>) -> Result<SvdResult<T>> {
    let (n, m) = a.shape();
    if n < m {
        return Err(Error::dims(
            "svd",
            format!("needs rows >= cols, got {n}x{m}"),
        ));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }

    let mut cols: Vec<Vec<T>> = (0..m).map(|j| a.column(j).into_vec()).collect();
    let mut v: Vec<Vec<T>> = (0..m)
        .map(|j| DenseVector::basis(m, j).into_vec())
        .collect();

    let tol = T::epsilon() * T::of_usize(n.max(1)).sqrt();
    let mut converged = m < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if alpha == T::zero() || beta == T::zero() {
                    continue;
                }
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::of(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<(usize, T)> = cols.iter().map(|c| norm(c)).enumerate().collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let sigma_max = order.first().map_or(T::zero(), |o| o.1);

    let mut u_cols: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut sigma = Vec::with_capacity(m);
    let mut vt = DenseMatrix::zeros(m, m);
    for (k, &(j, s)) in order.iter().enumerate() {
        sigma.push(s);
        vt.row_mut(k).copy_from_slice(&v[j]);
        let u = if s > T::zero() && s > sigma_max * T::epsilon() {
            let mut u: Vec<T> = cols[j].iter().map(|&x| x / s).collect();
            // small singular values leave the direction polluted by rounding
            if orthonormalize(&mut u, &u_cols) {
                Some(u)
            } else {
                None
            }
        } else {
            None
        };
        let u = match u {
            Some(u) => u,
            None => complete_basis(n, &u_cols),
        };
        u_cols.push(u);
    }

    let out = SvdResult {
        u: DenseMatrix::from_columns(n, &u_cols),
        sigma: DenseVector::from_vec(sigma),
        vt,
    };
    if !(out.u.is_finite() && out.sigma.is_finite() && out.vt.is_finite()) {
        return Err(Error::NonFinite("svd"));
    }
    Ok(out)
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Two passes of modified Gram-Schmidt against `basis`, then normalize.
/// Returns false when the vector collapses.
fn orthonormalize<T: Scalar>(u: &mut [T], basis: &[Vec<T>]) -> bool {
    let start = norm(u);
    if start == T::zero() {
        return false;
    }
    for _ in 0..2 {
        for b in basis {
            let proj = dot(u, b);
            for (x, &y) in u.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
    }
    let left = norm(u);
    if left <= start * T::of(1e-3) {
        return false;
    }
    for x in u.iter_mut() {
        *x /= left;
    }
    true
}

/// Unit vector orthogonal to `basis`, built from the first standard basis
/// vector that survives orthogonalization.
fn complete_basis<T: Scalar>(n: usize, basis: &[Vec<T>]) -> Vec<T> {
    for i in 0..n {
        let mut e = vec![T::zero(); n];
        e[i] = T::one();
        if orthonormalize(&mut e, basis) {
            return e;
        }
    }
    vec![T::zero(); n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn gram_defect(m: &DenseMatrix<f64>) -> f64 {
        let g = m.transpose().matmul(m).unwrap();
        g.sub(&DenseMatrix::identity(g.rows())).unwrap().max_abs()
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let s = svd(&DenseMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(s.sigma.as_slice(), &[1.0, 1.0, 1.0]);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s.u[(i, j)].abs() - want).abs() < 1e-15);
                assert!((s.vt[(i, j)].abs() - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn diagonal_is_sorted() {
        let s = svd(&DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 3.0]])).unwrap();
        assert_eq!(s.sigma.as_slice(), &[3.0, 2.0]);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = StdRng::seed_from_u64(7);
        let a = DenseMatrix::from_fn(6, 3, |_, _| rng.gen_range(-1.0..1.0));
        let s = svd(&a).unwrap();
        assert!(s.reconstruct().sub(&a).unwrap().frobenius_norm() <= 1e-8 * a.frobenius_norm());
        assert!(gram_defect(&s.u) <= 1e-10);
        assert!(gram_defect(&s.vt.transpose()) <= 1e-10);
        assert!(s.sigma.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rank_deficient_still_orthonormal() {
        // third column = first + second
        let a = DenseMatrix::from_rows(&[
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
            [1.0, 1.0, 2.0],
            [2.0, -1.0, 1.0],
        ]);
        let s = svd(&a).unwrap();
        assert!(s.sigma[2] < 1e-12);
        assert!(gram_defect(&s.u) <= 1e-10);
        assert!(s.reconstruct().sub(&a).unwrap().frobenius_norm() <= 1e-8 * a.frobenius_norm());
    }

    #[test]
    fn zero_matrix_and_wide_input() {
        let s = svd(&DenseMatrix::<f64>::zeros(4, 2)).unwrap();
        assert_eq!(s.sigma.as_slice(), &[0.0, 0.0]);
        assert!(gram_defect(&s.u) <= 1e-12);
        assert!(svd(&DenseMatrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn nonfinite_rejected() {
        let a = DenseMatrix::from_rows(&[[f64::NAN], [1.0]]);
        assert!(matches!(svd(&a), Err(Error::NonFinite(_))));
    }

    #[test]
    fn single_precision() {
        let a = DenseMatrix::from_rows(&[[3.0f32, 0.0], [0.0, 4.0], [0.0, 0.0]]);
        let s = svd(&a).unwrap();
        assert!((s.sigma[0] - 4.0).abs() < 1e-6 && (s.sigma[1] - 3.0).abs() < 1e-6);
    }
}
