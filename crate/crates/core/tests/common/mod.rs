//! Helpers shared by the integration tests: random instances and an
//! independent pseudoinverse from nalgebra.
#![allow(dead_code)]

use dynareg::numkit::{DenseMatrix, DenseVector, MeyerCase};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> DenseVector<f64> {
    DenseVector::from_vec((0..len).map(|_| rng.sample(StandardNormal)).collect())
}

/// Random `rows × cols` matrix of rank `rank`.
pub fn low_rank(rng: &mut impl Rng, rows: usize, cols: usize, rank: usize) -> DenseMatrix<f64> {
    gaussian(rng, rows, rank)
        .matmul(&gaussian(rng, rank, cols))
        .unwrap()
}

pub fn to_na(a: &DenseMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
}

pub fn from_na(a: &DMatrix<f64>) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Pseudoinverse from nalgebra, dropping singular values below
/// `1e-10 · σ_max`.
///
/// nalgebra's SVD occasionally returns factors that do not reconstruct an
/// exactly rank-deficient input (about 1% of rank-2 8×3 matrices), so its
/// result is only used when the reconstruction holds; otherwise the
/// pseudoinverse comes from the symmetric eigendecomposition of the Gram
/// matrix, which is reliable for the well-conditioned test inputs. Squaring
/// puts rounding noise in the null eigenvalues at about `1e-16 · λ_max`, so
/// that route cuts at `1e-12 · λ_max` (a singular-value ratio of `1e-6`).
pub fn na_pinv(a: &DenseMatrix<f64>) -> DenseMatrix<f64> {
    if a.rows() < a.cols() {
        return na_pinv(&a.transpose()).transpose();
    }
    let m = to_na(a);
    let scale = m.abs().max();
    if scale == 0.0 {
        return DenseMatrix::zeros(a.cols(), a.rows());
    }
    let svd = m.clone().svd(true, true);
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let back = svd.clone().recompose().unwrap();
    if (back - &m).abs().max() <= 1e-12 * scale {
        return from_na(&svd.pseudo_inverse(1e-10 * top).unwrap());
    }
    let gram = m.transpose() * &m;
    let eig = gram.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let n = a.cols();
    let mut inv = DMatrix::<f64>::zeros(n, n);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 1e-12 * lmax {
            let v = eig.eigenvectors.column(i);
            inv += (v * v.transpose()) / l;
        }
    }
    from_na(&(inv * m.transpose()))
}

fn outer(c: &DenseVector<f64>, d: &DenseVector<f64>) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(c.len(), d.len(), |i, j| c[i] * d[j])
}

pub fn rank_one_sum(a: &DenseMatrix<f64>, c: &DenseVector<f64>, d: &DenseVector<f64>) -> DenseMatrix<f64> {
    a.add(&outer(c, d)).unwrap()
}

/// `(A, c, d)` on an 8 × 3 matrix built to land in `case`.
///
/// Range conditions come from the construction (`c = A·y` puts `c` in the
/// column space, `d = Aᵀ·z` puts `d` in the row space); singular cases
/// rescale one vector so that `1 + dᵀA†c = 0`. Cases that need `v ≠ 0` or
/// `u ≠ 0` use a rank-2 `A` so random vectors fall outside its ranges.
pub fn meyer_instance(
    rng: &mut impl Rng,
    case: MeyerCase,
) -> (DenseMatrix<f64>, DenseVector<f64>, DenseVector<f64>) {
    let (rows, cols) = (8, 3);
    let full = matches!(case, MeyerCase::ColumnInside) && rng.gen_bool(0.5);
    let a = if full {
        gaussian(rng, rows, cols)
    } else {
        low_rank(rng, rows, cols, 2)
    };
    let ap = na_pinv(&a);
    let in_col = |rng: &mut dyn rand::RngCore| {
        a.matvec(&gaussian_vec(&mut *rng, cols)).unwrap()
    };
    let in_row = |rng: &mut dyn rand::RngCore| {
        a.transpose().matvec(&gaussian_vec(&mut *rng, rows)).unwrap()
    };
    let beta = |c: &DenseVector<f64>, d: &DenseVector<f64>| 1.0 + d.dot(&ap.matvec(c).unwrap());
    // rescale c so that beta vanishes: 1 + s·dᵀA†c = 0
    let kill = |c: DenseVector<f64>, d: &DenseVector<f64>| {
        let t = d.dot(&ap.matvec(&c).unwrap());
        c.scaled(-1.0 / t)
    };
    match case {
        MeyerCase::BothOutside => (a.clone(), gaussian_vec(rng, rows), gaussian_vec(rng, cols)),
        MeyerCase::ColumnInside => {
            let c = in_col(rng);
            let d = gaussian_vec(rng, cols);
            debug_assert!(beta(&c, &d).abs() > 1e-6);
            (a.clone(), c, d)
        }
        MeyerCase::ColumnInsideSingular => {
            let d = gaussian_vec(rng, cols);
            let c = kill(in_col(rng), &d);
            (a.clone(), c, d)
        }
        MeyerCase::RowInside => {
            let d = in_row(rng);
            (a.clone(), gaussian_vec(rng, rows), d)
        }
        MeyerCase::RowInsideSingular => {
            let d = in_row(rng);
            let c = kill(gaussian_vec(rng, rows), &d);
            (a.clone(), c, d)
        }
        MeyerCase::BothInsideSingular => {
            let d = in_row(rng);
            let c = kill(in_col(rng), &d);
            (a.clone(), c, d)
        }
    }
}
