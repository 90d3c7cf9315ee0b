//! Dense numerical kernels: containers, SVD, pseudoinverses, the rank-one
//! pseudoinverse update and the Walsh-Hadamard transform.

mod fwht;
mod matrix;
mod meyer;
mod pinv;
mod svd;

pub use fwht::{fwht_normalized, hadamard_entry};
pub(crate) use fwht::fwht_in_place;
pub use matrix::{DenseMatrix, DenseVector};
pub use meyer::{meyer_rank_one_pinv_update, meyer_update_with_case, MeyerCase};
pub use pinv::{numerical_rank, penrose_defects, pinv, pinv_vector, PenroseDefects};
pub use svd::{svd, SvdResult};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimum-norm least-squares solution `A† · b`.
pub fn least_squares_solve<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &DenseVector<T>,
) -> Result<DenseVector<T>> {
    if a.rows() != b.len() {
        return Err(Error::dims(
            "least_squares_solve",
            format!("{} rows vs b of {}", a.rows(), b.len()),
        ));
    }
    pinv(a)?.matvec(b)
}
