use crate::error::{Error, Result};
use crate::numkit::matrix::DenseVector;
use crate::scalar::Scalar;

/// In-place unnormalized Walsh-Hadamard butterfly. `data.len()` must be a
/// power of two (checked by callers).
pub(crate) fn fwht_in_place<T: Scalar>(data: &mut [T]) {
    let n = data.len();
    let mut half = 1;
    while half < n {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let x = *a;
                let y = *b;
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

/// `H · v` with `H[i][j] = (−1)^popcount(i & j) / √n`.
pub fn fwht_normalized<T: Scalar>(v: &DenseVector<T>) -> Result<DenseVector<T>> {
    let n = v.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut out = v.clone();
    fwht_in_place(out.as_mut_slice());
    let norm = T::one() / T::of_usize(n).sqrt();
    for x in out.as_mut_slice() {
        *x *= norm;
    }
    Ok(out)
}

/// Entry `(i, j)` of the normalized Hadamard matrix of order `n`.
#[inline]
pub fn hadamard_entry<T: Scalar>(n: usize, i: usize, j: usize) -> T {
    let mag = T::one() / T::of_usize(n).sqrt();
    if (i & j).count_ones() % 2 == 0 {
        mag
    } else {
        -mag
    }
}
