//! Rank-one update of a Moore-Penrose pseudoinverse (Meyer, 1973).
//!
//! Given `A` (rows×cols), `A†`, and vectors `c` (rows), `d` (cols), computes
//! `(A + c·dᵀ)†` in `O(rows·cols)` without refactorizing. With
//!
//! ```text
//! k = A†c     h = dᵀA†     u = (I − AA†)c     v = dᵀ(I − A†A)     β = 1 + dᵀA†c
//! ```
//!
//! the result depends on whether `c ∈ R(A)` (`u = 0`), `d ∈ R(Aᵀ)` (`v = 0`)
//! and whether `β = 0`. The six branches are enumerated by [`MeyerCase`].

use crate::error::{Error, Result};
use crate::numkit::matrix::{DenseMatrix, DenseVector};
use crate::numkit::pinv::pinv_vector;
use crate::scalar::Scalar;

/// Which closed form produced the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeyerCase {
    /// `c ∉ R(A)`, `d ∉ R(Aᵀ)`.
    BothOutside,
    /// `c ∈ R(A)`, `d ∉ R(Aᵀ)`, `β = 0`.
    ColumnInsideSingular,
    /// `c ∈ R(A)`, `β ≠ 0`.
    ColumnInside,
    /// `c ∉ R(A)`, `d ∈ R(Aᵀ)`, `β = 0`.
    RowInsideSingular,
    /// `c ∉ R(A)`, `d ∈ R(Aᵀ)`, `β ≠ 0`.
    RowInside,
    /// `c ∈ R(A)`, `d ∈ R(Aᵀ)`, `β = 0`: the rank drops by one.
    BothInsideSingular,
}

impl MeyerCase {
    pub const ALL: [MeyerCase; 6] = [
        MeyerCase::BothOutside,
        MeyerCase::ColumnInsideSingular,
        MeyerCase::ColumnInside,
        MeyerCase::RowInsideSingular,
        MeyerCase::RowInside,
        MeyerCase::BothInsideSingular,
    ];
}

/// `(a + c·dᵀ)†` from `a` and `a_pinv`.
pub fn meyer_rank_one_pinv_update<T: Scalar>(
    a: &DenseMatrix<T>,
    a_pinv: &DenseMatrix<T>,
    c: &DenseVector<T>,
    d: &DenseVector<T>,
) -> Result<DenseMatrix<T>> {
    meyer_update_with_case(a, a_pinv, c, d).map(|(x, _)| x)
}

/// Same as [`meyer_rank_one_pinv_update`], also reporting the branch taken.
pub fn meyer_update_with_case<T: Scalar>(
    a: &DenseMatrix<T>,
    a_pinv: &DenseMatrix<T>,
    c: &DenseVector<T>,
    d: &DenseVector<T>,
) -> Result<(DenseMatrix<T>, MeyerCase)> {
    let (rows, cols) = a.shape();
    if a_pinv.shape() != (cols, rows) || c.len() != rows || d.len() != cols {
        return Err(Error::dims(
            "meyer_rank_one_pinv_update",
            format!(
                "A {:?}, A† {:?}, c {}, d {}",
                a.shape(),
                a_pinv.shape(),
                c.len(),
                d.len()
            ),
        ));
    }

    let tol = T::range_rtol();
    let k = a_pinv.matvec(c)?;
    let h = a_pinv.vecmat(d)?;
    let u = c.sub(&a.matvec(&k)?)?;
    let v = d.sub(&a.vecmat(&h)?)?;
    let dk = d.dot(&k);
    let beta = T::one() + dk;

    let u_zero = u.norm() <= tol * c.norm();
    let v_zero = v.norm() <= tol * d.norm();
    let beta_zero = beta.abs() <= tol * (T::one() + d.norm() * k.norm());

    let mut x = a_pinv.clone();
    let case = match (u_zero, v_zero, beta_zero) {
        (false, false, _) => {
            // A† − k·u† − v†·h + β·v†·u†
            let pu = pinv_vector(&u);
            let pv = pinv_vector(&v);
            x.add_outer(-T::one(), k.as_slice(), pu.as_slice())?;
            x.add_outer(-T::one(), pv.as_slice(), h.as_slice())?;
            x.add_outer(beta, pv.as_slice(), pu.as_slice())?;
            MeyerCase::BothOutside
        }
        (true, false, true) => {
            // A† − k·k†·A† − v†·h
            let k_a = a_pinv.vecmat(&pinv_vector(&k))?;
            let pv = pinv_vector(&v);
            x.add_outer(-T::one(), k.as_slice(), k_a.as_slice())?;
            x.add_outer(-T::one(), pv.as_slice(), h.as_slice())?;
            MeyerCase::ColumnInsideSingular
        }
        (true, _, false) => {
            // A† + (1/β)·v·kᵀA† − (β/σ₁)·p₁·q₁ᵀ
            let kk = k.dot(&k);
            let vv = v.dot(&v);
            let k_a = a_pinv.vecmat(&k)?;
            let p1: Vec<T> = v
                .iter()
                .zip(k.iter())
                .map(|(&vi, &ki)| -(kk / beta) * vi - ki)
                .collect();
            let q1: Vec<T> = k_a
                .iter()
                .zip(h.iter())
                .map(|(&ai, &hi)| -(vv / beta) * ai - hi)
                .collect();
            let sigma1 = kk * vv + beta * beta;
            x.add_outer(T::one() / beta, v.as_slice(), k_a.as_slice())?;
            x.add_outer(-beta / sigma1, &p1, &q1)?;
            MeyerCase::ColumnInside
        }
        (false, true, true) => {
            // A† − A†·h†·h − k·u†
            let a_h = a_pinv.matvec(&pinv_vector(&h))?;
            let pu = pinv_vector(&u);
            x.add_outer(-T::one(), a_h.as_slice(), h.as_slice())?;
            x.add_outer(-T::one(), k.as_slice(), pu.as_slice())?;
            MeyerCase::RowInsideSingular
        }
        (false, true, false) => {
            // A† + (1/β)·A†hᵀ·uᵀ − (β/σ₂)·p₂·q₂ᵀ
            let hh = h.dot(&h);
            let uu = u.dot(&u);
            let a_h = a_pinv.matvec(&h)?;
            let p2: Vec<T> = a_h
                .iter()
                .zip(k.iter())
                .map(|(&ai, &ki)| -(uu / beta) * ai - ki)
                .collect();
            let q2: Vec<T> = u
                .iter()
                .zip(h.iter())
                .map(|(&ui, &hi)| -(hh / beta) * ui - hi)
                .collect();
            let sigma2 = hh * uu + beta * beta;
            x.add_outer(T::one() / beta, a_h.as_slice(), u.as_slice())?;
            x.add_outer(-beta / sigma2, &p2, &q2)?;
            MeyerCase::RowInside
        }
        (true, true, true) => {
            // A† − k·k†·A† − A†·h†·h + (k†·A†·h†)·k·h
            let pk = pinv_vector(&k);
            let ph = pinv_vector(&h);
            let k_a = a_pinv.vecmat(&pk)?;
            let a_h = a_pinv.matvec(&ph)?;
            let scal = k_a.dot(&ph);
            x.add_outer(-T::one(), k.as_slice(), k_a.as_slice())?;
            x.add_outer(-T::one(), a_h.as_slice(), h.as_slice())?;
            x.add_outer(scal, k.as_slice(), h.as_slice())?;
            MeyerCase::BothInsideSingular
        }
    };

    if !x.is_finite() {
        return Err(Error::NonFinite("meyer_rank_one_pinv_update"));
    }
    Ok((x, case))
}
