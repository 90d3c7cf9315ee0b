use crate::error::Result;
use crate::numkit::matrix::{DenseMatrix, DenseVector};
use crate::numkit::svd::svd;
use crate::scalar::Scalar;

/// Moore-Penrose pseudoinverse `V · Σ† · Uᵀ`.
///
/// Singular values at or below `T::pinv_rtol() · σ_max` are dropped. Wide
/// inputs are handled through the transpose, since `(Aᵀ)† = (A†)ᵀ`.
pub fn pinv<T: Scalar>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let (n, m) = a.shape();
    if n < m {
        return Ok(pinv(&a.transpose())?.transpose());
    }
    if m == 0 {
        return Ok(DenseMatrix::zeros(0, n));
    }
    let s = svd(a)?;
    let cutoff = T::pinv_rtol() * s.sigma[0];
    let inv: Vec<T> = s
        .sigma
        .iter()
        .map(|&x| {
            if x > cutoff && x > T::zero() {
                T::one() / x
            } else {
                T::zero()
            }
        })
        .collect();
    // out[i][j] = Σ_k vt[k][i] · inv[k] · u[j][k]
    let mut out = DenseMatrix::zeros(m, n);
    for j in 0..n {
        let urow = s.u.row(j);
        for i in 0..m {
            let mut acc = T::zero();
            for k in 0..m {
                if inv[k] != T::zero() {
                    acc += s.vt[(k, i)] * inv[k] * urow[k];
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Pseudoinverse of a column vector, returned as the coefficient vector of
/// the row `xᵀ / ‖x‖²`. The zero vector maps to zero.
pub fn pinv_vector<T: Scalar>(x: &DenseVector<T>) -> DenseVector<T> {
    let nn = x.dot(x);
    if nn == T::zero() {
        return DenseVector::zeros(x.len());
    }
    x.scaled(T::one() / nn)
}

/// Numerical rank with the same cutoff `pinv` uses.
pub fn numerical_rank<T: Scalar>(sigma: &DenseVector<T>) -> usize {
    let top = sigma.iter().fold(T::zero(), |m, &s| m.max(s));
    sigma
        .iter()
        .filter(|&&s| s > T::pinv_rtol() * top && s > T::zero())
        .count()
}

/// Largest violation of the four Penrose conditions for a candidate `x = a†`,
/// each scaled as the acceptance tests state them:
/// `‖AXA−A‖/‖A‖`, `‖XAX−X‖/‖X‖`, and the absolute asymmetry of `AX` and `XA`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenroseDefects<T> {
    pub axa: T,
    pub xax: T,
    pub ax_sym: T,
    pub xa_sym: T,
}

impl<T: Scalar> PenroseDefects<T> {
    pub fn worst(&self) -> T {
        self.axa.max(self.xax).max(self.ax_sym).max(self.xa_sym)
    }
}

pub fn penrose_defects<T: Scalar>(
    a: &DenseMatrix<T>,
    x: &DenseMatrix<T>,
) -> Result<PenroseDefects<T>> {
    if x.shape() != (a.cols(), a.rows()) {
        return Err(crate::error::Error::dims(
            "penrose_defects",
            format!("A {:?} against X {:?}", a.shape(), x.shape()),
        ));
    }
    // Only the smaller of AX and XA is formed; the other is checked for
    // symmetry entry by entry.
    let rel = |err: T, base: T| if base > T::zero() { err / base } else { err };
    let (axa, xax, ax_sym, xa_sym) = if a.cols() <= a.rows() {
        let xa = x.matmul(a)?;
        (a.matmul(&xa)?, xa.matmul(x)?, product_asymmetry(a, x), xa.asymmetry())
    } else {
        let ax = a.matmul(x)?;
        (ax.matmul(a)?, x.matmul(&ax)?, ax.asymmetry(), product_asymmetry(x, a))
    };
    Ok(PenroseDefects {
        axa: rel(axa.sub(a)?.frobenius_norm(), a.frobenius_norm()),
        xax: rel(xax.sub(x)?.frobenius_norm(), x.frobenius_norm()),
        ax_sym,
        xa_sym,
    })
}

/// `max |(PQ)ᵢⱼ − (PQ)ⱼᵢ|` without storing `PQ`.
fn product_asymmetry<T: Scalar>(p: &DenseMatrix<T>, q: &DenseMatrix<T>) -> T {
    let qt = q.transpose();
    let n = p.rows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let ij = crate::numkit::matrix::dot(p.row(i), qt.row(j));
            let ji = crate::numkit::matrix::dot(p.row(j), qt.row(i));
            worst = worst.max((ij - ji).abs());
        }
    }
    worst
}
