use crate::error::Result;
use crate::numkit::{DenseMatrix, DenseVector};
use crate::scalar::Scalar;
use crate::sketch::{CountSketch, SrhtSketch};

/// The sketching operator held by a regression state.
#[derive(Debug, Clone, PartialEq)]
pub enum Sketch {
    Srht(SrhtSketch),
    CountSketch(CountSketch),
    /// Exact backend: `S = I`.
    Identity,
}

impl Sketch {
    pub fn apply<T: Scalar>(&self, m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        match self {
            Sketch::Srht(s) => s.apply(m),
            Sketch::CountSketch(s) => s.apply(m),
            Sketch::Identity => Ok(m.clone()),
        }
    }

    pub fn apply_vector<T: Scalar>(&self, b: &DenseVector<T>) -> Result<DenseVector<T>> {
        match self {
            Sketch::Srht(s) => s.apply_vector(b),
            Sketch::CountSketch(s) => s.apply_vector(b),
            Sketch::Identity => Ok(b.clone()),
        }
    }

    /// Column `i` of `S`.
    pub fn column<T: Scalar>(&self, i: usize, n: usize) -> Result<DenseVector<T>> {
        match self {
            Sketch::Srht(s) => s.column(i),
            Sketch::CountSketch(s) => s.column(i),
            Sketch::Identity => {
                if i >= n {
                    return Err(crate::error::Error::IndexOutOfRange { index: i, len: n });
                }
                Ok(DenseVector::basis(n, i))
            }
        }
    }

    /// Sketch rows; `None` for the identity.
    pub fn rows(&self) -> Option<usize> {
        match self {
            Sketch::Srht(s) => Some(s.rows()),
            Sketch::CountSketch(s) => Some(s.rows()),
            Sketch::Identity => None,
        }
    }
}
