use crate::error::{Error, Result};
use crate::numkit::{fwht_in_place, DenseMatrix, DenseVector};
use crate::scalar::Scalar;
use crate::sketch::rng::SketchRng;

/// Subsampled randomized Hadamard transform `scale · P · H · D`, kept
/// implicit: `D` is the sign vector, `H` is applied by FWHT or evaluated
/// entrywise, and `P` is the list of sampled rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SrhtSketch {
    n_logical: usize,
    n_padded: usize,
    signs: Vec<i8>,
    samples: Vec<usize>,
    scale: f64,
    seed: u64,
}

impl SrhtSketch {
    /// Draws `n_padded` signs, then `r` row samples (uniform, with
    /// replacement) from the stream seeded by `seed`.
    pub fn new(n: usize, r: usize, seed: u64) -> Result<Self> {
        if r == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "srht needs n >= 1 and r >= 1, got n={n} r={r}"
            )));
        }
        let n_padded = n.next_power_of_two();
        let mut rng = SketchRng::new(seed);
        let signs = (0..n_padded).map(|_| rng.next_sign()).collect();
        let samples = (0..r).map(|_| rng.next_index(n_padded)).collect();
        Ok(Self {
            n_logical: n,
            n_padded,
            signs,
            samples,
            scale: (n_padded as f64 / r as f64).sqrt(),
            seed,
        })
    }

    pub(crate) fn from_parts(
        n_logical: usize,
        signs: Vec<i8>,
        samples: Vec<usize>,
        seed: u64,
    ) -> Result<Self> {
        let n_padded = signs.len();
        let valid = n_padded.is_power_of_two()
            && n_logical > n_padded / 2
            && n_logical <= n_padded
            && !samples.is_empty()
            && samples.iter().all(|&s| s < n_padded)
            && signs.iter().all(|&s| s == 1 || s == -1);
        if !valid {
            return Err(Error::StateFormat("inconsistent srht sketch".into()));
        }
        let r = samples.len();
        Ok(Self {
            n_logical,
            n_padded,
            signs,
            samples,
            scale: (n_padded as f64 / r as f64).sqrt(),
            seed,
        })
    }

    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    pub fn n_padded(&self) -> usize {
        self.n_padded
    }

    /// Number of sampled rows `r`.
    pub fn rows(&self) -> usize {
        self.samples.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn samples(&self) -> &[usize] {
        &self.samples
    }

    /// `√(n_padded / r)`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `S · M` for an `n_logical`-row matrix: pad, flip signs, transform each
    /// column, keep the sampled rows, rescale.
    pub fn apply<T: Scalar>(&self, m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if m.rows() != self.n_logical {
            return Err(Error::dims(
                "srht_apply",
                format!("sketch expects {} rows, got {}", self.n_logical, m.rows()),
            ));
        }
        let cols = m.cols();
        let factor = T::of(self.scale) / T::of_usize(self.n_padded).sqrt();
        let mut out = DenseMatrix::zeros(self.rows(), cols);
        let mut buf = vec![T::zero(); self.n_padded];
        for j in 0..cols {
            for (i, slot) in buf.iter_mut().enumerate() {
                *slot = if i < self.n_logical {
                    sign_of::<T>(self.signs[i]) * m[(i, j)]
                } else {
                    T::zero()
                };
            }
            fwht_in_place(&mut buf);
            for (k, &row) in self.samples.iter().enumerate() {
                out[(k, j)] = factor * buf[row];
            }
        }
        Ok(out)
    }

    pub fn apply_vector<T: Scalar>(&self, b: &DenseVector<T>) -> Result<DenseVector<T>> {
        let as_matrix = DenseMatrix::from_vec(b.len(), 1, b.as_slice().to_vec())?;
        Ok(self.apply(&as_matrix)?.column(0))
    }

    /// `S · e_i` evaluated entrywise from the bit parity of `samples[k] & i`.
    pub fn column<T: Scalar>(&self, i: usize) -> Result<DenseVector<T>> {
        if i >= self.n_logical {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n_logical,
            });
        }
        let mag = T::of(self.scale) / T::of_usize(self.n_padded).sqrt();
        let base = sign_of::<T>(self.signs[i]) * mag;
        Ok(DenseVector::from_vec(
            self.samples
                .iter()
                .map(|&s| {
                    if (s & i).count_ones() % 2 == 0 {
                        base
                    } else {
                        -base
                    }
                })
                .collect(),
        ))
    }

    /// Materialized `r × n_logical` operator.
    pub fn to_dense<T: Scalar>(&self) -> DenseMatrix<T> {
        let cols: Vec<Vec<T>> = (0..self.n_logical)
            .map(|i| self.column(i).expect("in range").into_vec())
            .collect();
        DenseMatrix::from_columns(self.rows(), &cols)
    }
}

#[inline]
fn sign_of<T: Scalar>(s: i8) -> T {
    if s < 0 {
        -T::one()
    } else {
        T::one()
    }
}
