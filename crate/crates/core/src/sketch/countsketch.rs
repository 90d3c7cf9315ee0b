use crate::error::{Error, Result};
use crate::numkit::{DenseMatrix, DenseVector};
use crate::scalar::Scalar;
use crate::sketch::rng::SketchRng;

/// Nonzero of one CountSketch column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchEntry {
    pub row: usize,
    pub sign: i8,
}

impl SketchEntry {
    #[inline]
    pub fn sign_value<T: Scalar>(&self) -> T {
        if self.sign < 0 {
            -T::one()
        } else {
            T::one()
        }
    }
}

/// `q × n` sparse sketch with a single `±1` per column. Column `i` belongs to
/// row `i` of the embedding matrix, so the column list grows and shrinks with
/// the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSketch {
    q: usize,
    cols: Vec<SketchEntry>,
    seed: u64,
    rng: SketchRng,
}

impl CountSketch {
    /// Each column draws its row, then its sign, from the stream seeded by
    /// `seed`. Later [`add_column`](Self::add_column) calls continue the same
    /// stream.
    pub fn new(n: usize, q: usize, seed: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("countsketch needs q >= 1".into()));
        }
        let mut sketch = Self {
            q,
            cols: Vec::with_capacity(n),
            seed,
            rng: SketchRng::new(seed),
        };
        for _ in 0..n {
            let entry = sketch.draw();
            sketch.cols.push(entry);
        }
        Ok(sketch)
    }

    pub(crate) fn from_parts(
        q: usize,
        cols: Vec<SketchEntry>,
        seed: u64,
        rng: SketchRng,
    ) -> Result<Self> {
        if q == 0 || cols.iter().any(|e| e.row >= q || (e.sign != 1 && e.sign != -1)) {
            return Err(Error::StateFormat("inconsistent countsketch".into()));
        }
        Ok(Self { q, cols, seed, rng })
    }

    fn draw(&mut self) -> SketchEntry {
        let row = self.rng.next_index(self.q);
        let sign = self.rng.next_sign();
        SketchEntry { row, sign }
    }

    /// Sketch rows `q`.
    pub fn rows(&self) -> usize {
        self.q
    }

    /// Columns `n`.
    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn entries(&self) -> &[SketchEntry] {
        &self.cols
    }

    pub fn rng(&self) -> &SketchRng {
        &self.rng
    }

    pub fn entry(&self, i: usize) -> Result<SketchEntry> {
        self.cols.get(i).copied().ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.cols.len(),
        })
    }

    /// `S · M` in one pass over the rows of `M`.
    pub fn apply<T: Scalar>(&self, m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if m.rows() != self.n() {
            return Err(Error::dims(
                "countsketch_apply",
                format!("sketch has {} columns, matrix {} rows", self.n(), m.rows()),
            ));
        }
        let mut out = DenseMatrix::zeros(self.q, m.cols());
        for (i, e) in self.cols.iter().enumerate() {
            let s = e.sign_value::<T>();
            let src = m.row(i);
            for (o, &x) in out.row_mut(e.row).iter_mut().zip(src) {
                if x != T::zero() {
                    *o += s * x;
                }
            }
        }
        Ok(out)
    }

    pub fn apply_vector<T: Scalar>(&self, b: &DenseVector<T>) -> Result<DenseVector<T>> {
        if b.len() != self.n() {
            return Err(Error::dims(
                "countsketch_apply",
                format!("sketch has {} columns, vector {}", self.n(), b.len()),
            ));
        }
        let mut out = DenseVector::zeros(self.q);
        for (e, &x) in self.cols.iter().zip(b.iter()) {
            out[e.row] += e.sign_value::<T>() * x;
        }
        Ok(out)
    }

    /// `S · e_i` as a dense length-`q` vector.
    pub fn column<T: Scalar>(&self, i: usize) -> Result<DenseVector<T>> {
        let e = self.entry(i)?;
        let mut v = DenseVector::zeros(self.q);
        v[e.row] = e.sign_value();
        Ok(v)
    }

    /// Appends a column for a new last row of `M`. `at` must equal the
    /// current column count.
    pub fn add_column(&mut self, at: usize) -> Result<SketchEntry> {
        if at != self.n() {
            return Err(Error::InvalidArgument(format!(
                "countsketch columns are appended: expected position {}, got {at}",
                self.n()
            )));
        }
        let entry = self.draw();
        self.cols.push(entry);
        Ok(entry)
    }

    /// Removes column `at`; later columns shift down by one.
    pub fn remove_column(&mut self, at: usize) -> Result<SketchEntry> {
        if at >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: at,
                len: self.n(),
            });
        }
        Ok(self.cols.remove(at))
    }

    pub fn to_dense<T: Scalar>(&self) -> DenseMatrix<T> {
        let mut s = DenseMatrix::zeros(self.q, self.n());
        for (i, e) in self.cols.iter().enumerate() {
            s[(e.row, i)] = e.sign_value();
        }
        s
    }
}
