use serde::{Deserialize, Serialize};

use crate::engine::state::RegressionState;
use crate::error::Result;
use crate::numkit::{pinv, penrose_defects, DenseMatrix, DenseVector};
use crate::scalar::Scalar;

pub const DEFAULT_VERIFY_TOLERANCE: f64 = 1e-8;

/// Deviations of a maintained state from a from-scratch recomputation with
/// the same sketch. Each is `max|Δ| / max|reference|` (plain `max|Δ|` when
/// the reference is zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub sm: f64,
    pub sm_pinv: f64,
    pub sb: f64,
    pub x_approx: f64,
    /// Worst Penrose defect of the maintained pair.
    pub penrose: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ConsistencyReport {
    pub fn worst(&self) -> f64 {
        self.sm
            .max(self.sm_pinv)
            .max(self.sb)
            .max(self.x_approx)
            .max(self.penrose)
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn mat_dev<T: Scalar>(got: &DenseMatrix<T>, want: &DenseMatrix<T>) -> f64 {
    if got.shape() != want.shape() {
        return f64::INFINITY;
    }
    rel(got.max_abs_diff(want).to_f64_lossy(), want.max_abs().to_f64_lossy())
}

fn vec_dev<T: Scalar>(got: &DenseVector<T>, want: &DenseVector<T>) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    rel(got.max_abs_diff(want).to_f64_lossy(), want.max_abs().to_f64_lossy())
}

/// Recomputes `S·M`, `(S·M)†`, `S·b` and `x'` with the state's own sketch and
/// compares. NaN deviations count as failures.
pub fn verify_consistency<T: Scalar>(
    state: &RegressionState<T>,
    m_mat: &DenseMatrix<T>,
    b: &DenseVector<T>,
    tolerance: f64,
) -> Result<ConsistencyReport> {
    let sketch = state.sketch();
    let (sm, sb) = match (sketch.apply(m_mat), sketch.apply_vector(b)) {
        (Ok(sm), Ok(sb)) => (sm, sb),
        _ => {
            return Ok(ConsistencyReport {
                sm: f64::INFINITY,
                sm_pinv: f64::INFINITY,
                sb: f64::INFINITY,
                x_approx: f64::INFINITY,
                penrose: f64::INFINITY,
                tolerance,
                passed: false,
            })
        }
    };
    let sm_pinv = pinv(&sm)?;
    let x = sm_pinv.matvec(&sb)?;
    let penrose = penrose_defects(state.sm(), state.sm_pinv())?
        .worst()
        .to_f64_lossy();
    let mut report = ConsistencyReport {
        sm: mat_dev(state.sm(), &sm),
        sm_pinv: mat_dev(state.sm_pinv(), &sm_pinv),
        sb: vec_dev(state.sb(), &sb),
        x_approx: vec_dev(state.x_approx(), &x),
        penrose,
        tolerance,
        passed: false,
    };
    let worst = report.worst();
    report.passed = worst <= tolerance;
    Ok(report)
}
