use crate::engine::config::{Backend, EngineConfig};
use crate::engine::sketchop::Sketch;
use crate::error::{Error, Result};
use crate::graphstore::{DeltaKind, GraphDelta, UpdateVectorPair};
use crate::numkit::{meyer_update_with_case, pinv, svd, DenseMatrix, DenseVector, MeyerCase};
use crate::scalar::Scalar;
use crate::sketch::{countsketch_sample_count, srht_sample_count, CountSketch, SrhtSketch};

/// Current design matrix and measured values, for the paths that rebuild
/// from scratch.
pub trait RegressionData<T: Scalar> {
    fn design(&self) -> DenseMatrix<T>;
    fn measured(&self) -> DenseVector<T>;
}

impl<T: Scalar> RegressionData<T> for (DenseMatrix<T>, DenseVector<T>) {
    fn design(&self) -> DenseMatrix<T> {
        self.0.clone()
    }

    fn measured(&self) -> DenseVector<T> {
        self.1.clone()
    }
}

/// What one call to [`RegressionState::update`] did.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateOutcome {
    /// The state was recomputed from scratch instead of patched.
    pub rebuilt: bool,
    /// Meyer branch of every rank-one step, in order.
    pub cases: Vec<MeyerCase>,
    /// The drift guard recomputed the pseudoinverse.
    pub refreshed: bool,
}

/// Sketched problem `S·M`, its pseudoinverse, `S·b` and `x' = (S·M)†·S·b`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionState<T> {
    pub(crate) config: EngineConfig,
    pub(crate) sketch: Sketch,
    pub(crate) sm: DenseMatrix<T>,
    pub(crate) sm_pinv: DenseMatrix<T>,
    pub(crate) sb: DenseVector<T>,
    pub(crate) x_approx: DenseVector<T>,
    /// Rows of `M` the state currently describes.
    pub(crate) n: usize,
    pub(crate) updates_since_refresh: u64,
}

fn sketch_rows(n: usize, m: usize, config: &EngineConfig) -> Result<usize> {
    if let Some(r) = config.rows_override {
        if r == 0 {
            return Err(Error::InvalidArgument("sketch rows must be positive".into()));
        }
        return Ok(r);
    }
    match config.backend {
        Backend::Srht => srht_sample_count(n, m, config.eps, config.mode, &config.constants),
        Backend::CountSketch => {
            countsketch_sample_count(m, config.eps, config.mode, &config.constants)
        }
        Backend::Exact => Ok(n),
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

/// Builds the sketch for an `n × m` problem as `config` prescribes.
pub fn build_sketch(n: usize, m: usize, config: &EngineConfig) -> Result<Sketch> {
    check_eps(config.eps)?;
    Ok(match config.backend {
        Backend::Srht => Sketch::Srht(SrhtSketch::new(n, sketch_rows(n, m, config)?, config.seed)?),
        Backend::CountSketch => {
            Sketch::CountSketch(CountSketch::new(n, sketch_rows(n, m, config)?, config.seed)?)
        }
        Backend::Exact => Sketch::Identity,
    })
}

fn warn_if_rank_deficient<T: Scalar>(sm: &DenseMatrix<T>) -> Result<()> {
    if sm.rows() < sm.cols() || sm.cols() == 0 {
        log::warn!("sketched matrix {:?} cannot have full column rank", sm.shape());
        return Ok(());
    }
    let s = svd(sm)?;
    let top = s.sigma[0];
    let bottom = s.sigma[s.sigma.len() - 1];
    if bottom <= T::of(1e-10) * top {
        log::warn!(
            "sketched matrix is rank deficient (sigma_min {bottom}, sigma_max {top}); \
             the solution is the minimum-norm one"
        );
    }
    Ok(())
}

fn sketch_n(s: &Sketch) -> usize {
    match s {
        Sketch::Srht(s) => s.n_logical(),
        Sketch::CountSketch(s) => s.n(),
        Sketch::Identity => 0,
    }
}

fn dvec<T: Scalar>(d: &[f64]) -> DenseVector<T> {
    DenseVector::from_vec(d.iter().map(|&x| T::of(x)).collect())
}

impl<T: Scalar> RegressionState<T> {
    /// Sketches `m_mat` and `b` and solves the sketched problem.
    pub fn preprocess(
        m_mat: &DenseMatrix<T>,
        b: &DenseVector<T>,
        config: &EngineConfig,
    ) -> Result<Self> {
        if m_mat.rows() != b.len() {
            return Err(Error::dims(
                "preprocess",
                format!("M has {} rows, b has {}", m_mat.rows(), b.len()),
            ));
        }
        if !m_mat.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("preprocess input"));
        }
        let sketch = build_sketch(m_mat.rows(), m_mat.cols(), config)?;
        Self::with_sketch(sketch, m_mat, b, config.clone())
    }

    /// Solves with a given sketch (which must match the row count of `m_mat`).
    pub fn with_sketch(
        sketch: Sketch,
        m_mat: &DenseMatrix<T>,
        b: &DenseVector<T>,
        config: EngineConfig,
    ) -> Result<Self> {
        Self::assemble(sketch, m_mat, b, config, true)
    }

    fn assemble(
        sketch: Sketch,
        m_mat: &DenseMatrix<T>,
        b: &DenseVector<T>,
        config: EngineConfig,
        rank_check: bool,
    ) -> Result<Self> {
        if sketch.rows().is_some_and(|_| m_mat.rows() != sketch_n(&sketch)) {
            return Err(Error::dims(
                "sketch",
                format!("sketch covers {} rows, M has {}", sketch_n(&sketch), m_mat.rows()),
            ));
        }
        let sm = sketch.apply(m_mat)?;
        let sb = sketch.apply_vector(b)?;
        if rank_check {
            warn_if_rank_deficient(&sm)?;
        }
        let sm_pinv = pinv(&sm)?;
        let x_approx = sm_pinv.matvec(&sb)?;
        Ok(Self {
            config,
            sketch,
            sm,
            sm_pinv,
            sb,
            x_approx,
            n: m_mat.rows(),
            updates_since_refresh: 0,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn backend(&self) -> Backend {
        self.config.backend
    }

    pub fn sketch(&self) -> &Sketch {
        &self.sketch
    }

    pub fn sm(&self) -> &DenseMatrix<T> {
        &self.sm
    }

    pub fn sm_pinv(&self) -> &DenseMatrix<T> {
        &self.sm_pinv
    }

    pub fn sb(&self) -> &DenseVector<T> {
        &self.sb
    }

    pub fn x_approx(&self) -> &DenseVector<T> {
        &self.x_approx
    }

    pub fn m_width(&self) -> usize {
        self.sm.cols()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rows of `S·M`.
    pub fn sketch_rows(&self) -> usize {
        self.sm.rows()
    }

    /// Follows one graph delta. `data` must describe `M` and `b` after the
    /// change; it is only read on the rebuild paths (exact backend, and node
    /// operations under SRHT).
    pub fn update(
        &mut self,
        delta: &GraphDelta,
        data: &dyn RegressionData<T>,
    ) -> Result<UpdateOutcome> {
        self.check_delta(delta)?;
        let mut outcome = match (self.config.backend, delta.kind) {
            (Backend::Exact, _) => self.rebuild(data)?,
            (Backend::Srht, DeltaKind::NodeInsert | DeltaKind::NodeDelete) => {
                self.rebuild(data)?
            }
            (_, DeltaKind::EdgeInsert | DeltaKind::EdgeDelete) => {
                let mut out = UpdateOutcome::default();
                self.apply_pairs(&delta.pairs, &mut out.cases)?;
                out
            }
            (Backend::CountSketch, DeltaKind::NodeInsert) => self.countsketch_node_insert(delta)?,
            (Backend::CountSketch, DeltaKind::NodeDelete) => self.countsketch_node_delete(delta)?,
        };
        if !outcome.rebuilt {
            self.updates_since_refresh += 1;
            let every = self.config.refresh_interval;
            if every > 0 && self.updates_since_refresh >= every {
                self.sm_pinv = pinv(&self.sm)?;
                self.updates_since_refresh = 0;
                outcome.refreshed = true;
            }
        }
        self.x_approx = self.sm_pinv.matvec(&self.sb)?;
        Ok(outcome)
    }

    fn check_delta(&self, delta: &GraphDelta) -> Result<()> {
        let n_after = match delta.kind {
            DeltaKind::NodeInsert => {
                let row = delta
                    .new_row
                    .as_ref()
                    .ok_or_else(|| Error::MalformedDelta("node insert without row".into()))?;
                if row.len() != self.m_width() {
                    return Err(Error::MalformedDelta("new row width".into()));
                }
                if delta.row_index != Some(self.n) {
                    return Err(Error::MalformedDelta("node insert must append".into()));
                }
                if delta.measured_value.is_none() {
                    return Err(Error::MalformedDelta("node insert without value".into()));
                }
                self.n + 1
            }
            DeltaKind::NodeDelete => {
                let row = delta
                    .removed_row
                    .as_ref()
                    .ok_or_else(|| Error::MalformedDelta("node delete without row".into()))?;
                if row.len() != self.m_width() {
                    return Err(Error::MalformedDelta("removed row width".into()));
                }
                match delta.row_index {
                    Some(i) if i < self.n => {}
                    _ => return Err(Error::MalformedDelta("node delete index".into())),
                }
                if delta.measured_value.is_none() {
                    return Err(Error::MalformedDelta("node delete without value".into()));
                }
                self.n - 1
            }
            DeltaKind::EdgeInsert | DeltaKind::EdgeDelete => self.n,
        };
        for p in &delta.pairs {
            if p.c_index >= n_after || p.d.len() != self.m_width() {
                return Err(Error::MalformedDelta(format!(
                    "pair for row {} of {n_after}",
                    p.c_index
                )));
            }
        }
        Ok(())
    }

    fn rebuild(&mut self, data: &dyn RegressionData<T>) -> Result<UpdateOutcome> {
        let m_mat = data.design();
        let b = data.measured();
        *self = if self.config.backend == Backend::Exact {
            if m_mat.rows() != b.len() {
                return Err(Error::dims("rebuild", "M and b disagree"));
            }
            Self::assemble(Sketch::Identity, &m_mat, &b, self.config.clone(), false)?
        } else {
            Self::preprocess(&m_mat, &b, &self.config)?
        };
        Ok(UpdateOutcome {
            rebuilt: true,
            ..UpdateOutcome::default()
        })
    }

    /// `S·M += c·dᵀ` with the pseudoinverse patched by a Meyer step.
    fn rank_one(&mut self, c: &DenseVector<T>, d: &DenseVector<T>) -> Result<MeyerCase> {
        let (next, case) = meyer_update_with_case(&self.sm, &self.sm_pinv, c, d)?;
        if !next.is_finite() {
            return Err(Error::NonFinite("rank-one pseudoinverse update"));
        }
        self.sm.add_outer(T::one(), c.as_slice(), d.as_slice())?;
        self.sm_pinv = next;
        Ok(case)
    }

    fn apply_pairs(&mut self, pairs: &[UpdateVectorPair], cases: &mut Vec<MeyerCase>) -> Result<()> {
        for p in pairs {
            let c = self
                .sketch
                .column::<T>(p.c_index, self.n)?
                .scaled(T::of(p.c_value));
            cases.push(self.rank_one(&c, &dvec(&p.d))?);
        }
        Ok(())
    }

    fn countsketch_mut(&mut self) -> Result<&mut CountSketch> {
        match &mut self.sketch {
            Sketch::CountSketch(s) => Ok(s),
            _ => Err(Error::InvalidArgument("backend has no countsketch".into())),
        }
    }

    fn countsketch_node_insert(&mut self, delta: &GraphDelta) -> Result<UpdateOutcome> {
        let mut out = UpdateOutcome::default();
        let at = self.n;
        let entry = self.countsketch_mut()?.add_column(at)?;
        self.n += 1;
        let sigma: T = entry.sign_value();
        let q = self.sm.rows();
        let c = DenseVector::basis(q, entry.row).scaled(sigma);
        let row = delta.new_row.as_deref().unwrap_or_default();
        out.cases.push(self.rank_one(&c, &dvec(row))?);
        self.apply_pairs(&delta.pairs, &mut out.cases)?;
        let value = T::of(delta.measured_value.unwrap_or(0.0));
        self.sb.as_mut_slice()[entry.row] += sigma * value;
        Ok(out)
    }

    fn countsketch_node_delete(&mut self, delta: &GraphDelta) -> Result<UpdateOutcome> {
        let mut out = UpdateOutcome::default();
        let at = delta.row_index.unwrap_or_default();
        let entry = self.countsketch_mut()?.remove_column(at)?;
        self.n -= 1;
        let sigma: T = entry.sign_value();
        let q = self.sm.rows();
        let c = DenseVector::basis(q, entry.row).scaled(-sigma);
        let row = delta.removed_row.as_deref().unwrap_or_default();
        out.cases.push(self.rank_one(&c, &dvec(row))?);
        self.apply_pairs(&delta.pairs, &mut out.cases)?;
        let value = T::of(delta.measured_value.unwrap_or(0.0));
        self.sb.as_mut_slice()[entry.row] -= sigma * value;
        Ok(out)
    }

    /// Replaces the pseudoinverse with a fresh SVD one.
    pub fn refresh_pinv(&mut self) -> Result<()> {
        self.sm_pinv = pinv(&self.sm)?;
        self.x_approx = self.sm_pinv.matvec(&self.sb)?;
        self.updates_since_refresh = 0;
        Ok(())
    }
}
