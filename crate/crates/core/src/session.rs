//! A graph, its measured values and a regression state, advanced together.

use serde::{Deserialize, Serialize};

use crate::engine::{
    verify_consistency, ConsistencyReport, EngineConfig, RegressionData, RegressionState,
    UpdateOutcome,
};
use crate::error::{Error, Result};
use crate::graphstore::{DynamicGraph, GraphDelta, GraphStore, NodeId};
use crate::numkit::{DenseMatrix, DenseVector};
use crate::scalar::Scalar;

/// One line of an update stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum UpdateRecord {
    EdgeInsert { u: NodeId, v: NodeId },
    EdgeDelete { u: NodeId, v: NodeId },
    NodeInsert { id: NodeId, value: f64, neighbors: Vec<NodeId> },
    NodeDelete { id: NodeId },
}

#[derive(Debug, Clone)]
pub struct Applied {
    pub delta: GraphDelta,
    pub outcome: UpdateOutcome,
}

/// If an update fails after the graph has changed (only possible on a
/// numerical failure in the engine), the session should be discarded.
#[derive(Debug, Clone)]
pub struct Session<T> {
    store: GraphStore,
    b: DenseVector<T>,
    state: RegressionState<T>,
}

struct View<'a, T> {
    store: &'a GraphStore,
    b: &'a DenseVector<T>,
}

impl<T: Scalar> RegressionData<T> for View<'_, T> {
    fn design(&self) -> DenseMatrix<T> {
        self.store.embedding().to_dense()
    }

    fn measured(&self) -> DenseVector<T> {
        self.b.clone()
    }
}

impl<T: Scalar> Session<T> {
    pub fn new(graph: DynamicGraph, b: DenseVector<T>, m: usize, config: &EngineConfig) -> Result<Self> {
        if b.len() != graph.len() {
            return Err(Error::dims(
                "session",
                format!("{} measured values for {} nodes", b.len(), graph.len()),
            ));
        }
        let store = GraphStore::new(graph, m)?;
        let state = RegressionState::preprocess(&store.embedding().to_dense(), &b, config)?;
        Ok(Self { store, b, state })
    }

    pub(crate) fn from_parts(store: GraphStore, b: DenseVector<T>, state: RegressionState<T>) -> Self {
        Self { store, b, state }
    }

    pub fn store(&self) -> &GraphStore {
        &self.store
    }

    pub fn graph(&self) -> &DynamicGraph {
        self.store.graph()
    }

    pub fn measured(&self) -> &DenseVector<T> {
        &self.b
    }

    pub fn state(&self) -> &RegressionState<T> {
        &self.state
    }

    pub fn design(&self) -> DenseMatrix<T> {
        self.store.embedding().to_dense()
    }

    pub fn apply(&mut self, record: &UpdateRecord) -> Result<Applied> {
        let delta = match record {
            UpdateRecord::EdgeInsert { u, v } => self.store.insert_edge(*u, *v)?,
            UpdateRecord::EdgeDelete { u, v } => self.store.delete_edge(*u, *v)?,
            UpdateRecord::NodeInsert {
                id,
                value,
                neighbors,
            } => {
                if !value.is_finite() {
                    return Err(Error::NonFinite("measured value"));
                }
                let delta = self.store.insert_node(*id, neighbors, *value)?;
                self.b.push(T::of(*value));
                delta
            }
            UpdateRecord::NodeDelete { id } => {
                let mut delta = self.store.delete_node(*id)?;
                let at = delta.row_index.expect("node delete carries its row");
                let value = self.b.remove(at)?;
                delta.measured_value = Some(value.to_f64_lossy());
                delta
            }
        };
        let view = View {
            store: &self.store,
            b: &self.b,
        };
        let outcome = self.state.update(&delta, &view)?;
        Ok(Applied { delta, outcome })
    }

    pub fn verify(&self, tolerance: f64) -> Result<ConsistencyReport> {
        verify_consistency(&self.state, &self.design(), &self.b, tolerance)
    }
}
