//! Dynamic graph, its nearest-neighbour embedding, and the row deltas that
//! keep the two in step.

mod candidates;
mod delta;
mod embedding;
pub mod generators;
mod graph;

pub use candidates::{affected_candidates_delete, affected_candidates_insert};
pub use delta::{
    delta_for_edge, delta_for_node_delete, delta_for_node_insert, DeltaKind, EdgeOp, GraphDelta,
    UpdateVectorPair,
};
pub use embedding::{build_embedding, mnn_embed_node, EmbeddingMatrix, SENTINEL};
pub use graph::{DynamicGraph, NodeId};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_NODE_EDGES: usize = 16;

/// A graph together with its embedding, updated in lockstep.
#[derive(Debug, Clone)]
pub struct GraphStore {
    graph: DynamicGraph,
    embedding: EmbeddingMatrix,
    max_node_edges: usize,
}

impl GraphStore {
    pub fn new(graph: DynamicGraph, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("embedding width must be positive".into()));
        }
        let embedding = build_embedding(&graph, m);
        Ok(Self {
            graph,
            embedding,
            max_node_edges: DEFAULT_MAX_NODE_EDGES,
        })
    }

    pub fn with_max_node_edges(mut self, limit: usize) -> Self {
        self.max_node_edges = limit;
        self
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    pub fn embedding(&self) -> &EmbeddingMatrix {
        &self.embedding
    }

    pub fn m(&self) -> usize {
        self.embedding.width()
    }

    pub fn max_node_edges(&self) -> usize {
        self.max_node_edges
    }

    pub fn insert_edge(&mut self, u: NodeId, v: NodeId) -> Result<GraphDelta> {
        self.edge(EdgeOp::Insert, u, v)
    }

    pub fn delete_edge(&mut self, u: NodeId, v: NodeId) -> Result<GraphDelta> {
        self.edge(EdgeOp::Delete, u, v)
    }

    fn edge(&mut self, op: EdgeOp, u: NodeId, v: NodeId) -> Result<GraphDelta> {
        let delta = delta_for_edge(&mut self.graph, op, u, v, &self.embedding)?;
        self.embedding.apply(&delta)?;
        Ok(delta)
    }

    pub fn insert_node(
        &mut self,
        id: NodeId,
        neighbors: &[NodeId],
        measured_value: f64,
    ) -> Result<GraphDelta> {
        let delta = delta_for_node_insert(
            &mut self.graph,
            id,
            neighbors,
            measured_value,
            &self.embedding,
            self.max_node_edges,
        )?;
        self.embedding.apply(&delta)?;
        Ok(delta)
    }

    pub fn delete_node(&mut self, id: NodeId) -> Result<GraphDelta> {
        let delta =
            delta_for_node_delete(&mut self.graph, id, &self.embedding, self.max_node_edges)?;
        self.embedding.apply(&delta)?;
        Ok(delta)
    }
}
