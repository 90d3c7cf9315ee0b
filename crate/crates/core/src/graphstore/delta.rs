use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstore::candidates::{affected_candidates_delete, affected_candidates_insert};
use crate::graphstore::embedding::{mnn_embed_node, EmbeddingMatrix};
use crate::graphstore::graph::{DynamicGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaKind {
    EdgeInsert,
    EdgeDelete,
    NodeInsert,
    NodeDelete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOp {
    Insert,
    Delete,
}

/// Rank-one row patch `M += e_{c_index} · dᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateVectorPair {
    pub c_index: usize,
    /// Always 1; kept explicit so the pair reads as `c · dᵀ`.
    pub c_value: f64,
    /// New row minus old row.
    pub d: Vec<f64>,
}

/// Everything the regression engine needs to follow one graph mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDelta {
    pub kind: DeltaKind,
    /// Row patches, indexed against the row layout after any row
    /// insertion or removal of this delta.
    pub pairs: Vec<UpdateVectorPair>,
    /// Row appended for an inserted node.
    pub new_row: Option<Vec<f64>>,
    /// Row of a deleted node, as it was before deletion.
    pub removed_row: Option<Vec<f64>>,
    /// Measured value of the inserted or deleted node.
    pub measured_value: Option<f64>,
    pub node_id: Option<NodeId>,
    /// Position of the appended or removed row.
    pub row_index: Option<usize>,
    /// Rows the pruned search flagged (superset of the patched ones).
    pub candidates: Vec<NodeId>,
}

impl GraphDelta {
    fn new(kind: DeltaKind) -> Self {
        Self {
            kind,
            pairs: Vec::new(),
            new_row: None,
            removed_row: None,
            measured_value: None,
            node_id: None,
            row_index: None,
            candidates: Vec::new(),
        }
    }

    /// Number of rank-one pairs (`K` for this delta).
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_edge_op(&self) -> bool {
        matches!(self.kind, DeltaKind::EdgeInsert | DeltaKind::EdgeDelete)
    }
}

fn row_as_f64(row: &[NodeId]) -> Vec<f64> {
    row.iter().map(|&x| x as f64).collect()
}

/// Recomputes the rows of `candidates` on `g` and emits a pair for every row
/// that differs from `old_row(id)`. `index_of` maps ids to post-change rows.
fn diff_rows(
    g: &DynamicGraph,
    m: usize,
    candidates: &BTreeSet<NodeId>,
    old_row: impl Fn(NodeId) -> Option<Vec<NodeId>>,
    skip: Option<NodeId>,
) -> Result<Vec<UpdateVectorPair>> {
    let mut pairs = Vec::new();
    for &w in candidates {
        if Some(w) == skip {
            continue;
        }
        let Some(old) = old_row(w) else { continue };
        let new = mnn_embed_node(g, w, m)?;
        if new != old {
            pairs.push(UpdateVectorPair {
                c_index: g.index_of(w)?,
                c_value: 1.0,
                d: new
                    .iter()
                    .zip(&old)
                    .map(|(&a, &b)| a as f64 - b as f64)
                    .collect(),
            });
        }
    }
    pairs.sort_by_key(|p| p.c_index);
    Ok(pairs)
}

/// Applies an edge insertion or deletion to `g` and returns the row patches
/// against `emb` (the embedding of `g` before the change).
pub fn delta_for_edge(
    g: &mut DynamicGraph,
    op: EdgeOp,
    u: NodeId,
    v: NodeId,
    emb: &EmbeddingMatrix,
) -> Result<GraphDelta> {
    let m = emb.width();
    let candidates = match op {
        EdgeOp::Insert => {
            g.add_edge(u, v)?;
            affected_candidates_insert(g, u, v, m)?
        }
        EdgeOp::Delete => {
            let q = affected_candidates_delete(g, u, v, m)?;
            g.remove_edge(u, v)?;
            q
        }
    };
    let old_row = |w: NodeId| g.index_of(w).ok().map(|i| emb.row(i).to_vec());
    let pairs = diff_rows(g, m, &candidates, old_row, None)?;
    let mut delta = GraphDelta::new(match op {
        EdgeOp::Insert => DeltaKind::EdgeInsert,
        EdgeOp::Delete => DeltaKind::EdgeDelete,
    });
    delta.pairs = pairs;
    delta.candidates = candidates.into_iter().collect();
    Ok(delta)
}

/// Appends node `new_id` wired to `neighbors` (at most `max_edges`).
pub fn delta_for_node_insert(
    g: &mut DynamicGraph,
    new_id: NodeId,
    neighbors: &[NodeId],
    measured_value: f64,
    emb: &EmbeddingMatrix,
    max_edges: usize,
) -> Result<GraphDelta> {
    if new_id == 0 {
        return Err(Error::ReservedNodeId);
    }
    if g.contains(new_id) {
        return Err(Error::DuplicateNode(new_id));
    }
    if neighbors.len() > max_edges {
        return Err(Error::TooManyEdges {
            node: new_id,
            count: neighbors.len(),
            limit: max_edges,
        });
    }
    let mut distinct = BTreeSet::new();
    for &n in neighbors {
        if n == new_id {
            return Err(Error::SelfLoop(n));
        }
        if !g.contains(n) {
            return Err(Error::UnknownNode(n));
        }
        if !distinct.insert(n) {
            return Err(Error::EdgeExists(new_id, n));
        }
    }

    let m = emb.width();
    let row_index = g.add_node(new_id)?;
    let mut candidates = BTreeSet::new();
    for &n in neighbors {
        g.add_edge(new_id, n)?;
        candidates.extend(affected_candidates_insert(g, new_id, n, m)?);
    }
    let old_row = |w: NodeId| {
        g.index_of(w)
            .ok()
            .filter(|&i| i < emb.rows())
            .map(|i| emb.row(i).to_vec())
    };
    let pairs = diff_rows(g, m, &candidates, old_row, Some(new_id))?;

    let mut delta = GraphDelta::new(DeltaKind::NodeInsert);
    delta.pairs = pairs;
    delta.new_row = Some(row_as_f64(&mnn_embed_node(g, new_id, m)?));
    delta.measured_value = Some(measured_value);
    delta.node_id = Some(new_id);
    delta.row_index = Some(row_index);
    delta.candidates = candidates.into_iter().collect();
    Ok(delta)
}

/// Removes node `id` (degree at most `max_edges`) with its edges. Pairs use
/// the shifted row layout; `measured_value` is left for the caller to fill.
pub fn delta_for_node_delete(
    g: &mut DynamicGraph,
    id: NodeId,
    emb: &EmbeddingMatrix,
    max_edges: usize,
) -> Result<GraphDelta> {
    let degree = g.degree(id)?;
    if degree > max_edges {
        return Err(Error::TooManyEdges {
            node: id,
            count: degree,
            limit: max_edges,
        });
    }
    let m = emb.width();
    let removed_index = g.index_of(id)?;
    let removed_row = emb.row(removed_index).to_vec();

    let mut candidates = BTreeSet::new();
    let nbrs: Vec<NodeId> = g.neighbors(id)?.iter().copied().collect();
    for n in nbrs {
        candidates.extend(affected_candidates_delete(g, id, n, m)?);
        g.remove_edge(id, n)?;
    }
    // Old rows are looked up by pre-removal position.
    let old_positions: Vec<(NodeId, usize)> = candidates
        .iter()
        .filter(|&&w| w != id)
        .map(|&w| g.index_of(w).map(|i| (w, i)))
        .collect::<Result<_>>()?;
    g.remove_node(id)?;
    let old_row = |w: NodeId| {
        old_positions
            .iter()
            .find(|(x, _)| *x == w)
            .map(|&(_, i)| emb.row(i).to_vec())
    };
    let pairs = diff_rows(g, m, &candidates, old_row, Some(id))?;

    let mut delta = GraphDelta::new(DeltaKind::NodeDelete);
    delta.pairs = pairs;
    delta.removed_row = Some(row_as_f64(&removed_row));
    delta.node_id = Some(id);
    delta.row_index = Some(removed_index);
    delta.candidates = candidates.into_iter().collect();
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphstore::embedding::build_embedding;

    #[test]
    fn insert_into_two_isolated_nodes() {
        let mut g = DynamicGraph::with_nodes(2);
        let mut emb = build_embedding(&g, 2);
        let delta = delta_for_edge(&mut g, EdgeOp::Insert, 1, 2, &emb).unwrap();
        assert_eq!(delta.k(), 2);
        assert_eq!(delta.pairs[0].d, vec![2.0, 0.0]);
        assert_eq!(delta.pairs[1].d, vec![1.0, 0.0]);
        emb.apply(&delta).unwrap();
        assert_eq!(emb, build_embedding(&g, 2));
    }

    #[test]
    fn clique_insert_without_change() {
        // clique on 1..=4 minus edge 3-4; with m = 1 every row is already
        // filled by a closer, smaller id.
        let mut g = DynamicGraph::with_nodes(4);
        for (u, v) in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)] {
            g.add_edge(u, v).unwrap();
        }
        let emb = build_embedding(&g, 1);
        let delta = delta_for_edge(&mut g, EdgeOp::Insert, 3, 4, &emb).unwrap();
        assert_eq!(delta.k(), 0);
        assert_eq!(emb, build_embedding(&g, 1));
    }

    #[test]
    fn inapplicable_edges() {
        let mut g = DynamicGraph::with_nodes(3);
        let emb = build_embedding(&g, 2);
        assert!(delta_for_edge(&mut g, EdgeOp::Delete, 1, 2, &emb).is_err());
        g.add_edge(1, 2).unwrap();
        let emb = build_embedding(&g, 2);
        assert!(delta_for_edge(&mut g, EdgeOp::Insert, 1, 2, &emb).is_err());
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn isolated_node_round_trip() {
        let mut g = DynamicGraph::with_nodes(3);
        g.add_edge(1, 2).unwrap();
        let mut emb = build_embedding(&g, 2);
        let ins = delta_for_node_insert(&mut g, 9, &[], 0.5, &emb, 16).unwrap();
        assert_eq!(ins.new_row, Some(vec![0.0, 0.0]));
        assert_eq!(ins.k(), 0);
        assert_eq!(ins.row_index, Some(3));
        emb.apply(&ins).unwrap();
        let del = delta_for_node_delete(&mut g, 9, &emb, 16).unwrap();
        assert_eq!(del.removed_row, Some(vec![0.0, 0.0]));
        assert_eq!(del.k(), 0);
        emb.apply(&del).unwrap();
        assert_eq!(emb, build_embedding(&g, 2));
    }

    #[test]
    fn node_limits() {
        let mut g = DynamicGraph::with_nodes(4);
        let emb = build_embedding(&g, 1);
        assert!(matches!(
            delta_for_node_insert(&mut g, 7, &[1, 2, 3], 0.0, &emb, 2),
            Err(Error::TooManyEdges { .. })
        ));
        assert!(delta_for_node_insert(&mut g, 2, &[], 0.0, &emb, 2).is_err());
        assert!(delta_for_node_insert(&mut g, 7, &[1, 1], 0.0, &emb, 2).is_err());
        assert!(delta_for_node_insert(&mut g, 7, &[99], 0.0, &emb, 2).is_err());
        assert_eq!(g.len(), 4);
        for v in 2..=4 {
            g.add_edge(1, v).unwrap();
        }
        let emb = build_embedding(&g, 1);
        assert!(delta_for_node_delete(&mut g, 1, &emb, 2).is_err());
        assert!(delta_for_node_delete(&mut g, 42, &emb, 2).is_err());
    }

    #[test]
    fn delete_path_endpoint() {
        let mut g = DynamicGraph::with_nodes(4);
        for (u, v) in [(1, 2), (2, 3), (3, 4)] {
            g.add_edge(u, v).unwrap();
        }
        let mut emb = build_embedding(&g, 2);
        let delta = delta_for_node_delete(&mut g, 1, &emb, 16).unwrap();
        assert_eq!(delta.row_index, Some(0));
        emb.apply(&delta).unwrap();
        assert_eq!(emb, build_embedding(&g, 2));
    }
}
