use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::graphstore::delta::{DeltaKind, GraphDelta};
use crate::graphstore::graph::{DynamicGraph, NodeId};
use crate::numkit::DenseMatrix;
use crate::scalar::Scalar;

/// Empty slot in an embedding row.
pub const SENTINEL: NodeId = 0;

/// `n × m` matrix whose row `i` lists the `m` nearest nodes of the node at
/// position `i`, ordered by (hop distance, id) and padded with [`SENTINEL`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingMatrix {
    m: usize,
    data: Vec<NodeId>,
}

impl EmbeddingMatrix {
    pub fn empty(m: usize) -> Self {
        Self {
            m,
            data: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> usize {
        if self.m == 0 {
            0
        } else {
            self.data.len() / self.m
        }
    }

    pub fn row(&self, i: usize) -> &[NodeId] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    pub fn push_row(&mut self, row: &[NodeId]) {
        assert_eq!(row.len(), self.m);
        self.data.extend_from_slice(row);
    }

    pub fn to_dense<T: Scalar>(&self) -> DenseMatrix<T> {
        let data = self.data.iter().map(|&id| T::of(id as f64)).collect();
        DenseMatrix::from_vec(self.rows(), self.m, data).expect("shape is consistent")
    }

    /// Applies row insertion/removal and every `M[c] += d` pair.
    pub fn apply(&mut self, delta: &GraphDelta) -> Result<()> {
        match delta.kind {
            DeltaKind::NodeInsert => {
                let row = delta
                    .new_row
                    .as_ref()
                    .ok_or_else(|| Error::MalformedDelta("node insert without row".into()))?;
                if delta.row_index != Some(self.rows()) {
                    return Err(Error::MalformedDelta("node insert must append".into()));
                }
                let ids = to_ids(row)?;
                if ids.len() != self.m {
                    return Err(Error::MalformedDelta("row width".into()));
                }
                self.data.extend(ids);
            }
            DeltaKind::NodeDelete => {
                let at = delta
                    .row_index
                    .ok_or_else(|| Error::MalformedDelta("node delete without index".into()))?;
                if at >= self.rows() {
                    return Err(Error::IndexOutOfRange {
                        index: at,
                        len: self.rows(),
                    });
                }
                self.data.drain(at * self.m..(at + 1) * self.m);
            }
            DeltaKind::EdgeInsert | DeltaKind::EdgeDelete => {}
        }
        for pair in &delta.pairs {
            if pair.c_index >= self.rows() || pair.d.len() != self.m {
                return Err(Error::MalformedDelta(format!(
                    "pair targets row {} of {}",
                    pair.c_index,
                    self.rows()
                )));
            }
            let base = pair.c_index * self.m;
            for (slot, &d) in self.data[base..base + self.m].iter_mut().zip(&pair.d) {
                let next = *slot as f64 + d;
                *slot = to_id(next)?;
            }
        }
        Ok(())
    }
}

fn to_id(x: f64) -> Result<NodeId> {
    if x >= 0.0 && x.fract() == 0.0 && x < 9.007_199_254_740_992e15 {
        Ok(x as NodeId)
    } else {
        Err(Error::MalformedDelta(format!("{x} is not a node id")))
    }
}

fn to_ids(row: &[f64]) -> Result<Vec<NodeId>> {
    row.iter().map(|&x| to_id(x)).collect()
}

/// The `m` nearest nodes of `v` by (hop distance, id), sentinel-padded.
pub fn mnn_embed_node(g: &DynamicGraph, v: NodeId, m: usize) -> Result<Vec<NodeId>> {
    g.neighbors(v)?;
    let mut row = Vec::with_capacity(m);
    let mut seen: HashSet<NodeId> = HashSet::from([v]);
    let mut frontier: Vec<NodeId> = vec![v];
    while row.len() < m && !frontier.is_empty() {
        let mut next: BTreeSet<NodeId> = BTreeSet::new();
        for &x in &frontier {
            for &y in g.neighbors(x)? {
                if !seen.contains(&y) {
                    next.insert(y);
                }
            }
        }
        for &y in &next {
            seen.insert(y);
            if row.len() < m {
                row.push(y);
            }
        }
        frontier = next.into_iter().collect();
    }
    row.resize(m, SENTINEL);
    Ok(row)
}

/// One [`mnn_embed_node`] row per node, in graph order.
pub fn build_embedding(g: &DynamicGraph, m: usize) -> EmbeddingMatrix {
    let mut data = Vec::with_capacity(g.len() * m);
    for id in g.node_ids() {
        data.extend(mnn_embed_node(g, id, m).expect("node from graph"));
    }
    EmbeddingMatrix { m, data }
}
