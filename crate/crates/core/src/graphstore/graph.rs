use std::collections::BTreeSet;

use indexmap::IndexMap;

use crate::error::{Error, Result};

/// Positive node identifier; `0` is reserved for the empty-slot sentinel of
/// the embedding.
pub type NodeId = u64;

/// Undirected simple graph whose node order is insertion order. Row `i` of
/// the embedding belongs to the node at position `i`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DynamicGraph {
    adj: IndexMap<NodeId, BTreeSet<NodeId>>,
}

impl DynamicGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Nodes `1..=n`, no edges.
    pub fn with_nodes(n: usize) -> Self {
        let mut g = Self::new();
        for id in 1..=n as NodeId {
            g.adj.insert(id, BTreeSet::new());
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.adj.contains_key(&id)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adj.keys().copied()
    }

    pub fn index_of(&self, id: NodeId) -> Result<usize> {
        self.adj.get_index_of(&id).ok_or(Error::UnknownNode(id))
    }

    pub fn id_at(&self, index: usize) -> Option<NodeId> {
        self.adj.get_index(index).map(|(&id, _)| id)
    }

    pub fn neighbors(&self, id: NodeId) -> Result<&BTreeSet<NodeId>> {
        self.adj.get(&id).ok_or(Error::UnknownNode(id))
    }

    pub fn degree(&self, id: NodeId) -> Result<usize> {
        self.neighbors(id).map(BTreeSet::len)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Each edge once, as `(smaller, larger)`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, n)| n.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn add_node(&mut self, id: NodeId) -> Result<usize> {
        if id == 0 {
            return Err(Error::ReservedNodeId);
        }
        if self.contains(id) {
            return Err(Error::DuplicateNode(id));
        }
        self.adj.insert(id, BTreeSet::new());
        Ok(self.adj.len() - 1)
    }

    /// Removes the node and its incident edges; returns its former position.
    /// Later nodes shift down by one.
    pub fn remove_node(&mut self, id: NodeId) -> Result<usize> {
        let index = self.index_of(id)?;
        let nbrs = std::mem::take(&mut self.adj[index]);
        for n in nbrs {
            if let Some(set) = self.adj.get_mut(&n) {
                set.remove(&id);
            }
        }
        self.adj.shift_remove_index(index);
        Ok(index)
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.check_pair(u, v)?;
        if self.has_edge(u, v) {
            return Err(Error::EdgeExists(u, v));
        }
        self.adj[&u].insert(v);
        self.adj[&v].insert(u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.check_pair(u, v)?;
        if !self.has_edge(u, v) {
            return Err(Error::EdgeMissing(u, v));
        }
        self.adj[&u].remove(&v);
        self.adj[&v].remove(&u);
        Ok(())
    }

    fn check_pair(&self, u: NodeId, v: NodeId) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        for id in [u, v] {
            if !self.contains(id) {
                return Err(Error::UnknownNode(id));
            }
        }
        Ok(())
    }
}
