//! Small seeded graph families for tests and benchmarks.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graphstore::graph::{DynamicGraph, NodeId};

/// `G(n, M)`: nodes `1..=n` and `edges` distinct edges drawn uniformly.
/// `edges` is capped at `n(n-1)/2`.
pub fn erdos_renyi(n: usize, edges: usize, seed: u64) -> DynamicGraph {
    let mut g = DynamicGraph::with_nodes(n);
    let total = n * n.saturating_sub(1) / 2;
    let edges = edges.min(total);
    if edges == 0 {
        return g;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in sample(&mut rng, total, edges).into_iter() {
        let (u, v) = unrank_pair(k, n);
        g.add_edge(u, v).expect("distinct pair");
    }
    g
}

// Maps 0..n(n-1)/2 onto pairs (u < v) in row order.
fn unrank_pair(mut k: usize, n: usize) -> (NodeId, NodeId) {
    let mut u = 0;
    while k >= n - 1 - u {
        k -= n - 1 - u;
        u += 1;
    }
    ((u + 1) as NodeId, (u + 2 + k) as NodeId)
}

pub fn path(n: usize) -> DynamicGraph {
    let mut g = DynamicGraph::with_nodes(n);
    for id in 1..n as NodeId {
        g.add_edge(id, id + 1).expect("fresh edge");
    }
    g
}

/// Node 1 joined to `2..=n`.
pub fn star(n: usize) -> DynamicGraph {
    let mut g = DynamicGraph::with_nodes(n);
    for id in 2..=n as NodeId {
        g.add_edge(1, id).expect("fresh edge");
    }
    g
}

pub fn clique(n: usize) -> DynamicGraph {
    let mut g = DynamicGraph::with_nodes(n);
    for u in 1..=n as NodeId {
        for v in u + 1..=n as NodeId {
            g.add_edge(u, v).expect("fresh edge");
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unrank_covers_all_pairs() {
        let n = 6;
        let mut seen = std::collections::BTreeSet::new();
        for k in 0..n * (n - 1) / 2 {
            let (u, v) = unrank_pair(k, n);
            assert!(1 <= u && u < v && v <= n as NodeId);
            assert!(seen.insert((u, v)));
        }
    }

    #[test]
    fn families() {
        assert_eq!(erdos_renyi(10, 12, 3).edge_count(), 12);
        assert_eq!(erdos_renyi(10, 12, 3), erdos_renyi(10, 12, 3));
        assert_eq!(erdos_renyi(4, 100, 1).edge_count(), 6);
        assert_eq!(erdos_renyi(1, 5, 1).edge_count(), 0);
        assert_eq!(path(5).edge_count(), 4);
        assert_eq!(star(5).degree(1).unwrap(), 4);
        assert_eq!(clique(5).edge_count(), 10);
    }
}
