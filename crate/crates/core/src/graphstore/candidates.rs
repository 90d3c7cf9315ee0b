//! Pruned breadth-first search for the rows an edge change can touch.
//!
//! Let `G` be the graph that contains edge `(u, v)` (after an insertion,
//! before a deletion). A row `w` can only change if some node it ranks, or
//! could rank, has a shortest path through the edge at a distance no larger
//! than the row's current radius. With `d = min(dist(w, u), dist(w, v))`
//! that requires fewer than `m` nodes within distance `d` of `w`.
//!
//! The test is monotone along shortest paths (the ball around an
//! intermediate node is contained in the ball around `w`), so a BFS from
//! each endpoint that only expands qualifying nodes finds every candidate.
//! The BFS from `u` does not cross the edge itself: nodes that reach `u`
//! through `v` are closer to `v` and are found from that side. The usual
//! pruning rules fall out of the test: a node at distance `d ≥ m`, or at
//! distance `d ≥ 1` with `m` or more neighbours, never qualifies.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graphstore::graph::{DynamicGraph, NodeId};

/// Candidate rows for inserting `(u, v)`; `g_after` already contains the edge.
pub fn affected_candidates_insert(
    g_after: &DynamicGraph,
    u: NodeId,
    v: NodeId,
    m: usize,
) -> Result<BTreeSet<NodeId>> {
    candidates_for_edge(g_after, u, v, m)
}

/// Candidate rows for deleting `(u, v)`; `g_before` still contains the edge.
pub fn affected_candidates_delete(
    g_before: &DynamicGraph,
    u: NodeId,
    v: NodeId,
    m: usize,
) -> Result<BTreeSet<NodeId>> {
    candidates_for_edge(g_before, u, v, m)
}

fn candidates_for_edge(
    g: &DynamicGraph,
    u: NodeId,
    v: NodeId,
    m: usize,
) -> Result<BTreeSet<NodeId>> {
    if !g.has_edge(u, v) {
        return Err(Error::EdgeMissing(u, v));
    }
    let mut out = BTreeSet::new();
    pruned_search(g, u, v, m, &mut out)?;
    pruned_search(g, v, u, m, &mut out)?;
    Ok(out)
}

fn pruned_search(
    g: &DynamicGraph,
    origin: NodeId,
    across: NodeId,
    m: usize,
    out: &mut BTreeSet<NodeId>,
) -> Result<()> {
    out.insert(origin);
    let mut seen: HashSet<NodeId> = HashSet::from([origin]);
    let mut queue = VecDeque::from([(origin, 0usize)]);
    while let Some((x, d)) = queue.pop_front() {
        for &y in g.neighbors(x)? {
            if x == origin && y == across {
                continue;
            }
            if !seen.insert(y) {
                continue;
            }
            if ball_smaller_than(g, y, d + 1, m)? {
                out.insert(y);
                queue.push_back((y, d + 1));
            }
        }
    }
    Ok(())
}

/// Whether fewer than `m` nodes other than `w` lie within `radius` hops.
fn ball_smaller_than(g: &DynamicGraph, w: NodeId, radius: usize, m: usize) -> Result<bool> {
    if radius >= m {
        // the path back to the origin alone supplies `radius` nodes
        return Ok(false);
    }
    let mut seen: HashSet<NodeId> = HashSet::from([w]);
    let mut frontier = vec![w];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &x in &frontier {
            for &y in g.neighbors(x)? {
                if seen.insert(y) {
                    if seen.len() > m {
                        return Ok(false);
                    }
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen.len() - 1 < m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_isolated_nodes() {
        let mut g = DynamicGraph::with_nodes(2);
        g.add_edge(1, 2).unwrap();
        let q = affected_candidates_insert(&g, 1, 2, 2).unwrap();
        assert_eq!(q, BTreeSet::from([1, 2]));
    }

    #[test]
    fn missing_edge_is_an_error() {
        let g = DynamicGraph::with_nodes(2);
        assert!(affected_candidates_insert(&g, 1, 2, 2).is_err());
        assert!(affected_candidates_delete(&g, 1, 2, 2).is_err());
    }

    #[test]
    fn hub_blocks_propagation() {
        // star centred on 1 with leaves 2..=5 (degree 4 > m = 2), a tail
        // 5 - 6 - 7, and a new edge 7 - 8.
        let mut g = DynamicGraph::with_nodes(8);
        for leaf in 2..=5 {
            g.add_edge(1, leaf).unwrap();
        }
        g.add_edge(5, 6).unwrap();
        g.add_edge(6, 7).unwrap();
        g.add_edge(7, 8).unwrap();
        let q = affected_candidates_insert(&g, 7, 8, 2).unwrap();
        assert_eq!(q, BTreeSet::from([7, 8]));
        assert!(!q.contains(&6) && !q.contains(&1));
    }

    #[test]
    fn ball_counting() {
        let mut g = DynamicGraph::with_nodes(4);
        g.add_edge(1, 2).unwrap();
        g.add_edge(2, 3).unwrap();
        g.add_edge(3, 4).unwrap();
        assert!(ball_smaller_than(&g, 1, 1, 2).unwrap());
        assert!(!ball_smaller_than(&g, 2, 1, 2).unwrap());
        assert!(!ball_smaller_than(&g, 1, 2, 2).unwrap());
    }
}
