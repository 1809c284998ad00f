//! Brute-force distance oracles: textbook sequential queue BFS, kept
//! deliberately independent of the frontier/edge-map kernel so the two
//! code paths can check each other.

use std::collections::VecDeque;

use crate::graph::{Graph, VertexId};

/// Sentinel for unreachable vertices.
pub const UNREACHED: u32 = u32::MAX;

/// Hop distances from `s` to every vertex by plain sequential BFS.
pub fn bfs_distances(g: &Graph, s: VertexId) -> Vec<u32> {
    assert!((s as usize) < g.vertex_count(), "source out of range");
    let mut dist = vec![UNREACHED; g.vertex_count()];
    let mut queue = VecDeque::new();
    dist[s as usize] = 0;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in g.out_neighbors(u) {
            if dist[v as usize] == UNREACHED {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Exact distances for a list of pairs, one BFS per distinct source.
pub fn pair_distances(g: &Graph, pairs: &[(VertexId, VertexId)]) -> Vec<u32> {
    let mut by_source: std::collections::HashMap<u32, Vec<usize>> =
        std::collections::HashMap::new();
    for (i, &(u, _)) in pairs.iter().enumerate() {
        by_source.entry(u).or_default().push(i);
    }
    let mut out = vec![UNREACHED; pairs.len()];
    for (u, idxs) in by_source {
        let dist = bfs_distances(g, u);
        for i in idxs {
            out[i] = dist[pairs[i].1 as usize];
        }
    }
    out
}

/// All-pairs distances as one row per source. Quadratic memory; intended
/// for small ground-truth graphs only.
pub fn all_pairs(g: &Graph) -> Vec<Vec<u32>> {
    (0..g.vertex_count() as u32)
        .map(|s| bfs_distances(g, s))
        .collect()
}

/// Connected-component labels for a symmetric graph.
pub fn components(g: &Graph) -> Vec<u32> {
    assert!(g.is_symmetric(), "components need a symmetric graph");
    let n = g.vertex_count();
    let mut comp = vec![u32::MAX; n];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for s in 0..n as u32 {
        if comp[s as usize] != u32::MAX {
            continue;
        }
        comp[s as usize] = next;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in g.out_neighbors(u) {
                if comp[v as usize] == u32::MAX {
                    comp[v as usize] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_distance_is_zero() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], false);
        assert_eq!(bfs_distances(&g, 0)[0], 0);
    }

    #[test]
    fn path_graph_distances_are_index_differences() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)], false);
        assert_eq!(bfs_distances(&g, 0), vec![0, 1, 2, 3, 4]);
        assert_eq!(bfs_distances(&g, 2), vec![2, 1, 0, 1, 2]);
    }

    #[test]
    fn unreachable_marked_with_sentinel() {
        let g = Graph::from_edges(4, &[(0, 1)], false);
        let d = bfs_distances(&g, 0);
        assert_eq!(d[2], UNREACHED);
        assert_eq!(d[3], UNREACHED);
    }

    #[test]
    fn components_label_by_discovery() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 3)], false);
        assert_eq!(components(&g), vec![0, 0, 1, 1, 2]);
    }

    #[test]
    fn pair_distances_match_rows() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4)], false);
        let pairs = [(0, 2), (2, 0), (0, 4), (3, 4)];
        assert_eq!(pair_distances(&g, &pairs), vec![2, 2, UNREACHED, 1]);
    }
}
