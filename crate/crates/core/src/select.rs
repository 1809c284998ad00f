//! Greedy selection of landmark clusters by degree, plus cluster
//! validation and the cluster text format.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::kernel::Cluster;

#[derive(Debug, Clone)]
pub struct SelectionConfig {
    /// Number of clusters to select.
    pub r: usize,
    /// Cluster capacity (sources per cluster).
    pub k: usize,
    /// Diameter bound; members are gathered within floor(d/2) hops of the
    /// center, so selected clusters always satisfy it.
    pub d: u32,
    /// Whether the candidate search may route through already-marked
    /// vertices (they are never eligible as members either way). Marked
    /// vertices still lie on real shortest paths, so this defaults to on.
    pub hops_through_marked: bool,
}

impl SelectionConfig {
    pub fn new(r: usize, k: usize, d: u32) -> SelectionConfig {
        SelectionConfig {
            r,
            k,
            d,
            hops_through_marked: true,
        }
    }
}

/// Greedily pick up to `cfg.r` pairwise-disjoint clusters: each takes the
/// highest-degree unmarked vertex as center plus up to k-1 highest-degree
/// unmarked vertices within floor(d/2) hops (ties by ascending id), then
/// marks all chosen vertices. Returns fewer clusters when the graph runs
/// out of unmarked vertices; callers treat that as a warning, not an error.
pub fn select_clusters(g: &Graph, cfg: &SelectionConfig) -> Result<Vec<Cluster>> {
    if !g.is_symmetric() {
        return Err(Error::usage("cluster selection needs a symmetric graph"));
    }
    if cfg.r < 1 || cfg.k < 1 {
        return Err(Error::usage("selection needs r >= 1 and k >= 1"));
    }

    let order = g.order_by_degree();
    let mut marked = vec![false; g.vertex_count()];
    let mut clusters = Vec::new();
    let mut cursor = 0usize;

    while clusters.len() < cfg.r {
        while cursor < order.len() && marked[order[cursor] as usize] {
            cursor += 1;
        }
        let Some(&center) = order.get(cursor) else {
            break;
        };

        let mut sources = vec![center];
        if cfg.k > 1 && cfg.d >= 2 {
            let mut candidates =
                gather_candidates(g, center, cfg.d / 2, &marked, cfg.hops_through_marked);
            candidates.sort_unstable_by_key(|&v| (std::cmp::Reverse(g.out_degree(v)), v));
            sources.extend(candidates.into_iter().take(cfg.k - 1));
        }
        for &v in &sources {
            marked[v as usize] = true;
        }
        clusters.push(Cluster::new(sources, cfg.d).expect("selection yields valid clusters"));
    }

    Ok(clusters)
}

/// Single cluster around an explicit center: the center plus up to k-1
/// highest-degree vertices within floor(d/2) hops (ties by ascending id).
pub fn cluster_around(g: &Graph, center: VertexId, k: usize, d: u32) -> Result<Cluster> {
    if (center as usize) >= g.vertex_count() {
        return Err(Error::usage(format!("center {center} out of range")));
    }
    if k < 1 {
        return Err(Error::usage("cluster capacity must be at least 1"));
    }
    let mut sources = vec![center];
    if k > 1 && d >= 2 {
        let marked = vec![false; g.vertex_count()];
        let mut candidates = gather_candidates(g, center, d / 2, &marked, true);
        candidates.sort_unstable_by_key(|&v| (std::cmp::Reverse(g.out_degree(v)), v));
        sources.extend(candidates.into_iter().take(k - 1));
    }
    Cluster::new(sources, d)
}

/// Unmarked vertices within `hops` of `center`, excluding the center.
fn gather_candidates(
    g: &Graph,
    center: VertexId,
    hops: u32,
    marked: &[bool],
    hops_through_marked: bool,
) -> Vec<VertexId> {
    let mut dist = vec![u32::MAX; g.vertex_count()];
    let mut queue = VecDeque::new();
    let mut found = Vec::new();
    dist[center as usize] = 0;
    queue.push_back(center);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        if du == hops {
            continue;
        }
        for &v in g.out_neighbors(u) {
            if dist[v as usize] != u32::MAX {
                continue;
            }
            if !hops_through_marked && marked[v as usize] {
                continue;
            }
            dist[v as usize] = du + 1;
            queue.push_back(v);
            if !marked[v as usize] {
                found.push(v);
            }
        }
    }
    found
}

/// True iff every pair of sources is within `c.d()` hops; checked by k
/// depth-truncated BFS runs.
pub fn validate_cluster(g: &Graph, c: &Cluster) -> bool {
    let d = c.d();
    let member: std::collections::HashSet<u32> = c.sources().iter().copied().collect();
    for &s in c.sources() {
        let mut dist = std::collections::HashMap::new();
        let mut queue = VecDeque::new();
        dist.insert(s, 0u32);
        queue.push_back(s);
        let mut seen = 1usize;
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            if du == d {
                continue;
            }
            for &v in g.out_neighbors(u) {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(v) {
                    e.insert(du + 1);
                    queue.push_back(v);
                    if member.contains(&v) {
                        seen += 1;
                    }
                }
            }
        }
        if seen < c.k() {
            return false;
        }
    }
    true
}

/// Text format: one cluster per line, "d k v1 v2 ... vk".
pub fn write_clusters(clusters: &[Cluster], w: &mut impl Write) -> std::io::Result<()> {
    for c in clusters {
        write!(w, "{} {}", c.d(), c.k())?;
        for &v in c.sources() {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn parse_clusters(r: impl BufRead) -> Result<Vec<Cluster>> {
    let mut clusters = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse_num = |tok: Option<&str>, what: &str| -> Result<u64> {
            tok.ok_or_else(|| Error::parse(lineno + 1, format!("missing {what}")))?
                .parse()
                .map_err(|_| Error::parse(lineno + 1, format!("bad {what}")))
        };
        let d = parse_num(it.next(), "diameter")? as u32;
        let k = parse_num(it.next(), "cluster size")? as usize;
        let mut sources = Vec::with_capacity(k);
        for _ in 0..k {
            sources.push(parse_num(it.next(), "source id")? as u32);
        }
        if it.next().is_some() {
            return Err(Error::parse(lineno + 1, "trailing tokens"));
        }
        clusters
            .push(Cluster::new(sources, d).map_err(|e| Error::parse(lineno + 1, e.to_string()))?);
    }
    Ok(clusters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn star_cluster_takes_lowest_id_leaves_on_ties() {
        // K_{1,70}: center 0, leaves 1..=70 all tie at degree 1.
        let edges: Vec<(u32, u32)> = (1..=70).map(|i| (0, i)).collect();
        let g = Graph::from_edges(71, &edges, false);
        let cfg = SelectionConfig::new(1, 64, 2);
        let clusters = select_clusters(&g, &cfg).unwrap();
        assert_eq!(clusters.len(), 1);
        let c = &clusters[0];
        assert_eq!(c.sources()[0], 0);
        let mut leaves: Vec<u32> = c.sources()[1..].to_vec();
        leaves.sort_unstable();
        assert_eq!(leaves, (1..=63).collect::<Vec<u32>>());
    }

    #[test]
    fn d2_clusters_are_stars() {
        let mut rng = StdRng::seed_from_u64(40);
        let edges: Vec<(u32, u32)> = (0..800)
            .map(|_| (rng.random_range(0..200), rng.random_range(0..200)))
            .collect();
        let g = Graph::from_edges(200, &edges, false);
        let clusters = select_clusters(&g, &SelectionConfig::new(3, 16, 2)).unwrap();
        for c in &clusters {
            let center = c.sources()[0];
            for &s in &c.sources()[1..] {
                assert!(
                    g.out_neighbors(center).binary_search(&s).is_ok(),
                    "member {s} is not a neighbor of center {center}"
                );
            }
        }
    }

    #[test]
    fn clusters_disjoint_and_valid_on_power_law_graph() {
        // Preferential-attachment-style graph.
        let mut rng = StdRng::seed_from_u64(8);
        let mut endpoints: Vec<u32> = vec![0, 1];
        let mut edges: Vec<(u32, u32)> = vec![(0, 1)];
        for v in 2..300u32 {
            for _ in 0..3 {
                let t = endpoints[rng.random_range(0..endpoints.len())];
                if t != v {
                    edges.push((v, t));
                    endpoints.push(t);
                    endpoints.push(v);
                }
            }
        }
        let g = Graph::from_edges(300, &edges, false);
        for d in [2u32, 3, 4] {
            let clusters = select_clusters(&g, &SelectionConfig::new(4, 8, d)).unwrap();
            let mut seen = std::collections::HashSet::new();
            for c in &clusters {
                for &v in c.sources() {
                    assert!(seen.insert(v), "vertex {v} reused across clusters");
                }
                assert!(validate_cluster(&g, c), "cluster violates d={d}");
            }
        }
    }

    #[test]
    fn selection_is_deterministic() {
        let mut rng = StdRng::seed_from_u64(17);
        let edges: Vec<(u32, u32)> = (0..500)
            .map(|_| (rng.random_range(0..120), rng.random_range(0..120)))
            .collect();
        let g = Graph::from_edges(120, &edges, false);
        let cfg = SelectionConfig::new(5, 8, 2);
        let a = select_clusters(&g, &cfg).unwrap();
        let b = select_clusters(&g, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exhausted_graph_returns_fewer_clusters() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)], false);
        let clusters = select_clusters(&g, &SelectionConfig::new(10, 2, 2)).unwrap();
        assert!(clusters.len() < 10);
        assert!(!clusters.is_empty());
    }

    #[test]
    fn directed_graph_rejected() {
        let g = Graph::from_edges(3, &[(0, 1)], true);
        assert!(matches!(
            select_clusters(&g, &SelectionConfig::new(1, 2, 2)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn validate_cluster_edge_cases() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], false);
        assert!(validate_cluster(&g, &Cluster::new(vec![1], 0).unwrap()));
        assert!(validate_cluster(&g, &Cluster::new(vec![0, 1], 1).unwrap()));
        assert!(!validate_cluster(&g, &Cluster::new(vec![0, 1], 0).unwrap()));
        assert!(!validate_cluster(&g, &Cluster::new(vec![0, 2], 1).unwrap()));
        assert!(validate_cluster(&g, &Cluster::new(vec![0, 2], 2).unwrap()));
        // Disconnected pair can never validate.
        let g2 = Graph::from_edges(4, &[(0, 1), (2, 3)], false);
        assert!(!validate_cluster(
            &g2,
            &Cluster::new(vec![0, 2], 5).unwrap()
        ));
    }

    #[test]
    fn odd_d_uses_floor_half_radius() {
        // Path 0-1-2-3-4; with d=3 the radius is 1.
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)], false);
        let clusters = select_clusters(&g, &SelectionConfig::new(1, 5, 3)).unwrap();
        let c = &clusters[0];
        // Center is vertex 1 (degree 2, lowest id among ties).
        assert_eq!(c.sources()[0], 1);
        // Members within 1 hop of center only.
        for &s in c.sources() {
            assert!(validate_cluster(&g, c), "cluster invalid");
            let _ = s;
        }
        assert!(c.k() <= 3);
    }

    #[test]
    fn cluster_around_given_center() {
        let edges: Vec<(u32, u32)> = (1..=10).map(|i| (0, i)).collect();
        let g = Graph::from_edges(11, &edges, false);
        let c = cluster_around(&g, 0, 4, 2).unwrap();
        assert_eq!(c.sources(), &[0, 1, 2, 3]);
        assert!(validate_cluster(&g, &c));
        // Leaf center: candidates are its 1-hop neighborhood.
        let c = cluster_around(&g, 5, 4, 2).unwrap();
        assert_eq!(c.sources()[0], 5);
        assert!(validate_cluster(&g, &c));
        assert!(cluster_around(&g, 99, 4, 2).is_err());
    }

    #[test]
    fn cluster_text_round_trip() {
        let clusters = vec![
            Cluster::new(vec![5, 2, 9], 2).unwrap(),
            Cluster::new(vec![0], 0).unwrap(),
        ];
        let mut buf = Vec::new();
        write_clusters(&clusters, &mut buf).unwrap();
        let parsed = parse_clusters(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(clusters, parsed);
        assert!(parse_clusters(std::io::Cursor::new(b"2 3 0 1".as_slice())).is_err());
    }
}
