//! The cluster-BFS engine: round-synchronous bit-parallel BFS from a
//! cluster of sources, plus the plain parallel BFS baseline.

use std::sync::atomic::{AtomicU16, AtomicU32, AtomicU64, Ordering};

use rayon::prelude::*;

use crate::bitset::{words_for, BitSubset};
use crate::error::{Error, Result};
use crate::frontier::{edge_map, EdgeMapOptions, Frontier, RoundStat};
use crate::graph::{Graph, VertexId};

/// Internal distance sentinel for vertices no source has reached.
pub const UNREACHED_DELTA: u16 = u16::MAX;

/// A set of k source vertices whose pairwise hop distance is at most `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    sources: Vec<VertexId>,
    d: u32,
}

impl Cluster {
    /// Sources must be nonempty and pairwise distinct. `d` is the declared
    /// diameter bound; see `select::validate_cluster` to check it holds.
    pub fn new(sources: Vec<VertexId>, d: u32) -> Result<Cluster> {
        if sources.is_empty() {
            return Err(Error::usage("cluster needs at least one source"));
        }
        let mut sorted = sources.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::usage("cluster sources must be pairwise distinct"));
        }
        Ok(Cluster { sources, d })
    }

    pub fn k(&self) -> usize {
        self.sources.len()
    }

    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    /// Declared diameter bound in hops.
    pub fn d(&self) -> u32 {
        self.d
    }
}

/// Per-vertex record `<S_v[0..d], delta_v>` for one vertex, decoded from
/// the packed result. `subsets[i]` holds the sources at distance
/// `delta + i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterDistanceVector {
    pub delta: Option<u32>,
    pub subsets: Vec<BitSubset>,
}

impl ClusterDistanceVector {
    /// Distance from the `source_index`-th source, or None if it cannot
    /// reach this vertex.
    pub fn decode(&self, source_index: usize) -> Option<u32> {
        let delta = self.delta?;
        self.subsets
            .iter()
            .position(|s| s.contains(source_index))
            .map(|i| delta + i as u32)
    }
}

/// Packed cluster distance vectors for all vertices: one `delta` and
/// `d + 1` bit-subsets per vertex, vertex-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterDistances {
    k: usize,
    d: u32,
    n: usize,
    wps: usize,
    delta: Vec<u16>,
    subsets: Vec<u64>,
}

impl ClusterDistances {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Minimum hop distance from any source, or None if unreached.
    pub fn delta(&self, v: VertexId) -> Option<u32> {
        match self.delta[v as usize] {
            UNREACHED_DELTA => None,
            d => Some(d as u32),
        }
    }

    pub(crate) fn delta_raw(&self, v: VertexId) -> u16 {
        self.delta[v as usize]
    }

    /// Words of `S_v[i]`.
    pub fn subset_words(&self, v: VertexId, i: u32) -> &[u64] {
        debug_assert!(i <= self.d);
        let stride = (self.d as usize + 1) * self.wps;
        let base = v as usize * stride + i as usize * self.wps;
        &self.subsets[base..base + self.wps]
    }

    pub fn subset(&self, v: VertexId, i: u32) -> BitSubset {
        BitSubset::from_words(self.k, self.subset_words(v, i).to_vec())
    }

    /// Distance from the `source_index`-th source to `v`.
    pub fn decode_distance(&self, v: VertexId, source_index: usize) -> Option<u32> {
        assert!(source_index < self.k, "source index out of range");
        let delta = self.delta(v)?;
        let word = source_index / 64;
        let bit = 1u64 << (source_index % 64);
        (0..=self.d)
            .find(|&i| self.subset_words(v, i)[word] & bit != 0)
            .map(|i| delta + i)
    }

    pub fn vector(&self, v: VertexId) -> ClusterDistanceVector {
        ClusterDistanceVector {
            delta: self.delta(v),
            subsets: (0..=self.d).map(|i| self.subset(v, i)).collect(),
        }
    }
}

/// Instrumentation collected by the `_instrumented` traversal variants.
#[derive(Debug, Clone, Default)]
pub struct TraversalStats {
    pub rounds: Vec<RoundStat>,
    /// How many frontiers each vertex appeared in.
    pub appearances: Vec<u32>,
}

impl TraversalStats {
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn max_appearances(&self) -> u32 {
        self.appearances.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CbfsOptions {
    pub edgemap: EdgeMapOptions,
}

/// Cluster-BFS from all sources of `c` at once. Returns the packed cluster
/// distance vectors; decoded distances are exact whenever the cluster's
/// true diameter is at most `c.d()`.
pub fn cluster_bfs(g: &Graph, c: &Cluster) -> ClusterDistances {
    run_cluster_bfs(g, c, &CbfsOptions::default(), false).0
}

pub fn cluster_bfs_instrumented(
    g: &Graph,
    c: &Cluster,
    opts: &CbfsOptions,
) -> (ClusterDistances, TraversalStats) {
    run_cluster_bfs(g, c, opts, true)
}

fn run_cluster_bfs(
    g: &Graph,
    c: &Cluster,
    opts: &CbfsOptions,
    collect: bool,
) -> (ClusterDistances, TraversalStats) {
    let n = g.vertex_count();
    let k = c.k();
    let d = c.d();
    let wps = words_for(k);
    let stride = (d as usize + 1) * wps;
    for &s in c.sources() {
        assert!((s as usize) < n, "cluster source {s} out of range");
    }

    let seen: Vec<AtomicU64> = std::iter::repeat_with(|| AtomicU64::new(0))
        .take(n * wps)
        .collect();
    let next: Vec<AtomicU64> = std::iter::repeat_with(|| AtomicU64::new(0))
        .take(n * wps)
        .collect();
    let out: Vec<AtomicU64> = std::iter::repeat_with(|| AtomicU64::new(0))
        .take(n * stride)
        .collect();
    let delta: Vec<AtomicU16> = std::iter::repeat_with(|| AtomicU16::new(UNREACHED_DELTA))
        .take(n)
        .collect();
    let claim: Vec<AtomicU32> = std::iter::repeat_with(|| AtomicU32::new(u32::MAX))
        .take(n)
        .collect();

    for (j, &s) in c.sources().iter().enumerate() {
        let s = s as usize;
        let bit = 1u64 << (j % 64);
        seen[s * wps + j / 64].fetch_or(bit, Ordering::Relaxed);
        out[s * stride + j / 64].fetch_or(bit, Ordering::Relaxed);
        delta[s].store(0, Ordering::Relaxed);
    }

    // Distinct in-neighbors contribute distinct source bits, so dense mode
    // must OR contributions from every in-frontier neighbor.
    let mut em_opts = opts.edgemap.clone();
    em_opts.dense_early_exit = false;

    let mut stats = TraversalStats {
        rounds: Vec::new(),
        appearances: if collect { vec![0; n] } else { Vec::new() },
    };

    let mut frontier = Frontier::new(c.sources().to_vec(), 0);
    while !frontier.is_empty() {
        let i = frontier.round();

        // Stage 1: fold newly arrived sources into this round's subset.
        // Each frontier vertex is owned by exactly one worker.
        let fold = |u: VertexId| {
            let u = u as usize;
            let du = match delta[u].load(Ordering::Relaxed) {
                UNREACHED_DELTA => {
                    delta[u].store(i as u16, Ordering::Relaxed);
                    i
                }
                du => du as u32,
            };
            let idx = (i - du) as usize;
            debug_assert!(idx <= d as usize);
            for w in 0..wps {
                let nx = next[u * wps + w].load(Ordering::Relaxed);
                let sn = seen[u * wps + w].load(Ordering::Relaxed);
                let new = nx & !sn;
                if new != 0 {
                    let slot = &out[u * stride + idx * wps + w];
                    slot.store(slot.load(Ordering::Relaxed) | new, Ordering::Relaxed);
                    seen[u * wps + w].store(sn | new, Ordering::Relaxed);
                }
            }
        };
        if frontier.len() > 1024 {
            frontier.verts().par_iter().for_each(|&u| fold(u));
        } else {
            frontier.verts().iter().for_each(|&u| fold(u));
        }

        if collect {
            for &v in frontier.verts() {
                stats.appearances[v as usize] += 1;
            }
        }

        // Stage 2: relax arcs out of the frontier. A vertex is visited at
        // most d+1 times, enforced by the visit-cap condition.
        let cond = |v: VertexId| {
            let dv = delta[v as usize].load(Ordering::Relaxed);
            dv == UNREACHED_DELTA || i - (dv as u32) < d
        };
        let relax = |u: VertexId, v: VertexId| {
            let (u, v) = (u as usize, v as usize);
            let mut changed = false;
            for w in 0..wps {
                let bits = seen[u * wps + w].load(Ordering::Relaxed);
                if bits != 0 {
                    let prev = next[v * wps + w].fetch_or(bits, Ordering::Relaxed);
                    if prev | bits != prev {
                        changed = true;
                    }
                }
            }
            changed && claim[v].swap(i, Ordering::Relaxed) != i
        };
        let (next_frontier, mode) = edge_map(g, &frontier, &cond, &relax, &em_opts);
        stats.rounds.push(RoundStat {
            round: i,
            frontier_size: frontier.len(),
            mode,
        });
        frontier = next_frontier;
    }

    let dist = ClusterDistances {
        k,
        d,
        n,
        wps,
        delta: delta.into_iter().map(AtomicU16::into_inner).collect(),
        subsets: out.into_iter().map(AtomicU64::into_inner).collect(),
    };
    (dist, stats)
}

/// Sentinel for unreachable vertices in `plain_bfs` output.
pub const UNREACHED: u32 = u32::MAX;

/// Frontier-based parallel BFS from a single source; exact hop distances
/// with `UNREACHED` elsewhere.
pub fn plain_bfs(g: &Graph, s: VertexId) -> Vec<u32> {
    run_plain_bfs(g, s, &CbfsOptions::default()).0
}

pub fn plain_bfs_instrumented(
    g: &Graph,
    s: VertexId,
    opts: &CbfsOptions,
) -> (Vec<u32>, TraversalStats) {
    run_plain_bfs(g, s, opts)
}

fn run_plain_bfs(g: &Graph, s: VertexId, opts: &CbfsOptions) -> (Vec<u32>, TraversalStats) {
    let n = g.vertex_count();
    assert!((s as usize) < n, "source out of range");
    let dist: Vec<AtomicU32> = std::iter::repeat_with(|| AtomicU32::new(UNREACHED))
        .take(n)
        .collect();
    dist[s as usize].store(0, Ordering::Relaxed);

    // Any in-frontier neighbor settles the distance, so dense mode may
    // stop at the first hit.
    let mut em_opts = opts.edgemap.clone();
    em_opts.dense_early_exit = true;

    let mut stats = TraversalStats::default();
    let mut frontier = Frontier::new(vec![s], 0);
    while !frontier.is_empty() {
        let i = frontier.round();
        let cond = |v: VertexId| dist[v as usize].load(Ordering::Relaxed) == UNREACHED;
        let relax = |_u: VertexId, v: VertexId| {
            dist[v as usize]
                .compare_exchange(UNREACHED, i + 1, Ordering::Relaxed, Ordering::Relaxed)
                .is_ok()
        };
        let (next_frontier, mode) = edge_map(g, &frontier, &cond, &relax, &em_opts);
        stats.rounds.push(RoundStat {
            round: i,
            frontier_size: frontier.len(),
            mode,
        });
        frontier = next_frontier;
    }

    (dist.into_iter().map(AtomicU32::into_inner).collect(), stats)
}
