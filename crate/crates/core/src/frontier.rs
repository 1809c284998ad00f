//! Round-synchronous frontier plus the direction-optimized edge map that
//! drives every traversal in this crate.

use rayon::prelude::*;

use crate::graph::{Graph, VertexId};

/// The set of vertices processed in one traversal round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier {
    verts: Vec<VertexId>,
    round: u32,
}

impl Frontier {
    pub fn new(verts: Vec<VertexId>, round: u32) -> Frontier {
        Frontier { verts, round }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn verts(&self) -> &[VertexId] {
        &self.verts
    }

    fn degree_sum(&self, g: &Graph) -> u64 {
        if self.verts.len() > 2048 {
            self.verts.par_iter().map(|&u| g.out_degree(u) as u64).sum()
        } else {
            self.verts.iter().map(|&u| g.out_degree(u) as u64).sum()
        }
    }
}

/// Traversal direction chosen by the edge map for one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Forward: iterate out-arcs of frontier vertices.
    Sparse,
    /// Backward: iterate all vertices passing `cond` over their in-neighbors.
    Dense,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Sparse => write!(f, "sparse"),
            Mode::Dense => write!(f, "dense"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EdgeMapOptions {
    /// Dense mode engages when `deg_sum(frontier) + |frontier|` exceeds
    /// `m / dense_denominator` (the classic direction-switch heuristic).
    pub dense_denominator: u64,
    /// Pin the mode for testing or benchmarking.
    pub forced_mode: Option<Mode>,
    /// Whether dense mode may stop scanning in-neighbors after the first
    /// successful relax. Safe for plain BFS; must stay off when distinct
    /// in-neighbors contribute distinct state (cluster relax).
    pub dense_early_exit: bool,
}

impl Default for EdgeMapOptions {
    fn default() -> Self {
        EdgeMapOptions {
            dense_denominator: 20,
            forced_mode: None,
            dense_early_exit: false,
        }
    }
}

/// Per-round record for the instrumentation hook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundStat {
    pub round: u32,
    pub frontier_size: usize,
    pub mode: Mode,
}

/// Apply `relax` to the arcs leaving `frontier`, returning the
/// duplicate-free set of vertices for which `relax` reported "newly
/// claimed" as the next frontier.
///
/// `relax(u, v)` must be safe under concurrent invocation (its effects are
/// atomic read-modify-writes) and must return true exactly once per round
/// per claimed vertex. `cond` must be pure modulo state already committed
/// this round.
pub fn edge_map<C, R>(
    g: &Graph,
    frontier: &Frontier,
    cond: &C,
    relax: &R,
    opts: &EdgeMapOptions,
) -> (Frontier, Mode)
where
    C: Fn(VertexId) -> bool + Sync,
    R: Fn(VertexId, VertexId) -> bool + Sync,
{
    let next_round = frontier.round() + 1;
    if frontier.is_empty() {
        return (Frontier::new(Vec::new(), next_round), Mode::Sparse);
    }
    let mode = match opts.forced_mode {
        Some(m) => m,
        None => {
            let work = frontier.degree_sum(g) + frontier.len() as u64;
            if work > g.arc_count() as u64 / opts.dense_denominator {
                Mode::Dense
            } else {
                Mode::Sparse
            }
        }
    };

    let next = match mode {
        Mode::Sparse => frontier
            .verts()
            .par_iter()
            .flat_map_iter(|&u| {
                g.out_neighbors(u)
                    .iter()
                    .copied()
                    .filter(move |&v| cond(v) && relax(u, v))
            })
            .collect(),
        Mode::Dense => {
            let mut in_frontier = vec![false; g.vertex_count()];
            for &u in frontier.verts() {
                in_frontier[u as usize] = true;
            }
            (0..g.vertex_count() as u32)
                .into_par_iter()
                .filter(|&v| {
                    if !cond(v) {
                        return false;
                    }
                    let mut claimed = false;
                    for &u in g.in_neighbors(v) {
                        if in_frontier[u as usize] && relax(u, v) {
                            claimed = true;
                            if opts.dense_early_exit {
                                break;
                            }
                        }
                    }
                    claimed
                })
                .collect()
        }
    };

    (Frontier::new(next, next_round), mode)
}
