//! Exact 2-hop distance oracle via pruned landmark labeling: an unpruned
//! cluster-BFS first phase plus a batched, parallel pruned-BFS second
//! phase over the remaining vertices in degree order.

use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::ll::{build_ll_index_exact, LandmarkIndex};
use crate::select::{select_clusters, SelectionConfig};

const PLL_MAGIC: &[u8; 8] = b"CBFSPLL1";
const PLL_VERSION: u32 = 1;

/// Batch sizes for the pruned-BFS phase: floor(200 * 1.5^i), pinned at
/// 1000 once the formula reaches it, with the final batch truncated.
pub fn batch_schedule(remaining: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut left = remaining;
    let mut i = 0u32;
    let mut capped = false;
    while left > 0 {
        let size = if capped {
            1000
        } else {
            let raw = 200u128 * 3u128.pow(i) / 2u128.pow(i);
            if raw >= 1000 {
                capped = true;
                1000
            } else {
                raw as usize
            }
        };
        let take = size.min(left);
        out.push(take);
        left -= take;
        i += 1;
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct PllOptions {
    /// Run every pruned BFS in its own batch. Slower, but yields the
    /// fully sequential label set used as the inflation baseline.
    pub single_vertex_batches: bool,
}

/// A 2-hop cover: per-vertex hub lists (sorted by hub rank) plus the
/// cluster-phase landmark index. `query` is exact for every pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoHopLabels {
    n: usize,
    params: (u32, u32, u32),
    hubs: Vec<Vec<(u32, u16)>>,
    cluster_part: LandmarkIndex,
}

#[derive(Debug, Clone)]
pub struct PllBuildReport {
    /// Degree-descending vertex permutation used as hub ranks.
    pub order: Vec<VertexId>,
    pub batch_sizes: Vec<usize>,
    pub cluster_source_count: usize,
    pub total_hub_labels: usize,
}

impl TwoHopLabels {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn hubs(&self, v: VertexId) -> &[(u32, u16)] {
        &self.hubs[v as usize]
    }

    pub fn cluster_part(&self) -> &LandmarkIndex {
        &self.cluster_part
    }

    pub fn total_hub_labels(&self) -> usize {
        self.hubs.iter().map(Vec::len).sum()
    }

    pub fn avg_hub_labels(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.total_hub_labels() as f64 / self.n as f64
        }
    }

    /// Serialized size in bytes.
    pub fn index_bytes(&self) -> usize {
        let mut counter = CountingSink(0);
        self.write_to(&mut counter)
            .expect("counting sink never fails");
        counter.0
    }

    /// Exact hop distance, or None for unreachable pairs: merge-intersect
    /// the sorted hub lists and fold in the cluster part.
    pub fn query(&self, u: VertexId, v: VertexId) -> Option<u32> {
        let mut best = self.cluster_part.query(u, v).estimate;
        let a = &self.hubs[u as usize];
        let b = &self.hubs[v as usize];
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Equal => {
                    let sum = a[i].1 as u32 + b[j].1 as u32;
                    if best.is_none_or(|x| sum < x) {
                        best = Some(sum);
                    }
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
            }
        }
        best
    }

    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(PLL_MAGIC)?;
        w.write_u32::<LittleEndian>(PLL_VERSION)?;
        w.write_u64::<LittleEndian>(self.n as u64)?;
        w.write_u32::<LittleEndian>(self.params.0)?;
        w.write_u32::<LittleEndian>(self.params.1)?;
        w.write_u32::<LittleEndian>(self.params.2)?;
        self.cluster_part.write_to(w)?;
        for hubs in &self.hubs {
            w.write_u32::<LittleEndian>(hubs.len() as u32)?;
            for &(rank, dist) in hubs {
                w.write_u32::<LittleEndian>(rank)?;
                w.write_u16::<LittleEndian>(dist)?;
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<TwoHopLabels> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != PLL_MAGIC {
            return Err(Error::format("not a CBFSPLL1 index"));
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != PLL_VERSION {
            return Err(Error::format(format!("unsupported PLL version {version}")));
        }
        let n = r.read_u64::<LittleEndian>()? as usize;
        let params = (
            r.read_u32::<LittleEndian>()?,
            r.read_u32::<LittleEndian>()?,
            r.read_u32::<LittleEndian>()?,
        );
        let cluster_part = LandmarkIndex::read_from(r)?;
        let mut hubs = Vec::with_capacity(n);
        for _ in 0..n {
            let count = r.read_u32::<LittleEndian>()? as usize;
            let mut list = Vec::with_capacity(count);
            for _ in 0..count {
                let rank = r.read_u32::<LittleEndian>()?;
                let dist = r.read_u16::<LittleEndian>()?;
                list.push((rank, dist));
            }
            hubs.push(list);
        }
        Ok(TwoHopLabels {
            n,
            params,
            hubs,
            cluster_part,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TwoHopLabels> {
        let mut r = BufReader::new(File::open(path)?);
        Self::read_from(&mut r)
    }
}

struct CountingSink(usize);

impl Write for CountingSink {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0 += buf.len();
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

/// Build the exact oracle: `r` clusters of capacity `k` and diameter `d`
/// get unpruned cluster-BFS vectors stored for all vertices; the remaining
/// vertices run pruned BFS in degree order, batched per `batch_schedule`.
pub fn build_pll(g: &Graph, r: usize, k: usize, d: u32) -> Result<(TwoHopLabels, PllBuildReport)> {
    build_pll_with(g, r, k, d, &PllOptions::default())
}

pub fn build_pll_with(
    g: &Graph,
    r: usize,
    k: usize,
    d: u32,
    opts: &PllOptions,
) -> Result<(TwoHopLabels, PllBuildReport)> {
    if !g.is_symmetric() {
        return Err(Error::usage(
            "pruned landmark labeling needs a symmetric graph",
        ));
    }
    let n = g.vertex_count();
    let order = g.order_by_degree();
    let mut rank_of = vec![0u32; n];
    for (rank, &v) in order.iter().enumerate() {
        rank_of[v as usize] = rank as u32;
    }

    // Phase 1: unpruned cluster-BFS over selected clusters.
    let clusters = if r > 0 {
        select_clusters(g, &SelectionConfig::new(r, k, d))?
    } else {
        Vec::new()
    };
    let cluster_part = build_ll_index_exact(g, &clusters)?;
    let mut is_source = vec![false; n];
    let mut cluster_source_count = 0usize;
    for c in &clusters {
        for &s in c.sources() {
            is_source[s as usize] = true;
            cluster_source_count += 1;
        }
    }

    // Phase 2: pruned BFS from the rest, in degree order. Runs within a
    // batch only see labels committed by earlier batches.
    let pending: Vec<VertexId> = order
        .iter()
        .copied()
        .filter(|&v| !is_source[v as usize])
        .collect();
    let batch_sizes = if opts.single_vertex_batches {
        vec![1; pending.len()]
    } else {
        batch_schedule(pending.len())
    };

    let mut hubs: Vec<Vec<(u32, u16)>> = vec![Vec::new(); n];
    let mut off = 0usize;
    for &size in &batch_sizes {
        let batch = &pending[off..off + size];
        off += size;
        let committed = &hubs;
        let results: Vec<Vec<(u32, u32)>> = batch
            .par_iter()
            .map_init(
                || Scratch::new(n),
                |scratch, &s| pruned_bfs_impl(g, s, committed, &cluster_part, scratch),
            )
            .collect();
        for (&s, additions) in batch.iter().zip(&results) {
            let rank = rank_of[s as usize];
            for &(u, dist) in additions {
                let dist = u16::try_from(dist)
                    .map_err(|_| Error::usage("hop distance exceeds the 16-bit label format"))?;
                hubs[u as usize].push((rank, dist));
            }
        }
    }

    let labels = TwoHopLabels {
        n,
        params: (r as u32, k as u32, d),
        hubs,
        cluster_part,
    };
    let report = PllBuildReport {
        order,
        batch_sizes,
        cluster_source_count,
        total_hub_labels: labels.total_hub_labels(),
    };
    Ok((labels, report))
}

/// Reusable per-worker scratch with sentinel reset via touched lists.
struct Scratch {
    dist: Vec<u32>,
    dist_touched: Vec<VertexId>,
    hub_dist: Vec<u32>,
    hub_touched: Vec<u32>,
    queue: VecDeque<VertexId>,
}

impl Scratch {
    fn new(n: usize) -> Scratch {
        Scratch {
            dist: vec![u32::MAX; n],
            dist_touched: Vec::new(),
            hub_dist: vec![u32::MAX; n],
            hub_touched: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.dist_touched {
            self.dist[v as usize] = u32::MAX;
        }
        for &h in &self.hub_touched {
            self.hub_dist[h as usize] = u32::MAX;
        }
        self.dist_touched.clear();
        self.hub_touched.clear();
        self.queue.clear();
    }
}

/// BFS from `source` that skips (and does not expand) every vertex whose
/// distance the committed index already answers at or below the tentative
/// distance. Returns the surviving (vertex, distance) label additions;
/// the self-label (source, 0) is always present.
fn pruned_bfs_impl(
    g: &Graph,
    source: VertexId,
    committed: &[Vec<(u32, u16)>],
    cluster_part: &LandmarkIndex,
    scratch: &mut Scratch,
) -> Vec<(VertexId, u32)> {
    scratch.reset();
    // Hub distances from the source, dense over ranks.
    for &(h, dh) in &committed[source as usize] {
        scratch.hub_dist[h as usize] = dh as u32;
        scratch.hub_touched.push(h);
    }
    let use_cluster = cluster_part.cluster_count() > 0;
    let prune = |u: VertexId, tentative: u32, hub_dist: &[u32]| -> bool {
        for &(h, dh) in &committed[u as usize] {
            let th = hub_dist[h as usize];
            if th != u32::MAX && th + dh as u32 <= tentative {
                return true;
            }
        }
        if use_cluster {
            if let Some(est) = cluster_part.query_min(source, u) {
                if est <= tentative {
                    return true;
                }
            }
        }
        false
    };

    let mut additions = vec![(source, 0u32)];
    scratch.dist[source as usize] = 0;
    scratch.dist_touched.push(source);
    scratch.queue.push_back(source);
    while let Some(u) = scratch.queue.pop_front() {
        let du = scratch.dist[u as usize];
        for &v in g.out_neighbors(u) {
            if scratch.dist[v as usize] != u32::MAX {
                continue;
            }
            scratch.dist[v as usize] = du + 1;
            scratch.dist_touched.push(v);
            if !prune(v, du + 1, &scratch.hub_dist) {
                additions.push((v, du + 1));
                scratch.queue.push_back(v);
            }
        }
    }
    additions
}

/// Standalone pruned BFS against an existing label set; the batch builder
/// uses the same search internally.
pub fn pruned_bfs(g: &Graph, source: VertexId, committed: &TwoHopLabels) -> Vec<(VertexId, u32)> {
    let mut scratch = Scratch::new(g.vertex_count());
    pruned_bfs_impl(
        g,
        source,
        &committed.hubs,
        &committed.cluster_part,
        &mut scratch,
    )
}
