//! Landmark-labeling approximate distance oracle: budgeted index
//! construction over selected clusters via cluster-BFS, intersection-scan
//! queries, bidirectional refinement, and distortion evaluation.

use std::collections::{HashMap, VecDeque};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bitset::BitSubset;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::kernel::{cluster_bfs, Cluster, ClusterDistanceVector, UNREACHED_DELTA};
use crate::oracle;

const LL_MAGIC: &[u8; 8] = b"CBFSLL01";
const LL_VERSION: u32 = 1;

/// Serialized distances saturate here; 255 is the unreachable sentinel.
pub const DELTA_SATURATION: u8 = 254;
pub const DELTA_SENTINEL: u8 = 255;

/// Clusters from `budget_to_cluster_count` for a per-vertex byte budget
/// `t`: each cluster costs 1 byte of distance plus d bit-subsets of
/// ceil(k/8) bytes per vertex.
pub fn budget_to_cluster_count(t: usize, k: usize, d: u32) -> Result<usize> {
    let per = per_vertex_bytes(k, d);
    if t < per {
        return Err(Error::usage(format!(
            "budget of {t} bytes/vertex is below one cluster ({per} bytes for k={k}, d={d})"
        )));
    }
    Ok(t / per)
}

/// Per-vertex byte footprint of one cluster: 1 + d * ceil(k/8).
pub fn per_vertex_bytes(k: usize, d: u32) -> usize {
    1 + d as usize * k.div_ceil(8)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMeta {
    sources: Vec<VertexId>,
    d: u32,
}

impl ClusterMeta {
    pub fn k(&self) -> usize {
        self.sources.len()
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    fn subset_bytes(&self) -> usize {
        self.k().div_ceil(8)
    }

    fn record_size(&self) -> usize {
        per_vertex_bytes(self.k(), self.d)
    }
}

/// Who produced a query estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    /// Intersection hit in `cluster` at the given source index.
    Cluster { cluster: usize, source: usize },
    /// A plain single-vertex landmark.
    Landmark { landmark: usize },
    /// The bidirectional search refinement.
    Bidirectional,
}

/// One-sided estimate: never below the true distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryResult {
    pub estimate: Option<u32>,
    pub witness: Option<Witness>,
}

impl QueryResult {
    pub const UNREACHABLE: QueryResult = QueryResult {
        estimate: None,
        witness: None,
    };
}

/// The cluster-based landmark index. Per vertex and cluster it stores one
/// saturating distance byte and the first `d` bit-subsets; the last subset
/// is reconstructed at query time as the complement of their union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandmarkIndex {
    n: usize,
    clusters: Vec<ClusterMeta>,
    /// Per cluster, `n` records of `record_size` bytes, vertex-major.
    vectors: Vec<Vec<u8>>,
}

/// Borrowed view of one serialized per-vertex record.
#[derive(Clone, Copy)]
struct Record<'a> {
    bytes: &'a [u8],
    k: usize,
    d: usize,
    sb: usize,
}

impl<'a> Record<'a> {
    fn delta(&self) -> u8 {
        self.bytes[0]
    }

    /// Byte `b` of subset `i`; the d-th subset is the complement of the
    /// stored ones (empty for unreached vertices).
    fn subset_byte(&self, i: usize, b: usize) -> u8 {
        if i < self.d {
            self.bytes[1 + i * self.sb + b]
        } else if self.delta() == DELTA_SENTINEL {
            0
        } else {
            let mut or = 0u8;
            for j in 0..self.d {
                or |= self.bytes[1 + j * self.sb + b];
            }
            mask_byte(self.k, b) & !or
        }
    }
}

/// Bits of byte `b` that index valid sources (< k).
fn mask_byte(k: usize, b: usize) -> u8 {
    let lo = b * 8;
    if k >= lo + 8 {
        0xFF
    } else if k <= lo {
        0
    } else {
        ((1u16 << (k - lo)) - 1) as u8
    }
}

impl LandmarkIndex {
    pub fn empty(n: usize) -> LandmarkIndex {
        LandmarkIndex {
            n,
            clusters: Vec::new(),
            vectors: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> &[ClusterMeta] {
        &self.clusters
    }

    /// Serialized index bytes per vertex across all clusters.
    pub fn bytes_per_vertex(&self) -> usize {
        self.clusters.iter().map(|c| c.record_size()).sum()
    }

    fn record(&self, ci: usize, v: VertexId) -> Record<'_> {
        let meta = &self.clusters[ci];
        let rs = meta.record_size();
        let base = v as usize * rs;
        Record {
            bytes: &self.vectors[ci][base..base + rs],
            k: meta.k(),
            d: meta.d as usize,
            sb: meta.subset_bytes(),
        }
    }

    /// Decode one vertex's record, reconstructing the d-th subset.
    pub fn vector(&self, ci: usize, v: VertexId) -> ClusterDistanceVector {
        let meta = &self.clusters[ci];
        let rec = self.record(ci, v);
        let delta = match rec.delta() {
            DELTA_SENTINEL => None,
            x => Some(x as u32),
        };
        let subsets = (0..=meta.d as usize)
            .map(|i| {
                let mut s = BitSubset::empty(meta.k());
                for b in 0..meta.subset_bytes() {
                    let byte = rec.subset_byte(i, b);
                    for bit in 0..8 {
                        if byte >> bit & 1 == 1 {
                            s.insert(b * 8 + bit);
                        }
                    }
                }
                s
            })
            .collect();
        ClusterDistanceVector { delta, subsets }
    }

    /// Best two-leg distance through one cluster: scan subset pairs in
    /// increasing distance sum and stop at the first nonempty
    /// intersection. Returns (estimate, source index).
    pub fn query_cluster(&self, ci: usize, u: VertexId, v: VertexId) -> Option<(u32, usize)> {
        let meta = &self.clusters[ci];
        let ru = self.record(ci, u);
        let rv = self.record(ci, v);
        if ru.delta() == DELTA_SENTINEL || rv.delta() == DELTA_SENTINEL {
            return None;
        }
        let d = meta.d as usize;
        let sb = meta.subset_bytes();
        for t in 0..=2 * d {
            let lo = t.saturating_sub(d);
            let hi = t.min(d);
            for i in lo..=hi {
                let j = t - i;
                for b in 0..sb {
                    let hit = ru.subset_byte(i, b) & rv.subset_byte(j, b);
                    if hit != 0 {
                        let source = b * 8 + hit.trailing_zeros() as usize;
                        let est = ru.delta() as u32 + rv.delta() as u32 + t as u32;
                        return Some((est, source));
                    }
                }
            }
        }
        None
    }

    /// Minimum estimate over all clusters, without witness bookkeeping.
    pub fn query_min(&self, u: VertexId, v: VertexId) -> Option<u32> {
        (0..self.clusters.len())
            .filter_map(|ci| self.query_cluster(ci, u, v).map(|(e, _)| e))
            .min()
    }

    /// Minimum two-leg distance through any cluster.
    pub fn query(&self, u: VertexId, v: VertexId) -> QueryResult {
        let mut best = QueryResult::UNREACHABLE;
        for ci in 0..self.clusters.len() {
            if let Some((est, source)) = self.query_cluster(ci, u, v) {
                if best.estimate.is_none_or(|b| est < b) {
                    best = QueryResult {
                        estimate: Some(est),
                        witness: Some(Witness::Cluster {
                            cluster: ci,
                            source,
                        }),
                    };
                }
            }
        }
        best
    }

    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(LL_MAGIC)?;
        w.write_u32::<LittleEndian>(LL_VERSION)?;
        w.write_u64::<LittleEndian>(self.n as u64)?;
        w.write_u32::<LittleEndian>(self.clusters.len() as u32)?;
        for c in &self.clusters {
            w.write_u32::<LittleEndian>(c.k() as u32)?;
            w.write_u32::<LittleEndian>(c.d)?;
        }
        for c in &self.clusters {
            for &s in &c.sources {
                w.write_u32::<LittleEndian>(s)?;
            }
        }
        for block in &self.vectors {
            w.write_all(block)?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<LandmarkIndex> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != LL_MAGIC {
            return Err(Error::format("not a CBFSLL01 index"));
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != LL_VERSION {
            return Err(Error::format(format!("unsupported LL version {version}")));
        }
        let n = r.read_u64::<LittleEndian>()? as usize;
        let rc = r.read_u32::<LittleEndian>()? as usize;
        let mut dims = Vec::with_capacity(rc);
        for _ in 0..rc {
            let k = r.read_u32::<LittleEndian>()? as usize;
            let d = r.read_u32::<LittleEndian>()?;
            dims.push((k, d));
        }
        let mut clusters = Vec::with_capacity(rc);
        for &(k, d) in &dims {
            let mut sources = vec![0u32; k];
            r.read_u32_into::<LittleEndian>(&mut sources)?;
            clusters.push(ClusterMeta { sources, d });
        }
        let mut vectors = Vec::with_capacity(rc);
        for c in &clusters {
            let mut block = vec![0u8; n * c.record_size()];
            r.read_exact(&mut block)?;
            vectors.push(block);
        }
        Ok(LandmarkIndex {
            n,
            clusters,
            vectors,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<LandmarkIndex> {
        let mut r = BufReader::new(File::open(path)?);
        Self::read_from(&mut r)
    }
}

/// Run cluster-BFS per cluster and serialize the compressed records.
/// Clusters are assumed validated (diameter at most their declared d).
/// Distances beyond 254 saturate in the byte format, which keeps the
/// oracle one-sided on any graph the format is meant for (diameter < 255).
pub fn build_ll_index(g: &Graph, clusters: &[Cluster]) -> Result<LandmarkIndex> {
    build_index_impl(g, clusters, false)
}

/// Like `build_ll_index`, but errors out instead of saturating; the exact
/// oracle embeds these records and cannot tolerate lossy distances.
pub(crate) fn build_ll_index_exact(g: &Graph, clusters: &[Cluster]) -> Result<LandmarkIndex> {
    build_index_impl(g, clusters, true)
}

fn build_index_impl(g: &Graph, clusters: &[Cluster], exact: bool) -> Result<LandmarkIndex> {
    if !g.is_symmetric() {
        return Err(Error::usage("landmark index needs a symmetric graph"));
    }
    let n = g.vertex_count();
    let mut metas = Vec::with_capacity(clusters.len());
    let mut vectors = Vec::with_capacity(clusters.len());
    for c in clusters {
        let cd = cluster_bfs(g, c);
        if exact {
            let saturated = (0..n as u32).any(|v| {
                let raw = cd.delta_raw(v);
                raw != UNREACHED_DELTA && raw > DELTA_SATURATION as u16
            });
            if saturated {
                return Err(Error::usage(
                    "cluster distance exceeds the 1-byte record format",
                ));
            }
        }
        let meta = ClusterMeta {
            sources: c.sources().to_vec(),
            d: c.d(),
        };
        let rs = meta.record_size();
        let sb = meta.subset_bytes();
        let d = c.d() as usize;
        let mut block = vec![0u8; n * rs];
        block.par_chunks_mut(rs).enumerate().for_each(|(v, rec)| {
            let raw = cd.delta_raw(v as u32);
            rec[0] = if raw == UNREACHED_DELTA {
                DELTA_SENTINEL
            } else {
                (raw.min(DELTA_SATURATION as u16)) as u8
            };
            for i in 0..d {
                let words = cd.subset_words(v as u32, i as u32);
                for b in 0..sb {
                    rec[1 + i * sb + b] = (words[b / 8] >> ((b % 8) * 8)) as u8;
                }
            }
        });
        metas.push(meta);
        vectors.push(block);
    }
    Ok(LandmarkIndex {
        n,
        clusters: metas,
        vectors,
    })
}

/// The plain landmark-labeling baseline: one saturating distance byte per
/// landmark per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainIndex {
    n: usize,
    landmarks: Vec<VertexId>,
    /// Vertex-major rows of `landmarks.len()` bytes.
    dist: Vec<u8>,
}

pub fn build_plain_ll_index(g: &Graph, landmarks: &[VertexId]) -> Result<PlainIndex> {
    if !g.is_symmetric() {
        return Err(Error::usage("landmark index needs a symmetric graph"));
    }
    let n = g.vertex_count();
    let l = landmarks.len();
    let mut dist = vec![DELTA_SENTINEL; n * l];
    for (i, &h) in landmarks.iter().enumerate() {
        let row = crate::kernel::plain_bfs(g, h);
        for v in 0..n {
            dist[v * l + i] = match row[v] {
                crate::kernel::UNREACHED => DELTA_SENTINEL,
                x => x.min(DELTA_SATURATION as u32) as u8,
            };
        }
    }
    Ok(PlainIndex {
        n,
        landmarks: landmarks.to_vec(),
        dist,
    })
}

impl PlainIndex {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn landmarks(&self) -> &[VertexId] {
        &self.landmarks
    }

    pub fn bytes_per_vertex(&self) -> usize {
        self.landmarks.len()
    }

    pub fn query(&self, u: VertexId, v: VertexId) -> QueryResult {
        let l = self.landmarks.len();
        let ru = &self.dist[u as usize * l..u as usize * l + l];
        let rv = &self.dist[v as usize * l..v as usize * l + l];
        let mut best = QueryResult::UNREACHABLE;
        for i in 0..l {
            if ru[i] == DELTA_SENTINEL || rv[i] == DELTA_SENTINEL {
                continue;
            }
            let est = ru[i] as u32 + rv[i] as u32;
            if best.estimate.is_none_or(|b| est < b) {
                best = QueryResult {
                    estimate: Some(est),
                    witness: Some(Witness::Landmark { landmark: i }),
                };
            }
        }
        best
    }
}

struct SearchSide<'a> {
    g: &'a Graph,
    backward: bool,
    dist: HashMap<VertexId, u32>,
    queue: VecDeque<VertexId>,
    expanded: usize,
}

impl<'a> SearchSide<'a> {
    fn new(g: &'a Graph, root: VertexId, backward: bool) -> SearchSide<'a> {
        let mut dist = HashMap::new();
        dist.insert(root, 0);
        SearchSide {
            g,
            backward,
            dist,
            queue: VecDeque::from([root]),
            expanded: 0,
        }
    }

    fn can_expand(&self, tau: usize) -> bool {
        self.expanded < tau && !self.queue.is_empty()
    }

    fn expand_one(&mut self) {
        let u = self.queue.pop_front().expect("caller checked can_expand");
        self.expanded += 1;
        let du = self.dist[&u];
        let nbrs = if self.backward {
            self.g.in_neighbors(u)
        } else {
            self.g.out_neighbors(u)
        };
        for &v in nbrs {
            if let std::collections::hash_map::Entry::Vacant(e) = self.dist.entry(v) {
                e.insert(du + 1);
                self.queue.push_back(v);
            }
        }
    }
}

/// Expand at most `tau` vertices in BFS order from each of `u` and `v`
/// (alternating, smaller frontier first) and return the best meeting
/// distance over all vertices discovered by both sides.
pub fn bidirectional_refine(g: &Graph, u: VertexId, v: VertexId, tau: usize) -> Option<u32> {
    if tau == 0 {
        return None;
    }
    let mut fwd = SearchSide::new(g, u, false);
    let mut bwd = SearchSide::new(g, v, true);
    loop {
        match (fwd.can_expand(tau), bwd.can_expand(tau)) {
            (false, false) => break,
            (true, false) => fwd.expand_one(),
            (false, true) => bwd.expand_one(),
            (true, true) => {
                if fwd.queue.len() <= bwd.queue.len() {
                    fwd.expand_one()
                } else {
                    bwd.expand_one()
                }
            }
        }
    }
    let (small, large) = if fwd.dist.len() <= bwd.dist.len() {
        (&fwd.dist, &bwd.dist)
    } else {
        (&bwd.dist, &fwd.dist)
    };
    small
        .iter()
        .filter_map(|(x, &dx)| large.get(x).map(|&dy| dx + dy))
        .min()
}

/// Minimum of the index estimate and the bidirectional refinement.
pub fn query_combined(
    idx: &LandmarkIndex,
    g: &Graph,
    u: VertexId,
    v: VertexId,
    tau: usize,
) -> QueryResult {
    let base = idx.query(u, v);
    match bidirectional_refine(g, u, v, tau) {
        Some(b) if base.estimate.is_none_or(|e| b < e) => QueryResult {
            estimate: Some(b),
            witness: Some(Witness::Bidirectional),
        },
        _ => base,
    }
}

/// Distortion statistics over sampled reachable vertex pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionStats {
    pub pairs_requested: usize,
    pub pairs_sampled: usize,
    /// Pairs with a finite estimate (enter the epsilon mean).
    pub evaluated: usize,
    /// Reachable pairs the oracle could not answer.
    pub coverage_failures: usize,
    /// Mean of query/distance - 1 over evaluated pairs.
    pub mean_epsilon: f64,
    /// Max of query/distance over evaluated pairs.
    pub max_distortion: f64,
    pub exact_hits: usize,
    /// Fewer distinct reachable pairs existed than requested.
    pub truncated: bool,
}

impl DistortionStats {
    pub fn epsilon_percent(&self) -> f64 {
        self.mean_epsilon * 100.0
    }

    pub fn exact_rate(&self) -> f64 {
        if self.evaluated == 0 {
            0.0
        } else {
            self.exact_hits as f64 / self.evaluated as f64
        }
    }
}

/// Evaluate an arbitrary estimator against brute-force BFS ground truth on
/// `pair_count` seed-reproducible random ordered pairs of distinct,
/// mutually reachable vertices. If fewer distinct reachable pairs exist,
/// they are enumerated exhaustively instead.
pub fn eval_distortion_with<Q>(
    g: &Graph,
    pair_count: usize,
    seed: u64,
    query: Q,
) -> Result<DistortionStats>
where
    Q: Fn(VertexId, VertexId) -> Option<u32> + Sync,
{
    if !g.is_symmetric() {
        return Err(Error::usage(
            "distortion evaluation needs a symmetric graph",
        ));
    }
    let n = g.vertex_count();
    let comp = oracle::components(g);
    let mut comp_size: HashMap<u32, u64> = HashMap::new();
    for &c in &comp {
        *comp_size.entry(c).or_insert(0) += 1;
    }
    let total_pairs: u64 = comp_size.values().map(|&c| c * (c - 1)).sum();

    let pairs: Vec<(u32, u32)> = if total_pairs <= pair_count as u64 {
        let mut all = Vec::with_capacity(total_pairs as usize);
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                if u != v && comp[u as usize] == comp[v as usize] {
                    all.push((u, v));
                }
            }
        }
        all
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sampled = Vec::with_capacity(pair_count);
        while sampled.len() < pair_count {
            let u = rng.random_range(0..n as u32);
            let v = rng.random_range(0..n as u32);
            if u != v && comp[u as usize] == comp[v as usize] {
                sampled.push((u, v));
            }
        }
        sampled
    };

    // Group by source so ground truth costs one BFS per distinct source;
    // merge group results in key order for thread-count independence.
    let mut groups: std::collections::BTreeMap<u32, Vec<u32>> = std::collections::BTreeMap::new();
    for &(u, v) in &pairs {
        groups.entry(u).or_default().push(v);
    }
    let groups: Vec<(u32, Vec<u32>)> = groups.into_iter().collect();

    struct Partial {
        sum_ratio: f64,
        max_ratio: f64,
        exact: usize,
        evaluated: usize,
        coverage: usize,
    }
    let partials: Vec<Partial> = groups
        .par_iter()
        .map(|(u, targets)| {
            let truth = oracle::bfs_distances(g, *u);
            let mut p = Partial {
                sum_ratio: 0.0,
                max_ratio: 0.0,
                exact: 0,
                evaluated: 0,
                coverage: 0,
            };
            for &v in targets {
                let dist = truth[v as usize];
                debug_assert!(dist != oracle::UNREACHED && dist > 0);
                match query(*u, v) {
                    None => p.coverage += 1,
                    Some(est) => {
                        let ratio = est as f64 / dist as f64;
                        p.sum_ratio += ratio;
                        p.max_ratio = p.max_ratio.max(ratio);
                        p.evaluated += 1;
                        if est == dist {
                            p.exact += 1;
                        }
                    }
                }
            }
            p
        })
        .collect();

    let mut stats = DistortionStats {
        pairs_requested: pair_count,
        pairs_sampled: pairs.len(),
        evaluated: 0,
        coverage_failures: 0,
        mean_epsilon: 0.0,
        max_distortion: 0.0,
        exact_hits: 0,
        truncated: (pairs.len() as u64) < pair_count as u64,
    };
    let mut sum_ratio = 0.0;
    for p in partials {
        sum_ratio += p.sum_ratio;
        stats.max_distortion = stats.max_distortion.max(p.max_ratio);
        stats.exact_hits += p.exact;
        stats.evaluated += p.evaluated;
        stats.coverage_failures += p.coverage;
    }
    if stats.evaluated > 0 {
        stats.mean_epsilon = sum_ratio / stats.evaluated as f64 - 1.0;
    }
    Ok(stats)
}

/// Distortion of the cluster index combined with a tau-bounded
/// bidirectional refinement (tau = 0 evaluates the index alone).
pub fn eval_distortion(
    idx: &LandmarkIndex,
    g: &Graph,
    pair_count: usize,
    seed: u64,
    tau: usize,
) -> Result<DistortionStats> {
    eval_distortion_with(g, pair_count, seed, |u, v| {
        query_combined(idx, g, u, v, tau).estimate
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::select::{select_clusters, SelectionConfig};
    use rand::rngs::StdRng;

    fn random_graph(seed: u64, n: u32, edges: usize) -> Graph {
        let mut rng = StdRng::seed_from_u64(seed);
        let e: Vec<(u32, u32)> = (0..edges)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
            .collect();
        Graph::from_edges(n as usize, &e, false)
    }

    fn toy() -> (Graph, Cluster) {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (1, 3), (1, 5), (3, 5), (0, 4)], false);
        let c = Cluster::new(vec![0, 1, 2, 3], 2).unwrap();
        (g, c)
    }

    #[test]
    fn budget_reproduces_reference_cluster_counts() {
        assert_eq!(budget_to_cluster_count(1024, 64, 2).unwrap(), 60);
        assert_eq!(budget_to_cluster_count(1024, 8, 2).unwrap(), 341);
        assert_eq!(budget_to_cluster_count(1024, 64, 3).unwrap(), 40);
        assert_eq!(budget_to_cluster_count(1024, 64, 4).unwrap(), 31);
        assert!(matches!(
            budget_to_cluster_count(16, 64, 2),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn empty_index_answers_unreachable() {
        let g = random_graph(1, 30, 60);
        let idx = build_ll_index(&g, &[]).unwrap();
        assert_eq!(idx.query(0, 1), QueryResult::UNREACHABLE);
        assert_eq!(idx.bytes_per_vertex(), 0);
    }

    #[test]
    fn single_source_d0_cluster_equals_plain_landmark() {
        let g = random_graph(2, 60, 150);
        let idx = build_ll_index(&g, &[Cluster::new(vec![4], 0).unwrap()]).unwrap();
        let plain = build_plain_ll_index(&g, &[4]).unwrap();
        for u in 0..60u32 {
            for v in 0..60u32 {
                assert_eq!(idx.query(u, v).estimate, plain.query(u, v).estimate);
            }
        }
    }

    #[test]
    fn serialized_vectors_decode_to_kernel_output() {
        let g = random_graph(3, 120, 400);
        let clusters = select_clusters(&g, &SelectionConfig::new(3, 10, 2)).unwrap();
        let idx = build_ll_index(&g, &clusters).unwrap();
        for (ci, c) in clusters.iter().enumerate() {
            let cd = cluster_bfs(&g, c);
            for v in 0..g.vertex_count() as u32 {
                assert_eq!(idx.vector(ci, v), cd.vector(v), "cluster {ci} vertex {v}");
            }
        }
    }

    #[test]
    fn query_of_source_with_itself_is_zero() {
        let (g, c) = toy();
        let idx = build_ll_index(&g, std::slice::from_ref(&c)).unwrap();
        for &s in c.sources() {
            assert_eq!(idx.query(s, s).estimate, Some(0));
        }
        // Non-source self-query is 2 * delta, still one-sided.
        assert_eq!(idx.query(5, 5).estimate, Some(2));
    }

    #[test]
    fn toy_cross_query_matches_brute_force_over_sources() {
        let (g, c) = toy();
        let idx = build_ll_index(&g, std::slice::from_ref(&c)).unwrap();
        let truth = oracle::all_pairs(&g);
        // Brute-force min over sources of d(u,s) + d(s,v).
        for u in 0..6u32 {
            for v in 0..6u32 {
                let want = c
                    .sources()
                    .iter()
                    .map(|&s| truth[u as usize][s as usize] + truth[s as usize][v as usize])
                    .min()
                    .unwrap();
                let (est, _) = idx.query_cluster(0, u, v).unwrap();
                assert_eq!(est, want, "pair ({u},{v})");
            }
        }
        // Hand-checked: F-E goes through B at distance 3.
        assert_eq!(idx.query(5, 4).estimate, Some(3));
    }

    #[test]
    fn one_sided_error_and_monotonicity() {
        let g = random_graph(5, 150, 450);
        let clusters = select_clusters(&g, &SelectionConfig::new(4, 8, 2)).unwrap();
        let idx_all = build_ll_index(&g, &clusters).unwrap();
        let idx_some = build_ll_index(&g, &clusters[..2]).unwrap();
        let truth = oracle::all_pairs(&g);
        for u in 0..150u32 {
            for v in 0..150u32 {
                let t = truth[u as usize][v as usize];
                for idx in [&idx_some, &idx_all] {
                    if let Some(est) = idx.query(u, v).estimate {
                        assert!(
                            t != oracle::UNREACHED && est >= t,
                            "underestimate at ({u},{v})"
                        );
                    }
                }
                // Adding clusters never increases the estimate.
                match (idx_some.query(u, v).estimate, idx_all.query(u, v).estimate) {
                    (Some(a), Some(b)) => assert!(b <= a),
                    (Some(_), None) => panic!("lost coverage when adding clusters"),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn plain_index_is_exact_from_its_own_landmark() {
        let g = random_graph(6, 80, 240);
        let plain = build_plain_ll_index(&g, &[3, 17]).unwrap();
        let truth = oracle::bfs_distances(&g, 3);
        for v in 0..80u32 {
            if truth[v as usize] != oracle::UNREACHED {
                assert_eq!(plain.query(3, v).estimate, Some(truth[v as usize]));
            }
        }
        assert_eq!(plain.bytes_per_vertex(), 2);
    }

    #[test]
    fn bidirectional_refinement_basics() {
        let g = random_graph(7, 100, 300);
        assert_eq!(bidirectional_refine(&g, 0, 1, 0), None);
        // Adjacent pair with tau >= 2 meets at distance 1.
        let (u, v) = (0u32, g.out_neighbors(0)[0]);
        assert_eq!(bidirectional_refine(&g, u, v, 2), Some(1));
        assert_eq!(bidirectional_refine(&g, u, u, 1), Some(0));
        // Full search reproduces exact distances.
        let n = g.vertex_count();
        let truth = oracle::all_pairs(&g);
        for u in (0..100u32).step_by(17) {
            for v in (0..100u32).step_by(13) {
                let want = match truth[u as usize][v as usize] {
                    oracle::UNREACHED => None,
                    x => Some(x),
                };
                assert_eq!(bidirectional_refine(&g, u, v, n), want);
            }
        }
    }

    #[test]
    fn combined_query_takes_the_min() {
        let g = random_graph(8, 120, 360);
        let clusters = select_clusters(&g, &SelectionConfig::new(2, 8, 2)).unwrap();
        let idx = build_ll_index(&g, &clusters).unwrap();
        for u in (0..120u32).step_by(7) {
            for v in (0..120u32).step_by(11) {
                let base = query_combined(&idx, &g, u, v, 0);
                assert_eq!(base.estimate, idx.query(u, v).estimate);
                let comb = query_combined(&idx, &g, u, v, 64);
                match (comb.estimate, base.estimate) {
                    (Some(c), Some(b)) => assert!(c <= b),
                    (None, Some(_)) => panic!("combined lost the index answer"),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn eval_exact_backend_has_zero_distortion() {
        let g = random_graph(9, 90, 270);
        let truth = oracle::all_pairs(&g);
        let stats = eval_distortion_with(&g, 500, 11, |u, v| match truth[u as usize][v as usize] {
            oracle::UNREACHED => None,
            x => Some(x),
        })
        .unwrap();
        assert_eq!(stats.mean_epsilon, 0.0);
        assert_eq!(stats.exact_rate(), 1.0);
        assert_eq!(stats.coverage_failures, 0);
    }

    #[test]
    fn eval_empty_index_is_coverage_failure_not_epsilon() {
        let g = random_graph(10, 40, 100);
        let idx = build_ll_index(&g, &[]).unwrap();
        let stats = eval_distortion(&idx, &g, 200, 1, 0).unwrap();
        assert_eq!(stats.evaluated, 0);
        assert!(stats.coverage_failures > 0);
        assert_eq!(stats.mean_epsilon, 0.0);
    }

    #[test]
    fn eval_enumerates_all_pairs_when_request_exceeds_supply() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)], false);
        // Component {0,1,2}: 6 ordered pairs; vertex 3 isolated.
        let idx = build_ll_index(&g, &[Cluster::new(vec![1], 0).unwrap()]).unwrap();
        let stats = eval_distortion(&idx, &g, 100, 5, 0).unwrap();
        assert_eq!(stats.pairs_sampled, 6);
        assert!(stats.truncated);
        // Landmark 1 lies on every shortest path here: exact.
        assert_eq!(stats.mean_epsilon, 0.0);
        assert_eq!(stats.exact_hits, 6);
    }

    #[test]
    fn eval_is_seed_reproducible() {
        let g = random_graph(12, 200, 600);
        let clusters = select_clusters(&g, &SelectionConfig::new(2, 8, 2)).unwrap();
        let idx = build_ll_index(&g, &clusters).unwrap();
        let a = eval_distortion(&idx, &g, 300, 77, 16).unwrap();
        let b = eval_distortion(&idx, &g, 300, 77, 16).unwrap();
        assert_eq!(a, b);
        let c = eval_distortion(&idx, &g, 300, 78, 16).unwrap();
        assert!(a.pairs_sampled == c.pairs_sampled);
    }

    #[test]
    fn index_io_round_trip_is_bit_exact() {
        let g = random_graph(13, 100, 300);
        let clusters = select_clusters(&g, &SelectionConfig::new(3, 12, 2)).unwrap();
        let idx = build_ll_index(&g, &clusters).unwrap();
        let mut bytes = Vec::new();
        idx.write_to(&mut bytes).unwrap();
        let idx2 = LandmarkIndex::read_from(&mut std::io::Cursor::new(&bytes)).unwrap();
        assert_eq!(idx, idx2);
        let mut bytes2 = Vec::new();
        idx2.write_to(&mut bytes2).unwrap();
        assert_eq!(bytes, bytes2);
        for u in (0..100u32).step_by(3) {
            for v in (0..100u32).step_by(5) {
                assert_eq!(idx.query(u, v), idx2.query(u, v));
            }
        }
    }

    #[test]
    fn directed_graph_rejected() {
        let g = Graph::from_edges(3, &[(0, 1)], true);
        assert!(build_ll_index(&g, &[]).is_err());
        assert!(build_plain_ll_index(&g, &[0]).is_err());
        assert!(eval_distortion_with(&g, 1, 0, |_, _| None).is_err());
    }

    #[test]
    fn budget_honesty() {
        let g = random_graph(14, 80, 240);
        let t = 64usize;
        let (k, d) = (8usize, 2u32);
        let r = budget_to_cluster_count(t, k, d).unwrap();
        let clusters = select_clusters(&g, &SelectionConfig::new(r, k, d)).unwrap();
        let idx = build_ll_index(&g, &clusters).unwrap();
        assert!(idx.bytes_per_vertex() <= t);
    }
}
