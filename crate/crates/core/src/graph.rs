//! Graph ingestion, normalization, and the immutable CSR adjacency
//! representation every other module reads.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

/// Dense 0-based vertex id.
pub type VertexId = u32;

const CACHE_MAGIC: &[u8; 8] = b"CBFSG001";

/// Immutable compressed-sparse-row graph with out- and in-neighbor access.
///
/// Arcs are directed; an undirected graph is stored symmetrized, in which
/// case the in-adjacency is shared with the out-adjacency. Within each
/// vertex's neighbor range targets are strictly increasing: sorted,
/// deduplicated, and free of self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    out_offsets: Vec<u64>,
    out_targets: Vec<u32>,
    // None when symmetric (shared with out_*).
    in_offsets: Option<Vec<u64>>,
    in_targets: Option<Vec<u32>>,
    symmetric: bool,
}

/// First violated invariant found by [`Graph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    OffsetArcMismatch,
    NonMonotonicOffsets { vertex: VertexId },
    TargetOutOfRange { vertex: VertexId, target: u32 },
    SelfLoop { vertex: VertexId },
    UnsortedOrDuplicateTargets { vertex: VertexId },
    AsymmetricArc { from: VertexId, to: VertexId },
    InconsistentInAdjacency,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::OffsetArcMismatch => write!(f, "offset/arc mismatch"),
            Violation::NonMonotonicOffsets { vertex } => {
                write!(f, "non-monotonic offsets at vertex {vertex}")
            }
            Violation::TargetOutOfRange { vertex, target } => {
                write!(f, "target {target} of vertex {vertex} out of range")
            }
            Violation::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            Violation::UnsortedOrDuplicateTargets { vertex } => {
                write!(f, "unsorted or duplicate targets at vertex {vertex}")
            }
            Violation::AsymmetricArc { from, to } => {
                write!(f, "asymmetric arc {from} -> {to}")
            }
            Violation::InconsistentInAdjacency => write!(f, "in-adjacency is not the transpose"),
        }
    }
}

impl Graph {
    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of directed arcs (an undirected edge counts twice).
    pub fn arc_count(&self) -> usize {
        self.m
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        (self.out_offsets[v + 1] - self.out_offsets[v]) as usize
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[u32] {
        let v = v as usize;
        &self.out_targets[self.out_offsets[v] as usize..self.out_offsets[v + 1] as usize]
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[u32] {
        match (&self.in_offsets, &self.in_targets) {
            (Some(off), Some(tgt)) => {
                let v = v as usize;
                &tgt[off[v] as usize..off[v + 1] as usize]
            }
            _ => self.out_neighbors(v),
        }
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_neighbors(v).len()
    }

    /// Build a graph from raw arcs over an explicit vertex universe `n`,
    /// applying the same normalization as the edge-list loader: self-loops
    /// dropped, parallel arcs deduplicated, neighbor lists sorted, and the
    /// arc set symmetrized when `directed` is false.
    pub fn from_edges(n: usize, edges: &[(u32, u32)], directed: bool) -> Graph {
        for &(u, v) in edges {
            assert!(
                (u as usize) < n && (v as usize) < n,
                "edge endpoint out of range"
            );
        }
        let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(if directed {
            edges.len()
        } else {
            edges.len() * 2
        });
        for &(u, v) in edges {
            if u == v {
                continue;
            }
            arcs.push((u, v));
            if !directed {
                arcs.push((v, u));
            }
        }
        Self::from_arcs(n, arcs, !directed)
    }

    /// Assemble a normalized arc list (already symmetrized if `symmetric`)
    /// into CSR form. Sorts, deduplicates, and builds the in-adjacency
    /// transpose for directed graphs.
    fn from_arcs(n: usize, mut arcs: Vec<(u32, u32)>, symmetric: bool) -> Graph {
        arcs.sort_unstable();
        arcs.dedup();
        let m = arcs.len();

        let mut out_offsets = vec![0u64; n + 1];
        for &(u, _) in &arcs {
            out_offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let out_targets: Vec<u32> = arcs.iter().map(|&(_, v)| v).collect();

        let (in_offsets, in_targets) = if symmetric {
            (None, None)
        } else {
            let mut off = vec![0u64; n + 1];
            for &(_, v) in &arcs {
                off[v as usize + 1] += 1;
            }
            for i in 0..n {
                off[i + 1] += off[i];
            }
            let mut cursor: Vec<u64> = off[..n].to_vec();
            let mut tgt = vec![0u32; m];
            // arcs are sorted by (u, v), so each in-list fills in ascending
            // source order and stays sorted.
            for &(u, v) in &arcs {
                let c = &mut cursor[v as usize];
                tgt[*c as usize] = u;
                *c += 1;
            }
            (Some(off), Some(tgt))
        };

        Graph {
            n,
            m,
            out_offsets,
            out_targets,
            in_offsets,
            in_targets,
            symmetric,
        }
    }

    /// Assemble a graph from prebuilt CSR parts without validation.
    /// Intended for cache loading and for tests that need to construct
    /// deliberately broken structures; run [`Graph::validate`] if in doubt.
    pub fn from_raw_parts(
        n: usize,
        m: usize,
        out_offsets: Vec<u64>,
        out_targets: Vec<u32>,
        in_offsets: Option<Vec<u64>>,
        in_targets: Option<Vec<u32>>,
        symmetric: bool,
    ) -> Graph {
        Graph {
            n,
            m,
            out_offsets,
            out_targets,
            in_offsets,
            in_targets,
            symmetric,
        }
    }

    /// Load a whitespace-separated edge list. Lines starting with `#` are
    /// comments. Vertex ids are remapped to a dense 0-based range in order
    /// of first appearance; self-loops are dropped, parallel edges
    /// deduplicated, and the arc set symmetrized when `directed` is false.
    pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph> {
        let file = File::open(path)?;
        Self::parse_edge_list(BufReader::new(file), directed)
    }

    pub fn parse_edge_list(reader: impl BufRead, directed: bool) -> Result<Graph> {
        let mut remap: std::collections::HashMap<u64, u32> = std::collections::HashMap::new();
        let mut next_id: u32 = 0;
        let mut arcs: Vec<(u32, u32)> = Vec::new();

        let mut intern = |raw: u64| -> u32 {
            *remap.entry(raw).or_insert_with(|| {
                let id = next_id;
                next_id += 1;
                id
            })
        };

        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (a, b) = match (it.next(), it.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::parse(lineno + 1, "expected two vertex ids")),
            };
            if it.next().is_some() {
                return Err(Error::parse(lineno + 1, "trailing tokens after edge"));
            }
            let a: u64 = a
                .parse()
                .map_err(|_| Error::parse(lineno + 1, format!("bad vertex id {a:?}")))?;
            let b: u64 = b
                .parse()
                .map_err(|_| Error::parse(lineno + 1, format!("bad vertex id {b:?}")))?;
            let u = intern(a);
            let v = intern(b);
            if u == v {
                continue;
            }
            arcs.push((u, v));
            if !directed {
                arcs.push((v, u));
            }
        }

        Ok(Self::from_arcs(next_id as usize, arcs, !directed))
    }

    /// Write the graph back as a text edge list that reloads to an
    /// identical graph. Every vertex is declared first by a self-loop line
    /// (the loader drops the loop but keeps the id), so the dense id space
    /// and isolated vertices survive the round trip.
    pub fn write_edge_list(&self, w: &mut impl Write) -> std::io::Result<()> {
        for v in 0..self.n as u32 {
            writeln!(w, "{v} {v}")?;
        }
        for u in 0..self.n as u32 {
            for &v in self.out_neighbors(u) {
                if !self.symmetric || u < v {
                    writeln!(w, "{u} {v}")?;
                }
            }
        }
        Ok(())
    }

    /// Check every structural invariant; returns the first violation found.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        if self.out_offsets.len() != self.n + 1
            || self.out_offsets[0] != 0
            || self.out_offsets[self.n] != self.m as u64
            || self.out_targets.len() != self.m
        {
            return Err(Violation::OffsetArcMismatch);
        }
        for v in 0..self.n {
            if self.out_offsets[v + 1] < self.out_offsets[v] {
                return Err(Violation::NonMonotonicOffsets { vertex: v as u32 });
            }
        }
        for v in 0..self.n as u32 {
            let nbrs = self.out_neighbors(v);
            for (i, &t) in nbrs.iter().enumerate() {
                if t as usize >= self.n {
                    return Err(Violation::TargetOutOfRange {
                        vertex: v,
                        target: t,
                    });
                }
                if t == v {
                    return Err(Violation::SelfLoop { vertex: v });
                }
                if i > 0 && nbrs[i - 1] >= t {
                    return Err(Violation::UnsortedOrDuplicateTargets { vertex: v });
                }
            }
        }
        if self.symmetric {
            for u in 0..self.n as u32 {
                for &v in self.out_neighbors(u) {
                    if self.out_neighbors(v).binary_search(&u).is_err() {
                        return Err(Violation::AsymmetricArc { from: u, to: v });
                    }
                }
            }
        }
        if let (Some(in_off), Some(in_tgt)) = (&self.in_offsets, &self.in_targets) {
            if in_off.len() != self.n + 1 || in_tgt.len() != self.m {
                return Err(Violation::InconsistentInAdjacency);
            }
            // The in-adjacency must be the exact transpose.
            let mut arc_count = 0usize;
            for v in 0..self.n as u32 {
                for &u in self.in_neighbors(v) {
                    if u as usize >= self.n || self.out_neighbors(u).binary_search(&v).is_err() {
                        return Err(Violation::InconsistentInAdjacency);
                    }
                    arc_count += 1;
                }
            }
            if arc_count != self.m {
                return Err(Violation::InconsistentInAdjacency);
            }
        }
        Ok(())
    }

    /// All vertices sorted by out-degree descending, ties broken by
    /// ascending vertex id.
    pub fn order_by_degree(&self) -> Vec<VertexId> {
        let mut order: Vec<u32> = (0..self.n as u32).collect();
        order.sort_unstable_by_key(|&v| (std::cmp::Reverse(self.out_degree(v)), v));
        order
    }

    /// Write the binary graph cache. Little-endian, bit-exact reproducible.
    pub fn write_cache(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_u64::<LittleEndian>(self.n as u64)?;
        w.write_u64::<LittleEndian>(self.m as u64)?;
        w.write_u64::<LittleEndian>(self.symmetric as u64)?;
        for &o in &self.out_offsets {
            w.write_u64::<LittleEndian>(o)?;
        }
        for &t in &self.out_targets {
            w.write_u32::<LittleEndian>(t)?;
        }
        if !self.symmetric {
            let in_off = self
                .in_offsets
                .as_ref()
                .expect("directed graph has in-offsets");
            let in_tgt = self
                .in_targets
                .as_ref()
                .expect("directed graph has in-targets");
            for &o in in_off {
                w.write_u64::<LittleEndian>(o)?;
            }
            for &t in in_tgt {
                w.write_u32::<LittleEndian>(t)?;
            }
        }
        Ok(())
    }

    pub fn save_cache(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_cache(&mut w)?;
        Ok(())
    }

    pub fn read_cache(r: &mut impl Read) -> Result<Graph> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::format("not a CBFSG001 graph cache"));
        }
        let n = r.read_u64::<LittleEndian>()? as usize;
        let m = r.read_u64::<LittleEndian>()? as usize;
        let symmetric = match r.read_u64::<LittleEndian>()? {
            0 => false,
            1 => true,
            x => return Err(Error::format(format!("bad symmetric flag {x}"))),
        };
        let read_offsets = |r: &mut dyn Read| -> Result<Vec<u64>> {
            let mut v = vec![0u64; n + 1];
            r.read_u64_into::<LittleEndian>(&mut v)?;
            Ok(v)
        };
        let read_targets = |r: &mut dyn Read| -> Result<Vec<u32>> {
            let mut v = vec![0u32; m];
            r.read_u32_into::<LittleEndian>(&mut v)?;
            Ok(v)
        };
        let out_offsets = read_offsets(r)?;
        let out_targets = read_targets(r)?;
        let (in_offsets, in_targets) = if symmetric {
            (None, None)
        } else {
            (Some(read_offsets(r)?), Some(read_targets(r)?))
        };
        Ok(Graph {
            n,
            m,
            out_offsets,
            out_targets,
            in_offsets,
            in_targets,
            symmetric,
        })
    }

    pub fn load_cache(path: impl AsRef<Path>) -> Result<Graph> {
        let mut r = BufReader::new(File::open(path)?);
        Self::read_cache(&mut r)
    }
}
