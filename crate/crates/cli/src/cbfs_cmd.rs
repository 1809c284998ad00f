use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::time::Instant;

use cbfs::kernel::{cluster_bfs, Cluster};
use cbfs::select::{
    cluster_around, parse_clusters, select_clusters, validate_cluster, SelectionConfig,
};
use cbfs::{Error, Graph, Result};

use crate::common::{dist_str, load_graph, open_output};
use crate::Format;

#[allow(clippy::too_many_arguments)]
pub fn run(
    graph: &Path,
    directed: bool,
    k: usize,
    d: u32,
    center: Option<u32>,
    cluster_file: Option<&Path>,
    out: Option<&Path>,
    raw: bool,
    format: Format,
) -> Result<()> {
    let g = load_graph(graph, directed)?;
    let cluster = pick_cluster(&g, k, d, center, cluster_file)?;
    if !validate_cluster(&g, &cluster) {
        eprintln!(
            "warning: cluster diameter exceeds d={}; decoded distances are not guaranteed exact",
            cluster.d()
        );
    }

    let start = Instant::now();
    let cd = cluster_bfs(&g, &cluster);
    let elapsed = start.elapsed().as_secs_f64();
    eprintln!(
        "cluster-bfs: n={} m={} k={} d={} time_s={elapsed:.6}",
        g.vertex_count(),
        g.arc_count(),
        cluster.k(),
        cluster.d()
    );

    let mut w = open_output(out)?;
    let sep = match format {
        Format::Text => " ",
        Format::Csv => ",",
    };
    if raw {
        for v in 0..g.vertex_count() as u32 {
            let delta = cd.delta(v);
            write!(w, "{v}{sep}{}", dist_str(delta))?;
            for i in 0..=cluster.d() {
                for word in cd.subset_words(v, i) {
                    write!(w, "{sep}{word:016x}")?;
                }
            }
            writeln!(w)?;
        }
    } else {
        for v in 0..g.vertex_count() as u32 {
            write!(w, "{v}")?;
            for j in 0..cluster.k() {
                write!(w, "{sep}{}", dist_str(cd.decode_distance(v, j)))?;
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn pick_cluster(
    g: &Graph,
    k: usize,
    d: u32,
    center: Option<u32>,
    cluster_file: Option<&Path>,
) -> Result<Cluster> {
    if let Some(path) = cluster_file {
        let clusters = parse_clusters(BufReader::new(File::open(path)?))
            .map_err(|e| Error::usage(format!("invalid cluster file: {e}")))?;
        let cluster = clusters
            .into_iter()
            .next()
            .ok_or_else(|| Error::usage("cluster file holds no cluster"))?;
        for &s in cluster.sources() {
            if s as usize >= g.vertex_count() {
                return Err(Error::usage(format!("cluster source {s} out of range")));
            }
        }
        return Ok(cluster);
    }
    if let Some(c) = center {
        return cluster_around(g, c, k, d);
    }
    let selected = select_clusters(g, &SelectionConfig::new(1, k, d))?;
    selected
        .into_iter()
        .next()
        .ok_or_else(|| Error::usage("graph has no vertices to build a cluster from"))
}
