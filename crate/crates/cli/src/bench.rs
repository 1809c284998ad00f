//! Benchmark harness: per-source sequential BFS baseline vs. sequential
//! and parallel cluster-BFS over a set of selected clusters, with medians
//! and speedups across clusters and a per-round mode log.

use std::path::Path;
use std::time::Instant;

use cbfs::kernel::{cluster_bfs, cluster_bfs_instrumented, CbfsOptions, Cluster};
use cbfs::oracle;
use cbfs::select::{select_clusters, SelectionConfig};
use cbfs::{Error, Graph, Result};

use crate::common::load_graph;
use crate::Format;

struct ClusterSample {
    seq_bfs_s: f64,
    seq_cbfs_s: f64,
    par_cbfs_s: Vec<f64>,
}

pub fn run(
    graph: &Path,
    k: usize,
    d: u32,
    threads_list: &str,
    reps: usize,
    format: Format,
) -> Result<()> {
    let g = load_graph(graph, false)?;
    let threads = parse_threads(threads_list)?;
    let clusters = select_clusters(&g, &SelectionConfig::new(reps, k, d))?;
    if clusters.is_empty() {
        return Err(Error::usage("graph has no vertices to benchmark on"));
    }
    if clusters.len() < reps {
        eprintln!(
            "warning: graph supplied only {} of {reps} requested clusters",
            clusters.len()
        );
    }

    let name = graph
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".to_string());

    let samples: Vec<ClusterSample> = clusters
        .iter()
        .map(|c| measure_cluster(&g, c, &threads))
        .collect::<Result<_>>()?;

    let med = |pick: &dyn Fn(&ClusterSample) -> f64| median(samples.iter().map(pick));
    let seq_bfs = med(&|s| s.seq_bfs_s);
    let seq_cbfs = med(&|s| s.seq_cbfs_s);
    let par: Vec<f64> = (0..threads.len())
        .map(|i| median(samples.iter().map(|s| s.par_cbfs_s[i])))
        .collect();

    match format {
        Format::Csv => {
            println!("graph,n,m,k,d,cluster,threads,seq_bfs_s,seq_cbfs_s,par_cbfs_s");
            for (ci, s) in samples.iter().enumerate() {
                for (ti, &t) in threads.iter().enumerate() {
                    println!(
                        "{name},{},{},{k},{d},{ci},{t},{:.6},{:.6},{:.6}",
                        g.vertex_count(),
                        g.arc_count(),
                        s.seq_bfs_s,
                        s.seq_cbfs_s,
                        s.par_cbfs_s[ti]
                    );
                }
            }
            for (ti, &t) in threads.iter().enumerate() {
                println!(
                    "{name},{},{},{k},{d},median,{t},{seq_bfs:.6},{seq_cbfs:.6},{:.6}",
                    g.vertex_count(),
                    g.arc_count(),
                    par[ti]
                );
            }
        }
        Format::Text => {
            println!(
                "graph={name} n={} m={} k={k} d={d} clusters={}",
                g.vertex_count(),
                g.arc_count(),
                samples.len()
            );
            for (ci, s) in samples.iter().enumerate() {
                let par_cols: Vec<String> = threads
                    .iter()
                    .zip(&s.par_cbfs_s)
                    .map(|(t, sec)| format!("par[{t}]={sec:.4}s"))
                    .collect();
                println!(
                    "cluster {ci}: seq_bfs={:.4}s seq_cbfs={:.4}s {}",
                    s.seq_bfs_s,
                    s.seq_cbfs_s,
                    par_cols.join(" ")
                );
            }
            let par_cols: Vec<String> = threads
                .iter()
                .zip(&par)
                .map(|(t, sec)| format!("par[{t}]={sec:.4}s"))
                .collect();
            println!(
                "median: seq_bfs={seq_bfs:.4}s seq_cbfs={seq_cbfs:.4}s {}",
                par_cols.join(" ")
            );
            println!("speedup bit={:.2}x", seq_bfs / seq_cbfs);
            for (ti, &t) in threads.iter().enumerate() {
                println!(
                    "speedup self[{t}]={:.2}x total[{t}]={:.2}x",
                    seq_cbfs / par[ti],
                    seq_bfs / par[ti]
                );
            }
            print_mode_log(&g, &clusters[0]);
        }
    }
    Ok(())
}

fn measure_cluster(g: &Graph, c: &Cluster, threads: &[usize]) -> Result<ClusterSample> {
    // Baseline: one plain sequential BFS per source.
    let start = Instant::now();
    for &s in c.sources() {
        std::hint::black_box(oracle::bfs_distances(g, s));
    }
    let seq_bfs_s = start.elapsed().as_secs_f64();

    let timed_pool = |t: usize| -> Result<f64> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::usage(format!("thread pool: {e}")))?;
        let start = Instant::now();
        pool.install(|| std::hint::black_box(cluster_bfs(g, c)));
        Ok(start.elapsed().as_secs_f64())
    };

    let seq_cbfs_s = timed_pool(1)?;
    let par_cbfs_s = threads
        .iter()
        .map(|&t| timed_pool(t))
        .collect::<Result<_>>()?;
    Ok(ClusterSample {
        seq_bfs_s,
        seq_cbfs_s,
        par_cbfs_s,
    })
}

fn print_mode_log(g: &Graph, c: &Cluster) {
    let (_, stats) = cluster_bfs_instrumented(g, c, &CbfsOptions::default());
    println!("round log (cluster 0):");
    for r in &stats.rounds {
        println!(
            "  round={} frontier={} mode={}",
            r.round, r.frontier_size, r.mode
        );
    }
    println!("  max_frontier_appearances={}", stats.max_appearances());
}

fn parse_threads(list: &str) -> Result<Vec<usize>> {
    let default_threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let mut out = Vec::new();
    for tok in list.split(',') {
        let t: usize = tok
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("bad thread count {tok:?}")))?;
        out.push(if t == 0 { default_threads } else { t });
    }
    if out.is_empty() {
        return Err(Error::usage("empty thread list"));
    }
    Ok(out)
}

fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("times are finite"));
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}
