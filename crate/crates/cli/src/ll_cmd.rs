use std::path::Path;
use std::time::Instant;

use cbfs::ll::{
    budget_to_cluster_count, build_ll_index, build_plain_ll_index, eval_distortion_with,
    query_combined, DistortionStats, LandmarkIndex,
};
use cbfs::pll::TwoHopLabels;
use cbfs::select::{select_clusters, SelectionConfig};
use cbfs::{Error, Result};

use crate::common::{dist_str, file_magic, load_graph, read_pairs};
use crate::Format;

pub fn build(graph: &Path, budget: usize, k: usize, d: u32, out: &Path) -> Result<()> {
    let g = load_graph(graph, false)?;
    let r = budget_to_cluster_count(budget, k, d)?;
    println!("r={r}");
    let clusters = select_clusters(&g, &SelectionConfig::new(r, k, d))?;
    if clusters.len() < r {
        eprintln!(
            "warning: graph supplied only {} of {r} requested clusters",
            clusters.len()
        );
    }
    let start = Instant::now();
    let idx = build_ll_index(&g, &clusters)?;
    let elapsed = start.elapsed().as_secs_f64();
    idx.save(out)?;
    println!(
        "clusters={} bytes_per_vertex={} n={} build_s={elapsed:.3}",
        idx.cluster_count(),
        idx.bytes_per_vertex(),
        idx.vertex_count()
    );
    Ok(())
}

pub fn query(
    index: &Path,
    pairs_file: Option<&Path>,
    tau: usize,
    graph: Option<&Path>,
    format: Format,
) -> Result<()> {
    let idx = LandmarkIndex::load(index)?;
    let g = match (tau, graph) {
        (0, _) => None,
        (_, Some(p)) => Some(load_graph(p, false)?),
        (_, None) => {
            return Err(Error::usage(
                "--tau needs --graph for the refinement search",
            ))
        }
    };
    let pairs = read_pairs(pairs_file)?;
    let sep = sep(format);
    let stdout = std::io::stdout();
    let mut w = std::io::BufWriter::new(stdout.lock());
    use std::io::Write;
    for (u, v) in pairs {
        check_pair(idx.vertex_count(), u, v)?;
        let est = match &g {
            Some(g) => query_combined(&idx, g, u, v, tau).estimate,
            None => idx.query(u, v).estimate,
        };
        writeln!(w, "{u}{sep}{v}{sep}{}", dist_str(est))?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn eval(
    graph: &Path,
    index: Option<&Path>,
    budget: Option<usize>,
    k: usize,
    d: u32,
    plain: bool,
    pairs: usize,
    seed: u64,
    tau: usize,
    format: Format,
) -> Result<()> {
    let g = load_graph(graph, false)?;
    let stats = match (index, plain) {
        (Some(path), _) => match &file_magic(path)? {
            b"CBFSLL01" => {
                let idx = LandmarkIndex::load(path)?;
                eval_distortion_with(&g, pairs, seed, |u, v| {
                    query_combined(&idx, &g, u, v, tau).estimate
                })?
            }
            b"CBFSPLL1" => {
                let idx = TwoHopLabels::load(path)?;
                eval_distortion_with(&g, pairs, seed, |u, v| idx.query(u, v))?
            }
            _ => return Err(Error::format("unrecognized index magic")),
        },
        (None, true) => {
            let budget = budget.ok_or_else(|| Error::usage("eval needs --index or --budget"))?;
            let landmarks: Vec<u32> = g.order_by_degree().into_iter().take(budget).collect();
            let idx = build_plain_ll_index(&g, &landmarks)?;
            println!("landmarks={}", idx.landmarks().len());
            eval_distortion_with(&g, pairs, seed, |u, v| {
                let base = idx.query(u, v).estimate;
                let refined = cbfs::ll::bidirectional_refine(&g, u, v, tau);
                match (base, refined) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                }
            })?
        }
        (None, false) => {
            let budget = budget.ok_or_else(|| Error::usage("eval needs --index or --budget"))?;
            let r = budget_to_cluster_count(budget, k, d)?;
            println!("r={r}");
            let clusters = select_clusters(&g, &SelectionConfig::new(r, k, d))?;
            let idx = build_ll_index(&g, &clusters)?;
            eval_distortion_with(&g, pairs, seed, |u, v| {
                query_combined(&idx, &g, u, v, tau).estimate
            })?
        }
    };
    report(&stats, format);
    Ok(())
}

fn report(stats: &DistortionStats, format: Format) {
    match format {
        Format::Text => {
            if stats.truncated {
                eprintln!(
                    "warning: only {} reachable ordered pairs exist; evaluated all of them",
                    stats.pairs_sampled
                );
            }
            println!(
                "pairs={} evaluated={} coverage_failures={}",
                stats.pairs_sampled, stats.evaluated, stats.coverage_failures
            );
            println!(
                "epsilon={:.4}% max_distortion={:.4} exact_rate={:.4}",
                stats.epsilon_percent(),
                stats.max_distortion,
                stats.exact_rate()
            );
        }
        Format::Csv => {
            println!("pairs,evaluated,coverage_failures,epsilon_pct,max_distortion,exact_rate");
            println!(
                "{},{},{},{:.6},{:.6},{:.6}",
                stats.pairs_sampled,
                stats.evaluated,
                stats.coverage_failures,
                stats.epsilon_percent(),
                stats.max_distortion,
                stats.exact_rate()
            );
        }
    }
}

fn check_pair(n: usize, u: u32, v: u32) -> Result<()> {
    if u as usize >= n || v as usize >= n {
        return Err(Error::usage(format!(
            "pair ({u}, {v}) out of range for n={n}"
        )));
    }
    Ok(())
}

fn sep(format: Format) -> &'static str {
    match format {
        Format::Text => " ",
        Format::Csv => ",",
    }
}
