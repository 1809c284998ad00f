use std::path::Path;
use std::time::Instant;

use cbfs::pll::{build_pll, TwoHopLabels};
use cbfs::{Error, Result};

use crate::common::{dist_str, load_graph, read_pairs};
use crate::Format;

pub fn build(graph: &Path, r: usize, k: usize, d: u32, out: &Path) -> Result<()> {
    let g = load_graph(graph, false)?;
    let start = Instant::now();
    let (labels, report) = build_pll(&g, r, k, d)?;
    let elapsed = start.elapsed().as_secs_f64();
    labels.save(out)?;
    println!(
        "n={} cluster_sources={} batches={}",
        labels.vertex_count(),
        report.cluster_source_count,
        report.batch_sizes.len()
    );
    println!(
        "avg_labels={:.2} total_labels={} index_bytes={} build_s={elapsed:.3}",
        labels.avg_hub_labels(),
        labels.total_hub_labels(),
        labels.index_bytes()
    );
    Ok(())
}

pub fn query(index: &Path, pairs_file: Option<&Path>, format: Format) -> Result<()> {
    let labels = TwoHopLabels::load(index)?;
    let pairs = read_pairs(pairs_file)?;
    let sep = match format {
        Format::Text => " ",
        Format::Csv => ",",
    };
    let stdout = std::io::stdout();
    let mut w = std::io::BufWriter::new(stdout.lock());
    use std::io::Write;
    for (u, v) in pairs {
        if u as usize >= labels.vertex_count() || v as usize >= labels.vertex_count() {
            return Err(Error::usage(format!(
                "pair ({u}, {v}) out of range for n={}",
                labels.vertex_count()
            )));
        }
        writeln!(w, "{u}{sep}{v}{sep}{}", dist_str(labels.query(u, v)))?;
    }
    w.flush()?;
    Ok(())
}
