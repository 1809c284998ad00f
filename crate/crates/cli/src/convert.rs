use std::path::Path;

use cbfs::{Error, Graph, Result};

pub fn run(input: &Path, out: &Path, directed: bool) -> Result<()> {
    let g = Graph::load_edge_list(input, directed)?;
    if let Err(v) = g.validate() {
        return Err(Error::format(format!(
            "constructed graph failed validation: {v}"
        )));
    }
    g.save_cache(out)?;
    println!(
        "n={} m={} symmetric={}",
        g.vertex_count(),
        g.arc_count(),
        g.is_symmetric()
    );
    Ok(())
}
