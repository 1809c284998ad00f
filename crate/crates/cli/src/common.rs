//! Shared plumbing: graph/index loading with magic detection, pair files,
//! output sinks.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use cbfs::{Error, Graph, Result};

/// Load a graph from either the binary cache or a text edge list,
/// detected by the file magic.
pub fn load_graph(path: &Path, directed: bool) -> Result<Graph> {
    let mut head = [0u8; 8];
    let n = File::open(path)?.read(&mut head)?;
    if n == 8 && &head == b"CBFSG001" {
        Graph::load_cache(path)
    } else {
        Graph::load_edge_list(path, directed)
    }
}

/// First 8 bytes of a file, for index-type detection.
pub fn file_magic(path: &Path) -> Result<[u8; 8]> {
    let mut head = [0u8; 8];
    let n = File::open(path)?.read(&mut head)?;
    if n < 8 {
        return Err(Error::format("file too short to carry a magic"));
    }
    Ok(head)
}

/// Parse a pair file: one "u v" per line, '#' comments.
pub fn parse_pairs(reader: impl BufRead) -> Result<Vec<(u32, u32)>> {
    let mut pairs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(Error::parse(lineno + 1, "expected two vertex ids")),
        };
        let u = a
            .parse()
            .map_err(|_| Error::parse(lineno + 1, format!("bad vertex id {a:?}")))?;
        let v = b
            .parse()
            .map_err(|_| Error::parse(lineno + 1, format!("bad vertex id {b:?}")))?;
        pairs.push((u, v));
    }
    Ok(pairs)
}

pub fn read_pairs(path: Option<&Path>) -> Result<Vec<(u32, u32)>> {
    match path {
        Some(p) => parse_pairs(BufReader::new(File::open(p)?)),
        None => parse_pairs(std::io::stdin().lock()),
    }
}

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

/// Render an optional distance; unreachable prints as -1.
pub fn dist_str(d: Option<u32>) -> String {
    match d {
        Some(x) => x.to_string(),
        None => "-1".to_string(),
    }
}
