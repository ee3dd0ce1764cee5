use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use super::AdjacencyGraph;
use crate::{Error, Result};

/// Reads a whitespace-separated edge list.
///
/// Lines starting with `#` and blank lines are skipped. Tokens after the
/// first two on a line are ignored. Node ids are compacted to `0..n` in order
/// of first appearance.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<AdjacencyGraph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut edges = Vec::new();
    let intern = |raw: u64, ids: &mut HashMap<u64, usize>| {
        let next = ids.len();
        *ids.entry(raw).or_insert(next)
    };
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut parse = |what: &str| -> Result<u64> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Parse { line: lineno + 1, message: format!("missing {what} node id") })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("`{tok}` is not a non-negative integer"),
            })
        };
        let a = parse("first")?;
        let b = parse("second")?;
        let u = intern(a, &mut ids);
        let v = intern(b, &mut ids);
        edges.push((u, v));
    }
    AdjacencyGraph::from_edges(ids.len(), edges)
}

pub fn load_edge_list_file(path: impl AsRef<Path>) -> Result<AdjacencyGraph> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Input(format!("cannot open edge list {}: {e}", path.display())))?;
    load_edge_list(std::io::BufReader::new(file))
}

impl AdjacencyGraph {
    /// Writes one `u v` line per edge, `u < v`.
    pub fn write_edge_list<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", u, v)?;
        }
        Ok(())
    }
}
