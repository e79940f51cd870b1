use std::collections::BTreeSet;

use log::warn;

use super::{Graph, Ingested};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeListOptions {
    /// Arcs are directed and get folded into undirected pairs.
    pub directed: bool,
    /// A third column carries the edge weight and is kept.
    pub weighted: bool,
}

/// Reads `src dst [weight]` lines separated by whitespace or commas.
///
/// Node ids follow the lexicographic order of node names, so the result does
/// not depend on line order. Lines starting with `#` are comments.
pub fn parse_edge_list(text: &str, opts: EdgeListOptions) -> Result<Ingested> {
    let mut records: Vec<(&str, &str, f64)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        let expected = if opts.weighted { 3..=3 } else { 2..=3 };
        if !expected.contains(&fields.len()) {
            return Err(Error::parse(
                lineno + 1,
                format!(
                    "expected {} fields, found {}",
                    if opts.weighted { "3" } else { "2 or 3" },
                    fields.len()
                ),
            ));
        }
        let weight = match fields.get(2) {
            Some(tok) => {
                let w: f64 = tok.parse().map_err(|_| {
                    Error::parse(lineno + 1, format!("weight `{tok}` is not a number"))
                })?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::parse(
                        lineno + 1,
                        format!("weight {w} must be positive"),
                    ));
                }
                w
            }
            None => 1.0,
        };
        records.push((fields[0], fields[1], weight));
    }

    let names: BTreeSet<&str> = records.iter().flat_map(|&(a, b, _)| [a, b]).collect();
    let names: Vec<String> = names.into_iter().map(str::to_owned).collect();
    let id = |s: &str| {
        names
            .binary_search_by(|n| n.as_str().cmp(s))
            .expect("name collected above")
    };

    let dropped = records.iter().filter(|(a, b, _)| a == b).count();
    if dropped > 0 {
        warn!("dropped {dropped} self-loop line(s)");
    }
    let arcs: Vec<(usize, usize, f64)> =
        records.iter().map(|&(a, b, w)| (id(a), id(b), w)).collect();

    // Folded arcs and undirected duplicates are both summed per pair, so
    // `directed` needs no separate path.
    let graph = Graph::from_arcs(names.clone(), arcs, opts.weighted)?;
    Ok(Ingested {
        graph,
        dropped_self_loops: dropped,
    })
}
