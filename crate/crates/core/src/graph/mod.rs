//! Undirected weighted graphs over dense node ids, plus the readers that
//! produce them.
//!
//! Every reader funnels through the same folding step: arcs are summed per
//! unordered pair, self-loops are dropped, and weights must be positive.
//! Unweighted graphs keep presence only, so every surviving pair gets weight 1.

mod edgelist;
mod gml;
mod truth;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub use edgelist::{parse_edge_list, EdgeListOptions};
pub use gml::parse_gml;
pub use truth::GroundTruth;

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// A graph together with diagnostics collected while reading it.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub graph: Graph,
    pub dropped_self_loops: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    weighted: bool,
    attributes: Vec<BTreeMap<String, String>>,
}

/// Folds a directed arc multiset into an undirected graph.
///
/// The weight of each unordered pair is the sum of all arcs between its
/// endpoints, in either direction. Self-loops are discarded.
pub fn fold_directed(node_names: Vec<String>, arcs: &[(usize, usize, f64)]) -> Result<Graph> {
    Graph::from_arcs(node_names, arcs.iter().copied(), true)
}

impl Graph {
    /// Builds a graph from arcs between dense ids. Parallel arcs and
    /// opposite directions are summed; self-loops are dropped. When
    /// `weighted` is false every surviving pair gets weight 1.
    pub fn from_arcs(
        node_names: Vec<String>,
        arcs: impl IntoIterator<Item = (usize, usize, f64)>,
        weighted: bool,
    ) -> Result<Graph> {
        let n = node_names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in node_names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate node name `{name}`"
                )));
            }
        }

        let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in arcs {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "arc ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "arc ({u}, {v}) has non-positive weight {w}"
                )));
            }
            if u == v {
                continue;
            }
            *pairs.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }

        let edges: Vec<Edge> = pairs
            .into_iter()
            .map(|((u, v), w)| Edge {
                u,
                v,
                weight: if weighted { w } else { 1.0 },
            })
            .collect();

        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.u].push((e.v, e.weight));
            adjacency[e.v].push((e.u, e.weight));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(j, _)| j);
        }

        Ok(Graph {
            names: node_names,
            index,
            edges,
            adjacency,
            weighted,
            attributes: vec![BTreeMap::new(); n],
        })
    }

    pub(crate) fn with_attributes(mut self, attributes: Vec<BTreeMap<String, String>>) -> Self {
        debug_assert_eq!(attributes.len(), self.names.len());
        self.attributes = attributes;
        self
    }

    /// Returns a copy with the weighting semantics forced. Dropping weights
    /// resets every edge to 1; keeping them only flips the flag.
    pub fn with_weighting(&self, weighted: bool) -> Graph {
        let mut g = self.clone();
        g.weighted = weighted;
        if !weighted {
            for e in &mut g.edges {
                e.weight = 1.0;
            }
            for list in &mut g.adjacency {
                for entry in list.iter_mut() {
                    entry.1 = 1.0;
                }
            }
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn node_names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, node: usize) -> &str {
        &self.names[node]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `node` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn weighted_degree(&self, node: usize) -> f64 {
        self.adjacency[node].iter().map(|&(_, w)| w).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn attribute(&self, node: usize, key: &str) -> Option<&str> {
        self.attributes[node].get(key).map(String::as_str)
    }

    /// Canonical edge-list text: one `u v w` line per edge with `u < v` by
    /// name, lines sorted by name. Isolated nodes are written as self-loop
    /// lines so that re-reading keeps them.
    pub fn to_edge_list(&self) -> Result<String> {
        if let Some(bad) = self.names.iter().find(|s| {
            s.is_empty() || s.contains(|c: char| c.is_whitespace() || c == ',' || c == '#')
        }) {
            return Err(Error::InvalidParameter(format!(
                "node name `{bad}` cannot be written to an edge list"
            )));
        }
        let mut lines: Vec<(&str, &str, f64)> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (self.name(e.u), self.name(e.v));
                if a <= b {
                    (a, b, e.weight)
                } else {
                    (b, a, e.weight)
                }
            })
            .collect();
        for (i, list) in self.adjacency.iter().enumerate() {
            if list.is_empty() {
                lines.push((self.name(i), self.name(i), 1.0));
            }
        }
        lines.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));

        let mut out = String::new();
        for (a, b, w) in lines {
            writeln!(out, "{a} {b} {w}").expect("writing to a String");
        }
        Ok(out)
    }
}
