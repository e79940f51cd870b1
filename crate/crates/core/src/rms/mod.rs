//! Revised medoid shift: every node repeatedly moves to the member of
//! `{itself} ∪ kNN(itself)` with the largest similarity sum, until the set of
//! current medoids stops changing. Nodes whose chains end at the same medoid
//! form one community.

mod knn;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{assign_labels, Clustering, MedoidMap};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::similarity::{similarity_for, SimilarityMatrix};

pub use knn::{compute_knn_index, KnnIndex};

/// How to choose among candidates that share the largest similarity sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieRule {
    /// The lowest node index wins, including over the node itself.
    #[default]
    LowestIndex,
    /// The node stays put if it is among the maxima, otherwise the lowest
    /// index wins.
    PreferSelf,
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieRule::LowestIndex => "lowest-index",
            TieRule::PreferSelf => "prefer-self",
        })
    }
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest-index" => Ok(TieRule::LowestIndex),
            "prefer-self" => Ok(TieRule::PreferSelf),
            other => Err(Error::InvalidParameter(format!(
                "unknown tie rule `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RmsConfig {
    pub k: usize,
    pub tie_rule: TieRule,
    /// Allow a shift toward a neighbor-list entry whose similarity to the
    /// shifting node is zero. Such entries only fill the list when a node
    /// has fewer than `k` similar nodes.
    pub shift_through_zero: bool,
    /// Round limit; `None` means the node count.
    pub max_iterations: Option<usize>,
}

impl RmsConfig {
    pub fn new(k: usize) -> Self {
        RmsConfig {
            k,
            tie_rule: TieRule::LowestIndex,
            shift_through_zero: false,
            max_iterations: None,
        }
    }

    pub fn with_tie_rule(self, tie_rule: TieRule) -> Self {
        RmsConfig { tie_rule, ..self }
    }

    pub fn with_shift_through_zero(self, shift_through_zero: bool) -> Self {
        RmsConfig {
            shift_through_zero,
            ..self
        }
    }

    pub fn with_max_iterations(self, max_iterations: usize) -> Self {
        RmsConfig {
            max_iterations: Some(max_iterations),
            ..self
        }
    }
}

fn shift_target(i: usize, s: &SimilarityMatrix, index: &KnnIndex, cfg: &RmsConfig) -> usize {
    let dl = index.sums();
    let candidates = std::iter::once(i).chain(
        index
            .neighbors(i)
            .iter()
            .copied()
            .filter(|&p| cfg.shift_through_zero || s.get(i, p) > 0.0),
    );
    let best = candidates
        .clone()
        .map(|p| dl[p])
        .fold(f64::NEG_INFINITY, f64::max);
    if cfg.tie_rule == TieRule::PreferSelf && dl[i] == best {
        return i;
    }
    candidates
        .filter(|&p| dl[p] == best)
        .min()
        .expect("the node itself is always a candidate")
}

/// Iterates medoid shifts from the full node set until the medoid set is
/// stable. Nodes that drop out of the medoid set keep their last target.
pub fn medoid_clustering(
    s: &SimilarityMatrix,
    index: &KnnIndex,
    cfg: &RmsConfig,
) -> Result<MedoidMap> {
    let n = s.n();
    if index.len() != n {
        return Err(Error::LengthMismatch {
            left: index.len(),
            right: n,
        });
    }
    let max_iterations = cfg.max_iterations.unwrap_or(n).max(1);
    let mut next_medoid: Vec<usize> = (0..n).collect();
    let mut current: Vec<usize> = (0..n).collect();
    let mut iterations = 0;

    loop {
        iterations += 1;
        let targets: Vec<usize> = current
            .par_iter()
            .map(|&i| shift_target(i, s, index, cfg))
            .collect();
        for (&i, &t) in current.iter().zip(&targets) {
            next_medoid[i] = t;
        }
        let next: Vec<usize> = targets
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        if next == current {
            for &c in &current {
                next_medoid[c] = c;
            }
            return Ok(MedoidMap {
                next_medoid,
                centers: current,
                iterations,
            });
        }
        if iterations >= max_iterations {
            return Err(Error::NonConvergence {
                iterations,
                previous: current,
                current: next,
            });
        }
        current = next;
    }
}

/// Similarity, neighbor index, medoid shifting and labelling in one call.
pub fn run_rms(g: &Graph, cfg: &RmsConfig) -> Result<Clustering> {
    if g.is_empty() {
        return Err(Error::Empty);
    }
    let s = similarity_for(g);
    run_rms_on(&s, cfg)
}

pub fn run_rms_on(s: &SimilarityMatrix, cfg: &RmsConfig) -> Result<Clustering> {
    let index = compute_knn_index(s, cfg.k)?;
    let map = medoid_clustering(s, &index, cfg)?;
    assign_labels(&map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_edge_list, EdgeListOptions};
    use crate::similarity::similarity_unweighted;

    fn graph(text: &str) -> Graph {
        parse_edge_list(text, EdgeListOptions::default())
            .unwrap()
            .graph
    }

    fn two_triangles() -> Graph {
        graph("0 1\n1 2\n0 2\n3 4\n4 5\n3 5")
    }

    #[test]
    fn two_triangles_trace() {
        let s = similarity_unweighted(&two_triangles());
        let index = compute_knn_index(&s, 2).unwrap();
        assert!(index.sums().iter().all(|&d| d == 2.0));
        let map = medoid_clustering(&s, &index, &RmsConfig::new(2)).unwrap();
        assert_eq!(map.centers, vec![0, 3]);
        assert_eq!(map.iterations, 2);
        assert_eq!(map.next_medoid, vec![0, 0, 0, 3, 3, 3]);
        let c = assign_labels(&map).unwrap();
        assert_eq!(c.labels, vec![0, 0, 0, 3, 3, 3]);
    }

    #[test]
    fn single_node() {
        let g = parse_edge_list("a a", EdgeListOptions::default())
            .unwrap()
            .graph;
        let c = run_rms(&g, &RmsConfig::new(1)).unwrap();
        assert_eq!(c.centers, vec![0]);
        assert_eq!(c.next_medoid, vec![0]);
    }

    #[test]
    fn complete_graph_collapses_to_node_zero() {
        let mut text = String::new();
        for i in 0..7 {
            for j in (i + 1)..7 {
                text.push_str(&format!("{i} {j}\n"));
            }
        }
        let g = graph(&text);
        for k in 1..7 {
            let c = run_rms(&g, &RmsConfig::new(k)).unwrap();
            assert_eq!(c.centers, vec![0], "k = {k}");
        }
    }

    #[test]
    fn edgeless_graph_is_all_singletons() {
        let g = graph("a a\nb b\nc c\nd d");
        for k in 1..5 {
            let c = run_rms(&g, &RmsConfig::new(k)).unwrap();
            assert_eq!(c.num_clusters(), 4);
            assert_eq!(c.labels, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn prefer_self_freezes_symmetric_triangles() {
        let cfg = RmsConfig::new(2).with_tie_rule(TieRule::PreferSelf);
        let c = run_rms(&two_triangles(), &cfg).unwrap();
        assert_eq!(c.num_clusters(), 6);
    }

    #[test]
    fn zero_similarity_entries_only_move_when_allowed() {
        // Node 2 is isolated; its neighbor list is filled with zero-similarity
        // entries pointing at the triangle, whose sums are larger.
        let g = graph("0 1\n1 3\n0 3\n2 2");
        let s = similarity_unweighted(&g);
        let c = run_rms_on(&s, &RmsConfig::new(2)).unwrap();
        assert_eq!(c.labels[2], 2);
        let c = run_rms_on(&s, &RmsConfig::new(2).with_shift_through_zero(true)).unwrap();
        assert_eq!(c.labels[2], 0);
    }

    #[test]
    fn iteration_cap_reports_sets() {
        // A path needs more than one round to settle.
        let g = graph("a b\nb c\nc d\nd e\ne f");
        let s = similarity_unweighted(&g);
        let index = compute_knn_index(&s, 2).unwrap();
        let full = medoid_clustering(&s, &index, &RmsConfig::new(2)).unwrap();
        assert!(full.iterations > 1);
        let capped = medoid_clustering(&s, &index, &RmsConfig::new(2).with_max_iterations(1));
        match capped {
            Err(Error::NonConvergence {
                iterations: 1,
                previous,
                ..
            }) => assert_eq!(previous.len(), 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tie_rule_names() {
        for t in [TieRule::LowestIndex, TieRule::PreferSelf] {
            assert_eq!(t.to_string().parse::<TieRule>().unwrap(), t);
        }
    }
}
