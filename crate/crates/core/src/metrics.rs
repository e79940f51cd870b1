//! Partition quality: normalized mutual information against a reference
//! partition, and Newman modularity.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GroundTruth};

fn class_counts(labels: &[usize]) -> HashMap<usize, usize> {
    let mut counts = HashMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    counts
}

fn entropy_of_counts<I: IntoIterator<Item = usize>>(counts: I, total: usize) -> f64 {
    let total = total as f64;
    let mut h = 0.0;
    for c in counts {
        if c > 0 {
            let p = c as f64 / total;
            h -= p * p.log2();
        }
    }
    h
}

/// Shannon entropy of a labelling, in bits.
pub fn entropy(labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let mut counts: Vec<usize> = class_counts(labels).into_values().collect();
    counts.sort_unstable();
    entropy_of_counts(counts, labels.len())
}

fn check_pair(y: &[usize], c: &[usize]) -> Result<()> {
    if y.len() != c.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: c.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::Empty);
    }
    Ok(())
}

/// `I(Y; C) = H(Y) - H(Y | C)`, with the conditional entropy taken over the
/// clusters of `c`.
pub fn mutual_information(y: &[usize], c: &[usize]) -> Result<f64> {
    check_pair(y, c)?;
    let n = y.len();
    let mut by_cluster: HashMap<usize, HashMap<usize, usize>> = HashMap::new();
    for (&yi, &ci) in y.iter().zip(c) {
        *by_cluster.entry(ci).or_default().entry(yi).or_insert(0) += 1;
    }
    let mut clusters: Vec<usize> = by_cluster.keys().copied().collect();
    clusters.sort_unstable();
    let mut conditional = 0.0;
    for cl in clusters {
        let inner = &by_cluster[&cl];
        let size: usize = inner.values().sum();
        let mut counts: Vec<usize> = inner.values().copied().collect();
        counts.sort_unstable();
        conditional += (size as f64 / n as f64) * entropy_of_counts(counts, size);
    }
    Ok((entropy(y) - conditional).max(0.0))
}

/// `2 I(Y; C) / (H(Y) + H(C))`. Two single-class labellings score 1.
pub fn nmi(y: &[usize], c: &[usize]) -> Result<f64> {
    check_pair(y, c)?;
    let denom = entropy(y) + entropy(c);
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((2.0 * mutual_information(y, c)? / denom).clamp(0.0, 1.0))
}

fn check_cover(g: &Graph, labels: &[usize]) -> Result<()> {
    if labels.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: g.node_count(),
        });
    }
    Ok(())
}

/// Modularity as a double sum over ordered node pairs of an unweighted
/// graph. Quadratic in the node count. A graph without edges scores 0.
pub fn modularity_adjacency(g: &Graph, labels: &[usize]) -> Result<f64> {
    if g.is_weighted() {
        return Err(Error::WeightedGraph);
    }
    check_cover(g, labels)?;
    let n = g.node_count();
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return Ok(0.0);
    }
    let two_m = 2.0 * m;
    let degree: Vec<f64> = (0..n).map(|i| g.degree(i) as f64).collect();
    let mut q = 0.0;
    for i in 0..n {
        let adjacent = g.neighbors(i);
        for j in 0..n {
            if labels[i] != labels[j] {
                continue;
            }
            let a = if adjacent.binary_search_by_key(&j, |&(v, _)| v).is_ok() {
                1.0
            } else {
                0.0
            };
            q += a - degree[i] * degree[j] / two_m;
        }
    }
    Ok(q / two_m)
}

/// Modularity as `Σ_c (e_c / m - (d_c / 2m)^2)` with `e_c` the internal
/// edge weight and `d_c` the summed weighted degree of community `c`.
/// Works on weighted and unweighted graphs alike.
pub fn modularity_weighted(g: &Graph, labels: &[usize]) -> Result<f64> {
    check_cover(g, labels)?;
    let m = g.total_weight();
    if m == 0.0 {
        return Ok(0.0);
    }
    let mut internal: HashMap<usize, f64> = HashMap::new();
    let mut degree: HashMap<usize, f64> = HashMap::new();
    for e in g.edges() {
        if labels[e.u] == labels[e.v] {
            *internal.entry(labels[e.u]).or_insert(0.0) += e.weight;
        }
    }
    for (i, &l) in labels.iter().enumerate() {
        *degree.entry(l).or_insert(0.0) += g.weighted_degree(i);
    }
    let mut communities: Vec<usize> = degree.keys().copied().collect();
    communities.sort_unstable();
    let q = communities
        .iter()
        .map(|c| {
            let e = internal.get(c).copied().unwrap_or(0.0);
            let d = degree[c];
            e / m - (d / (2.0 * m)).powi(2)
        })
        .sum();
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modularity: Option<f64>,
    pub num_clusters: usize,
}

/// Modularity always; NMI when a reference partition is supplied.
pub fn evaluate(g: &Graph, labels: &[usize], truth: Option<&GroundTruth>) -> Result<MetricsReport> {
    let modularity = modularity_weighted(g, labels)?;
    let nmi = truth.map(|t| nmi(t.labels(), labels)).transpose()?;
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(MetricsReport {
        nmi,
        modularity: Some(modularity),
        num_clusters: distinct.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_edge_list, EdgeListOptions};

    const EPS: f64 = 1e-4;

    fn two_triangles(weighted: bool, scale: f64) -> Graph {
        let text: String = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
            .iter()
            .map(|(a, b)| format!("{a} {b} {scale}\n"))
            .collect();
        let opts = EdgeListOptions {
            directed: false,
            weighted,
        };
        parse_edge_list(&text, opts).unwrap().graph
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[0, 0, 0, 0]), 0.0);
        assert_eq!(entropy(&[0, 0, 1, 1]), 1.0);
        assert!((entropy(&[0, 0, 0, 1]) - 0.8113).abs() < EPS);
    }

    #[test]
    fn mutual_information_examples() {
        assert!((mutual_information(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            mutual_information(&[0, 0, 1, 1], &[0, 0, 0, 0]).unwrap(),
            0.0
        );
        assert!((mutual_information(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap() - 0.3113).abs() < EPS);
        assert!(matches!(
            mutual_information(&[0, 1], &[0]),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn nmi_examples() {
        assert!((nmi(&[0, 1, 1, 2], &[5, 7, 7, 9]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(nmi(&[0, 0, 1, 1], &[0, 0, 0, 0]).unwrap(), 0.0);
        assert!((nmi(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap() - 0.3437).abs() < EPS);
        assert_eq!(nmi(&[3, 3, 3], &[1, 1, 1]).unwrap(), 1.0);
        assert!(matches!(nmi(&[], &[]), Err(Error::Empty)));
        assert!(matches!(nmi(&[1], &[]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn modularity_examples() {
        let g = two_triangles(false, 1.0);
        assert!(modularity_adjacency(&g, &[0; 6]).unwrap().abs() < 1e-12);
        assert!((modularity_adjacency(&g, &[0, 0, 0, 1, 1, 1]).unwrap() - 0.5).abs() < 1e-12);
        assert!(modularity_weighted(&g, &[0; 6]).unwrap().abs() < 1e-12);
        assert!((modularity_weighted(&g, &[0, 0, 0, 1, 1, 1]).unwrap() - 0.5).abs() < 1e-12);

        let doubled = two_triangles(true, 2.0);
        assert!((modularity_weighted(&doubled, &[0, 0, 0, 1, 1, 1]).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(
            modularity_adjacency(&doubled, &[0; 6]),
            Err(Error::WeightedGraph)
        ));
        assert!(matches!(
            modularity_weighted(&g, &[0; 5]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn all_singletons_modularity() {
        let g = two_triangles(false, 1.0);
        let q = modularity_weighted(&g, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert!((q + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn evaluate_reports_both() {
        let g = two_triangles(false, 1.0);
        let truth = GroundTruth::from_labels(&[0, 0, 0, 1, 1, 1]);
        let r = evaluate(&g, &[3, 3, 3, 0, 0, 0], Some(&truth)).unwrap();
        assert_eq!(r.num_clusters, 2);
        assert!((r.nmi.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.modularity.unwrap() - 0.5).abs() < 1e-12);
        let r = evaluate(&g, &[0; 6], None).unwrap();
        assert_eq!(r.nmi, None);
    }
}
