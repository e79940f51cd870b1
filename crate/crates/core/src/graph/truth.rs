use std::collections::HashMap;

use super::Graph;
use crate::error::{Error, Result};

/// A known community assignment: one dense label per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    labels: Vec<usize>,
    num_classes: usize,
}

impl GroundTruth {
    /// Reads `name label` lines. Every node of `graph` must be labelled and
    /// every named node must exist.
    pub fn from_text(text: &str, graph: &Graph) -> Result<GroundTruth> {
        let mut raw: Vec<Option<String>> = vec![None; graph.node_count()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::parse(
                    lineno + 1,
                    format!("expected `name label`, found {} field(s)", fields.len()),
                ));
            }
            let node = graph
                .index_of(fields[0])
                .ok_or_else(|| Error::UnknownNode(fields[0].to_owned()))?;
            raw[node] = Some(fields[1].to_owned());
        }
        Self::densify(raw, graph)
    }

    /// Takes labels from a node attribute retained by the GML reader.
    pub fn from_attribute(graph: &Graph, attribute: &str) -> Result<GroundTruth> {
        let raw = (0..graph.node_count())
            .map(|i| graph.attribute(i, attribute).map(str::to_owned))
            .collect();
        Self::densify(raw, graph)
    }

    /// Labels remapped to `0..C` by first appearance in node-id order.
    pub fn from_labels<T: Eq + std::hash::Hash>(raw: &[T]) -> GroundTruth {
        let mut seen: HashMap<&T, usize> = HashMap::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|l| {
                let next = seen.len();
                *seen.entry(l).or_insert(next)
            })
            .collect();
        GroundTruth {
            num_classes: seen.len(),
            labels,
        }
    }

    fn densify(raw: Vec<Option<String>>, graph: &Graph) -> Result<GroundTruth> {
        let missing: Vec<String> = raw
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_none())
            .map(|(i, _)| graph.name(i).to_owned())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingLabels(missing));
        }
        let raw: Vec<String> = raw.into_iter().flatten().collect();
        Ok(Self::from_labels(&raw))
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_edge_list, parse_gml, EdgeListOptions};

    fn abc() -> Graph {
        parse_edge_list("a b\nb c", EdgeListOptions::default())
            .unwrap()
            .graph
    }

    #[test]
    fn reads_text_labels() {
        let t = GroundTruth::from_text("a 0\nb 0\nc 1", &abc()).unwrap();
        assert_eq!(t.labels(), &[0, 0, 1]);
        assert_eq!(t.num_classes(), 2);
    }

    #[test]
    fn relabels_by_first_appearance() {
        let t = GroundTruth::from_text("c x\n# comment\nb y\na y\n", &abc()).unwrap();
        assert_eq!(t.labels(), &[0, 0, 1]);
    }

    #[test]
    fn unknown_and_missing_nodes() {
        assert!(matches!(
            GroundTruth::from_text("a 0\nzz 1", &abc()),
            Err(Error::UnknownNode(n)) if n == "zz"
        ));
        match GroundTruth::from_text("b 0", &abc()) {
            Err(Error::MissingLabels(m)) => assert_eq!(m, vec!["a".to_string(), "c".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reads_gml_attribute() {
        let g = parse_gml(
            r#"graph [ node [ id 0 value "n" ] node [ id 1 value "c" ] node [ id 2 value "n" ]
               edge [ source 0 target 1 ] ]"#,
        )
        .unwrap()
        .graph;
        let t = GroundTruth::from_attribute(&g, "value").unwrap();
        assert_eq!(t.labels(), &[0, 1, 0]);
        assert!(matches!(
            GroundTruth::from_attribute(&g, "gt"),
            Err(Error::MissingLabels(m)) if m.len() == 3
        ));
    }
}
