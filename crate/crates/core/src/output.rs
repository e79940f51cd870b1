//! JSON documents for clusterings, keyed by node name.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::baseline::{Kernel, ShiftConfig};
use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::MetricsReport;
use crate::rms::{RmsConfig, TieRule};
use crate::similarity::DistanceTransform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Rms,
    MedoidShift,
}

/// JSON has no infinity; an unbounded radius is written as the string `"inf"`.
mod radius_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(x) if x.is_infinite() => s.serialize_str("inf"),
            Some(x) => s.serialize_f64(*x),
            None => s.serialize_none(),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Raw>::deserialize(d)? {
            None => Ok(None),
            Some(Raw::Num(x)) => Ok(Some(x)),
            Some(Raw::Text(t)) if t == "inf" => Ok(Some(f64::INFINITY)),
            Some(Raw::Text(t)) => Err(serde::de::Error::custom(format!("bad radius `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringDocument {
    pub algorithm: Algorithm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_rule: Option<TieRule>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "radius_serde"
    )]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<DistanceTransform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Kernel>,
    pub num_clusters: usize,
    pub centers: Vec<String>,
    pub labels: BTreeMap<String, String>,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
    /// Free-form echo of the settings that produced this document.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl ClusteringDocument {
    fn from_clustering(g: &Graph, c: &Clustering, algorithm: Algorithm) -> Self {
        ClusteringDocument {
            algorithm,
            k: None,
            tie_rule: None,
            radius: None,
            transform: None,
            kernel: None,
            num_clusters: c.num_clusters(),
            centers: c.centers.iter().map(|&i| g.name(i).to_owned()).collect(),
            labels: c
                .labels
                .iter()
                .enumerate()
                .map(|(i, &l)| (g.name(i).to_owned(), g.name(l).to_owned()))
                .collect(),
            iterations: c.iterations,
            metrics: None,
            config: None,
        }
    }

    pub fn for_rms(g: &Graph, c: &Clustering, cfg: &RmsConfig) -> Self {
        ClusteringDocument {
            k: Some(cfg.k),
            tie_rule: Some(cfg.tie_rule),
            ..Self::from_clustering(g, c, Algorithm::Rms)
        }
    }

    pub fn for_medoid_shift(g: &Graph, c: &Clustering, cfg: &ShiftConfig) -> Self {
        ClusteringDocument {
            radius: Some(cfg.radius),
            transform: Some(cfg.transform),
            kernel: Some(cfg.kernel),
            ..Self::from_clustering(g, c, Algorithm::MedoidShift)
        }
    }

    pub fn with_metrics(self, metrics: MetricsReport) -> Self {
        ClusteringDocument {
            metrics: Some(metrics),
            ..self
        }
    }

    pub fn with_config(self, config: serde_json::Value) -> Self {
        ClusteringDocument {
            config: Some(config),
            ..self
        }
    }

    /// Per-node cluster ids in `g`'s node order. Fails on names `g` does
    /// not know and on nodes without a label.
    pub fn labels_for(&self, g: &Graph) -> Result<Vec<usize>> {
        let mut out: Vec<Option<usize>> = vec![None; g.node_count()];
        let mut ids: HashMap<&str, usize> = HashMap::new();
        for (node, center) in &self.labels {
            let i = g
                .index_of(node)
                .ok_or_else(|| Error::UnknownNode(node.clone()))?;
            let next = ids.len();
            out[i] = Some(*ids.entry(center.as_str()).or_insert(next));
        }
        let missing: Vec<String> = out
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_none())
            .map(|(i, _)| g.name(i).to_owned())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingLabels(missing));
        }
        Ok(out.into_iter().flatten().collect())
    }
}
