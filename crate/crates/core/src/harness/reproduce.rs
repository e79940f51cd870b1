//! Runs every dataset named in a manifest at its published `k`, around it,
//! and through the medoid-shift baseline, and lines the numbers up against
//! the published ones.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{radius_grid, sweep_k, sweep_radius, Objective, SweepResult};
use crate::baseline::ShiftConfig;
use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, parse_gml, EdgeListOptions, Graph, GroundTruth};
use crate::metrics::{modularity_weighted, nmi};
use crate::rms::{run_rms, RmsConfig, TieRule};
use crate::similarity::{distance_from_similarity, similarity_for, DistanceTransform};

/// Radii per baseline sweep, spread evenly from 0 to the largest distance.
pub const BASELINE_STEPS: usize = 31;

const NMI_TOLERANCE: f64 = 0.08;
const MODULARITY_TOLERANCE: f64 = 0.05;
const CLUSTER_TOLERANCE: usize = 2;
const DEFAULT_K_MAX: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Gml,
    Edgelist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub path: String,
    pub format: DatasetFormat,
    pub weighted: bool,
    #[serde(default)]
    pub directed: bool,
    /// `name label` text file, relative to the manifest.
    #[serde(default)]
    pub truth_path: Option<String>,
    /// GML node attribute holding the reference community.
    #[serde(default)]
    pub truth_attribute: Option<String>,
    #[serde(default)]
    pub published_k: Option<usize>,
    #[serde(default)]
    pub published_value: Option<f64>,
    #[serde(default)]
    pub published_clusters: Option<usize>,
    #[serde(default)]
    pub published_baseline_value: Option<f64>,
    #[serde(default)]
    pub published_baseline_clusters: Option<usize>,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default)]
    pub value_tolerance: Option<f64>,
    #[serde(default)]
    pub cluster_tolerance: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Manifest(pub BTreeMap<String, DatasetEntry>);

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn read_with_path(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

impl DatasetEntry {
    /// Reads the graph (with the entry's weighting) and its reference
    /// partition, resolving paths against `dir`.
    pub fn load(&self, dir: &Path) -> Result<(Graph, Option<GroundTruth>)> {
        let text = read_with_path(&dir.join(&self.path))?;
        let graph = match self.format {
            DatasetFormat::Gml => parse_gml(&text)?.graph,
            DatasetFormat::Edgelist => {
                let opts = EdgeListOptions {
                    directed: self.directed,
                    weighted: self.weighted,
                };
                parse_edge_list(&text, opts)?.graph
            }
        }
        .with_weighting(self.weighted);
        let truth = match (&self.truth_path, &self.truth_attribute) {
            (Some(p), _) => Some(GroundTruth::from_text(
                &read_with_path(&dir.join(p))?,
                &graph,
            )?),
            (None, Some(attr)) => Some(GroundTruth::from_attribute(&graph, attr)?),
            (None, None) => None,
        };
        Ok((graph, truth))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub param: f64,
    pub value: f64,
    pub clusters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub tie_rule: TieRule,
    pub shift_through_zero: bool,
    pub value: f64,
    pub clusters: usize,
    pub value_ok: Option<bool>,
    pub clusters_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub weighted: bool,
    pub objective: Objective,
    pub published_k: Option<usize>,
    pub published_value: Option<f64>,
    pub published_clusters: Option<usize>,
    pub published_baseline_value: Option<f64>,
    pub published_baseline_clusters: Option<usize>,
    pub at_published_k: Option<Measurement>,
    pub best_k: Measurement,
    pub baseline_best: Measurement,
    pub value_tolerance: f64,
    pub cluster_tolerance: usize,
    pub value_ok: Option<bool>,
    pub clusters_ok: Option<bool>,
    /// Re-runs at the published `k` under the other tie rules; filled only
    /// when a tolerance check fails.
    pub sensitivity: Vec<SensitivityRow>,
    #[serde(skip)]
    pub rms_sweep: Option<SweepResult>,
    #[serde(skip)]
    pub baseline_sweep: Option<SweepResult>,
}

impl DatasetReport {
    pub fn within_tolerance(&self) -> bool {
        self.value_ok != Some(false) && self.clusters_ok != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub datasets: Vec<DatasetReport>,
    pub skipped: Vec<Skipped>,
}

fn objective_value(
    objective: Objective,
    g: &Graph,
    truth: Option<&GroundTruth>,
    labels: &[usize],
) -> Result<f64> {
    match (objective, truth) {
        (Objective::Nmi, Some(t)) => nmi(t.labels(), labels),
        _ => modularity_weighted(g, labels),
    }
}

/// Evaluates one dataset. Public so callers can run a single entry without
/// a manifest on disk.
pub fn reproduce_dataset(
    name: &str,
    entry: &DatasetEntry,
    graph: &Graph,
    truth: Option<&GroundTruth>,
) -> Result<DatasetReport> {
    let objective = if truth.is_some() {
        Objective::Nmi
    } else {
        Objective::Modularity
    };
    let value_tolerance = entry.value_tolerance.unwrap_or(match objective {
        Objective::Nmi => NMI_TOLERANCE,
        Objective::Modularity => MODULARITY_TOLERANCE,
    });
    let cluster_tolerance = entry.cluster_tolerance.unwrap_or(CLUSTER_TOLERANCE);
    let check_value = |v: f64| {
        entry
            .published_value
            .map(|p| (v - p).abs() <= value_tolerance)
    };
    let check_clusters = |c: usize| {
        entry
            .published_clusters
            .map(|p| c.abs_diff(p) <= cluster_tolerance)
    };

    let measure = |cfg: &RmsConfig| -> Result<Measurement> {
        let c = run_rms(graph, cfg)?;
        Ok(Measurement {
            param: cfg.k as f64,
            value: objective_value(objective, graph, truth, &c.labels)?,
            clusters: c.num_clusters(),
        })
    };

    let at_published_k = entry
        .published_k
        .map(|k| measure(&RmsConfig::new(k)))
        .transpose()?;
    let value_ok = at_published_k.and_then(|m| check_value(m.value));
    let clusters_ok = at_published_k.and_then(|m| check_clusters(m.clusters));

    let k_max = entry
        .k_max
        .unwrap_or_else(|| DEFAULT_K_MAX.max(entry.published_k.unwrap_or(0) + 5));
    let rms_sweep = sweep_k(graph, 1..=k_max, objective, truth, &RmsConfig::new(1))?;
    let best = rms_sweep.best_row();
    let best_k = Measurement {
        param: best.param,
        value: best.score(objective),
        clusters: best.clusters,
    };

    let d = distance_from_similarity(&similarity_for(graph), DistanceTransform::Reciprocal)?;
    let radii = radius_grid(&d, BASELINE_STEPS);
    let baseline_sweep = sweep_radius(graph, &radii, &ShiftConfig::new(0.0), objective, truth)?;
    let bb = baseline_sweep.best_row();
    let baseline_best = Measurement {
        param: bb.param,
        value: bb.score(objective),
        clusters: bb.clusters,
    };

    let mut sensitivity = Vec::new();
    if let (Some(k), false) = (
        entry.published_k,
        value_ok != Some(false) && clusters_ok != Some(false),
    ) {
        for tie_rule in [TieRule::LowestIndex, TieRule::PreferSelf] {
            for shift_through_zero in [false, true] {
                let cfg = RmsConfig::new(k)
                    .with_tie_rule(tie_rule)
                    .with_shift_through_zero(shift_through_zero);
                let m = measure(&cfg)?;
                sensitivity.push(SensitivityRow {
                    tie_rule,
                    shift_through_zero,
                    value: m.value,
                    clusters: m.clusters,
                    value_ok: check_value(m.value),
                    clusters_ok: check_clusters(m.clusters),
                });
            }
        }
    }

    Ok(DatasetReport {
        name: name.to_owned(),
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        weighted: graph.is_weighted(),
        objective,
        published_k: entry.published_k,
        published_value: entry.published_value,
        published_clusters: entry.published_clusters,
        published_baseline_value: entry.published_baseline_value,
        published_baseline_clusters: entry.published_baseline_clusters,
        at_published_k,
        best_k,
        baseline_best,
        value_tolerance,
        cluster_tolerance,
        value_ok,
        clusters_ok,
        sensitivity,
        rms_sweep: Some(rms_sweep),
        baseline_sweep: Some(baseline_sweep),
    })
}

/// Reads `manifest.json` in `dir` and evaluates every dataset it lists.
/// Datasets whose files are missing or unreadable are reported as skipped.
pub fn reproduce_tables(dir: &Path) -> Result<Report> {
    let manifest_path = dir.join("manifest.json");
    let manifest = Manifest::load(&manifest_path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", manifest_path.display()),
        )),
        other => other,
    })?;

    let mut datasets = Vec::new();
    let mut skipped = Vec::new();
    for (name, entry) in &manifest.0 {
        match entry.load(dir) {
            Ok((graph, truth)) => {
                datasets.push(reproduce_dataset(name, entry, &graph, truth.as_ref())?)
            }
            Err(e) => skipped.push(Skipped {
                name: name.clone(),
                reason: e.to_string(),
            }),
        }
    }
    Ok(Report { datasets, skipped })
}

fn opt<T: std::fmt::Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

fn flag(x: Option<bool>) -> &'static str {
    match x {
        Some(true) => "ok",
        Some(false) => "DEVIATES",
        None => "-",
    }
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(
            w,
            "{:<12} {:<10} {:>5} {:>6} | {:>4} {:>16} | {:>16} {:>8} {:>8} | {:>4} {:>16} | {:>16} {:>16}",
            "dataset",
            "objective",
            "n",
            "m",
            "k",
            "published (c)",
            "computed (c)",
            "value",
            "clusters",
            "best",
            "best-k (c)",
            "published ms (c)",
            "ms best r (c)"
        )
        .unwrap();
        for d in &self.datasets {
            let published = match d.published_value {
                Some(v) => format!("{v:.4} ({})", opt(d.published_clusters)),
                None => "-".into(),
            };
            let computed = match d.at_published_k {
                Some(m) => format!("{:.4} ({})", m.value, m.clusters),
                None => "-".into(),
            };
            let published_ms = match d.published_baseline_value {
                Some(v) => format!("{v:.4} ({})", opt(d.published_baseline_clusters)),
                None => "-".into(),
            };
            writeln!(
                w,
                "{:<12} {:<10} {:>5} {:>6} | {:>4} {:>16} | {:>16} {:>8} {:>8} | {:>4} {:>16} | {:>16} {:>16}",
                d.name,
                d.objective.to_string(),
                d.nodes,
                d.edges,
                opt(d.published_k),
                published,
                computed,
                flag(d.value_ok),
                flag(d.clusters_ok),
                d.best_k.param,
                format!("{:.4} ({})", d.best_k.value, d.best_k.clusters),
                published_ms,
                format!("{:.4} ({}) @{:.4}", d.baseline_best.value, d.baseline_best.clusters, d.baseline_best.param),
            )
            .unwrap();
        }
        writeln!(w).unwrap();
        for d in &self.datasets {
            writeln!(
                w,
                "{}: tolerances value ±{}, clusters ±{}",
                d.name, d.value_tolerance, d.cluster_tolerance
            )
            .unwrap();
        }

        let with_appendix: Vec<&DatasetReport> = self
            .datasets
            .iter()
            .filter(|d| !d.sensitivity.is_empty())
            .collect();
        if !with_appendix.is_empty() {
            writeln!(w, "\nTie-rule sensitivity at the published k:").unwrap();
            for d in with_appendix {
                writeln!(w, "  {} (k = {})", d.name, opt(d.published_k)).unwrap();
                for s in &d.sensitivity {
                    writeln!(
                        w,
                        "    {:<13} zero-sim shifts {:<5}  {:.4} ({:>3})  value {:<8} clusters {}",
                        s.tie_rule.to_string(),
                        s.shift_through_zero,
                        s.value,
                        s.clusters,
                        flag(s.value_ok),
                        flag(s.clusters_ok)
                    )
                    .unwrap();
                }
            }
        }
        if !self.skipped.is_empty() {
            writeln!(w, "\nSkipped:").unwrap();
            for s in &self.skipped {
                writeln!(w, "  {}: {}", s.name, s.reason).unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        std::fs::write(dir.join(name), body).unwrap();
    }

    fn scratch(tag: &str) -> std::path::PathBuf {
        let dir =
            std::env::temp_dir().join(format!("rmsnet-reproduce-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn missing_files_are_skipped() {
        let dir = scratch("missing");
        write(&dir, "tri.txt", "0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n");
        write(&dir, "tri.truth", "0 a\n1 a\n2 a\n3 b\n4 b\n5 b\n");
        write(
            &dir,
            "manifest.json",
            r#"{
              "triangles": {"path": "tri.txt", "format": "edgelist", "weighted": false,
                            "truth_path": "tri.truth", "published_k": 2, "published_value": 1.0, "published_clusters": 2},
              "ghost": {"path": "nope.gml", "format": "gml", "weighted": false}
            }"#,
        );
        let report = reproduce_tables(&dir).unwrap();
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.skipped[0].name, "ghost");
        let tri = &report.datasets[0];
        assert_eq!(tri.objective, Objective::Nmi);
        let m = tri.at_published_k.unwrap();
        assert_eq!(m.clusters, 2);
        assert!((m.value - 1.0).abs() < 1e-12);
        assert!(tri.within_tolerance());
        assert!(tri.sensitivity.is_empty());
        let text = report.to_text();
        assert!(text.contains("triangles"));
        assert!(text.contains("ghost"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn deviations_trigger_sensitivity_appendix() {
        let dir = scratch("deviation");
        write(&dir, "tri.txt", "0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n");
        write(
            &dir,
            "manifest.json",
            r#"{"triangles": {"path": "tri.txt", "format": "edgelist", "weighted": false,
                              "published_k": 2, "published_value": 0.1, "published_clusters": 6}}"#,
        );
        let report = reproduce_tables(&dir).unwrap();
        let tri = &report.datasets[0];
        assert_eq!(tri.value_ok, Some(false));
        assert_eq!(tri.sensitivity.len(), 4);
        let prefer_self = tri
            .sensitivity
            .iter()
            .find(|s| s.tie_rule == TieRule::PreferSelf)
            .unwrap();
        assert_eq!(prefer_self.clusters, 6);
        assert_eq!(prefer_self.clusters_ok, Some(true));
        assert!(report.to_text().contains("sensitivity"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn missing_manifest_is_an_error() {
        let dir = scratch("nomanifest");
        assert!(matches!(reproduce_tables(&dir), Err(Error::Io(_))));
        std::fs::remove_dir_all(&dir).ok();
    }
}
