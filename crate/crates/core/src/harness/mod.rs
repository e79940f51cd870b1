//! Parameter sweeps and dataset reproduction runs.

mod reproduce;

use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{medoid_shift, ShiftConfig};
use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::{Graph, GroundTruth};
use crate::metrics::{modularity_weighted, nmi};
use crate::rms::{run_rms_on, RmsConfig};
use crate::similarity::{distance_from_similarity, similarity_for, DistanceMatrix};

pub use reproduce::{
    reproduce_dataset, reproduce_tables, DatasetEntry, DatasetFormat, DatasetReport, Manifest,
    Measurement, Report, SensitivityRow, Skipped, BASELINE_STEPS,
};

pub const CSV_HEADER: &str = "param,clusters,modularity,nmi,wall_ms";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Modularity,
    Nmi,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Modularity => "modularity",
            Objective::Nmi => "nmi",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modularity" => Ok(Objective::Modularity),
            "nmi" => Ok(Objective::Nmi),
            other => Err(Error::InvalidParameter(format!(
                "unknown objective `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub clusters: usize,
    pub modularity: f64,
    pub nmi: Option<f64>,
    pub wall_ms: f64,
}

impl SweepRow {
    pub fn score(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Modularity => self.modularity,
            Objective::Nmi => self.nmi.unwrap_or(f64::NEG_INFINITY),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub objective: Objective,
    /// Ascending by parameter.
    pub rows: Vec<SweepRow>,
    /// Index of the row maximizing the objective; ties go to the smaller
    /// parameter.
    pub best: usize,
}

impl SweepResult {
    fn from_rows(objective: Objective, rows: Vec<SweepRow>) -> Self {
        let mut best = 0;
        for (i, row) in rows.iter().enumerate() {
            if row.score(objective) > rows[best].score(objective) {
                best = i;
            }
        }
        SweepResult {
            objective,
            rows,
            best,
        }
    }

    pub fn best_row(&self) -> &SweepRow {
        &self.rows[self.best]
    }

    /// CSV with one row per parameter. With `timing` off the `wall_ms`
    /// column is left empty so the output is reproducible byte for byte.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let nmi = r.nmi.map(|x| x.to_string()).unwrap_or_default();
            let wall = if timing {
                format!("{:.3}", r.wall_ms)
            } else {
                String::new()
            };
            writeln!(
                out,
                "{},{},{},{},{}",
                r.param, r.clusters, r.modularity, nmi, wall
            )
            .expect("writing to a String");
        }
        out
    }
}

fn check_objective(objective: Objective, truth: Option<&GroundTruth>, g: &Graph) -> Result<()> {
    match truth {
        None if objective == Objective::Nmi => Err(Error::InvalidParameter(
            "the nmi objective needs a ground-truth partition".into(),
        )),
        Some(t) if t.labels().len() != g.node_count() => Err(Error::LengthMismatch {
            left: t.labels().len(),
            right: g.node_count(),
        }),
        _ => Ok(()),
    }
}

fn score_row(
    g: &Graph,
    param: f64,
    c: &Clustering,
    truth: Option<&GroundTruth>,
    started: Instant,
) -> Result<SweepRow> {
    Ok(SweepRow {
        param,
        clusters: c.num_clusters(),
        modularity: modularity_weighted(g, &c.labels)?,
        nmi: truth.map(|t| nmi(t.labels(), &c.labels)).transpose()?,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs RMS for every `k` in the range. The upper end is clamped to
/// `n - 1`; all other settings come from `base`.
pub fn sweep_k(
    g: &Graph,
    k_range: RangeInclusive<usize>,
    objective: Objective,
    truth: Option<&GroundTruth>,
    base: &RmsConfig,
) -> Result<SweepResult> {
    check_objective(objective, truth, g)?;
    let (lo, hi) = (*k_range.start(), *k_range.end());
    if lo == 0 || lo > hi {
        return Err(Error::InvalidParameter(format!(
            "empty or invalid k range {lo}..={hi}"
        )));
    }
    let cap = g.node_count().saturating_sub(1).max(1);
    if hi > cap {
        warn!("k range end {hi} clamped to {cap}");
    }
    if lo > cap {
        return Err(Error::InvalidParameter(format!(
            "k range {lo}..={hi} lies above n - 1 = {cap}"
        )));
    }
    let s = similarity_for(g);
    let rows = (lo..=hi.min(cap))
        .into_par_iter()
        .map(|k| {
            let started = Instant::now();
            let c = run_rms_on(&s, &RmsConfig { k, ..*base })?;
            score_row(g, k as f64, &c, truth, started)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(objective, rows))
}

/// Runs the medoid-shift baseline for every radius. Radii are sorted; the
/// distance transform and kernel come from `base`.
pub fn sweep_radius(
    g: &Graph,
    radii: &[f64],
    base: &ShiftConfig,
    objective: Objective,
    truth: Option<&GroundTruth>,
) -> Result<SweepResult> {
    check_objective(objective, truth, g)?;
    if radii.is_empty() {
        return Err(Error::InvalidParameter("empty radius list".into()));
    }
    if let Some(r) = radii.iter().find(|r| r.is_nan() || **r < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius {r} must be non-negative"
        )));
    }
    if g.is_empty() {
        return Err(Error::Empty);
    }
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let d = distance_from_similarity(&similarity_for(g), base.transform)?;
    let rows = radii
        .par_iter()
        .map(|&radius| {
            let started = Instant::now();
            let c = medoid_shift(&d, &ShiftConfig { radius, ..*base })?;
            score_row(g, radius, &c, truth, started)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(objective, rows))
}

/// `steps` radii evenly spaced from 0 to the largest off-diagonal distance.
pub fn radius_grid(d: &DistanceMatrix, steps: usize) -> Vec<f64> {
    let max = d.max_off_diagonal();
    match steps {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..steps)
            .map(|t| max * t as f64 / (steps - 1) as f64)
            .collect(),
    }
}
