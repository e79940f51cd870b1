//! The original medoid-shift algorithm over a distance matrix, restricted to
//! a radius ball around each node.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{assign_labels, Clustering, MedoidMap};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::similarity::{
    distance_from_similarity, similarity_for, DistanceMatrix, DistanceTransform,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// `exp(-d / 2)`
    #[default]
    Gaussian,
    /// 1 everywhere inside the radius.
    Constant,
}

impl Kernel {
    fn eval(self, d: f64) -> f64 {
        match self {
            Kernel::Gaussian => (-d / 2.0).exp(),
            Kernel::Constant => 1.0,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Gaussian => "gaussian",
            Kernel::Constant => "constant",
        })
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Kernel::Gaussian),
            "constant" => Ok(Kernel::Constant),
            other => Err(Error::InvalidParameter(format!("unknown kernel `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftConfig {
    /// Closed neighborhood radius; may be infinite.
    pub radius: f64,
    pub transform: DistanceTransform,
    pub kernel: Kernel,
}

impl ShiftConfig {
    pub fn new(radius: f64) -> Self {
        ShiftConfig {
            radius,
            transform: DistanceTransform::default(),
            kernel: Kernel::default(),
        }
    }

    pub fn with_transform(self, transform: DistanceTransform) -> Self {
        ShiftConfig { transform, ..self }
    }

    pub fn with_kernel(self, kernel: Kernel) -> Self {
        ShiftConfig { kernel, ..self }
    }

    fn check(&self) -> Result<()> {
        if self.radius.is_nan() || self.radius < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "radius {} must be non-negative",
                self.radius
            )));
        }
        Ok(())
    }

    fn weight(&self, d: f64) -> f64 {
        if d <= self.radius {
            self.kernel.eval(d)
        } else {
            0.0
        }
    }
}

/// Scores `S(i, j) = Σ_k D(j, k) · φ(D(i, k))` for every candidate `j`,
/// with `φ` truncated to zero outside the radius.
pub fn shift_scores(d: &DistanceMatrix, i: usize, cfg: &ShiftConfig) -> Vec<f64> {
    let n = d.n();
    let weights: Vec<f64> = d.row(i).iter().map(|&x| cfg.weight(x)).collect();
    (0..n)
        .map(|j| {
            d.row(j)
                .iter()
                .zip(&weights)
                .map(|(&djk, &w)| djk * w)
                .sum()
        })
        .collect()
}

/// One shift step for every node: the lowest-scoring candidate inside the
/// radius ball, ties to the lowest index.
pub fn medoid_shift_step(d: &DistanceMatrix, cfg: &ShiftConfig) -> Vec<usize> {
    (0..d.n())
        .into_par_iter()
        .map(|i| {
            let scores = shift_scores(d, i, cfg);
            let row = d.row(i);
            let mut best = i;
            for j in 0..d.n() {
                if row[j] <= cfg.radius
                    && (scores[j] < scores[best] || (scores[j] == scores[best] && j < best))
                {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Shifts every node along the medoid map until all chains rest on fixed
/// points; fixed points become centers.
pub fn medoid_shift(d: &DistanceMatrix, cfg: &ShiftConfig) -> Result<Clustering> {
    cfg.check()?;
    let n = d.n();
    if n == 0 {
        return Err(Error::Empty);
    }
    let step = medoid_shift_step(d, cfg);
    let mut position: Vec<usize> = (0..n).collect();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let moved: Vec<usize> = position.iter().map(|&p| step[p]).collect();
        if moved == position {
            break;
        }
        if iterations > n {
            let mut previous = position.clone();
            previous.sort_unstable();
            previous.dedup();
            let mut current = moved;
            current.sort_unstable();
            current.dedup();
            return Err(Error::NonConvergence {
                iterations,
                previous,
                current,
            });
        }
        position = moved;
    }
    let centers = (0..n).filter(|&i| step[i] == i).collect();
    assign_labels(&MedoidMap {
        next_medoid: step,
        centers,
        iterations,
    })
}

pub fn run_medoid_shift(g: &Graph, cfg: &ShiftConfig) -> Result<Clustering> {
    if g.is_empty() {
        return Err(Error::Empty);
    }
    let d = distance_from_similarity(&similarity_for(g), cfg.transform)?;
    medoid_shift(&d, cfg)
}
