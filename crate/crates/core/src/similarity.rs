//! Dense node-similarity and node-distance matrices.
//!
//! Unweighted graphs use the common-neighbor count; weighted graphs pass the
//! edge weight through. Storage is a dense row-major `n * n` buffer, which is
//! fine for the few-thousand-node graphs this crate targets.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

macro_rules! square_matrix {
    ($name:ident) => {
        impl $name {
            pub fn n(&self) -> usize {
                self.n
            }

            #[inline]
            pub fn get(&self, i: usize, j: usize) -> f64 {
                self.values[i * self.n + j]
            }

            pub fn row(&self, i: usize) -> &[f64] {
                &self.values[i * self.n..(i + 1) * self.n]
            }

            /// Wraps a row-major buffer after checking symmetry, the zero
            /// diagonal and non-negativity.
            pub fn from_row_major(n: usize, values: Vec<f64>) -> Result<Self> {
                if values.len() != n * n {
                    return Err(Error::LengthMismatch {
                        left: values.len(),
                        right: n * n,
                    });
                }
                for i in 0..n {
                    if values[i * n + i] != 0.0 {
                        return Err(Error::Invariant(format!("diagonal entry {i} is non-zero")));
                    }
                    for j in 0..n {
                        let x = values[i * n + j];
                        if x.is_nan() || x < 0.0 || x != values[j * n + i] {
                            return Err(Error::Invariant(format!(
                                "entry ({i}, {j}) is negative or asymmetric"
                            )));
                        }
                    }
                }
                Ok(Self { n, values })
            }

            /// Full matrix as CSV, one row per line.
            pub fn to_csv(&self) -> String {
                let mut out = String::new();
                for i in 0..self.n {
                    for (j, x) in self.row(i).iter().enumerate() {
                        if j > 0 {
                            out.push(',');
                        }
                        write!(out, "{x}").expect("writing to a String");
                    }
                    out.push('\n');
                }
                out
            }
        }
    };
}

/// Symmetric, non-negative node similarities with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

/// Symmetric, non-negative node distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

square_matrix!(SimilarityMatrix);
square_matrix!(DistanceMatrix);

impl SimilarityMatrix {
    /// Largest off-diagonal entry, or 0 when there is none.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.n;
        self.values
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx / n != idx % n)
            .map(|(_, &x)| x)
            .fold(0.0, f64::max)
    }
}

impl DistanceMatrix {
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.n;
        self.values
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx / n != idx % n)
            .map(|(_, &x)| x)
            .fold(0.0, f64::max)
    }
}

/// Number of common neighbors for every pair of distinct nodes.
pub fn similarity_unweighted(g: &Graph) -> SimilarityMatrix {
    let n = g.node_count();
    let mut values = vec![0.0; n * n];
    values
        .par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, row)| {
            if i >= n {
                return;
            }
            let mut counts = vec![0u32; n];
            for &(u, _) in g.neighbors(i) {
                for &(j, _) in g.neighbors(u) {
                    counts[j] += 1;
                }
            }
            counts[i] = 0;
            for (dst, c) in row.iter_mut().zip(counts) {
                *dst = f64::from(c);
            }
        });
    SimilarityMatrix { n, values }
}

/// Edge weight for adjacent pairs, zero otherwise.
pub fn similarity_weighted(g: &Graph) -> SimilarityMatrix {
    let n = g.node_count();
    let mut values = vec![0.0; n * n];
    for e in g.edges() {
        values[e.u * n + e.v] = e.weight;
        values[e.v * n + e.u] = e.weight;
    }
    SimilarityMatrix { n, values }
}

/// Picks the similarity that matches the graph's weighting.
pub fn similarity_for(g: &Graph) -> SimilarityMatrix {
    if g.is_weighted() {
        similarity_weighted(g)
    } else {
        similarity_unweighted(g)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceTransform {
    /// `1 / (1 + s)`
    #[default]
    Reciprocal,
    /// `max_s - s`, where `max_s` is the largest off-diagonal similarity.
    MaxMinus,
}

impl fmt::Display for DistanceTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceTransform::Reciprocal => "reciprocal",
            DistanceTransform::MaxMinus => "maxminus",
        })
    }
}

impl FromStr for DistanceTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reciprocal" => Ok(DistanceTransform::Reciprocal),
            "maxminus" | "max_minus" | "max-minus" => Ok(DistanceTransform::MaxMinus),
            other => Err(Error::InvalidParameter(format!(
                "unknown distance transform `{other}`"
            ))),
        }
    }
}

pub fn distance_from_similarity(
    s: &SimilarityMatrix,
    transform: DistanceTransform,
) -> Result<DistanceMatrix> {
    let n = s.n();
    if n == 0 {
        return Err(Error::Empty);
    }
    let max_sim = s.max_off_diagonal();
    let values = s
        .values
        .iter()
        .enumerate()
        .map(|(idx, &x)| {
            if idx / n == idx % n {
                0.0
            } else {
                match transform {
                    DistanceTransform::Reciprocal => 1.0 / (1.0 + x),
                    DistanceTransform::MaxMinus => max_sim - x,
                }
            }
        })
        .collect();
    Ok(DistanceMatrix { n, values })
}
