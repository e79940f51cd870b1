//! Medoid forests and the flat clusterings derived from them.

use crate::error::{Error, Result};

/// A shift map whose fixed points are cluster centers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedoidMap {
    /// Where each node shifts to; centers map to themselves.
    pub next_medoid: Vec<usize>,
    /// Fixed points of `next_medoid`, ascending.
    pub centers: Vec<usize>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub next_medoid: Vec<usize>,
    pub centers: Vec<usize>,
    /// The center each node's shift chain ends at.
    pub labels: Vec<usize>,
    pub iterations: usize,
}

impl Clustering {
    pub fn num_clusters(&self) -> usize {
        self.centers.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Checks the structural invariants: centers are fixed points, every
    /// label is a center reached by following the map, and the distinct
    /// labels are exactly the centers.
    pub fn validate(&self) -> Result<()> {
        let n = self.next_medoid.len();
        if self.labels.len() != n {
            return Err(Error::LengthMismatch {
                left: self.labels.len(),
                right: n,
            });
        }
        for &c in &self.centers {
            if self.next_medoid.get(c) != Some(&c) {
                return Err(Error::Invariant(format!("center {c} is not a fixed point")));
            }
        }
        for i in 0..n {
            let mut m = i;
            let mut steps = 0;
            while self.next_medoid[m] != m {
                m = self.next_medoid[m];
                steps += 1;
                if steps > n {
                    return Err(Error::Invariant(format!("shift chain from {i} cycles")));
                }
            }
            if self.labels[i] != m {
                return Err(Error::Invariant(format!(
                    "node {i} labelled {} but reaches {m}",
                    self.labels[i]
                )));
            }
        }
        let mut distinct: Vec<usize> = self.labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct != self.centers {
            return Err(Error::Invariant("labels and centers disagree".into()));
        }
        Ok(())
    }
}

/// Follows every node's shift chain to its fixed point.
pub fn assign_labels(map: &MedoidMap) -> Result<Clustering> {
    let next = &map.next_medoid;
    let n = next.len();
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = i;
        let mut k = next[m];
        let mut steps = 0;
        while m != k {
            m = k;
            k = next[m];
            steps += 1;
            if steps > n {
                return Err(Error::Invariant(format!(
                    "shift chain starting at {i} does not terminate"
                )));
            }
        }
        labels.push(m);
    }
    Ok(Clustering {
        next_medoid: map.next_medoid.clone(),
        centers: map.centers.clone(),
        labels,
        iterations: map.iterations,
    })
}
