use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// Per-node k-nearest neighbors under a similarity matrix together with the
/// similarity sum over those neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnIndex {
    k: usize,
    neighbors: Vec<Vec<usize>>,
    sums: Vec<f64>,
}

impl KnnIndex {
    /// Effective neighbor count, after clamping to `n - 1`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    /// Similarity sum of `node` over its neighbor list.
    pub fn sum(&self, node: usize) -> f64 {
        self.sums[node]
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }
}

/// Selects, for every node, the `k` other nodes with the largest similarity.
///
/// Ties are ordered by node index, so the result is fully determined by the
/// matrix. `k` larger than `n - 1` is clamped.
pub fn compute_knn_index(s: &SimilarityMatrix, k: usize) -> Result<KnnIndex> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = s.n();
    let effective = k.min(n.saturating_sub(1));
    if effective < k && n > 0 {
        warn!("k = {k} exceeds n - 1 = {}; clamping", n - 1);
    }

    let (neighbors, sums): (Vec<Vec<usize>>, Vec<f64>) = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = s.row(i);
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let by_rank = |a: &usize, b: &usize| row[*b].total_cmp(&row[*a]).then(a.cmp(b));
            if effective < order.len() {
                order.select_nth_unstable_by(effective, by_rank);
                order.truncate(effective);
            }
            order.sort_unstable_by(by_rank);
            let sum: f64 = order.iter().map(|&j| row[j]).sum();
            (order, sum)
        })
        .unzip();

    Ok(KnnIndex {
        k: effective,
        neighbors,
        sums,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(n: usize, entries: &[(usize, usize, f64)]) -> SimilarityMatrix {
        let mut v = vec![0.0; n * n];
        for &(i, j, x) in entries {
            v[i * n + j] = x;
            v[j * n + i] = x;
        }
        SimilarityMatrix::from_row_major(n, v).unwrap()
    }

    #[test]
    fn triangle_ties_go_to_lowest_index() {
        let s = matrix(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]);
        let idx = compute_knn_index(&s, 1).unwrap();
        assert_eq!(idx.neighbors(0), &[1]);
        assert_eq!(idx.neighbors(1), &[0]);
        assert_eq!(idx.neighbors(2), &[0]);
        assert_eq!(idx.sums(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn path_similarity() {
        // Common-neighbor similarity of the path 0-1-2.
        let s = matrix(3, &[(0, 2, 1.0)]);
        let idx = compute_knn_index(&s, 1).unwrap();
        assert_eq!(idx.neighbors(0), &[2]);
        assert_eq!(idx.neighbors(1), &[0]);
        assert_eq!(idx.neighbors(2), &[0]);
        assert_eq!(idx.sums(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn k_is_clamped() {
        let s = matrix(4, &[(0, 1, 2.0), (1, 2, 3.0), (2, 3, 0.5)]);
        let idx = compute_knn_index(&s, 10).unwrap();
        assert_eq!(idx.k(), 3);
        for i in 0..4 {
            assert_eq!(idx.neighbors(i).len(), 3);
            let row_sum: f64 = s.row(i).iter().sum();
            assert_eq!(idx.sum(i), row_sum);
        }
        assert_eq!(idx.neighbors(1), &[2, 0, 3]);
    }

    #[test]
    fn zero_k_rejected() {
        let s = matrix(2, &[(0, 1, 1.0)]);
        assert!(matches!(
            compute_knn_index(&s, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn single_node_has_no_neighbors() {
        let s = matrix(1, &[]);
        let idx = compute_knn_index(&s, 3).unwrap();
        assert!(idx.neighbors(0).is_empty());
        assert_eq!(idx.sum(0), 0.0);
    }
}
