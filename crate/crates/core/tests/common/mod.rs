#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rmsnet::graph::Graph;

/// Random simple graph on `n` nodes named `0..n` with edge probability `p`.
/// Weighted graphs draw weights from a small set of exact binary fractions
/// plus an occasional irrational-ish value.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, weighted: bool) -> Graph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                let w = if weighted { random_weight(rng) } else { 1.0 };
                arcs.push((u, v, w));
            }
        }
    }
    Graph::from_arcs(names(n), arcs, weighted).unwrap()
}

pub fn random_weight(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(1..6) as f64,
        1 => rng.gen_range(1..16) as f64 / 4.0,
        _ => rng.gen_range(0.05..5.0),
    }
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{i:03}")).collect()
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, classes: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..classes)).collect()
}

/// Dense weighted adjacency built straight from the edge list.
pub fn dense_adjacency(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for e in g.edges() {
        a[e.u][e.v] = e.weight;
        a[e.v][e.u] = e.weight;
    }
    a
}

/// Common-neighbor counts by scanning every third node, or the edge weight
/// itself for weighted graphs.
pub fn oracle_similarity(g: &Graph) -> Vec<Vec<f64>> {
    let a = dense_adjacency(g);
    let n = a.len();
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            s[i][j] = if g.is_weighted() {
                a[i][j]
            } else {
                (0..n).filter(|&k| a[i][k] > 0.0 && a[j][k] > 0.0).count() as f64
            };
        }
    }
    s
}

/// `Σ_k D(j,k) φ(D(i,k))` by a plain triple loop over all `i, j, k`.
pub fn oracle_shift_scores(d: &[Vec<f64>], radius: f64, gaussian: bool) -> Vec<Vec<f64>> {
    let n = d.len();
    let phi = |x: f64| {
        if x > radius {
            0.0
        } else if gaussian {
            (-x / 2.0).exp()
        } else {
            1.0
        }
    };
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += d[j][k] * phi(d[i][k]);
            }
            out[i][j] = acc;
        }
    }
    out
}

/// NMI from the joint contingency table:
/// `I = Σ p(y,c) log2(p(y,c) / (p(y) p(c)))`, normalized by the mean entropy.
pub fn oracle_nmi(y: &[usize], c: &[usize]) -> f64 {
    let n = y.len() as f64;
    let ky = y.iter().max().unwrap() + 1;
    let kc = c.iter().max().unwrap() + 1;
    let mut joint = vec![vec![0.0; kc]; ky];
    for (&a, &b) in y.iter().zip(c) {
        joint[a][b] += 1.0;
    }
    let py: Vec<f64> = joint.iter().map(|r| r.iter().sum::<f64>() / n).collect();
    let pc: Vec<f64> = (0..kc)
        .map(|b| joint.iter().map(|r| r[b]).sum::<f64>() / n)
        .collect();
    let h = |p: &[f64]| -> f64 { p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum() };
    let (hy, hc) = (h(&py), h(&pc));
    let mut mi = 0.0;
    for a in 0..ky {
        for b in 0..kc {
            let pab = joint[a][b] / n;
            if pab > 0.0 {
                mi += pab * (pab / (py[a] * pc[b])).log2();
            }
        }
    }
    if hy + hc == 0.0 {
        1.0
    } else {
        2.0 * mi / (hy + hc)
    }
}

/// `Q = (1/2m) Σ_ij (A_ij - k_i k_j / 2m) δ(c_i, c_j)` over a dense matrix.
pub fn oracle_modularity(g: &Graph, labels: &[usize]) -> f64 {
    let a = dense_adjacency(g);
    let n = a.len();
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Textbook reading of the medoid loop with lists instead of sets, used as
/// a reference for the library version. Zero-similarity neighbors are not
/// shift candidates; ties go to the lowest index.
pub fn reference_rms(s: &[Vec<f64>], k: usize) -> (Vec<usize>, Vec<usize>) {
    let n = s.len();
    let k = k.min(n - 1);
    let mut nn = Vec::with_capacity(n);
    let mut dl = Vec::with_capacity(n);
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| s[i][b].partial_cmp(&s[i][a]).unwrap().then(a.cmp(&b)));
        others.truncate(k);
        dl.push(others.iter().map(|&j| s[i][j]).sum::<f64>());
        nn.push(others);
    }
    let mut next: Vec<usize> = (0..n).collect();
    let mut set_a: Vec<usize> = (0..n).collect();
    loop {
        let mut set_b = Vec::new();
        for &i in &set_a {
            let mut best = i;
            for &p in &nn[i] {
                if s[i][p] > 0.0 && (dl[p] > dl[best] || (dl[p] == dl[best] && p < best)) {
                    best = p;
                }
            }
            next[i] = best;
            if !set_b.contains(&best) {
                set_b.push(best);
            }
        }
        set_b.sort_unstable();
        if set_b == set_a {
            for &c in &set_a {
                next[c] = c;
            }
            let labels = (0..n)
                .map(|mut i| {
                    while next[i] != i {
                        i = next[i];
                    }
                    i
                })
                .collect();
            return (set_a, labels);
        }
        set_a = set_b;
    }
}

pub fn two_triangles() -> Graph {
    Graph::from_arcs(
        names(6),
        [
            (0, 1, 1.0),
            (1, 2, 1.0),
            (0, 2, 1.0),
            (3, 4, 1.0),
            (4, 5, 1.0),
            (3, 5, 1.0),
        ],
        false,
    )
    .unwrap()
}
