//! Brute-force reference implementations. Each one transcribes its
//! definition directly over a dense distance matrix and shares no code with
//! the library.

#![allow(dead_code)]

use std::cmp::Ordering;

pub type Matrix = Vec<Vec<f64>>;

pub fn euclidean_matrix(points: &[Vec<f64>]) -> Matrix {
    points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
                .collect()
        })
        .collect()
}

/// `(value, id)` lexicographic "strictly before".
pub fn before(p: &[f64], a: usize, b: usize) -> bool {
    p[a] < p[b] || (p[a] == p[b] && a < b)
}

fn by_dist(d: &Matrix, i: usize) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| d[i][a].partial_cmp(&d[i][b]).unwrap().then(a.cmp(&b))
}

/// The `k` nearest members of `set` to `i`, ties to smaller id.
pub fn knn(d: &Matrix, set: &[usize], i: usize, k: usize) -> Vec<usize> {
    let mut others: Vec<usize> = set.iter().copied().filter(|&j| j != i).collect();
    others.sort_by(by_dist(d, i));
    others.truncate(k);
    others
}

pub struct OracleDescent {
    pub parent: Vec<usize>,
    pub weight: Vec<f64>,
    pub potential: Vec<f64>,
    pub roots_per_layer: Vec<usize>,
}

/// Layered descent exactly as defined: build kNN on the current set, add the
/// neighbor terms to each potential, link every node to its nearest lower
/// neighbor, keep the nodes that found none.
pub fn dnnd(d: &Matrix, k: usize, term: impl Fn(f64) -> f64) -> OracleDescent {
    let n = d.len();
    let mut p = vec![0.0; n];
    let mut parent: Vec<usize> = (0..n).collect();
    let mut weight = vec![f64::NEG_INFINITY; n];
    let mut roots_per_layer = Vec::new();
    let mut x: Vec<usize> = (0..n).collect();
    if n == 1 {
        roots_per_layer.push(1);
    }
    while x.len() > 1 {
        let kk = k.min(x.len() - 1);
        let eta: Vec<Vec<usize>> = x.iter().map(|&i| knn(d, &x, i, kk)).collect();
        for (pos, &i) in x.iter().enumerate() {
            let inc: f64 = eta[pos].iter().map(|&j| term(d[i][j])).sum();
            p[i] += inc;
        }
        let mut y = Vec::new();
        for (pos, &i) in x.iter().enumerate() {
            let lower: Vec<usize> = eta[pos].iter().copied().filter(|&j| before(&p, j, i)).collect();
            match lower.into_iter().min_by(by_dist(d, i)) {
                Some(j) => {
                    parent[i] = j;
                    weight[i] = d[i][j];
                }
                None => y.push(i),
            }
        }
        roots_per_layer.push(y.len());
        x = y;
    }
    OracleDescent {
        parent,
        weight,
        potential: p,
        roots_per_layer,
    }
}

/// Nearest node of lower `(potential, id)` for every node.
pub fn nd(d: &Matrix, p: &[f64]) -> Vec<usize> {
    let n = d.len();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| before(p, j, i))
                .min_by(by_dist(d, i))
                .unwrap_or(i)
        })
        .collect()
}

/// Steepest positive density gradient among the `k` nearest neighbors.
pub fn graph_ga(d: &Matrix, rho: &[f64], k: usize) -> Vec<usize> {
    let n = d.len();
    let all: Vec<usize> = (0..n).collect();
    (0..n)
        .map(|i| {
            let mut best: Option<(f64, usize)> = None;
            for j in knn(d, &all, i, k.min(n - 1)) {
                if rho[j] <= rho[i] {
                    continue;
                }
                let g = if d[i][j] == 0.0 {
                    f64::INFINITY
                } else {
                    (rho[j] - rho[i]) / d[i][j]
                };
                if best.is_none_or(|(bg, bj)| g > bg || (g == bg && j < bj)) {
                    best = Some((g, j));
                }
            }
            best.map_or(i, |(_, j)| j)
        })
        .collect()
}

/// Distance to the nearest node of higher `(density, id)`; the top node gets
/// its largest distance.
pub fn delta(d: &Matrix, rho: &[f64]) -> Vec<f64> {
    let n = d.len();
    let higher = |j: usize, i: usize| rho[j] > rho[i] || (rho[j] == rho[i] && j > i);
    (0..n)
        .map(|i| {
            let nearest = (0..n)
                .filter(|&j| higher(j, i))
                .map(|j| d[i][j])
                .fold(f64::INFINITY, f64::min);
            if nearest.is_finite() {
                nearest
            } else {
                d[i].iter().copied().fold(0.0, f64::max)
            }
        })
        .collect()
}

/// Exactly one self-loop and every walk reaches it within `n` steps.
pub fn is_intree(parent: &[usize]) -> bool {
    let n = parent.len();
    if parent.iter().any(|&p| p >= n) {
        return false;
    }
    let roots: Vec<usize> = (0..n).filter(|&i| parent[i] == i).collect();
    if roots.len() != 1 {
        return false;
    }
    (0..n).all(|start| {
        let mut v = start;
        for _ in 0..n {
            v = parent[v];
        }
        v == roots[0]
    })
}

/// Root of each node after deleting the out-edges of `removed`.
pub fn roots_after_cut(parent: &[usize], removed: &[usize]) -> Vec<usize> {
    (0..parent.len())
        .map(|start| {
            let mut v = start;
            while parent[v] != v && !removed.contains(&v) {
                v = parent[v];
            }
            v
        })
        .collect()
}

/// Partition equality up to renaming.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}
