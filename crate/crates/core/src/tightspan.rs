//! Tight spans of small finite metric spaces.
//!
//! The polyhedron `P = { f : f(p) + f(q) ≥ d(p, q) for all p, q }` (the
//! case `p = q` gives `f ≥ 0`) is enumerated exactly by the double
//! description method on its homogenization `{ (f, t) : f(p) + f(q) ≥
//! d(p, q)·t, t ≥ 0 }`, with integer rays. Extreme rays with `t > 0` are the
//! vertices of `P`; those with `t = 0` span its recession cone. The tight
//! span is the union of the bounded faces, which are found by joining
//! vertices and discarding any join whose face contains a recession ray.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{abs, Q};

/// Largest supported point count (zero sets are 64-bit masks).
pub const MAX_POINTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TightSpanError {
    #[error("{0} points exceed the limit of {MAX_POINTS}")]
    TooManyPoints(usize),
    #[error("invalid metric: {0}")]
    InvalidMetric(&'static str),
    #[error("vector has {got} entries, metric has {expected} points")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A finite metric space given by its distance matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetric {
    d: Vec<Vec<Q>>,
}

impl FiniteMetric {
    pub fn new(d: Vec<Vec<Q>>) -> Result<Self, TightSpanError> {
        let n = d.len();
        if n == 0 {
            return Err(TightSpanError::InvalidMetric("no points"));
        }
        if d.iter().any(|row| row.len() != n) {
            return Err(TightSpanError::InvalidMetric("matrix is not square"));
        }
        for i in 0..n {
            if !d[i][i].is_zero() {
                return Err(TightSpanError::InvalidMetric("nonzero diagonal"));
            }
            for j in 0..n {
                if d[i][j] != d[j][i] {
                    return Err(TightSpanError::InvalidMetric("not symmetric"));
                }
                if d[i][j].is_negative() {
                    return Err(TightSpanError::InvalidMetric("negative distance"));
                }
                for k in 0..n {
                    if d[i][k] > d[i][j] + d[j][k] {
                        return Err(TightSpanError::InvalidMetric("triangle inequality fails"));
                    }
                }
            }
        }
        Ok(FiniteMetric { d })
    }

    /// Shortest-path metric of a connected unit-weight graph.
    pub fn from_graph(adj: &[Vec<usize>]) -> Result<Self, TightSpanError> {
        let m = crate::graph::bfs_matrix(adj);
        FiniteMetric::new(
            m.into_iter()
                .map(|row| row.into_iter().map(|x| Q::from(x as i64)).collect())
                .collect(),
        )
    }

    /// The unit-edge `n`-cycle.
    pub fn cycle(n: usize) -> Result<Self, TightSpanError> {
        let adj: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect();
        FiniteMetric::from_graph(&adj)
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn distance(&self, p: usize, q: usize) -> Q {
        self.d[p][q]
    }

    pub fn matrix(&self) -> &[Vec<Q>] {
        &self.d
    }

    /// Whether `f` lies in the tight span: `f(p) + f(q) ≥ d(p, q)` for all
    /// pairs, and every `p` has some `q` with equality.
    pub fn membership(&self, f: &[Q]) -> Result<bool, TightSpanError> {
        let n = self.len();
        if f.len() != n {
            return Err(TightSpanError::DimensionMismatch {
                expected: n,
                got: f.len(),
            });
        }
        let feasible = (0..n).all(|p| (0..n).all(|q| f[p] + f[q] >= self.d[p][q]));
        let tight = (0..n).all(|p| (0..n).any(|q| f[p] + f[q] == self.d[p][q]));
        Ok(feasible && tight)
    }

    /// `f_p = d(p, ·)` for every point.
    pub fn canonical_embedding(&self) -> Vec<Vec<Q>> {
        self.d.clone()
    }
}

/// L∞ distance between two functions on the points.
pub fn linf(a: &[Q], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .map(|(x, y)| abs(*x - *y))
        .max()
        .unwrap_or_else(Q::zero)
}

/// Summary of a tight span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanReport {
    pub points: usize,
    /// Vertices of `P`, lexicographically sorted.
    pub extreme_points: Vec<Vec<Q>>,
    /// Largest dimension of a bounded face.
    pub dimension: usize,
    pub bounded_faces: usize,
    /// Every extreme point passes [`FiniteMetric::membership`].
    pub extreme_points_in_span: bool,
    /// The canonical embedding is isometric in L∞.
    pub canonical_isometric: bool,
}

#[derive(Clone, Debug)]
struct Ray {
    /// `(f_0, …, f_{n−1}, t)`.
    v: Vec<i128>,
    zeros: u64,
}

fn normalize(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// Extreme rays of `{ x : a·x ≥ 0 for every row a }`, where the first
/// `dim` rows are the coordinate constraints `x_i ≥ 0`.
fn double_description(dim: usize, rows: &[Vec<i128>]) -> Vec<Ray> {
    let mut rays: Vec<Ray> = (0..dim)
        .map(|i| {
            let mut v = vec![0; dim];
            v[i] = 1;
            Ray {
                v,
                zeros: ((1u64 << dim) - 1) & !(1u64 << i),
            }
        })
        .collect();
    for (j, a) in rows.iter().enumerate().skip(dim) {
        let bit = 1u64 << j;
        let dot = |r: &Ray| r.v.iter().zip(a).map(|(x, y)| x * y).sum::<i128>();
        let vals: Vec<i128> = rays.iter().map(dot).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (r, &s) in rays.iter().zip(&vals) {
            if s >= 0 {
                let mut r = r.clone();
                if s == 0 {
                    r.zeros |= bit;
                }
                next.push(r);
            }
        }
        for (i, p) in rays.iter().enumerate() {
            if vals[i] <= 0 {
                continue;
            }
            for (k, m) in rays.iter().enumerate() {
                if vals[k] >= 0 {
                    continue;
                }
                let common = p.zeros & m.zeros;
                if (common.count_ones() as usize) + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(l, r)| l == i || l == k || r.zeros & common != common);
                if !adjacent {
                    continue;
                }
                let (sp, sm) = (vals[i], -vals[k]);
                let mut v: Vec<i128> = p.v.iter().zip(&m.v).map(|(x, y)| sp * y + sm * x).collect();
                normalize(&mut v);
                next.push(Ray {
                    v,
                    zeros: common | bit,
                });
            }
        }
        rays = next;
    }
    rays
}

fn affine_rank(points: &[&Vec<Q>]) -> usize {
    let Some((first, rest)) = points.split_first() else {
        return 0;
    };
    let mut rows: Vec<Vec<Q>> = rest
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| *a - *b).collect())
        .collect();
    let cols = first.len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pr = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let factor = row[c] / pr[c];
                for (x, &p) in row[c..].iter_mut().zip(&pr[c..]) {
                    *x -= factor * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exact report on the tight span of `metric`.
pub fn span_report(metric: &FiniteMetric) -> Result<SpanReport, TightSpanError> {
    let n = metric.len();
    if n > MAX_POINTS {
        return Err(TightSpanError::TooManyPoints(n));
    }
    let lcm = metric
        .d
        .iter()
        .flatten()
        .fold(1i64, |l, x| l.lcm(x.denom()));
    let dim = n + 1;
    let mut rows: Vec<Vec<i128>> = (0..dim)
        .map(|i| {
            let mut a = vec![0; dim];
            a[i] = 1;
            a
        })
        .collect();
    for p in 0..n {
        for q in p + 1..n {
            let mut a = vec![0i128; dim];
            a[p] = lcm as i128;
            a[q] = lcm as i128;
            a[n] = -(*(metric.d[p][q] * Q::from(lcm)).numer() as i128);
            normalize(&mut a);
            rows.push(a);
        }
    }
    let rays = double_description(dim, &rows);

    let mut vertices: Vec<(Vec<Q>, u64)> = Vec::new();
    let mut recession: Vec<u64> = Vec::new();
    for r in &rays {
        let t = r.v[n];
        if t > 0 {
            let f = r.v[..n]
                .iter()
                .map(|&x| Q::new(x as i64, t as i64))
                .collect();
            vertices.push((f, r.zeros));
        } else {
            recession.push(r.zeros);
        }
    }
    vertices.sort();
    vertices.dedup_by(|a, b| a.0 == b.0);

    let bounded = |z: u64| recession.iter().all(|&r| r & z != z);
    let mut faces: BTreeSet<u64> = BTreeSet::new();
    let mut queue: VecDeque<u64> = VecDeque::new();
    for (_, z) in &vertices {
        if faces.insert(*z) {
            queue.push_back(*z);
        }
    }
    let mut dimension = 0;
    while let Some(z) = queue.pop_front() {
        let members: Vec<&Vec<Q>> = vertices
            .iter()
            .filter(|(_, zv)| zv & z == z)
            .map(|(f, _)| f)
            .collect();
        dimension = dimension.max(affine_rank(&members));
        for (_, zv) in &vertices {
            let join = z & zv;
            if join == z || !bounded(join) {
                continue;
            }
            let closure = vertices
                .iter()
                .filter(|(_, w)| w & join == join)
                .fold(u64::MAX, |acc, (_, w)| acc & w);
            if faces.insert(closure) {
                queue.push_back(closure);
            }
        }
    }

    let extreme_points: Vec<Vec<Q>> = vertices.into_iter().map(|(f, _)| f).collect();
    let mut extreme_points_in_span = true;
    for f in &extreme_points {
        extreme_points_in_span &= metric.membership(f)?;
    }
    let emb = metric.canonical_embedding();
    let canonical_isometric =
        (0..n).all(|p| (0..n).all(|q| linf(&emb[p], &emb[q]) == metric.d[p][q]));
    Ok(SpanReport {
        points: n,
        extreme_points,
        dimension,
        bounded_faces: faces.len(),
        extreme_points_in_span,
        canonical_isometric,
    })
}
