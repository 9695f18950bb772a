//! The dyadic tree metric space and greedy routing.
//!
//! Nodes of the infinite binary tree are bit strings; a node at depth `i`
//! with bits `b` sits at `(2b + 1) / 2^(i+1)` in `[0, 1]`. A point is a pair
//! `(x, y)` with `x` an ancestor of `y`, and
//! `d((x, y), (x', y')) = tree_distance(x, x') + |value(y) − value(y')|`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::complex::{ChartPoint, Orbifold};
use crate::geodesic::{distance_matrix, GeodesicError};
use crate::rational::{abs, Q};

/// Deepest supported node (keeps values within `i64` rationals).
pub const MAX_DEPTH: u32 = 60;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DyadicError {
    #[error("invalid bit string {0:?}")]
    BadBits(String),
    #[error("depth {0} exceeds {MAX_DEPTH}")]
    TooDeep(u32),
    #[error("{x} is not an ancestor of {y}")]
    NotAncestor { x: TreeNode, y: TreeNode },
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("adjacency and distance matrix sizes differ")]
    SizeMismatch,
    #[error("vertex {0} out of range")]
    UnknownVertex(usize),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
}

/// A node of the binary tree, as the bit string leading to it from the
/// root (first step most significant).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TreeNode {
    bits: u64,
    depth: u32,
}

impl TreeNode {
    pub const ROOT: TreeNode = TreeNode { bits: 0, depth: 0 };

    pub fn new(bits: u64, depth: u32) -> Result<Self, DyadicError> {
        if depth > MAX_DEPTH {
            return Err(DyadicError::TooDeep(depth));
        }
        Ok(TreeNode {
            bits: bits & ((1u64 << depth) - 1),
            depth,
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn child(&self, right: bool) -> Result<Self, DyadicError> {
        TreeNode::new((self.bits << 1) | right as u64, self.depth + 1)
    }

    /// The ancestor at depth `k ≤ depth`.
    pub fn prefix(&self, k: u32) -> TreeNode {
        TreeNode {
            bits: self.bits >> (self.depth - k),
            depth: k,
        }
    }

    pub fn is_ancestor_of(&self, other: &TreeNode) -> bool {
        self.depth <= other.depth && other.prefix(self.depth) == *self
    }

    /// Position in `[0, 1]`: `(2·bits + 1) / 2^(depth+1)`.
    pub fn value(&self) -> Q {
        Q::new(2 * self.bits as i64 + 1, 1i64 << (self.depth + 1))
    }

    pub fn common_ancestor_depth(&self, other: &TreeNode) -> u32 {
        let k = self.depth.min(other.depth);
        let diff = self.prefix(k).bits ^ other.prefix(k).bits;
        k - (64 - diff.leading_zeros())
    }

    /// Number of tree links between the nodes.
    pub fn tree_distance(&self, other: &TreeNode) -> u32 {
        self.depth + other.depth - 2 * self.common_ancestor_depth(other)
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.depth).rev() {
            f.write_str(if (self.bits >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for TreeNode {
    type Err = DyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut node = TreeNode::ROOT;
        for c in s.chars() {
            node = match c {
                '0' => node.child(false)?,
                '1' => node.child(true)?,
                _ => return Err(DyadicError::BadBits(s.into())),
            };
        }
        Ok(node)
    }
}

/// A point `(x, y)` of the dyadic space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicPoint {
    x: TreeNode,
    y: TreeNode,
}

impl DyadicPoint {
    pub fn new(x: TreeNode, y: TreeNode) -> Result<Self, DyadicError> {
        if !x.is_ancestor_of(&y) {
            return Err(DyadicError::NotAncestor { x, y });
        }
        Ok(DyadicPoint { x, y })
    }

    pub fn x(&self) -> TreeNode {
        self.x
    }

    pub fn y(&self) -> TreeNode {
        self.y
    }
}

pub fn dyadic_distance(a: &DyadicPoint, b: &DyadicPoint) -> Q {
    Q::from(a.x.tree_distance(&b.x) as i64) + abs(a.y.value() - b.y.value())
}

/// A uniformly random point with `y` at depth at most `max_depth`.
pub fn random_point<R: Rng>(rng: &mut R, max_depth: u32) -> DyadicPoint {
    let dy = rng.gen_range(0..=max_depth.min(MAX_DEPTH));
    let y = TreeNode::new(rng.gen::<u64>(), dy).expect("depth in range");
    let x = y.prefix(rng.gen_range(0..=dy));
    DyadicPoint { x, y }
}

/// Graph vertices placed in a metric space, given by adjacency and the
/// pairwise distances of the placement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyEmbedding {
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<Q>>,
}

/// Result of checking the greedy condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyReport {
    pub pairs_checked: usize,
    /// Ordered pairs `(v, w)` where no neighbour of `v` is closer to `w`.
    pub violations: Vec<(usize, usize)>,
}

impl GreedyReport {
    pub fn is_greedy(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Outcome of greedy routing. Paths include the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Route {
    Delivered(Vec<usize>),
    Stuck { path: Vec<usize>, at: usize },
}

impl Route {
    pub fn path(&self) -> &[usize] {
        match self {
            Route::Delivered(p) | Route::Stuck { path: p, .. } => p,
        }
    }

    pub fn hops(&self) -> usize {
        self.path().len().saturating_sub(1)
    }
}

impl GreedyEmbedding {
    pub fn new(adj: Vec<Vec<usize>>, dist: Vec<Vec<Q>>) -> Result<Self, DyadicError> {
        let n = adj.len();
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(DyadicError::SizeMismatch);
        }
        if let Some(&v) = adj.iter().flatten().find(|&&v| v >= n) {
            return Err(DyadicError::UnknownVertex(v));
        }
        Ok(GreedyEmbedding { adj, dist })
    }

    pub fn dyadic(adj: Vec<Vec<usize>>, placement: &[DyadicPoint]) -> Result<Self, DyadicError> {
        let dist = placement
            .iter()
            .map(|a| placement.iter().map(|b| dyadic_distance(a, b)).collect())
            .collect();
        GreedyEmbedding::new(adj, dist)
    }

    /// Placement at chart points of a complex, with exact geodesic
    /// distances.
    pub fn in_complex(
        adj: Vec<Vec<usize>>,
        orb: &Orbifold,
        placement: &[ChartPoint],
    ) -> Result<Self, DyadicError> {
        GreedyEmbedding::new(adj, distance_matrix(orb, placement)?)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn distance(&self, u: usize, v: usize) -> Q {
        self.dist[u][v]
    }

    /// Checks that every vertex has a neighbour strictly closer to every
    /// other vertex.
    pub fn verify(&self) -> Result<GreedyReport, DyadicError> {
        let n = self.adj.len();
        if n > 0 && crate::graph::bfs(&self.adj, 0).iter().any(Option::is_none) {
            return Err(DyadicError::DisconnectedGraph);
        }
        let mut violations = Vec::new();
        let mut pairs_checked = 0;
        for v in 0..n {
            for w in 0..n {
                if v == w {
                    continue;
                }
                pairs_checked += 1;
                if !self.adj[v]
                    .iter()
                    .any(|&u| self.dist[u][w] < self.dist[v][w])
                {
                    violations.push((v, w));
                }
            }
        }
        Ok(GreedyReport {
            pairs_checked,
            violations,
        })
    }

    /// Moves to the neighbour closest to `target` while that strictly
    /// improves (ties to the lowest id).
    pub fn route(&self, source: usize, target: usize) -> Result<Route, DyadicError> {
        let n = self.adj.len();
        for v in [source, target] {
            if v >= n {
                return Err(DyadicError::UnknownVertex(v));
            }
        }
        let mut path = vec![source];
        let mut v = source;
        while v != target {
            let mut next: Option<usize> = None;
            for &u in &self.adj[v] {
                if self.dist[u][target] >= self.dist[v][target] {
                    continue;
                }
                next = match next {
                    Some(b)
                        if self.dist[b][target] < self.dist[u][target]
                            || (self.dist[b][target] == self.dist[u][target] && b < u) =>
                    {
                        Some(b)
                    }
                    _ => Some(u),
                };
            }
            match next {
                Some(u) => {
                    path.push(u);
                    v = u;
                }
                None => return Ok(Route::Stuck { path, at: v }),
            }
        }
        Ok(Route::Delivered(path))
    }
}
