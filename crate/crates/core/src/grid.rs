//! Lattice oracle for distances.
//!
//! Every cell is cut into an `m × m` grid of axis-aligned edges of length
//! `side / m`; lattice nodes on glued sides and shared corners are merged
//! through canonicalization. Whiskers become chains of nodes. Shortest paths
//! in this graph are real paths in the complex, so the value bounds the
//! exact distance from above; it never relies on the label machinery of
//! [`crate::geodesic`].

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use num_traits::Zero;

use crate::complex::{side_point, side_projection, sides_through, CellPoint, ChartPoint, Orbifold};
use crate::rational::{abs, Q};

/// Oracle answer for one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridResult {
    pub value: Q,
    /// Number of maximal runs of same-cell lattice edges along the path
    /// (at least 1).
    pub cells_traversed: usize,
    /// Total L1 distance the two endpoints moved when snapped.
    pub snap_error: Q,
}

#[derive(Clone, Copy, Debug)]
struct Arc {
    to: usize,
    weight: Q,
    cell: Option<usize>,
}

/// The lattice graph of an orbifold at resolution `m`.
#[derive(Clone, Debug)]
pub struct Lattice<'a> {
    orb: &'a Orbifold,
    m: usize,
    step: Q,
    index: BTreeMap<ChartPoint, usize>,
    arcs: Vec<Vec<Arc>>,
}

impl<'a> Lattice<'a> {
    /// Panics if `m < 2`.
    pub fn build(orb: &'a Orbifold, m: usize) -> Self {
        assert!(m >= 2, "lattice resolution must be at least 2");
        let s = orb.side();
        let step = s / Q::from(m as i64);
        let mut lat = Lattice {
            orb,
            m,
            step,
            index: BTreeMap::new(),
            arcs: Vec::new(),
        };
        let at = |i: usize| step * Q::from(i as i64);
        for cell in 0..orb.cell_count() {
            for i in 0..=m {
                for j in 0..=m {
                    let a = lat.node(ChartPoint::cell(cell, at(i), at(j)));
                    if i < m {
                        let b = lat.node(ChartPoint::cell(cell, at(i + 1), at(j)));
                        lat.link(a, b, step, Some(cell));
                    }
                    if j < m {
                        let b = lat.node(ChartPoint::cell(cell, at(i), at(j + 1)));
                        lat.link(a, b, step, Some(cell));
                    }
                }
            }
        }
        for (w, whisker) in orb.whiskers().iter().enumerate() {
            let attach = whisker.attach;
            let root = lat.node(ChartPoint::Cell(attach));
            // an attach point between lattice nodes is joined to them along
            // its side
            for side in sides_through(s, attach.x, attach.y) {
                let (_, t) = side_projection(s, side, attach.x, attach.y);
                let k = (t / step).floor().to_integer() as usize;
                for kk in [k, k + 1] {
                    if kk <= m {
                        let u = at(kk);
                        if u != t {
                            let (x, y) = side_point(s, side, u);
                            let b = lat.node(ChartPoint::cell(attach.cell, x, y));
                            lat.link(root, b, abs(u - t), Some(attach.cell));
                        }
                    }
                }
            }
            let mut prev = root;
            let mut prev_off = Q::zero();
            let mut k = 1;
            loop {
                let off = at(k).min(whisker.length);
                let b = lat.node(ChartPoint::whisker(w, off));
                lat.link(prev, b, off - prev_off, None);
                if off == whisker.length {
                    break;
                }
                prev = b;
                prev_off = off;
                k += 1;
            }
        }
        lat
    }

    pub fn resolution(&self) -> usize {
        self.m
    }

    pub fn node_count(&self) -> usize {
        self.arcs.len()
    }

    fn node(&mut self, p: ChartPoint) -> usize {
        let key = self
            .orb
            .canonicalize(&p)
            .expect("lattice points are in bounds");
        let next = self.arcs.len();
        let id = *self.index.entry(key).or_insert(next);
        if id == next {
            self.arcs.push(Vec::new());
        }
        id
    }

    fn link(&mut self, a: usize, b: usize, weight: Q, cell: Option<usize>) {
        if a == b {
            return;
        }
        self.arcs[a].push(Arc {
            to: b,
            weight,
            cell,
        });
        self.arcs[b].push(Arc {
            to: a,
            weight,
            cell,
        });
    }

    /// Nearest lattice point and the L1 distance moved. `None` when `p` is
    /// out of bounds.
    pub fn snap(&self, p: &ChartPoint) -> Option<(ChartPoint, Q)> {
        if !self.orb.in_bounds(p) {
            return None;
        }
        let round = |v: Q| {
            let k = (v / self.step).round();
            k * self.step
        };
        let snapped = match *p {
            ChartPoint::Cell(CellPoint { cell, x, y }) => {
                let (sx, sy) = (round(x), round(y));
                (ChartPoint::cell(cell, sx, sy), abs(sx - x) + abs(sy - y))
            }
            ChartPoint::Whisker { whisker, offset } => {
                let len = self.orb.whiskers()[whisker].length;
                let so = round(offset).min(len);
                let so = if len - offset < abs(so - offset) {
                    len
                } else {
                    so
                };
                (ChartPoint::whisker(whisker, so), abs(so - offset))
            }
        };
        Some(snapped)
    }

    fn lookup(&self, p: &ChartPoint) -> Option<usize> {
        let key = self.orb.canonicalize(p).ok()?;
        self.index.get(&key).copied()
    }

    /// Shortest lattice paths from the lattice point nearest `p`.
    pub fn from_point(&self, p: &ChartPoint) -> Option<LatticeField<'_, 'a>> {
        let (sp, err) = self.snap(p)?;
        let src = self.lookup(&sp)?;
        let n = self.arcs.len();
        let mut dist: Vec<Option<Q>> = vec![None; n];
        let mut pred: Vec<Option<(usize, Option<usize>)>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[src] = Some(Q::zero());
        heap.push(Reverse((Q::zero(), src)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if dist[u] != Some(d) {
                continue;
            }
            for arc in &self.arcs[u] {
                let nd = d + arc.weight;
                if dist[arc.to].is_none_or(|cur| nd < cur) {
                    dist[arc.to] = Some(nd);
                    pred[arc.to] = Some((u, arc.cell));
                    heap.push(Reverse((nd, arc.to)));
                }
            }
        }
        Some(LatticeField {
            lattice: self,
            dist,
            pred,
            snap_error: err,
        })
    }

    /// Oracle distance between two points.
    pub fn distance(&self, p: &ChartPoint, q: &ChartPoint) -> Option<GridResult> {
        self.from_point(p)?.query(q)
    }
}

/// Lattice distances from one node.
#[derive(Clone, Debug)]
pub struct LatticeField<'l, 'a> {
    lattice: &'l Lattice<'a>,
    dist: Vec<Option<Q>>,
    pred: Vec<Option<(usize, Option<usize>)>>,
    snap_error: Q,
}

impl LatticeField<'_, '_> {
    pub fn query(&self, q: &ChartPoint) -> Option<GridResult> {
        let (sq, err) = self.lattice.snap(q)?;
        let mut node = self.lattice.lookup(&sq)?;
        let value = self.dist[node]?;
        let mut runs = 0;
        let mut last: Option<usize> = None;
        while let Some((prev, cell)) = self.pred[node] {
            if let Some(c) = cell {
                if last != Some(c) {
                    runs += 1;
                    last = Some(c);
                }
            }
            node = prev;
        }
        Some(GridResult {
            value,
            cells_traversed: runs.max(1),
            snap_error: self.snap_error + err,
        })
    }
}

/// One-shot oracle query at resolution `m`.
pub fn grid_distance(
    orb: &Orbifold,
    p: &ChartPoint,
    q: &ChartPoint,
    m: usize,
) -> Option<GridResult> {
    Lattice::build(orb, m).distance(p, q)
}
