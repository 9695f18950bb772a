//! Exact geodesic distances.
//!
//! Distances from a source are computed by continuous Dijkstra over edge
//! classes. The label of an edge (distance from the source to each point of
//! the edge) is kept as a set of *cones* `t ↦ value + |t − apex|`; such a set
//! is always 1-Lipschitz, so pushing a label across a cell against the
//! in-cell L1 kernel reduces to two moves:
//!
//! * across to the opposite side: the same cone, `value + s`;
//! * around a corner: the label value at the shared corner, which then
//!   seeds cones at the corner on every edge incident to that vertex.
//!
//! Cones are settled in nondecreasing order of `value`, and a cone is kept
//! only if no settled cone on the same edge lies below it. Apexes only ever
//! take the source's projections, corner parameters and whisker attach
//! parameters, so the number of cones per edge is bounded and the search
//! terminates. Each cone remembers the point it was pushed from, which
//! yields a witness path whose chart-by-chart L1 length is the reported
//! distance.
//!
//! [`PlFunction`] is the breakpoint view of a label, with the general
//! min-plus compositions against the in-cell kernel; it is used to inspect
//! labels and to check the fixpoint independently of the cone shortcut.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use num_traits::Zero;
use thiserror::Error;

use crate::complex::{side_point, side_projection, CellPoint, ChartPoint, Orbifold, Side};
use crate::rational::{abs, Q};

/// Errors from distance queries.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GeodesicError {
    #[error("point {0:?} lies outside its chart")]
    OutOfBounds(ChartPoint),
    #[error("no path reaches {0:?}")]
    UnreachablePoint(ChartPoint),
    #[error("label propagation exceeded {0} events")]
    IterationCap(usize),
}

/// A continuous piecewise-linear function on `[breakpoints[0], last]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlFunction {
    breakpoints: Vec<Q>,
    values: Vec<Q>,
}

impl PlFunction {
    /// `None` unless the breakpoints are strictly increasing and match the
    /// values one to one.
    pub fn new(breakpoints: Vec<Q>, values: Vec<Q>) -> Option<Self> {
        if breakpoints.is_empty()
            || breakpoints.len() != values.len()
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return None;
        }
        Some(PlFunction {
            breakpoints,
            values,
        })
    }

    /// `value + |t − apex|` on `[0, len]`.
    pub fn cone(len: Q, apex: Q, value: Q) -> Self {
        let z = Q::zero();
        let mut bps = vec![z];
        let mut vals = vec![value + abs(apex)];
        if apex > z && apex < len {
            bps.push(apex);
            vals.push(value);
        }
        bps.push(len);
        vals.push(value + abs(len - apex));
        PlFunction {
            breakpoints: bps,
            values: vals,
        }
    }

    /// Lower envelope of cones `(apex, value)` on `[0, len]`.
    pub fn from_cones(len: Q, cones: impl IntoIterator<Item = (Q, Q)>) -> Option<Self> {
        cones
            .into_iter()
            .map(|(a, v)| PlFunction::cone(len, a, v))
            .reduce(|f, g| f.min(&g))
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn domain(&self) -> (Q, Q) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Value at `t`, clamped to the domain.
    pub fn eval(&self, t: Q) -> Q {
        let b = &self.breakpoints;
        if t <= b[0] {
            return self.values[0];
        }
        let last = b.len() - 1;
        if t >= b[last] {
            return self.values[last];
        }
        let i = b.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (b[i], b[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn minimum(&self) -> Q {
        *self.values.iter().min().unwrap()
    }

    pub fn is_one_lipschitz(&self) -> bool {
        self.segments()
            .all(|(t0, t1, v0, v1)| abs(v1 - v0) <= t1 - t0)
    }

    fn segments(&self) -> impl Iterator<Item = (Q, Q, Q, Q)> + '_ {
        (0..self.breakpoints.len().saturating_sub(1)).map(move |i| {
            (
                self.breakpoints[i],
                self.breakpoints[i + 1],
                self.values[i],
                self.values[i + 1],
            )
        })
    }

    /// Adds a constant.
    pub fn shift(&self, c: Q) -> Self {
        PlFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|&v| v + c).collect(),
        }
    }

    /// `t ↦ f(lo + hi − t)`.
    pub fn reversed(&self) -> Self {
        let (lo, hi) = self.domain();
        PlFunction {
            breakpoints: self
                .breakpoints
                .iter()
                .rev()
                .map(|&t| lo + hi - t)
                .collect(),
            values: self.values.iter().rev().copied().collect(),
        }
    }

    /// Pointwise minimum. Both functions must share a domain.
    pub fn min(&self, other: &PlFunction) -> Self {
        debug_assert_eq!(self.domain(), other.domain());
        let mut ts: Vec<Q> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .collect();
        ts.sort_unstable();
        ts.dedup();
        let mut bps = Vec::with_capacity(ts.len() + 2);
        let mut vals = Vec::with_capacity(ts.len() + 2);
        for (i, &t) in ts.iter().enumerate() {
            let (f, g) = (self.eval(t), other.eval(t));
            bps.push(t);
            vals.push(f.min(g));
            if let Some(&u) = ts.get(i + 1) {
                let (fu, gu) = (self.eval(u), other.eval(u));
                let (d0, d1) = (f - g, fu - gu);
                if (d0 > Q::zero() && d1 < Q::zero()) || (d0 < Q::zero() && d1 > Q::zero()) {
                    let x = t + (u - t) * d0 / (d0 - d1);
                    bps.push(x);
                    vals.push(self.eval(x));
                }
            }
        }
        PlFunction {
            breakpoints: bps,
            values: vals,
        }
        .simplified()
    }

    /// The largest 1-Lipschitz minorant: `t ↦ min_u f(u) + |t − u|`.
    ///
    /// This is the min-plus composition with the kernel between a side and
    /// itself (or, shifted and reversed, its opposite side).
    pub fn lipschitz_envelope(&self) -> Self {
        let (lo, hi) = self.domain();
        let len = hi - lo;
        let mut acc: Option<PlFunction> = None;
        let mut push = |f: PlFunction| {
            acc = Some(match acc.take() {
                None => f,
                Some(a) => a.min(&f),
            })
        };
        for (&t, &v) in self.breakpoints.iter().zip(&self.values) {
            push(PlFunction::cone(len, t - lo, v).translated(lo));
        }
        for (t0, t1, v0, v1) in self.segments() {
            if abs(v1 - v0) <= t1 - t0 {
                // the segment itself, continued by slope-1 rays
                let mut bps = Vec::new();
                let mut vals = Vec::new();
                if t0 > lo {
                    bps.push(lo);
                    vals.push(v0 + (t0 - lo));
                }
                bps.extend([t0, t1]);
                vals.extend([v0, v1]);
                if t1 < hi {
                    bps.push(hi);
                    vals.push(v1 + (hi - t1));
                }
                push(PlFunction {
                    breakpoints: bps,
                    values: vals,
                });
            }
        }
        acc.expect("nonempty domain").simplified()
    }

    /// Label on the side after this one (counter-clockwise) induced through
    /// a cell of side `s`: `t' ↦ t' + min_u f(u) + (s − u)`.
    pub fn through_next_corner(&self, s: Q) -> Self {
        let m = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(&u, &v)| v + s - u)
            .min()
            .unwrap();
        PlFunction::cone(s, Q::zero(), m)
    }

    /// Label on the side before this one: `t' ↦ (s − t') + min_u f(u) + u`.
    pub fn through_previous_corner(&self, s: Q) -> Self {
        let m = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(&u, &v)| v + u)
            .min()
            .unwrap();
        PlFunction::cone(s, s, m)
    }

    /// Label on the opposite side: `t' ↦ s + min_u f(u) + |(s − t') − u|`.
    pub fn across(&self, s: Q) -> Self {
        self.lipschitz_envelope().reversed().shift(s)
    }

    fn translated(mut self, by: Q) -> Self {
        for t in &mut self.breakpoints {
            *t += by;
        }
        self
    }

    fn simplified(self) -> Self {
        let n = self.breakpoints.len();
        if n <= 2 {
            return self;
        }
        let (b, v) = (&self.breakpoints, &self.values);
        let mut bps = vec![b[0]];
        let mut vals = vec![v[0]];
        for i in 1..n - 1 {
            let (t0, v0) = (*bps.last().unwrap(), *vals.last().unwrap());
            let collinear = (v[i] - v0) * (b[i + 1] - t0) == (v[i + 1] - v0) * (b[i] - t0);
            if !collinear {
                bps.push(b[i]);
                vals.push(v[i]);
            }
        }
        bps.push(b[n - 1]);
        vals.push(v[n - 1]);
        PlFunction {
            breakpoints: bps,
            values: vals,
        }
    }
}

/// Cell in which the leg ending at a label runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Via {
    Cell(usize),
}

/// The point a label was pushed from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Anchor {
    /// The source (or, for a whisker source, its attach point).
    Source,
    Cone {
        edge: usize,
        index: usize,
    },
    Vertex(usize),
}

#[derive(Clone, Copy, Debug)]
struct ConeLabel {
    apex: Q,
    value: Q,
    via: Via,
    parent: Anchor,
}

#[derive(Clone, Copy, Debug)]
struct VertexLabel {
    value: Q,
    via: Via,
    parent: Anchor,
    settled: bool,
}

#[derive(Clone, Copy, Debug)]
enum Event {
    Cone { edge: usize, label: ConeLabel },
    Vertex { vertex: usize },
}

/// One leg of a witness path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leg {
    /// Straight (L1) segment inside one cell's chart.
    Cell {
        cell: usize,
        from: (Q, Q),
        to: (Q, Q),
    },
    /// Segment along a whisker, by offset.
    Whisker { whisker: usize, from: Q, to: Q },
}

impl Leg {
    /// L1 length in its chart.
    pub fn length(&self) -> Q {
        match *self {
            Leg::Cell { from, to, .. } => abs(from.0 - to.0) + abs(from.1 - to.1),
            Leg::Whisker { from, to, .. } => abs(from - to),
        }
    }

    pub fn start(&self) -> ChartPoint {
        match *self {
            Leg::Cell { cell, from, .. } => ChartPoint::cell(cell, from.0, from.1),
            Leg::Whisker { whisker, from, .. } => ChartPoint::whisker(whisker, from),
        }
    }

    pub fn end(&self) -> ChartPoint {
        match *self {
            Leg::Cell { cell, to, .. } => ChartPoint::cell(cell, to.0, to.1),
            Leg::Whisker { whisker, to, .. } => ChartPoint::whisker(whisker, to),
        }
    }
}

/// Point where a witness path passes from one leg to the next, as an edge
/// class and a class parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub edge: usize,
    pub param: Q,
}

/// Exact distance with a witness path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceResult {
    pub distance: Q,
    /// Cells visited by the witness, consecutive repeats merged.
    pub cells: Vec<usize>,
    pub crossings: Vec<Crossing>,
    pub legs: Vec<Leg>,
}

impl DistanceResult {
    /// Sum of the legs' chart lengths; equals `distance`.
    pub fn replay_length(&self) -> Q {
        self.legs.iter().map(Leg::length).sum()
    }

    /// Number of cells the witness runs through (at least 1).
    pub fn cells_traversed(&self) -> usize {
        self.cells.len().max(1)
    }
}

#[derive(Clone, Copy, Debug)]
enum Best {
    Direct,
    Cone { edge: usize, index: usize },
}

/// Distances from one source to every point of an orbifold.
#[derive(Clone, Debug)]
pub struct DistanceField<'a> {
    orb: &'a Orbifold,
    source: ChartPoint,
    /// Where seeding happened: the source itself, or its whisker's attach
    /// point.
    base: CellPoint,
    /// Distance from the source to `base`.
    base_offset: Q,
    cones: Vec<Vec<ConeLabel>>,
    vertices: Vec<Option<VertexLabel>>,
    events: usize,
}

impl<'a> DistanceField<'a> {
    /// Runs the propagation from `source`.
    pub fn new(orb: &'a Orbifold, source: &ChartPoint) -> Result<Self, GeodesicError> {
        let source = orb
            .canonicalize(source)
            .map_err(|_| GeodesicError::OutOfBounds(*source))?;
        let (base, base_offset) = match source {
            ChartPoint::Cell(c) => (c, Q::zero()),
            ChartPoint::Whisker { whisker, offset } => (
                orb.canonical_cell_point(&orb.whiskers()[whisker].attach),
                offset,
            ),
        };
        let topo = &orb.topo;
        let mut field = DistanceField {
            orb,
            source,
            base,
            base_offset,
            cones: vec![Vec::new(); topo.edges.len()],
            vertices: vec![None; topo.vertices.len()],
            events: 0,
        };
        field.propagate()?;
        Ok(field)
    }

    pub fn source(&self) -> ChartPoint {
        self.source
    }

    /// Number of settled events (diagnostics).
    pub fn events(&self) -> usize {
        self.events
    }

    fn propagate(&mut self) -> Result<(), GeodesicError> {
        let s = self.orb.side();
        let topo = &self.orb.topo;
        let cap = 16 * self.orb.cell_count() * topo.edges.len().max(1) + 64;

        let mut store: Vec<Event> = Vec::new();
        let mut heap: BinaryHeap<Reverse<(Q, usize)>> = BinaryHeap::new();

        let base = self.base;
        for side in Side::ALL {
            let (edge, flipped) = topo.edge_of[base.cell][side.index()];
            let (perp, t) = side_projection(s, side, base.x, base.y);
            let label = ConeLabel {
                apex: if flipped { s - t } else { t },
                value: self.base_offset + perp,
                via: Via::Cell(base.cell),
                parent: Anchor::Source,
            };
            heap.push(Reverse((label.value, store.len())));
            store.push(Event::Cone { edge, label });
        }

        while let Some(Reverse((_, id))) = heap.pop() {
            match store[id] {
                Event::Cone { edge, label } => {
                    if dominated(&self.cones[edge], label.apex, label.value) {
                        continue;
                    }
                    self.events += 1;
                    if self.events > cap {
                        return Err(GeodesicError::IterationCap(cap));
                    }
                    let index = self.cones[edge].len();
                    self.cones[edge].push(label);
                    let parent = Anchor::Cone { edge, index };

                    for member in &topo.edges[edge].members {
                        let (_, flipped) = topo.edge_of[member.cell][member.side.index()];
                        let local = if flipped { s - label.apex } else { label.apex };
                        let across = member.side.opposite();
                        let (e2, f2) = topo.edge_of[member.cell][across.index()];
                        let local2 = s - local;
                        let next = ConeLabel {
                            apex: if f2 { s - local2 } else { local2 },
                            value: label.value + s,
                            via: Via::Cell(member.cell),
                            parent,
                        };
                        if !dominated(&self.cones[e2], next.apex, next.value) {
                            heap.push(Reverse((next.value, store.len())));
                            store.push(Event::Cone {
                                edge: e2,
                                label: next,
                            });
                        }
                    }

                    let via = Via::Cell(topo.edges[edge].members[0].cell);
                    let ends = topo.edges[edge].endpoints;
                    for (v, d) in [(ends[0], label.apex), (ends[1], s - label.apex)] {
                        let value = label.value + d;
                        let better = match &self.vertices[v] {
                            None => true,
                            Some(cur) => !cur.settled && value < cur.value,
                        };
                        if better {
                            self.vertices[v] = Some(VertexLabel {
                                value,
                                via,
                                parent,
                                settled: false,
                            });
                            heap.push(Reverse((value, store.len())));
                            store.push(Event::Vertex { vertex: v });
                        }
                    }
                }
                Event::Vertex { vertex } => {
                    let Some(cur) = self.vertices[vertex].as_mut() else {
                        continue;
                    };
                    if cur.settled {
                        continue;
                    }
                    cur.settled = true;
                    let value = cur.value;
                    for &(edge, param) in &topo.vertex_edges[vertex] {
                        let label = ConeLabel {
                            apex: param,
                            value,
                            via: Via::Cell(topo.edges[edge].members[0].cell),
                            parent: Anchor::Vertex(vertex),
                        };
                        if !dominated(&self.cones[edge], label.apex, label.value) {
                            heap.push(Reverse((value, store.len())));
                            store.push(Event::Cone { edge, label });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The label of an edge class as a piecewise-linear function of the
    /// class parameter.
    pub fn edge_label(&self, edge: usize) -> Option<PlFunction> {
        PlFunction::from_cones(
            self.orb.side(),
            self.cones[edge].iter().map(|c| (c.apex, c.value)),
        )
    }

    /// Distance to vertex class `v`.
    pub fn vertex_distance(&self, v: usize) -> Option<Q> {
        self.vertices[v].map(|l| l.value)
    }

    fn eval_cell(&self, q: &CellPoint) -> Option<(Q, Best)> {
        let s = self.orb.side();
        let topo = &self.orb.topo;
        let mut best: Option<(Q, Best)> = None;
        if q.cell == self.base.cell {
            let d = self.base_offset + abs(q.x - self.base.x) + abs(q.y - self.base.y);
            best = Some((d, Best::Direct));
        }
        for side in Side::ALL {
            let (edge, flipped) = topo.edge_of[q.cell][side.index()];
            let (perp, t) = side_projection(s, side, q.x, q.y);
            for (index, c) in self.cones[edge].iter().enumerate() {
                let apex = if flipped { s - c.apex } else { c.apex };
                let d = c.value + perp + abs(apex - t);
                if best.is_none_or(|(b, _)| d < b) {
                    best = Some((d, Best::Cone { edge, index }));
                }
            }
        }
        best
    }

    /// Exact distance from the source to `q`.
    pub fn distance(&self, q: &ChartPoint) -> Result<Q, GeodesicError> {
        if !self.orb.in_bounds(q) {
            return Err(GeodesicError::OutOfBounds(*q));
        }
        match *q {
            ChartPoint::Cell(c) => self
                .eval_cell(&c)
                .map(|(d, _)| d)
                .ok_or(GeodesicError::UnreachablePoint(*q)),
            ChartPoint::Whisker { whisker, offset } => {
                let attach = self.orb.whiskers()[whisker].attach;
                let via_attach = self
                    .eval_cell(&attach)
                    .map(|(d, _)| d + offset)
                    .ok_or(GeodesicError::UnreachablePoint(*q))?;
                Ok(match self.source {
                    ChartPoint::Whisker {
                        whisker: w,
                        offset: o,
                    } if w == whisker => via_attach.min(abs(o - offset)),
                    _ => via_attach,
                })
            }
        }
    }

    /// Exact distance with a witness path.
    pub fn witness(&self, q: &ChartPoint) -> Result<DistanceResult, GeodesicError> {
        if !self.orb.in_bounds(q) {
            return Err(GeodesicError::OutOfBounds(*q));
        }
        let distance = self.distance(q)?;
        // same whisker, direct
        if let (
            ChartPoint::Whisker {
                whisker: w,
                offset: o,
            },
            ChartPoint::Whisker { whisker, offset },
        ) = (self.source, *q)
        {
            if w == whisker && abs(o - offset) == distance {
                return Ok(DistanceResult {
                    distance,
                    cells: Vec::new(),
                    crossings: Vec::new(),
                    legs: vec![Leg::Whisker {
                        whisker,
                        from: o,
                        to: offset,
                    }],
                });
            }
        }
        let (target, tail) = match *q {
            ChartPoint::Cell(c) => (c, None),
            ChartPoint::Whisker { whisker, offset } => {
                (self.orb.whiskers()[whisker].attach, Some((whisker, offset)))
            }
        };
        let (_, best) = self
            .eval_cell(&target)
            .ok_or(GeodesicError::UnreachablePoint(*q))?;

        // legs in reverse order, each with the anchor it starts from
        let mut legs_rev: Vec<Leg> = Vec::new();
        let mut joints_rev: Vec<Anchor> = Vec::new();
        if let Some((whisker, offset)) = tail {
            legs_rev.push(Leg::Whisker {
                whisker,
                from: Q::zero(),
                to: offset,
            });
        }
        let to = (target.x, target.y);
        let mut anchor = match best {
            Best::Direct => Anchor::Source,
            Best::Cone { edge, index } => Anchor::Cone { edge, index },
        };
        legs_rev.push(Leg::Cell {
            cell: target.cell,
            from: self.anchor_point(anchor, target.cell),
            to,
        });
        while anchor != Anchor::Source {
            joints_rev.push(anchor);
            let (via, parent) = match anchor {
                Anchor::Cone { edge, index } => {
                    let c = self.cones[edge][index];
                    (c.via, c.parent)
                }
                Anchor::Vertex(v) => {
                    let l = self.vertices[v].expect("settled vertex");
                    (l.via, l.parent)
                }
                Anchor::Source => unreachable!(),
            };
            let Via::Cell(cell) = via;
            legs_rev.push(Leg::Cell {
                cell,
                from: self.anchor_point(parent, cell),
                to: self.anchor_point(anchor, cell),
            });
            anchor = parent;
        }
        if let ChartPoint::Whisker { whisker, offset } = self.source {
            legs_rev.push(Leg::Whisker {
                whisker,
                from: offset,
                to: Q::zero(),
            });
        }

        let mut legs = Vec::with_capacity(legs_rev.len());
        for leg in legs_rev.into_iter().rev() {
            if !leg.length().is_zero() {
                legs.push(leg);
            }
        }
        let mut cells: Vec<usize> = Vec::new();
        for leg in &legs {
            if let Leg::Cell { cell, .. } = leg {
                if cells.last() != Some(cell) {
                    cells.push(*cell);
                }
            }
        }
        let topo = &self.orb.topo;
        let crossings = joints_rev
            .into_iter()
            .rev()
            .map(|a| match a {
                Anchor::Cone { edge, index } => Crossing {
                    edge,
                    param: self.cones[edge][index].apex,
                },
                Anchor::Vertex(v) => {
                    let (edge, param) = topo.vertex_edges[v][0];
                    Crossing { edge, param }
                }
                Anchor::Source => unreachable!(),
            })
            .collect();
        Ok(DistanceResult {
            distance,
            cells,
            crossings,
            legs,
        })
    }

    fn anchor_point(&self, anchor: Anchor, cell: usize) -> (Q, Q) {
        match anchor {
            Anchor::Source => {
                debug_assert_eq!(cell, self.base.cell);
                (self.base.x, self.base.y)
            }
            Anchor::Cone { edge, index } => self
                .orb
                .edge_point_in_cell(edge, self.cones[edge][index].apex, cell)
                .expect("cone edge bounds its cell"),
            Anchor::Vertex(v) => self
                .orb
                .vertex_point_in_cell(v, cell)
                .expect("vertex is a corner of its cell"),
        }
    }
}

fn dominated(cones: &[ConeLabel], apex: Q, value: Q) -> bool {
    cones.iter().any(|c| c.value + abs(c.apex - apex) <= value)
}

/// Exact distance between two points, with a witness path.
pub fn exact_distance(
    orb: &Orbifold,
    p: &ChartPoint,
    q: &ChartPoint,
) -> Result<DistanceResult, GeodesicError> {
    let q = orb
        .canonicalize(q)
        .map_err(|_| GeodesicError::OutOfBounds(*q))?;
    DistanceField::new(orb, p)?.witness(&q)
}

/// Pairwise exact distances between `points`.
pub fn distance_matrix(
    orb: &Orbifold,
    points: &[ChartPoint],
) -> Result<Vec<Vec<Q>>, GeodesicError> {
    points
        .iter()
        .map(|p| {
            let field = DistanceField::new(orb, p)?;
            points.iter().map(|q| field.distance(q)).collect()
        })
        .collect()
}

/// Exact distances between all vertex classes, indexed by vertex id.
pub fn all_vertex_distances(orb: &Orbifold) -> Vec<Vec<Q>> {
    let points: Vec<ChartPoint> = (0..orb.vertex_classes().len())
        .map(|v| orb.vertex_point(v))
        .collect();
    distance_matrix(orb, &points).expect("vertex points are in bounds")
}

/// Chart coordinates of `t` on `side` (re-exported for callers building
/// points on sides).
pub fn point_on_side(orb: &Orbifold, cell: usize, side: Side, t: Q) -> ChartPoint {
    let (x, y) = side_point(orb.side(), side, t);
    ChartPoint::cell(cell, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Gluing, QuadComplex, SideRef, Whisker};
    use crate::rational::{q, qi};

    fn unit_square() -> Orbifold {
        Orbifold::new(QuadComplex::new(qi(1), 1, vec![], vec![]).unwrap()).unwrap()
    }

    fn check_witness(orb: &Orbifold, r: &DistanceResult) {
        assert_eq!(r.replay_length(), r.distance);
        for w in r.legs.windows(2) {
            let a = orb.canonicalize(&w[0].end()).unwrap();
            let b = orb.canonicalize(&w[1].start()).unwrap();
            assert_eq!(a, b, "legs do not join: {:?}", r.legs);
        }
    }

    #[test]
    fn single_chart_l1() {
        let o = unit_square();
        let r = exact_distance(
            &o,
            &ChartPoint::cell(0, q(1, 4), q(1, 4)),
            &ChartPoint::cell(0, q(3, 4), q(1, 2)),
        )
        .unwrap();
        assert_eq!(r.distance, q(3, 4));
        check_witness(&o, &r);
        let r = exact_distance(
            &o,
            &ChartPoint::cell(0, qi(0), qi(0)),
            &ChartPoint::cell(0, qi(1), qi(1)),
        )
        .unwrap();
        assert_eq!(r.distance, qi(2));
        check_witness(&o, &r);
    }

    #[test]
    fn distance_through_a_strip_of_cells() {
        // three unit squares in a row
        let g = |a, b| Gluing::new(SideRef::new(a, Side::East), SideRef::new(b, Side::West));
        let o = Orbifold::new(QuadComplex::new(qi(1), 3, vec![g(0, 1), g(1, 2)], vec![]).unwrap())
            .unwrap();
        let p = ChartPoint::cell(0, q(1, 2), q(1, 4));
        let r = exact_distance(&o, &p, &ChartPoint::cell(2, q(1, 2), q(3, 4))).unwrap();
        assert_eq!(r.distance, q(5, 2));
        assert_eq!(r.cells, vec![0, 1, 2]);
        check_witness(&o, &r);
    }

    #[test]
    fn whiskers_add_their_offset() {
        let c = QuadComplex::new(
            qi(1),
            1,
            vec![],
            vec![Whisker {
                attach: CellPoint::new(0, q(1, 2), qi(1)),
                length: q(1, 2),
            }],
        )
        .unwrap();
        let o = Orbifold::new(c).unwrap();
        let tip = o.whisker_tip(0);
        let r = exact_distance(&o, &tip, &ChartPoint::cell(0, qi(0), qi(0))).unwrap();
        assert_eq!(r.distance, qi(2));
        check_witness(&o, &r);
        let r = exact_distance(&o, &ChartPoint::cell(0, qi(1), qi(1)), &tip).unwrap();
        assert_eq!(r.distance, qi(1));
        check_witness(&o, &r);
        let r = exact_distance(&o, &tip, &ChartPoint::whisker(0, q(1, 8))).unwrap();
        assert_eq!(r.distance, q(3, 8));
        check_witness(&o, &r);
    }

    #[test]
    fn pl_min_and_envelope() {
        let f = PlFunction::new(vec![qi(0), qi(1)], vec![qi(0), qi(3)]).unwrap();
        let env = f.lipschitz_envelope();
        assert_eq!(env, PlFunction::cone(qi(1), qi(0), qi(0)));
        let g = PlFunction::cone(qi(1), q(1, 2), qi(0));
        let h = PlFunction::cone(qi(1), qi(1), q(1, 4));
        let m = g.min(&h);
        assert_eq!(m.eval(q(7, 8)), q(3, 8));
        assert_eq!(m.eval(qi(1)), q(1, 4));
        assert!(m.is_one_lipschitz());
        assert_eq!(g.across(qi(1)).eval(q(1, 4)), q(5, 4));
        assert_eq!(g.through_next_corner(qi(1)).eval(q(1, 4)), q(3, 4));
        assert_eq!(g.through_previous_corner(qi(1)).eval(qi(1)), q(1, 2));
    }
}
