//! Glued-square complexes and their validation.
//!
//! A [`QuadComplex`] is a set of axis-aligned squares of one common side
//! length, glued along whole sides, optionally with 1-dimensional whiskers
//! hanging off the boundary. [`QuadComplex::validate`] checks the
//! combinatorial conditions under which the glued L1 metric is a Manhattan
//! orbifold: every vertex link is a single cycle of at least four corners
//! (interior) or a single chain (boundary), the complex is connected, and it
//! is a topological disk.
//!
//! Chart conventions, shared by the whole crate: each cell is the square
//! `[0, s]²`. Sides are numbered counter-clockwise starting with the east
//! side, and side `k` runs from corner `k` to corner `k + 1`:
//!
//! ```text
//!   corner 2 (0,s) ---- N (1) ---- corner 1 (s,s)
//!        |                              |
//!      W (2)                          E (0)
//!        |                              |
//!   corner 3 (0,0) ---- S (3) ---- corner 0 (s,0)
//! ```
//!
//! A point on side `k` is addressed by its arc-length parameter `t ∈ [0, s]`
//! measured from the start corner. An ordinary gluing identifies parameter
//! `t` on one side with `s − t` on the other (the orientation-preserving
//! gluing of two counter-clockwise charts); a `reversed` gluing identifies
//! `t` with `t`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::rational::Q;
use crate::union_find::UnionFind;

/// Side of a cell, counter-clockwise from east.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    East = 0,
    North = 1,
    West = 2,
    South = 3,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::East, Side::North, Side::West, Side::South];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Side {
        Side::ALL[i % 4]
    }

    #[inline]
    pub fn opposite(self) -> Side {
        Side::from_index(self.index() + 2)
    }

    /// Corner at parameter 0.
    #[inline]
    pub fn start_corner(self) -> usize {
        self.index()
    }

    /// Corner at parameter `s`.
    #[inline]
    pub fn end_corner(self) -> usize {
        (self.index() + 1) % 4
    }
}

/// One side of one cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SideRef {
    pub cell: usize,
    pub side: Side,
}

impl SideRef {
    pub fn new(cell: usize, side: Side) -> Self {
        SideRef { cell, side }
    }
}

/// Identification of two sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub a: SideRef,
    pub b: SideRef,
    pub reversed: bool,
}

impl Gluing {
    pub fn new(a: SideRef, b: SideRef) -> Self {
        Gluing {
            a,
            b,
            reversed: false,
        }
    }
}

/// A point of a cell in that cell's chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellPoint {
    pub cell: usize,
    pub x: Q,
    pub y: Q,
}

impl CellPoint {
    pub fn new(cell: usize, x: Q, y: Q) -> Self {
        CellPoint { cell, x, y }
    }
}

/// A point of the complex, addressed through a chart.
///
/// Several chart points may denote the same point of the complex (points on
/// glued sides and corners); [`Orbifold::canonicalize`] picks a unique one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChartPoint {
    Cell(CellPoint),
    /// `offset` is measured from the attach point.
    Whisker {
        whisker: usize,
        offset: Q,
    },
}

impl ChartPoint {
    pub fn cell(cell: usize, x: Q, y: Q) -> Self {
        ChartPoint::Cell(CellPoint { cell, x, y })
    }

    pub fn whisker(whisker: usize, offset: Q) -> Self {
        ChartPoint::Whisker { whisker, offset }
    }
}

impl From<CellPoint> for ChartPoint {
    fn from(p: CellPoint) -> Self {
        ChartPoint::Cell(p)
    }
}

/// A segment of the given length attached to the complex at one end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Whisker {
    pub attach: CellPoint,
    pub length: Q,
}

/// Coordinates of corner `k` of a cell of side `s`.
pub fn corner_xy(s: Q, k: usize) -> (Q, Q) {
    let z = Q::zero();
    match k % 4 {
        0 => (s, z),
        1 => (s, s),
        2 => (z, s),
        _ => (z, z),
    }
}

/// Chart coordinates of parameter `t` on `side`.
pub fn side_point(s: Q, side: Side, t: Q) -> (Q, Q) {
    let z = Q::zero();
    match side {
        Side::East => (s, t),
        Side::North => (s - t, s),
        Side::West => (z, s - t),
        Side::South => (t, z),
    }
}

/// For a chart point `(x, y)` of a cell: its distance to `side` and its
/// projection onto `side` as a side parameter.
pub fn side_projection(s: Q, side: Side, x: Q, y: Q) -> (Q, Q) {
    match side {
        Side::East => (s - x, y),
        Side::North => (s - y, s - x),
        Side::West => (x, s - y),
        Side::South => (y, x),
    }
}

/// Sides of a cell containing the chart point, in side order.
pub fn sides_through(s: Q, x: Q, y: Q) -> Vec<Side> {
    let z = Q::zero();
    let mut out = Vec::new();
    if x == s {
        out.push(Side::East);
    }
    if y == s {
        out.push(Side::North);
    }
    if x == z {
        out.push(Side::West);
    }
    if y == z {
        out.push(Side::South);
    }
    out
}

/// Corner index at chart point `(x, y)`, if it is a corner.
pub fn corner_at(s: Q, x: Q, y: Q) -> Option<usize> {
    (0..4).find(|&k| corner_xy(s, k) == (x, y))
}

/// Structural errors: the input does not even describe a complex.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("side length must be positive")]
    NonPositiveSide,
    #[error("a complex needs at least one cell")]
    NoCells,
    #[error("gluing {gluing} references cell {cell}, but there are only {cells} cells")]
    CellOutOfRange {
        gluing: usize,
        cell: usize,
        cells: usize,
    },
    #[error("whisker {whisker} has non-positive length")]
    NonPositiveWhiskerLength { whisker: usize },
    #[error("point {0:?} lies outside its chart")]
    OutOfBounds(ChartPoint),
}

/// The raw glued-square data. Immutable once constructed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadComplex {
    side: Q,
    cells: usize,
    gluings: Vec<Gluing>,
    whiskers: Vec<Whisker>,
}

impl QuadComplex {
    /// Builds a complex after structural checks (positive side, indices and
    /// coordinates in range). Topological conditions are left to
    /// [`QuadComplex::validate`].
    pub fn new(
        side: Q,
        cells: usize,
        gluings: Vec<Gluing>,
        whiskers: Vec<Whisker>,
    ) -> Result<Self, ComplexError> {
        if side <= Q::zero() {
            return Err(ComplexError::NonPositiveSide);
        }
        if cells == 0 {
            return Err(ComplexError::NoCells);
        }
        for (i, g) in gluings.iter().enumerate() {
            for r in [g.a, g.b] {
                if r.cell >= cells {
                    return Err(ComplexError::CellOutOfRange {
                        gluing: i,
                        cell: r.cell,
                        cells,
                    });
                }
            }
        }
        for (i, w) in whiskers.iter().enumerate() {
            if w.length <= Q::zero() {
                return Err(ComplexError::NonPositiveWhiskerLength { whisker: i });
            }
            let p = w.attach;
            let z = Q::zero();
            if p.cell >= cells || p.x < z || p.y < z || p.x > side || p.y > side {
                return Err(ComplexError::OutOfBounds(ChartPoint::Cell(p)));
            }
        }
        Ok(QuadComplex {
            side,
            cells,
            gluings,
            whiskers,
        })
    }

    pub fn side(&self) -> Q {
        self.side
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn whiskers(&self) -> &[Whisker] {
        &self.whiskers
    }

    /// Checks every combinatorial condition; the report lists each violation
    /// with the offending sides, corners or counts.
    pub fn validate(&self) -> ValidationReport {
        match Topology::build(self) {
            Ok(topo) => ValidationReport {
                violations: topo.violations(self),
            },
            Err(v) => ValidationReport { violations: v },
        }
    }
}

/// A corner of a cell: `(cell, corner index)`.
pub type Corner = (usize, usize);

/// Everything that can make a complex fail to be a Manhattan orbifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A side occurs in more than one gluing (or is glued to itself).
    NonManifoldEdge { side: SideRef, gluings: Vec<usize> },
    /// An interior vertex where exactly three squares meet.
    Order3ConePoint { corners: Vec<Corner> },
    /// An interior vertex whose link is a cycle of fewer than three corners.
    BadVertexLink { corners: Vec<Corner> },
    /// Cells not reachable from cell 0 through gluings.
    DisconnectedComplex { unreachable: Vec<usize> },
    /// Not a disk: Euler characteristic or boundary count is wrong.
    NotSimplyConnected {
        euler_characteristic: i64,
        boundary_components: usize,
    },
    /// The whisker's attach point is not on the boundary of the complex.
    WhiskerOffBoundary { whisker: usize, attach: CellPoint },
}

impl Violation {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NonManifoldEdge { .. } => "NonManifoldEdge",
            Violation::Order3ConePoint { .. } => "Order3ConePoint",
            Violation::BadVertexLink { .. } => "BadVertexLink",
            Violation::DisconnectedComplex { .. } => "DisconnectedComplex",
            Violation::NotSimplyConnected { .. } => "NotSimplyConnected",
            Violation::WhiskerOffBoundary { .. } => "WhiskerOffBoundary",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonManifoldEdge { side, gluings } => write!(
                f,
                "side {:?} of cell {} appears in gluings {:?}",
                side.side, side.cell, gluings
            ),
            Violation::Order3ConePoint { corners } => {
                write!(f, "three squares meet at an interior vertex {corners:?}")
            }
            Violation::BadVertexLink { corners } => {
                write!(f, "degenerate vertex link {corners:?}")
            }
            Violation::DisconnectedComplex { unreachable } => {
                write!(f, "cells {unreachable:?} are not connected to cell 0")
            }
            Violation::NotSimplyConnected {
                euler_characteristic,
                boundary_components,
            } => write!(
                f,
                "not a disk: Euler characteristic {euler_characteristic}, \
                 {boundary_components} boundary component(s)"
            ),
            Violation::WhiskerOffBoundary { whisker, attach } => write!(
                f,
                "whisker {whisker} attaches at {attach:?}, which is not a boundary point"
            ),
        }
    }
}

/// Outcome of [`QuadComplex::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", v.code(), v)?;
        }
        Ok(())
    }
}

/// Kind of a vertex class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// Interior vertex where four squares meet.
    Regular,
    /// Interior vertex where `k ≥ 5` squares meet.
    Cone(usize),
    Boundary,
}

/// A vertex class (an equivalence class of cell corners).
///
/// Orders count whole squares around the vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexInfo {
    pub id: usize,
    pub kind: VertexKind,
    /// Number of cell corners in the class.
    pub order: usize,
    /// Corners in link order (cyclic for interior vertices).
    pub corners: Vec<Corner>,
}

impl VertexInfo {
    pub fn is_interior(&self) -> bool {
        !matches!(self.kind, VertexKind::Boundary)
    }

    /// Angular excess `2π − k·π/2` in units of `π/2`, i.e. `4 − k`.
    /// `None` for boundary vertices.
    pub fn angular_excess_quarter_turns(&self) -> Option<i64> {
        self.is_interior().then(|| 4 - self.order as i64)
    }

    /// Angular excess as a rational multiple of `π`.
    pub fn angular_excess_over_pi(&self) -> Option<Q> {
        self.angular_excess_quarter_turns().map(|k| Q::new(k, 2))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Partner {
    pub other: SideRef,
    pub reversed: bool,
}

/// An edge class: one boundary side, or a pair of glued sides.
///
/// Its parameter is the parameter of its first member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    pub id: usize,
    /// Members; the first is the lowest `(cell, side)` and fixes the parameter.
    pub members: Vec<SideRef>,
    /// Vertex classes at parameters `0` and `s`.
    pub endpoints: [usize; 2],
}

impl EdgeClass {
    pub fn is_boundary(&self) -> bool {
        self.members.len() == 1
    }
}

/// Derived incidence structure.
#[derive(Clone, Debug)]
pub(crate) struct Topology {
    pub partner: Vec<[Option<Partner>; 4]>,
    /// `(edge class, flipped)` per cell side; flipped means local parameter
    /// `t` corresponds to class parameter `s − t`.
    pub edge_of: Vec<[(usize, bool); 4]>,
    pub corner_vertex: Vec<[usize; 4]>,
    pub edges: Vec<EdgeClass>,
    pub vertices: Vec<VertexInfo>,
    /// Per vertex: incident edge classes and the class parameter (0 or s) at
    /// which they touch the vertex.
    pub vertex_edges: Vec<Vec<(usize, Q)>>,
}

impl Topology {
    fn build(c: &QuadComplex) -> Result<Topology, Vec<Violation>> {
        let n = c.cells;
        let s = c.side;

        let mut uses: BTreeMap<SideRef, Vec<usize>> = BTreeMap::new();
        for (i, g) in c.gluings.iter().enumerate() {
            uses.entry(g.a).or_default().push(i);
            uses.entry(g.b).or_default().push(i);
        }
        let mut bad: Vec<Violation> = uses
            .iter()
            .filter(|(_, gs)| gs.len() > 1)
            .map(|(side, gs)| Violation::NonManifoldEdge {
                side: *side,
                gluings: gs.clone(),
            })
            .collect();
        for (i, g) in c.gluings.iter().enumerate() {
            if g.a == g.b
                && !bad
                    .iter()
                    .any(|v| matches!(v, Violation::NonManifoldEdge { side, .. } if *side == g.a))
            {
                bad.push(Violation::NonManifoldEdge {
                    side: g.a,
                    gluings: vec![i, i],
                });
            }
        }
        if !bad.is_empty() {
            return Err(bad);
        }

        let mut partner = vec![[None; 4]; n];
        for g in &c.gluings {
            partner[g.a.cell][g.a.side.index()] = Some(Partner {
                other: g.b,
                reversed: g.reversed,
            });
            partner[g.b.cell][g.b.side.index()] = Some(Partner {
                other: g.a,
                reversed: g.reversed,
            });
        }

        // Vertex classes: union corners identified by gluings, and count link
        // edges (two per gluing, one at each end of the glued side).
        let mut uf = UnionFind::new(4 * n);
        let mut link_pairs: Vec<(usize, usize)> = Vec::with_capacity(2 * c.gluings.len());
        for g in &c.gluings {
            let (a0, a1) = (g.a.side.start_corner(), g.a.side.end_corner());
            let (b0, b1) = (g.b.side.start_corner(), g.b.side.end_corner());
            let (m0, m1) = if g.reversed { (b0, b1) } else { (b1, b0) };
            let pairs = [
                (4 * g.a.cell + a0, 4 * g.b.cell + m0),
                (4 * g.a.cell + a1, 4 * g.b.cell + m1),
            ];
            for (x, y) in pairs {
                uf.union(x, y);
                link_pairs.push((x, y));
            }
        }
        let mut root_to_vertex: BTreeMap<usize, usize> = BTreeMap::new();
        let mut corner_vertex = vec![[0usize; 4]; n];
        let mut members: Vec<Vec<Corner>> = Vec::new();
        for (cell, corners) in corner_vertex.iter_mut().enumerate() {
            for (k, slot) in corners.iter_mut().enumerate() {
                let r = uf.find(4 * cell + k);
                let next = root_to_vertex.len();
                let v = *root_to_vertex.entry(r).or_insert(next);
                if v == members.len() {
                    members.push(Vec::new());
                }
                members[v].push((cell, k));
                *slot = v;
            }
        }
        let mut link_edges = vec![0usize; members.len()];
        let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(x, y) in &link_pairs {
            link_edges[corner_vertex[x / 4][x % 4]] += 1;
            adjacency.entry(x).or_default().push(y);
            adjacency.entry(y).or_default().push(x);
        }
        let vertices: Vec<VertexInfo> = members
            .iter()
            .enumerate()
            .map(|(id, corners)| {
                let order = corners.len();
                let interior = link_edges[id] == order;
                let kind = match (interior, order) {
                    (false, _) => VertexKind::Boundary,
                    (true, 4) => VertexKind::Regular,
                    (true, k) if k > 4 => VertexKind::Cone(k),
                    // degenerate interior links, reported by validation
                    (true, k) => VertexKind::Cone(k),
                };
                VertexInfo {
                    id,
                    kind,
                    order,
                    corners: link_order(corners, &adjacency),
                }
            })
            .collect();

        // Edge classes.
        let mut edge_of = vec![[(usize::MAX, false); 4]; n];
        let mut edges: Vec<EdgeClass> = Vec::new();
        for cell in 0..n {
            for side in Side::ALL {
                if edge_of[cell][side.index()].0 != usize::MAX {
                    continue;
                }
                let id = edges.len();
                let me = SideRef::new(cell, side);
                let mut class_members = vec![me];
                edge_of[cell][side.index()] = (id, false);
                if let Some(p) = partner[cell][side.index()] {
                    class_members.push(p.other);
                    edge_of[p.other.cell][p.other.side.index()] = (id, !p.reversed);
                }
                edges.push(EdgeClass {
                    id,
                    members: class_members,
                    endpoints: [
                        corner_vertex[cell][side.start_corner()],
                        corner_vertex[cell][side.end_corner()],
                    ],
                });
            }
        }
        let mut vertex_edges = vec![Vec::new(); vertices.len()];
        for e in &edges {
            vertex_edges[e.endpoints[0]].push((e.id, Q::zero()));
            vertex_edges[e.endpoints[1]].push((e.id, s));
        }

        Ok(Topology {
            partner,
            edge_of,
            corner_vertex,
            edges,
            vertices,
            vertex_edges,
        })
    }

    fn violations(&self, c: &QuadComplex) -> Vec<Violation> {
        let mut out = Vec::new();
        for v in &self.vertices {
            if v.is_interior() && v.order == 3 {
                out.push(Violation::Order3ConePoint {
                    corners: v.corners.clone(),
                });
            } else if v.is_interior() && v.order < 3 {
                out.push(Violation::BadVertexLink {
                    corners: v.corners.clone(),
                });
            }
        }

        let mut cells_uf = UnionFind::new(c.cells);
        for g in &c.gluings {
            cells_uf.union(g.a.cell, g.b.cell);
        }
        let unreachable: Vec<usize> = (0..c.cells).filter(|&i| cells_uf.find(i) != 0).collect();
        if !unreachable.is_empty() {
            out.push(Violation::DisconnectedComplex { unreachable });
        }

        let chi = self.vertices.len() as i64 - self.edges.len() as i64 + c.cells as i64;
        let mut bd = UnionFind::new(self.vertices.len());
        let mut on_boundary = vec![false; self.vertices.len()];
        for e in self.edges.iter().filter(|e| e.is_boundary()) {
            bd.union(e.endpoints[0], e.endpoints[1]);
            on_boundary[e.endpoints[0]] = true;
            on_boundary[e.endpoints[1]] = true;
        }
        let mut roots: Vec<usize> = (0..self.vertices.len())
            .filter(|&v| on_boundary[v])
            .map(|v| bd.find(v))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        if chi != 1 || roots.len() != 1 {
            out.push(Violation::NotSimplyConnected {
                euler_characteristic: chi,
                boundary_components: roots.len(),
            });
        }

        for (i, w) in c.whiskers.iter().enumerate() {
            if !self.on_boundary(c.side, &w.attach) {
                out.push(Violation::WhiskerOffBoundary {
                    whisker: i,
                    attach: w.attach,
                });
            }
        }
        out
    }

    fn on_boundary(&self, s: Q, p: &CellPoint) -> bool {
        if let Some(k) = corner_at(s, p.x, p.y) {
            return !self.vertices[self.corner_vertex[p.cell][k]].is_interior();
        }
        sides_through(s, p.x, p.y)
            .into_iter()
            .any(|side| self.partner[p.cell][side.index()].is_none())
    }
}

/// Orders the corners of a vertex class along its link.
fn link_order(corners: &[Corner], adjacency: &BTreeMap<usize, Vec<usize>>) -> Vec<Corner> {
    let ids: Vec<usize> = corners.iter().map(|&(c, k)| 4 * c + k).collect();
    let degree = |x: usize| adjacency.get(&x).map_or(0, Vec::len);
    // chains start at an end, cycles at the lowest corner
    let start = ids
        .iter()
        .copied()
        .filter(|&x| degree(x) < 2)
        .min()
        .unwrap_or_else(|| ids.iter().copied().min().unwrap_or(0));
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < ids.len() {
        let next = adjacency.get(&cur).and_then(|nb| {
            nb.iter()
                .copied()
                .find(|&y| y != prev && !order.contains(&y))
        });
        match next {
            Some(y) => {
                prev = cur;
                cur = y;
                order.push(y);
            }
            None => break,
        }
    }
    order.into_iter().map(|x| (x / 4, x % 4)).collect()
}

/// A validated complex together with its derived incidence structure.
///
/// This is the type every metric query works on.
#[derive(Clone, Debug)]
pub struct Orbifold {
    complex: QuadComplex,
    pub(crate) topo: Topology,
}

impl Orbifold {
    /// Validates `complex`; fails with the full report if any condition is
    /// violated.
    pub fn new(complex: QuadComplex) -> Result<Orbifold, ValidationReport> {
        let topo =
            Topology::build(&complex).map_err(|violations| ValidationReport { violations })?;
        let violations = topo.violations(&complex);
        if !violations.is_empty() {
            return Err(ValidationReport { violations });
        }
        Ok(Orbifold { complex, topo })
    }

    pub fn complex(&self) -> &QuadComplex {
        &self.complex
    }

    pub fn side(&self) -> Q {
        self.complex.side
    }

    pub fn cell_count(&self) -> usize {
        self.complex.cells
    }

    pub fn whiskers(&self) -> &[Whisker] {
        &self.complex.whiskers
    }

    /// Vertex classes with their kinds and orders.
    pub fn vertex_classes(&self) -> &[VertexInfo] {
        &self.topo.vertices
    }

    pub fn edge_classes(&self) -> &[EdgeClass] {
        &self.topo.edges
    }

    /// Vertex class of a cell corner.
    pub fn corner_vertex(&self, cell: usize, corner: usize) -> usize {
        self.topo.corner_vertex[cell][corner % 4]
    }

    /// Edge class of a cell side and whether the side runs against the
    /// class parameter.
    pub fn side_edge(&self, side: SideRef) -> (usize, bool) {
        self.topo.edge_of[side.cell][side.side.index()]
    }

    /// The side glued to `side`, if any.
    pub fn partner(&self, side: SideRef) -> Option<(SideRef, bool)> {
        self.topo.partner[side.cell][side.side.index()].map(|p| (p.other, p.reversed))
    }

    /// Canonical chart point of vertex class `v`: its corner in the lowest
    /// cell.
    pub fn vertex_point(&self, v: usize) -> ChartPoint {
        let &(cell, k) = self.topo.vertices[v]
            .corners
            .iter()
            .min()
            .expect("vertex classes are nonempty");
        let (x, y) = corner_xy(self.side(), k);
        ChartPoint::cell(cell, x, y)
    }

    /// Free end of whisker `w`.
    pub fn whisker_tip(&self, w: usize) -> ChartPoint {
        ChartPoint::whisker(w, self.complex.whiskers[w].length)
    }

    /// Number of faces, edges and vertices as `(V, E, F)`.
    pub fn face_counts(&self) -> (usize, usize, usize) {
        (
            self.topo.vertices.len(),
            self.topo.edges.len(),
            self.complex.cells,
        )
    }

    /// Euler characteristic `V − E + F` of the square part.
    pub fn euler_characteristic(&self) -> i64 {
        let (v, e, f) = self.face_counts();
        v as i64 - e as i64 + f as i64
    }

    /// Whether `p` is inside its chart.
    pub fn in_bounds(&self, p: &ChartPoint) -> bool {
        let s = self.side();
        let z = Q::zero();
        match *p {
            ChartPoint::Cell(c) => {
                c.cell < self.cell_count() && c.x >= z && c.y >= z && c.x <= s && c.y <= s
            }
            ChartPoint::Whisker { whisker, offset } => {
                whisker < self.complex.whiskers.len()
                    && offset >= z
                    && offset <= self.complex.whiskers[whisker].length
            }
        }
    }

    /// Maps every chart point to a unique representative of the point of the
    /// complex it denotes: lowest cell id, then lowest side (or corner)
    /// index. Whisker points at offset 0 become their attach point.
    pub fn canonicalize(&self, p: &ChartPoint) -> Result<ChartPoint, ComplexError> {
        if !self.in_bounds(p) {
            return Err(ComplexError::OutOfBounds(*p));
        }
        match *p {
            ChartPoint::Whisker { whisker, offset } => {
                if offset.is_zero() {
                    let attach = self.complex.whiskers[whisker].attach;
                    Ok(ChartPoint::Cell(self.canonical_cell_point(&attach)))
                } else {
                    Ok(*p)
                }
            }
            ChartPoint::Cell(c) => Ok(ChartPoint::Cell(self.canonical_cell_point(&c))),
        }
    }

    pub(crate) fn canonical_cell_point(&self, p: &CellPoint) -> CellPoint {
        let s = self.side();
        if let Some(k) = corner_at(s, p.x, p.y) {
            let v = self.topo.corner_vertex[p.cell][k];
            let &(cell, k) = self.topo.vertices[v].corners.iter().min().unwrap();
            let (x, y) = corner_xy(s, k);
            return CellPoint::new(cell, x, y);
        }
        let sides = sides_through(s, p.x, p.y);
        let Some(&side) = sides.first() else {
            return *p;
        };
        let (_, t) = side_projection(s, side, p.x, p.y);
        let (edge, flipped) = self.topo.edge_of[p.cell][side.index()];
        let tc = if flipped { s - t } else { t };
        let rep = self.topo.edges[edge].members[0];
        // first member is the lowest and is never flipped
        let (x, y) = side_point(s, rep.side, tc);
        CellPoint::new(rep.cell, x, y)
    }

    /// Chart coordinates, in `cell`, of class parameter `t` on edge class
    /// `edge`. `None` if the edge is not a side of `cell`.
    pub fn edge_point_in_cell(&self, edge: usize, t: Q, cell: usize) -> Option<(Q, Q)> {
        let s = self.side();
        Side::ALL.iter().find_map(|&side| {
            let (e, flipped) = self.topo.edge_of[cell][side.index()];
            (e == edge).then(|| side_point(s, side, if flipped { s - t } else { t }))
        })
    }

    /// Chart coordinates of vertex class `v` in `cell`, if it is a corner of
    /// that cell.
    pub fn vertex_point_in_cell(&self, v: usize, cell: usize) -> Option<(Q, Q)> {
        (0..4)
            .find(|&k| self.topo.corner_vertex[cell][k] == v)
            .map(|k| corner_xy(self.side(), k))
    }

    /// Whether a cell point lies on the boundary of the square part.
    pub fn is_boundary_point(&self, p: &CellPoint) -> bool {
        self.topo.on_boundary(self.side(), p)
    }

    /// Cells in which a chart point has coordinates (more than one for points
    /// on glued sides and shared corners).
    pub fn cells_containing(&self, p: &CellPoint) -> Vec<CellPoint> {
        let s = self.side();
        if let Some(k) = corner_at(s, p.x, p.y) {
            let v = self.topo.corner_vertex[p.cell][k];
            return self.topo.vertices[v]
                .corners
                .iter()
                .map(|&(cell, k)| {
                    let (x, y) = corner_xy(s, k);
                    CellPoint::new(cell, x, y)
                })
                .collect();
        }
        let mut out = vec![*p];
        for side in sides_through(s, p.x, p.y) {
            if let Some(part) = self.topo.partner[p.cell][side.index()] {
                let (_, t) = side_projection(s, side, p.x, p.y);
                let t2 = if part.reversed { t } else { s - t };
                let (x, y) = side_point(s, part.other.side, t2);
                out.push(CellPoint::new(part.other.cell, x, y));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn cyclic(k: usize, side: Q) -> QuadComplex {
        // k cells around corner 3 of each: S side of i to W side of i+1
        let gluings = (0..k)
            .map(|i| {
                Gluing::new(
                    SideRef::new(i, Side::South),
                    SideRef::new((i + 1) % k, Side::West),
                )
            })
            .collect();
        QuadComplex::new(side, k, gluings, vec![]).unwrap()
    }

    fn block2x2() -> QuadComplex {
        // 2 3
        // 0 1
        let g = |a, sa, b, sb| Gluing::new(SideRef::new(a, sa), SideRef::new(b, sb));
        QuadComplex::new(
            qi(1),
            4,
            vec![
                g(0, Side::East, 1, Side::West),
                g(2, Side::East, 3, Side::West),
                g(0, Side::North, 2, Side::South),
                g(1, Side::North, 3, Side::South),
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn single_square_is_a_disk_with_four_boundary_vertices() {
        let c = QuadComplex::new(qi(1), 1, vec![], vec![]).unwrap();
        assert!(c.validate().is_valid());
        let o = Orbifold::new(c).unwrap();
        assert_eq!(o.euler_characteristic(), 1);
        assert_eq!(o.vertex_classes().len(), 4);
        assert!(o
            .vertex_classes()
            .iter()
            .all(|v| v.kind == VertexKind::Boundary && v.order == 1));
    }

    #[test]
    fn five_squares_around_a_corner_make_an_order_five_cone() {
        let o = Orbifold::new(cyclic(5, q(1, 2))).unwrap();
        let cones: Vec<_> = o
            .vertex_classes()
            .iter()
            .filter(|v| v.is_interior())
            .collect();
        assert_eq!(cones.len(), 1);
        assert_eq!(cones[0].kind, VertexKind::Cone(5));
        assert_eq!(cones[0].angular_excess_over_pi(), Some(q(-1, 2)));
        assert_eq!(o.euler_characteristic(), 1);
    }

    #[test]
    fn three_squares_around_a_corner_are_rejected() {
        let report = cyclic(3, qi(1)).validate();
        assert_eq!(report.violations.len(), 1);
        match &report.violations[0] {
            Violation::Order3ConePoint { corners } => assert_eq!(corners.len(), 3),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn two_by_two_block_has_a_regular_center() {
        let o = Orbifold::new(block2x2()).unwrap();
        let interior: Vec<_> = o
            .vertex_classes()
            .iter()
            .filter(|v| v.is_interior())
            .collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].kind, VertexKind::Regular);
        assert_eq!(interior[0].angular_excess_quarter_turns(), Some(0));
        assert_eq!(o.face_counts(), (9, 12, 4));
    }

    #[test]
    fn side_in_two_gluings_is_non_manifold() {
        let g = |a, sa, b, sb| Gluing::new(SideRef::new(a, sa), SideRef::new(b, sb));
        let c = QuadComplex::new(
            qi(1),
            3,
            vec![
                g(0, Side::East, 1, Side::West),
                g(0, Side::East, 2, Side::West),
            ],
            vec![],
        )
        .unwrap();
        let r = c.validate();
        assert!(matches!(
            r.violations[0],
            Violation::NonManifoldEdge {
                side: SideRef {
                    cell: 0,
                    side: Side::East
                },
                ..
            }
        ));
    }

    #[test]
    fn disconnected_and_annulus_are_rejected() {
        let c = QuadComplex::new(qi(1), 2, vec![], vec![]).unwrap();
        let codes: Vec<_> = c
            .validate()
            .violations
            .iter()
            .map(Violation::code)
            .collect();
        assert!(codes.contains(&"DisconnectedComplex"));
        assert!(codes.contains(&"NotSimplyConnected"));

        // four squares in a ring (east of i to west of i+1) form an annulus
        let ring: Vec<_> = (0..4)
            .map(|i| {
                Gluing::new(
                    SideRef::new(i, Side::East),
                    SideRef::new((i + 1) % 4, Side::West),
                )
            })
            .collect();
        let r = QuadComplex::new(qi(1), 4, ring, vec![]).unwrap().validate();
        assert_eq!(
            r.violations,
            vec![Violation::NotSimplyConnected {
                euler_characteristic: 0,
                boundary_components: 2
            }]
        );
    }

    #[test]
    fn whisker_must_attach_on_the_boundary() {
        let w = |x, y| Whisker {
            attach: CellPoint::new(0, x, y),
            length: q(1, 2),
        };
        let ok = QuadComplex::new(qi(1), 1, vec![], vec![w(q(1, 2), qi(1))]).unwrap();
        assert!(ok.validate().is_valid());
        let bad = QuadComplex::new(qi(1), 1, vec![], vec![w(q(1, 2), q(1, 2))]).unwrap();
        assert!(matches!(
            bad.validate().violations[..],
            [Violation::WhiskerOffBoundary { whisker: 0, .. }]
        ));
        // on a glued side, away from the boundary
        let glued = QuadComplex::new(
            qi(1),
            2,
            vec![Gluing::new(
                SideRef::new(0, Side::East),
                SideRef::new(1, Side::West),
            )],
            vec![w(qi(1), q(1, 2))],
        )
        .unwrap();
        assert_eq!(glued.validate().violations.len(), 1);
    }

    #[test]
    fn structural_errors() {
        assert_eq!(
            QuadComplex::new(Q::zero(), 1, vec![], vec![]),
            Err(ComplexError::NonPositiveSide)
        );
        assert!(matches!(
            QuadComplex::new(
                qi(1),
                1,
                vec![Gluing::new(
                    SideRef::new(0, Side::East),
                    SideRef::new(3, Side::West)
                )],
                vec![]
            ),
            Err(ComplexError::CellOutOfRange { cell: 3, .. })
        ));
    }

    #[test]
    fn canonicalize_interior_edge_and_corner() {
        let o = Orbifold::new(block2x2()).unwrap();
        let p = ChartPoint::cell(3, q(1, 3), q(2, 3));
        assert_eq!(o.canonicalize(&p).unwrap(), p);

        // east side of cell 0 at height 1/4 == west side of cell 1 at height 1/4
        let a = ChartPoint::cell(0, qi(1), q(1, 4));
        let b = ChartPoint::cell(1, qi(0), q(1, 4));
        assert_eq!(o.canonicalize(&a).unwrap(), o.canonicalize(&b).unwrap());
        assert_eq!(o.canonicalize(&b).unwrap(), a);

        // the center is (1,1) in cell 0
        let center = ChartPoint::cell(3, qi(0), qi(0));
        assert_eq!(
            o.canonicalize(&center).unwrap(),
            ChartPoint::cell(0, qi(1), qi(1))
        );

        assert!(o
            .canonicalize(&ChartPoint::cell(0, q(3, 2), qi(0)))
            .is_err());
    }

    #[test]
    fn canonical_cone_corner_is_in_lowest_cell() {
        let o = Orbifold::new(cyclic(5, qi(1))).unwrap();
        for cell in 0..5 {
            let p = ChartPoint::cell(cell, qi(0), qi(0));
            assert_eq!(
                o.canonicalize(&p).unwrap(),
                ChartPoint::cell(0, qi(0), qi(0))
            );
        }
        // shared rim corner: corner 0 of cell i is corner 2 of cell i+1
        let a = ChartPoint::cell(2, qi(1), qi(0));
        let b = ChartPoint::cell(3, qi(0), qi(1));
        assert_eq!(o.canonicalize(&a).unwrap(), o.canonicalize(&b).unwrap());
    }

    #[test]
    fn gluing_identifies_complementary_parameters() {
        // east side of 0 glued to east side of 1: cell 1 is turned half way
        let c = QuadComplex::new(
            qi(1),
            2,
            vec![Gluing {
                a: SideRef::new(0, Side::East),
                b: SideRef::new(1, Side::East),
                reversed: false,
            }],
            vec![],
        )
        .unwrap();
        let o = Orbifold::new(c).unwrap();
        let a = ChartPoint::cell(0, qi(1), q(1, 4));
        let b = ChartPoint::cell(1, qi(1), q(3, 4));
        assert_eq!(o.canonicalize(&a).unwrap(), o.canonicalize(&b).unwrap());
        assert_eq!(
            o.cells_containing(&CellPoint::new(0, qi(1), q(1, 4))).len(),
            2
        );
    }

    #[test]
    fn reversed_gluing_identifies_equal_parameters() {
        let c = QuadComplex::new(
            qi(1),
            2,
            vec![Gluing {
                a: SideRef::new(0, Side::East),
                b: SideRef::new(1, Side::West),
                reversed: true,
            }],
            vec![],
        )
        .unwrap();
        // a reflected neighbour is still a disk
        let o = Orbifold::new(c).unwrap();
        let a = ChartPoint::cell(0, qi(1), q(1, 4));
        // parameter 1/4 on the west side is height 3/4
        let b = ChartPoint::cell(1, qi(0), q(3, 4));
        assert_eq!(o.canonicalize(&b).unwrap(), a);
    }
}
