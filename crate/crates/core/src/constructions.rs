//! Complexes built from plane graphs.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::complex::{
    CellPoint, ChartPoint, Gluing, Orbifold, QuadComplex, Side, SideRef, ValidationReport, Whisker,
};
use crate::graph::{EmbeddedGraph, GraphError};
use crate::rational::{q, qi, Q};

/// A validated complex with a designated point for every graph vertex.
#[derive(Clone, Debug)]
pub struct BuiltComplex {
    pub orbifold: Orbifold,
    pub points: Vec<ChartPoint>,
}

/// Why a graph fails to be a squaregraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphViolation {
    NonQuadInnerFace { face: usize, len: usize },
    LowDegreeInteriorVertex { vertex: usize, degree: usize },
}

impl GraphViolation {
    pub fn code(&self) -> &'static str {
        match self {
            GraphViolation::NonQuadInnerFace { .. } => "NonQuadInnerFace",
            GraphViolation::LowDegreeInteriorVertex { .. } => "LowDegreeInteriorVertex",
        }
    }
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::NonQuadInnerFace { face, len } => {
                write!(f, "inner face {face} has {len} edges")
            }
            GraphViolation::LowDegreeInteriorVertex { vertex, degree } => {
                write!(f, "interior vertex {vertex} has degree {degree}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("not a squaregraph: {0:?}")]
    NotSquaregraph(Vec<GraphViolation>),
    #[error("edge {0}-{1} bounds no inner face")]
    EdgeOutsideFaces(usize, usize),
    #[error("built complex is invalid: {0}")]
    InvalidComplex(ValidationReport),
    #[error("vertex classes of the built complex do not match the graph")]
    VertexMismatch,
    #[error("interior face {face} has only {len} edges")]
    PreconditionFaceTooSmall { face: usize, len: usize },
    #[error("interior vertex {vertex} has degree {degree}")]
    PreconditionDegreeTooLow { vertex: usize, degree: usize },
    #[error("graph has no internal edge")]
    NoInternalEdges,
    #[error("wheel rim must have at least 5 vertices, got {0}")]
    RimTooSmall(usize),
    #[error("cone order must be at least 5, got {0}")]
    OrderTooSmall(usize),
    #[error("extent must be positive")]
    NonPositiveExtent,
}

/// Checks the squaregraph conditions: inner faces are quadrilaterals and
/// interior vertices have degree at least four.
pub fn validate_squaregraph(g: &EmbeddedGraph) -> Vec<GraphViolation> {
    let mut out = Vec::new();
    for (id, face) in g.faces().inner() {
        if face.len() != 4 {
            out.push(GraphViolation::NonQuadInnerFace {
                face: id,
                len: face.len(),
            });
        }
    }
    for v in 0..g.vertex_count() {
        if g.is_interior_vertex(v) && g.degree(v) < 4 {
            out.push(GraphViolation::LowDegreeInteriorVertex {
                vertex: v,
                degree: g.degree(v),
            });
        }
    }
    out
}

fn finish(complex: QuadComplex) -> Result<Orbifold, ConstructionError> {
    Orbifold::new(complex).map_err(ConstructionError::InvalidComplex)
}

/// Glues sides whose corner labels match as unordered pairs.
fn glue_by_labels<L: Ord + Copy>(corner_labels: &[[L; 4]]) -> Vec<Gluing> {
    let mut open: BTreeMap<(L, L), SideRef> = BTreeMap::new();
    let mut gluings = Vec::new();
    for (cell, labels) in corner_labels.iter().enumerate() {
        for side in Side::ALL {
            let a = labels[side.start_corner()];
            let b = labels[side.end_corner()];
            let key = if a <= b { (a, b) } else { (b, a) };
            let here = SideRef::new(cell, side);
            match open.remove(&key) {
                Some(other) => {
                    let other_start = corner_labels[other.cell][other.side.start_corner()];
                    gluings.push(Gluing {
                        a: other,
                        b: here,
                        reversed: other_start == a,
                    });
                }
                None => {
                    open.insert(key, here);
                }
            }
        }
    }
    gluings
}

/// Checks that corners with equal labels form exactly one vertex class and
/// distinct labels distinct classes; returns the class of each label.
fn classes_of_labels<L: Ord + Copy>(
    orb: &Orbifold,
    corner_labels: &[[L; 4]],
) -> Result<BTreeMap<L, usize>, ConstructionError> {
    let mut class_of: BTreeMap<L, usize> = BTreeMap::new();
    let mut label_of: BTreeMap<usize, L> = BTreeMap::new();
    for (cell, labels) in corner_labels.iter().enumerate() {
        for (k, &label) in labels.iter().enumerate() {
            let v = orb.corner_vertex(cell, k);
            if *class_of.entry(label).or_insert(v) != v
                || *label_of.entry(v).or_insert(label) != label
            {
                return Err(ConstructionError::VertexMismatch);
            }
        }
    }
    Ok(class_of)
}

/// The median complex of a squaregraph: a unit square per inner face, glued
/// along shared edges.
pub fn median_complex(g: &EmbeddedGraph) -> Result<BuiltComplex, ConstructionError> {
    let bad = validate_squaregraph(g);
    if !bad.is_empty() {
        return Err(ConstructionError::NotSquaregraph(bad));
    }
    let faces = g.faces();
    for (u, v) in g.edges() {
        if faces.face_of_dart(u, v) == Some(faces.outer)
            && faces.face_of_dart(v, u) == Some(faces.outer)
        {
            return Err(ConstructionError::EdgeOutsideFaces(u, v));
        }
    }
    let labels: Vec<[usize; 4]> = faces
        .inner()
        .map(|(_, f)| [f[0], f[1], f[2], f[3]])
        .collect();
    let gluings = glue_by_labels(&labels);
    let orbifold =
        finish(QuadComplex::new(qi(1), labels.len(), gluings, vec![]).expect("well formed"))?;
    let classes = classes_of_labels(&orbifold, &labels)?;
    if classes.len() != g.vertex_count() || orbifold.vertex_classes().len() != g.vertex_count() {
        return Err(ConstructionError::VertexMismatch);
    }
    let points = (0..g.vertex_count())
        .map(|v| orbifold.vertex_point(classes[&v]))
        .collect();
    Ok(BuiltComplex { orbifold, points })
}

/// The `w × h` grid graph (vertex `j·w + i` at column `i`, row `j`).
pub fn grid_graph(w: usize, h: usize) -> Result<EmbeddedGraph, ConstructionError> {
    let mut faces = Vec::new();
    for j in 0..h.saturating_sub(1) {
        for i in 0..w.saturating_sub(1) {
            let v = j * w + i;
            faces.push(vec![v, v + 1, v + 1 + w, v + w]);
        }
    }
    Ok(EmbeddedGraph::from_faces(w * h, &faces)?)
}

/// Two triangles `0-1-2` and `0-2-3` sharing the edge `0-2` (the complete
/// graph on four vertices minus the edge `1-3`).
pub fn two_triangles() -> EmbeddedGraph {
    EmbeddedGraph::from_faces(4, &[vec![0, 1, 2], vec![0, 2, 3]]).expect("valid faces")
}

/// Adjacency of the cliquegraph: vertices sharing an inner face, plus the
/// graph's own edges.
pub fn cliquegraph(g: &EmbeddedGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut adj = vec![alloc::collections::BTreeSet::new(); n];
    for (u, v) in g.edges() {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    for (_, face) in g.faces().inner() {
        for &a in face {
            for &b in face {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum CornerLabel {
    Vertex(usize),
    Face(usize),
}

/// Span of the cliquegraph of `g`: a side-1/2 square per internal edge with
/// corners (tail, left face, head, right face), and a length-1/2 whisker
/// from the face point to each vertex on no internal edge.
///
/// A face is interior when none of its edges lies on the outer face, and a
/// vertex when it is not on the outer face; interior faces need four or
/// more edges and interior vertices degree four or more.
pub fn cliquegraph_span(g: &EmbeddedGraph) -> Result<BuiltComplex, ConstructionError> {
    let faces = g.faces();
    for (id, face) in faces.inner() {
        let k = face.len();
        let touches_outer = (0..k).any(|i| g.is_outer_edge(face[i], face[(i + 1) % k]));
        if k < 4 && !touches_outer {
            return Err(ConstructionError::PreconditionFaceTooSmall { face: id, len: k });
        }
    }
    for v in 0..g.vertex_count() {
        if g.is_interior_vertex(v) && g.degree(v) < 4 {
            return Err(ConstructionError::PreconditionDegreeTooLow {
                vertex: v,
                degree: g.degree(v),
            });
        }
    }
    let internal: Vec<(usize, usize)> = g
        .edges()
        .into_iter()
        .filter(|&(u, v)| !g.is_outer_edge(u, v))
        .collect();
    if internal.is_empty() {
        return Err(ConstructionError::NoInternalEdges);
    }
    let labels: Vec<[CornerLabel; 4]> = internal
        .iter()
        .map(|&(u, v)| {
            let left = faces.face_of_dart(u, v).unwrap();
            let right = faces.face_of_dart(v, u).unwrap();
            [
                CornerLabel::Vertex(u),
                CornerLabel::Face(left),
                CornerLabel::Vertex(v),
                CornerLabel::Face(right),
            ]
        })
        .collect();
    let half = q(1, 2);
    let corner_point = |label: CornerLabel| -> CellPoint {
        let (cell, k) = labels
            .iter()
            .enumerate()
            .find_map(|(c, ls)| ls.iter().position(|&l| l == label).map(|k| (c, k)))
            .expect("label occurs");
        let (x, y) = crate::complex::corner_xy(half, k);
        CellPoint::new(cell, x, y)
    };
    let mut whiskers = Vec::new();
    let mut whisker_of: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..g.vertex_count() {
        if internal.iter().any(|&(a, b)| a == v || b == v) {
            continue;
        }
        let face = g
            .neighbors(v)
            .iter()
            .filter_map(|&w| faces.face_of_dart(v, w))
            .find(|&f| {
                f != faces.outer && labels.iter().any(|ls| ls.contains(&CornerLabel::Face(f)))
            })
            .ok_or(ConstructionError::NoInternalEdges)?;
        whisker_of.insert(v, whiskers.len());
        whiskers.push(Whisker {
            attach: corner_point(CornerLabel::Face(face)),
            length: half,
        });
    }
    let gluings = glue_by_labels(&labels);
    let orbifold =
        finish(QuadComplex::new(half, labels.len(), gluings, whiskers).expect("well formed"))?;
    let classes = classes_of_labels(&orbifold, &labels)?;
    if classes.len() != orbifold.vertex_classes().len() {
        return Err(ConstructionError::VertexMismatch);
    }
    let points = (0..g.vertex_count())
        .map(|v| match whisker_of.get(&v) {
            Some(&w) => orbifold.whisker_tip(w),
            None => orbifold.vertex_point(classes[&CornerLabel::Vertex(v)]),
        })
        .collect();
    Ok(BuiltComplex { orbifold, points })
}

/// The house: a 5-cycle `0-1-2-3-4` with the chord `0-2`.
pub fn house_graph() -> EmbeddedGraph {
    EmbeddedGraph::from_faces(5, &[vec![0, 1, 2], vec![0, 2, 3, 4]]).expect("valid faces")
}

/// Span of the house: a unit square with a length-1/2 whisker at the
/// midpoint of the side carrying the chord; vertex 1 is the whisker tip.
pub fn house_span() -> BuiltComplex {
    let whisker = Whisker {
        attach: CellPoint::new(0, q(1, 2), qi(1)),
        length: q(1, 2),
    };
    let orbifold = finish(QuadComplex::new(qi(1), 1, vec![], vec![whisker]).expect("well formed"))
        .expect("valid");
    let corner = |x, y| ChartPoint::cell(0, qi(x), qi(y));
    let points = vec![
        corner(1, 1),
        orbifold.whisker_tip(0),
        corner(0, 1),
        corner(0, 0),
        corner(1, 0),
    ];
    BuiltComplex { orbifold, points }
}

/// The wheel with hub 0 and rim `1..=n` in counter-clockwise order.
pub fn wheel_graph(n: usize) -> Result<EmbeddedGraph, ConstructionError> {
    if n < 3 {
        return Err(ConstructionError::RimTooSmall(n));
    }
    let faces: Vec<Vec<usize>> = (0..n).map(|i| vec![0, 1 + i, 1 + (i + 1) % n]).collect();
    Ok(EmbeddedGraph::from_faces(n + 1, &faces)?)
}

/// `k` squares of side `s` around one corner: side S of cell `i` is glued
/// to side W of cell `i + 1`, so corner 3 of every cell is the apex.
fn cone_cells(k: usize, s: Q) -> Result<Orbifold, ConstructionError> {
    let gluings = (0..k)
        .map(|i| {
            Gluing::new(
                SideRef::new(i, Side::South),
                SideRef::new((i + 1) % k, Side::West),
            )
        })
        .collect();
    finish(QuadComplex::new(s, k, gluings, vec![]).expect("well formed"))
}

/// Span of the wheel with `n ≥ 5` rim vertices; points follow
/// [`wheel_graph`] ids.
pub fn wheel_span(n: usize) -> Result<BuiltComplex, ConstructionError> {
    if n < 5 {
        return Err(ConstructionError::RimTooSmall(n));
    }
    let half = q(1, 2);
    let orbifold = cone_cells(n, half)?;
    let mut points = vec![orbifold.vertex_point(orbifold.corner_vertex(0, 3))];
    points.extend((0..n).map(|i| ChartPoint::cell(i, half, half)));
    Ok(BuiltComplex { orbifold, points })
}

/// Finite patch of the order-`k` rectilinear cone: `k` squares of side
/// `extent` around the cone point, which is the only designated point.
pub fn rectilinear_cone_patch(k: usize, extent: Q) -> Result<BuiltComplex, ConstructionError> {
    if k < 5 {
        return Err(ConstructionError::OrderTooSmall(k));
    }
    if extent <= Q::from(0) {
        return Err(ConstructionError::NonPositiveExtent);
    }
    let orbifold = cone_cells(k, extent)?;
    let points = vec![orbifold.vertex_point(orbifold.corner_vertex(0, 3))];
    Ok(BuiltComplex { orbifold, points })
}

/// Combinatorial patch of the {4,5} tiling.
#[derive(Clone, Debug)]
pub struct Tess45 {
    pub graph: EmbeddedGraph,
    /// Faces counter-clockwise, in creation order.
    pub faces: Vec<[usize; 4]>,
    /// Ring in which each vertex was created.
    pub vertex_ring: Vec<usize>,
    /// Ring in which each face was created.
    pub face_ring: Vec<usize>,
}

/// Grows `rings` layers of squares around a seed square, closing every
/// boundary vertex at five faces. Ids follow creation order, so the patch
/// for `r` rings is a prefix of the patch for `r + 1`.
pub fn tess45(rings: usize) -> Tess45 {
    let mut faces: Vec<[usize; 4]> = vec![[0, 1, 2, 3]];
    let mut face_ring = vec![0];
    let mut vertex_ring = vec![0; 4];
    let mut face_degree = vec![1usize; 4];
    let mut boundary: Vec<usize> = vec![0, 1, 2, 3];
    for ring in 1..=rings {
        let len = boundary.len();
        let mut spokes: Vec<Vec<usize>> = Vec::with_capacity(len);
        let mut next_boundary = Vec::new();
        let new_vertex = |deg: &mut Vec<usize>, vr: &mut Vec<usize>| {
            deg.push(0);
            vr.push(ring);
            deg.len() - 1
        };
        for &v in &boundary {
            let t = 5 - face_degree[v];
            let mut sp = vec![new_vertex(&mut face_degree, &mut vertex_ring)];
            for _ in 1..t - 1 {
                let c = new_vertex(&mut face_degree, &mut vertex_ring);
                let s = new_vertex(&mut face_degree, &mut vertex_ring);
                let prev = *sp.last().unwrap();
                faces.push([v, prev, c, s]);
                face_ring.push(ring);
                next_boundary.extend([prev, c]);
                sp.push(s);
            }
            next_boundary.push(*sp.last().unwrap());
            spokes.push(sp);
        }
        for i in 0..len {
            let j = (i + 1) % len;
            let (v, w) = (boundary[i], boundary[j]);
            faces.push([w, v, *spokes[i].last().unwrap(), spokes[j][0]]);
            face_ring.push(ring);
        }
        face_degree.iter_mut().for_each(|d| *d = 0);
        for f in &faces {
            for &x in f {
                face_degree[x] += 1;
            }
        }
        boundary = next_boundary;
    }
    let n = vertex_ring.len();
    let face_lists: Vec<Vec<usize>> = faces.iter().map(|f| f.to_vec()).collect();
    let graph = EmbeddedGraph::from_faces(n, &face_lists).expect("patch faces are consistent");
    Tess45 {
        graph,
        faces,
        vertex_ring,
        face_ring,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::VertexKind;
    use crate::geodesic::all_vertex_distances;
    use crate::graph::bfs_matrix;

    fn grid(w: usize, h: usize) -> EmbeddedGraph {
        grid_graph(w, h).unwrap()
    }

    fn assert_isometric(b: &BuiltComplex, bfs: &[Vec<usize>]) {
        let field: Vec<Vec<Q>> = crate::geodesic::distance_matrix(&b.orbifold, &b.points).unwrap();
        for (i, row) in bfs.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                assert_eq!(field[i][j], qi(d as i64), "pair {i},{j}");
            }
        }
    }

    #[test]
    fn squaregraph_checks() {
        assert!(validate_squaregraph(&grid(3, 3)).is_empty());
        assert!(validate_squaregraph(&grid(2, 2)).is_empty());
        let chord = EmbeddedGraph::from_faces(4, &[vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
        let v = validate_squaregraph(&chord);
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|x| x.code() == "NonQuadInnerFace"));
    }

    #[test]
    fn median_of_grids() {
        let b = median_complex(&grid(2, 2)).unwrap();
        assert_eq!(b.orbifold.cell_count(), 1);
        let g = grid(3, 2);
        let b = median_complex(&g).unwrap();
        assert_eq!(b.orbifold.cell_count(), 2);
        assert_eq!(b.orbifold.complex().gluings().len(), 1);
        assert_isometric(&b, &g.bfs_matrix());
        let g = grid(3, 3);
        let b = median_complex(&g).unwrap();
        assert_eq!(all_vertex_distances(&b.orbifold).len(), 9);
        assert_isometric(&b, &g.bfs_matrix());
    }

    #[test]
    fn two_triangles_span() {
        let g = two_triangles();
        let b = cliquegraph_span(&g).unwrap();
        assert_eq!(b.orbifold.cell_count(), 1);
        assert_eq!(b.orbifold.whiskers().len(), 2);
        assert_isometric(&b, &bfs_matrix(&cliquegraph(&g)));
    }

    #[test]
    fn kinggraph_span() {
        let g = grid(3, 3);
        let b = cliquegraph_span(&g).unwrap();
        assert_eq!(b.orbifold.cell_count(), 4);
        assert_eq!(b.orbifold.whiskers().len(), 4);
        assert_isometric(&b, &bfs_matrix(&cliquegraph(&g)));
    }

    #[test]
    fn cliquegraph_preconditions() {
        // interior triangle inside a triangle
        let g = EmbeddedGraph::from_faces(
            6,
            &[
                vec![3, 4, 5],
                vec![0, 1, 4, 3],
                vec![1, 2, 5, 4],
                vec![2, 0, 3, 5],
            ],
        )
        .unwrap();
        assert!(matches!(
            cliquegraph_span(&g),
            Err(ConstructionError::PreconditionFaceTooSmall { .. })
        ));
        // K4 drawn with a degree-3 centre
        let k4 =
            EmbeddedGraph::from_faces(4, &[vec![0, 1, 3], vec![1, 2, 3], vec![2, 0, 3]]).unwrap();
        assert!(matches!(
            cliquegraph_span(&k4),
            Err(ConstructionError::PreconditionDegreeTooLow {
                vertex: 3,
                degree: 3
            })
        ));
    }

    #[test]
    fn house() {
        let b = house_span();
        assert_isometric(&b, &house_graph().bfs_matrix());
    }

    #[test]
    fn wheels() {
        for n in 5..=8 {
            let b = wheel_span(n).unwrap();
            let hub = b.orbifold.corner_vertex(0, 3);
            assert_eq!(b.orbifold.vertex_classes()[hub].kind, VertexKind::Cone(n));
            assert_isometric(&b, &wheel_graph(n).unwrap().bfs_matrix());
        }
        assert!(matches!(
            wheel_span(4),
            Err(ConstructionError::RimTooSmall(4))
        ));
    }

    #[test]
    fn cone_patch() {
        let b = rectilinear_cone_patch(5, qi(1)).unwrap();
        let apex = b.orbifold.corner_vertex(0, 3);
        let info = &b.orbifold.vertex_classes()[apex];
        assert_eq!(info.angular_excess_over_pi(), Some(q(-1, 2)));
        assert!(rectilinear_cone_patch(4, qi(1)).is_err());
    }

    #[test]
    fn tess45_counts_and_degrees() {
        let counts: Vec<usize> = (0..3).map(|r| tess45(r).faces.len()).collect();
        assert_eq!(counts, vec![1, 13, 61]);
        for r in 0..4 {
            let t = tess45(r);
            assert!(validate_squaregraph(&t.graph).is_empty());
            for v in 0..t.graph.vertex_count() {
                if t.graph.is_interior_vertex(v) {
                    assert_eq!(t.graph.degree(v), 5);
                }
            }
            if r > 0 {
                let prev = tess45(r - 1);
                assert_eq!(&t.faces[..prev.faces.len()], &prev.faces[..]);
            }
        }
        let t = tess45(1);
        let b = median_complex(&t.graph).unwrap();
        for info in b.orbifold.vertex_classes() {
            if info.is_interior() {
                assert_eq!(info.kind, VertexKind::Cone(5));
            }
        }
        assert_isometric(&b, &t.graph.bfs_matrix());
    }
}
