//! Plane graphs given by rotation systems.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} is out of range")]
    UnknownVertex(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge {0}-{1} listed twice")]
    DuplicateEdge(usize, usize),
    #[error("edge {0}-{1} appears in only one rotation")]
    AsymmetricRotation(usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("rotation system is not planar: V - E + F = {euler}")]
    NonPlanarRotation { euler: i64 },
    #[error("outer face {0:?} is not a face of the embedding")]
    UnknownOuterFace(Vec<usize>),
    #[error("face list does not close up around vertex {0}")]
    BadFaceList(usize),
    #[error("graph has no edges")]
    NoEdges,
}

/// A connected plane graph: clockwise neighbour order at every vertex and a
/// designated outer face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedGraph {
    rotation: Vec<Vec<usize>>,
    faces: FaceList,
}

/// Faces of an embedded graph. Each face is the cyclic sequence of tails of
/// its darts; inner faces run counter-clockwise, the outer face clockwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceList {
    pub faces: Vec<Vec<usize>>,
    pub outer: usize,
    dart_face: BTreeMap<(usize, usize), usize>,
}

impl FaceList {
    /// Face to the left of the dart `u → v`.
    pub fn face_of_dart(&self, u: usize, v: usize) -> Option<usize> {
        self.dart_face.get(&(u, v)).copied()
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Inner faces with their ids.
    pub fn inner(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.faces
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.outer)
            .map(|(i, f)| (i, f.as_slice()))
    }
}

type Darts = BTreeMap<(usize, usize), usize>;

/// Traces faces: the dart after `u → v` is `v → w` with `w` the clockwise
/// successor of `u` around `v`.
fn trace(rotation: &[Vec<usize>]) -> (Vec<Vec<usize>>, Darts) {
    let mut dart_face = BTreeMap::new();
    let mut faces = Vec::new();
    for u in 0..rotation.len() {
        for &v in &rotation[u] {
            if dart_face.contains_key(&(u, v)) {
                continue;
            }
            let id = faces.len();
            let mut face = Vec::new();
            let (mut a, mut b) = (u, v);
            while !dart_face.contains_key(&(a, b)) {
                dart_face.insert((a, b), id);
                face.push(a);
                let rot = &rotation[b];
                let i = rot
                    .iter()
                    .position(|&x| x == a)
                    .expect("symmetric rotation");
                let c = rot[(i + 1) % rot.len()];
                a = b;
                b = c;
            }
            faces.push(face);
        }
    }
    (faces, dart_face)
}

fn same_cycle(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    (0..n).any(|r| (0..n).all(|i| a[i] == b[(i + r) % n]))
}

impl EmbeddedGraph {
    /// Builds from clockwise rotations. `outer` is the outer face as a
    /// vertex cycle in either direction; `None` picks the longest face
    /// (lowest id on ties).
    pub fn new(rotation: Vec<Vec<usize>>, outer: Option<&[usize]>) -> Result<Self, GraphError> {
        let n = rotation.len();
        let mut edges = BTreeSet::new();
        for (u, nbrs) in rotation.iter().enumerate() {
            for &v in nbrs {
                if v >= n {
                    return Err(GraphError::UnknownVertex(v));
                }
                if v == u {
                    return Err(GraphError::SelfLoop(u));
                }
                if !edges.insert((u, v)) {
                    return Err(GraphError::DuplicateEdge(u, v));
                }
            }
        }
        if edges.is_empty() {
            return Err(GraphError::NoEdges);
        }
        for &(u, v) in &edges {
            if !edges.contains(&(v, u)) {
                return Err(GraphError::AsymmetricRotation(u, v));
            }
        }
        if bfs(&rotation, 0).iter().any(Option::is_none) {
            return Err(GraphError::Disconnected);
        }
        let (faces, dart_face) = trace(&rotation);
        let euler = n as i64 - (edges.len() / 2) as i64 + faces.len() as i64;
        if euler != 2 {
            return Err(GraphError::NonPlanarRotation { euler });
        }
        let outer = match outer {
            Some(cycle) => {
                let rev: Vec<usize> = cycle.iter().rev().copied().collect();
                faces
                    .iter()
                    .position(|f| same_cycle(f, cycle) || same_cycle(f, &rev))
                    .ok_or_else(|| GraphError::UnknownOuterFace(cycle.to_vec()))?
            }
            None => {
                let mut best = 0;
                for (i, f) in faces.iter().enumerate() {
                    if f.len() > faces[best].len() {
                        best = i;
                    }
                }
                best
            }
        };
        Ok(EmbeddedGraph {
            rotation,
            faces: FaceList {
                faces,
                outer,
                dart_face,
            },
        })
    }

    /// Builds from inner faces, each a counter-clockwise vertex cycle. The
    /// outer face is whatever remains; every boundary vertex must occur on
    /// it once.
    pub fn from_faces(n: usize, faces: &[Vec<usize>]) -> Result<Self, GraphError> {
        let mut succ: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
        for face in faces {
            let k = face.len();
            for i in 0..k {
                let (u, v, w) = (face[i], face[(i + 1) % k], face[(i + 2) % k]);
                for x in [u, v, w] {
                    if x >= n {
                        return Err(GraphError::UnknownVertex(x));
                    }
                }
                if succ[v].insert(u, w).is_some() {
                    return Err(GraphError::DuplicateEdge(u, v));
                }
            }
        }
        let mut rotation = Vec::with_capacity(n);
        for (v, map) in succ.iter().enumerate() {
            let targets: BTreeSet<usize> = map.values().copied().collect();
            let starts: Vec<usize> = map
                .keys()
                .filter(|k| !targets.contains(k))
                .copied()
                .collect();
            let first = match starts.as_slice() {
                [] => *map.keys().next().ok_or(GraphError::BadFaceList(v))?,
                [s] => *s,
                _ => return Err(GraphError::BadFaceList(v)),
            };
            let mut rot = vec![first];
            let mut cur = first;
            while let Some(&next) = map.get(&cur) {
                if next == first {
                    break;
                }
                rot.push(next);
                cur = next;
            }
            let mut all: BTreeSet<usize> = map.keys().copied().collect();
            all.extend(targets);
            if rot.len() != all.len() {
                return Err(GraphError::BadFaceList(v));
            }
            rotation.push(rot);
        }
        let g = EmbeddedGraph::new(rotation, None)?;
        // the outer face is the one not listed
        let listed: BTreeSet<usize> = faces
            .iter()
            .filter_map(|f| g.faces.face_of_dart(f[0], f[1]))
            .collect();
        let outer = (0..g.faces.len())
            .find(|i| !listed.contains(i))
            .ok_or(GraphError::BadFaceList(0))?;
        let mut g = g;
        g.faces.outer = outer;
        Ok(g)
    }

    /// Builds from a straight-line drawing; the outer face is the one with
    /// negative signed area.
    pub fn from_straight_line(
        points: &[(i64, i64)],
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let n = points.len();
        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::UnknownVertex(u.max(v)));
            }
            nbrs[u].push(v);
            nbrs[v].push(u);
        }
        for (u, list) in nbrs.iter_mut().enumerate() {
            let (ox, oy) = points[u];
            // clockwise: decreasing angle
            list.sort_by(|&a, &b| {
                let da = (points[a].0 - ox, points[a].1 - oy);
                let db = (points[b].0 - ox, points[b].1 - oy);
                angle_cmp(db, da)
            });
        }
        let mut g = EmbeddedGraph::new(nbrs, None)?;
        let area = |f: &[usize]| -> i128 {
            (0..f.len())
                .map(|i| {
                    let (a, b) = (points[f[i]], points[f[(i + 1) % f.len()]]);
                    a.0 as i128 * b.1 as i128 - b.0 as i128 * a.1 as i128
                })
                .sum()
        };
        g.faces.outer = g
            .faces
            .faces
            .iter()
            .position(|f| area(f) < 0)
            .ok_or(GraphError::NonPlanarRotation { euler: 2 })?;
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn edge_count(&self) -> usize {
        self.rotation.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Neighbours of `v` in clockwise order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nbrs) in self.rotation.iter().enumerate() {
            for &v in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn faces(&self) -> &FaceList {
        &self.faces
    }

    pub fn outer_face(&self) -> &[usize] {
        &self.faces.faces[self.faces.outer]
    }

    /// Vertices on the outer face.
    pub fn boundary_vertices(&self) -> BTreeSet<usize> {
        self.outer_face().iter().copied().collect()
    }

    pub fn is_interior_vertex(&self, v: usize) -> bool {
        !self.outer_face().contains(&v)
    }

    /// Whether the edge `u`–`v` lies on the outer face.
    pub fn is_outer_edge(&self, u: usize, v: usize) -> bool {
        let o = self.faces.outer;
        self.faces.face_of_dart(u, v) == Some(o) || self.faces.face_of_dart(v, u) == Some(o)
    }

    /// Unit-weight BFS distances between all vertices.
    pub fn bfs_matrix(&self) -> Vec<Vec<usize>> {
        bfs_matrix(&self.rotation)
    }
}

/// Compares direction vectors by angle in `[0, 2π)` from the positive x
/// axis.
fn angle_cmp(a: (i64, i64), b: (i64, i64)) -> Ordering {
    let half = |p: (i64, i64)| {
        if p.1 > 0 || (p.1 == 0 && p.0 > 0) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| {
        let cross = a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128;
        0.cmp(&cross)
    })
}

/// BFS distances from `s`; `None` for unreachable vertices.
pub fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    dist[s] = Some(0);
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// All-pairs BFS distances of a connected graph.
pub fn bfs_matrix(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    (0..adj.len())
        .map(|s| {
            bfs(adj, s)
                .into_iter()
                .map(|d| d.expect("connected graph"))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(w: usize, h: usize) -> EmbeddedGraph {
        let mut pts = Vec::new();
        for j in 0..h {
            for i in 0..w {
                pts.push((i as i64, j as i64));
            }
        }
        let mut edges = Vec::new();
        for j in 0..h {
            for i in 0..w {
                let v = j * w + i;
                if i + 1 < w {
                    edges.push((v, v + 1));
                }
                if j + 1 < h {
                    edges.push((v, v + w));
                }
            }
        }
        EmbeddedGraph::from_straight_line(&pts, &edges).unwrap()
    }

    #[test]
    fn four_cycle_has_two_faces() {
        let g = EmbeddedGraph::from_straight_line(
            &[(0, 0), (1, 0), (1, 1), (0, 1)],
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
        )
        .unwrap();
        assert_eq!(g.faces().len(), 2);
        assert!(g.faces().faces.iter().all(|f| f.len() == 4));
        assert_eq!(g.faces().inner().next().unwrap().1, &[0, 1, 2, 3]);
    }

    #[test]
    fn three_by_three_grid_faces() {
        let g = grid(3, 3);
        let f = g.faces();
        assert_eq!(f.len(), 5);
        assert_eq!(f.faces[f.outer].len(), 8);
        assert_eq!(f.inner().filter(|(_, x)| x.len() == 4).count(), 4);
    }

    #[test]
    fn k4_has_four_triangles() {
        let pts = [(0, 0), (6, 0), (0, 6), (1, 1)];
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let g = EmbeddedGraph::from_straight_line(&pts, &edges).unwrap();
        assert_eq!(g.faces().len(), 4);
        assert!(g.faces().faces.iter().all(|f| f.len() == 3));
    }

    #[test]
    fn from_faces_matches_drawing() {
        let g = EmbeddedGraph::from_faces(6, &[vec![0, 1, 4, 3], vec![1, 2, 5, 4]]).unwrap();
        let h = grid(3, 2);
        assert_eq!(g.rotation().len(), 6);
        assert_eq!(g.edges(), h.edges());
        for v in 0..6 {
            let (a, b) = (g.neighbors(v), h.neighbors(v));
            assert!(same_cycle(a, b), "vertex {v}: {a:?} vs {b:?}");
        }
        assert_eq!(g.outer_face().len(), 6);
        assert_eq!(g.bfs_matrix()[0][5], 3);
    }

    #[test]
    fn nonplanar_rotation_is_rejected() {
        // K4 with a rotation that yields a torus-like face count
        let rot = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
        assert!(matches!(
            EmbeddedGraph::new(rot, None),
            Err(GraphError::NonPlanarRotation { .. })
        ));
    }
}
