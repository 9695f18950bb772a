//! JSON file formats. Rationals travel as canonical `"p/q"` strings, so every
//! value round-trips bit-exactly.

use std::collections::BTreeMap;
use std::path::Path;

use orbifold_core::complex::{
    CellPoint, ComplexError, Gluing, QuadComplex, Side, SideRef, Whisker,
};
use orbifold_core::dyadic::{DyadicPoint, TreeNode};
use orbifold_core::geodesic::{Crossing, DistanceResult, Leg};
use orbifold_core::graph::EmbeddedGraph;
use orbifold_core::rational::{self, Q};
use orbifold_core::tightspan::SpanReport;
use orbifold_core::{ChartPoint, Orbifold};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error("side index {0} is not in 0..4")]
    BadSide(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
#[error("{0}")]
pub struct RationalError(String);

pub fn rat(s: &str) -> Result<Q, RationalError> {
    rational::parse(s).map_err(|e| RationalError(e.to_string()))
}

pub fn rat_string(x: Q) -> String {
    x.to_string()
}

/// A rational written either as a string or, for integers, a bare number.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum RatJson {
    Text(String),
    Int(i64),
}

impl RatJson {
    pub fn value(&self) -> Result<Q, RationalError> {
        match self {
            RatJson::Text(s) => rat(s),
            RatJson::Int(n) => Ok(Q::from(*n)),
        }
    }
}

impl From<Q> for RatJson {
    fn from(x: Q) -> Self {
        RatJson::Text(rat_string(x))
    }
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

// ---------------------------------------------------------------- points

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum PointJson {
    Cell { cell: usize, x: RatJson, y: RatJson },
    Whisker { whisker: usize, offset: RatJson },
}

impl PointJson {
    pub fn to_point(&self) -> Result<ChartPoint, FormatError> {
        Ok(match self {
            PointJson::Cell { cell, x, y } => ChartPoint::cell(*cell, x.value()?, y.value()?),
            PointJson::Whisker { whisker, offset } => {
                ChartPoint::whisker(*whisker, offset.value()?)
            }
        })
    }
}

impl From<&ChartPoint> for PointJson {
    fn from(p: &ChartPoint) -> Self {
        match *p {
            ChartPoint::Cell(c) => PointJson::Cell {
                cell: c.cell,
                x: c.x.into(),
                y: c.y.into(),
            },
            ChartPoint::Whisker { whisker, offset } => PointJson::Whisker {
                whisker,
                offset: offset.into(),
            },
        }
    }
}

/// Parses `cell,x,y` or `w<index>,offset`, e.g. `0,1/4,1/2` or `w1,1/2`.
pub fn parse_point(s: &str) -> Result<ChartPoint, FormatError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || FormatError::Invalid(format!("bad point {s:?}; expected cell,x,y or wN,offset"));
    match parts.as_slice() {
        [w, off] if w.starts_with('w') => {
            let i = w[1..].parse().map_err(|_| bad())?;
            Ok(ChartPoint::whisker(i, rat(off)?))
        }
        [c, x, y] => Ok(ChartPoint::cell(
            c.parse().map_err(|_| bad())?,
            rat(x)?,
            rat(y)?,
        )),
        _ => Err(bad()),
    }
}

// --------------------------------------------------------------- complex

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct GluingJson {
    pub a: [usize; 2],
    pub b: [usize; 2],
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct AttachJson {
    pub cell: usize,
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct WhiskerJson {
    pub attach: AttachJson,
    pub length: String,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct ComplexJson {
    pub side: String,
    pub cells: usize,
    #[serde(default)]
    pub gluings: Vec<GluingJson>,
    #[serde(default)]
    pub whiskers: Vec<WhiskerJson>,
    /// Designated points (one per graph vertex for built complexes).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub designated: Vec<PointJson>,
}

fn side_ref(pair: [usize; 2]) -> Result<SideRef, FormatError> {
    if pair[1] >= 4 {
        return Err(FormatError::BadSide(pair[1]));
    }
    Ok(SideRef::new(pair[0], Side::from_index(pair[1])))
}

impl ComplexJson {
    pub fn from_complex(c: &QuadComplex, designated: &[ChartPoint]) -> Self {
        ComplexJson {
            side: rat_string(c.side()),
            cells: c.cell_count(),
            gluings: c
                .gluings()
                .iter()
                .map(|g| GluingJson {
                    a: [g.a.cell, g.a.side.index()],
                    b: [g.b.cell, g.b.side.index()],
                    reversed: g.reversed,
                })
                .collect(),
            whiskers: c
                .whiskers()
                .iter()
                .map(|w| WhiskerJson {
                    attach: AttachJson {
                        cell: w.attach.cell,
                        x: rat_string(w.attach.x),
                        y: rat_string(w.attach.y),
                    },
                    length: rat_string(w.length),
                })
                .collect(),
            designated: designated.iter().map(PointJson::from).collect(),
        }
    }

    pub fn to_complex(&self) -> Result<QuadComplex, FormatError> {
        let gluings = self
            .gluings
            .iter()
            .map(|g| {
                Ok(Gluing {
                    a: side_ref(g.a)?,
                    b: side_ref(g.b)?,
                    reversed: g.reversed,
                })
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        let whiskers = self
            .whiskers
            .iter()
            .map(|w| {
                Ok(Whisker {
                    attach: CellPoint::new(w.attach.cell, rat(&w.attach.x)?, rat(&w.attach.y)?),
                    length: rat(&w.length)?,
                })
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(QuadComplex::new(
            rat(&self.side)?,
            self.cells,
            gluings,
            whiskers,
        )?)
    }

    pub fn designated_points(&self) -> Result<Vec<ChartPoint>, FormatError> {
        self.designated.iter().map(PointJson::to_point).collect()
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Reads a complex file and validates it as an orbifold.
pub fn load_orbifold(path: &Path) -> Result<(Orbifold, Vec<ChartPoint>), LoadError> {
    let json = ComplexJson::parse(&read_file(path)?)?;
    let complex = json.to_complex()?;
    let points = json.designated_points()?;
    let orb = Orbifold::new(complex).map_err(LoadError::Invalid)?;
    Ok((orb, points))
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("complex is not a Manhattan orbifold: {0}")]
    Invalid(orbifold_core::complex::ValidationReport),
}

// ----------------------------------------------------------------- graph

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct GraphJson {
    pub vertices: Vec<usize>,
    /// Neighbours of each vertex in clockwise order, keyed by vertex id.
    pub rotation: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_face: Option<Vec<usize>>,
}

impl GraphJson {
    pub fn from_graph(g: &EmbeddedGraph) -> Self {
        GraphJson {
            vertices: (0..g.vertex_count()).collect(),
            rotation: (0..g.vertex_count())
                .map(|v| (v.to_string(), g.neighbors(v).to_vec()))
                .collect(),
            outer_face: Some(g.outer_face().to_vec()),
        }
    }

    /// Builds the embedded graph; vertex ids are renumbered by their
    /// position in `vertices`. Returns the graph and the original ids.
    pub fn to_graph(&self) -> Result<(EmbeddedGraph, Vec<usize>), FormatError> {
        let index: BTreeMap<usize, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        if index.len() != self.vertices.len() {
            return Err(FormatError::Invalid("duplicate vertex ids".into()));
        }
        let lookup = |v: usize| {
            index
                .get(&v)
                .copied()
                .ok_or_else(|| FormatError::Invalid(format!("unknown vertex {v}")))
        };
        let mut rotation = vec![Vec::new(); self.vertices.len()];
        for (key, nbrs) in &self.rotation {
            let v: usize = key
                .parse()
                .map_err(|_| FormatError::Invalid(format!("bad vertex key {key:?}")))?;
            rotation[lookup(v)?] = nbrs.iter().map(|&w| lookup(w)).collect::<Result<_, _>>()?;
        }
        let outer = match &self.outer_face {
            Some(f) => Some(
                f.iter()
                    .map(|&w| lookup(w))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        let g = EmbeddedGraph::new(rotation, outer.as_deref())
            .map_err(|e| FormatError::Invalid(e.to_string()))?;
        Ok((g, self.vertices.clone()))
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }
}

// ---------------------------------------------------------------- metric

pub fn parse_metric(text: &str) -> Result<Vec<Vec<Q>>, FormatError> {
    let raw: Vec<Vec<RatJson>> = serde_json::from_str(text)?;
    Ok(raw
        .iter()
        .map(|row| {
            row.iter()
                .map(RatJson::value)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?)
}

pub fn metric_json(d: &[Vec<Q>]) -> Vec<Vec<String>> {
    d.iter()
        .map(|r| r.iter().map(|&x| rat_string(x)).collect())
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanReportJson {
    pub points: usize,
    pub dimension: usize,
    pub bounded_faces: usize,
    pub extreme_points: Vec<Vec<String>>,
    pub extreme_points_in_span: bool,
    pub canonical_isometric: bool,
}

impl From<&SpanReport> for SpanReportJson {
    fn from(r: &SpanReport) -> Self {
        SpanReportJson {
            points: r.points,
            dimension: r.dimension,
            bounded_faces: r.bounded_faces,
            extreme_points: metric_json(&r.extreme_points),
            extreme_points_in_span: r.extreme_points_in_span,
            canonical_isometric: r.canonical_isometric,
        }
    }
}

// -------------------------------------------------------------- distance

#[derive(Clone, Debug, Serialize)]
pub struct CrossingJson {
    pub edge: usize,
    pub param: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LegJson {
    Cell {
        cell: usize,
        from: [String; 2],
        to: [String; 2],
    },
    Whisker {
        whisker: usize,
        from: String,
        to: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceJson {
    pub distance: String,
    pub cells: Vec<usize>,
    pub crossings: Vec<CrossingJson>,
    pub legs: Vec<LegJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleJson {
    pub m: usize,
    pub value: String,
    pub cells_traversed: usize,
    pub snap_error: String,
}

impl From<&DistanceResult> for DistanceJson {
    fn from(r: &DistanceResult) -> Self {
        let pair = |(x, y): (Q, Q)| [rat_string(x), rat_string(y)];
        DistanceJson {
            distance: rat_string(r.distance),
            cells: r.cells.clone(),
            crossings: r
                .crossings
                .iter()
                .map(|c: &Crossing| CrossingJson {
                    edge: c.edge,
                    param: rat_string(c.param),
                })
                .collect(),
            legs: r
                .legs
                .iter()
                .map(|l| match *l {
                    Leg::Cell { cell, from, to } => LegJson::Cell {
                        cell,
                        from: pair(from),
                        to: pair(to),
                    },
                    Leg::Whisker { whisker, from, to } => LegJson::Whisker {
                        whisker,
                        from: rat_string(from),
                        to: rat_string(to),
                    },
                })
                .collect(),
            oracle: Vec::new(),
        }
    }
}

// ------------------------------------------------------------- embedding

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum PlacementJson {
    Point(PointJson),
    Dyadic { x: String, y: String },
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct EmbeddingJson {
    /// `"dyadic"` or `"complex:<file>"`, the file relative to the embedding.
    pub backend: String,
    /// Neighbours of each vertex, keyed by vertex id `0..n`.
    pub adjacency: BTreeMap<String, Vec<usize>>,
    pub placement: BTreeMap<String, PlacementJson>,
}

pub enum Backend {
    Dyadic(Vec<DyadicPoint>),
    Complex(Box<Orbifold>, Vec<ChartPoint>),
}

pub struct Embedding {
    pub adjacency: Vec<Vec<usize>>,
    pub backend: Backend,
}

fn keyed<T: Clone>(map: &BTreeMap<String, T>, what: &str) -> Result<Vec<T>, FormatError> {
    let mut out: Vec<Option<T>> = vec![None; map.len()];
    for (k, v) in map {
        let i: usize = k.parse().ok().filter(|&i| i < map.len()).ok_or_else(|| {
            FormatError::Invalid(format!(
                "{what} key {k:?} is not a vertex in 0..{}",
                map.len()
            ))
        })?;
        out[i] = Some(v.clone());
    }
    Ok(out
        .into_iter()
        .map(|x| x.expect("keys are distinct"))
        .collect())
}

impl EmbeddingJson {
    pub fn load(path: &Path) -> Result<Embedding, LoadError> {
        let json: EmbeddingJson =
            serde_json::from_str(&read_file(path)?).map_err(FormatError::from)?;
        let adjacency = keyed(&json.adjacency, "adjacency")?;
        let placement = keyed(&json.placement, "placement")?;
        if placement.len() != adjacency.len() {
            return Err(FormatError::Invalid("placement and adjacency sizes differ".into()).into());
        }
        let backend = if json.backend == "dyadic" {
            let pts = placement
                .iter()
                .map(|p| match p {
                    PlacementJson::Dyadic { x, y } => {
                        let node = |s: &str| {
                            s.parse::<TreeNode>()
                                .map_err(|e| FormatError::Invalid(e.to_string()))
                        };
                        DyadicPoint::new(node(x)?, node(y)?)
                            .map_err(|e| FormatError::Invalid(e.to_string()))
                    }
                    PlacementJson::Point(_) => Err(FormatError::Invalid(
                        "dyadic backend needs x/y bit strings".into(),
                    )),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Backend::Dyadic(pts)
        } else if let Some(file) = json.backend.strip_prefix("complex:") {
            let base = path.parent().unwrap_or(Path::new("."));
            let (orb, _) = load_orbifold(&base.join(file))?;
            let pts = placement
                .iter()
                .map(|p| match p {
                    PlacementJson::Point(p) => p.to_point(),
                    PlacementJson::Dyadic { .. } => Err(FormatError::Invalid(
                        "complex backend needs chart points".into(),
                    )),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Backend::Complex(Box::new(orb), pts)
        } else {
            return Err(FormatError::Invalid(format!("unknown backend {:?}", json.backend)).into());
        };
        Ok(Embedding { adjacency, backend })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use orbifold_core::constructions::{cliquegraph_span, house_span, two_triangles, wheel_span};

    #[test]
    fn complex_round_trip_is_exact() {
        for b in [
            wheel_span(5).unwrap(),
            cliquegraph_span(&two_triangles()).unwrap(),
            house_span(),
        ] {
            let json = ComplexJson::from_complex(b.orbifold.complex(), &b.points);
            let text = serde_json::to_string(&json).unwrap();
            let back = ComplexJson::parse(&text).unwrap();
            assert_eq!(back, json);
            assert_eq!(&back.to_complex().unwrap(), b.orbifold.complex());
            assert_eq!(back.designated_points().unwrap(), b.points);
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
    }

    #[test]
    fn rationals_must_be_canonical() {
        assert!(rat("2/4").is_err());
        assert!(rat("3/1").is_err());
        assert_eq!(rat("-3/4").unwrap(), Q::new(-3, 4));
        assert_eq!(RatJson::Int(3).value().unwrap(), Q::from(3));
    }

    #[test]
    fn point_syntax() {
        assert_eq!(
            parse_point("2,1/4,1").unwrap(),
            ChartPoint::cell(2, Q::new(1, 4), Q::from(1))
        );
        assert_eq!(
            parse_point("w1,1/2").unwrap(),
            ChartPoint::whisker(1, Q::new(1, 2))
        );
        assert!(parse_point("1,2").is_err());
    }

    #[test]
    fn graph_ids_are_renumbered() {
        let json = GraphJson::parse(
            r#"{"vertices":[10,20,30],"rotation":{"10":[20,30],"20":[30,10],"30":[10,20]}}"#,
        )
        .unwrap();
        let (g, ids) = json.to_graph().unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(ids, vec![10, 20, 30]);
        let again = GraphJson::from_graph(&g).to_graph().unwrap().0;
        assert_eq!(again.edges(), g.edges());
    }
}
