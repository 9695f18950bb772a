//! Manhattan orbifolds: surfaces glued from axis-aligned L1 squares, with
//! cone points of negative angular excess.
//!
//! The crate is `no_std` (it needs `alloc`) and purely algorithmic. It covers
//!
//! * [`complex`]: the glued-square data model, its validation and point
//!   canonicalization;
//! * [`geodesic`] and [`grid`]: exact point-to-point distances and an
//!   independent lattice oracle;
//! * [`graph`] and [`constructions`]: plane graphs and the complexes built
//!   from them (median complexes of squaregraphs, cliquegraph spans, wheels,
//!   rectilinear cones, patches of the {4,5} tiling);
//! * [`tightspan`]: tight spans of small finite metrics;
//! * [`helly`]: Helly witnesses for families of balls;
//! * [`dyadic`]: the dyadic tree metric space and greedy routing;
//! * [`hyperbolic`]: Poincaré-disk coordinates for the {4,5} tiling and the
//!   distortion experiment.
//!
//! All arithmetic is exact ([`Q`]) except in [`hyperbolic`].
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod complex;
pub mod constructions;
pub mod dyadic;
pub mod geodesic;
pub mod graph;
pub mod grid;
pub mod helly;
pub mod hyperbolic;
pub mod rational;
pub mod tightspan;
mod union_find;

pub use complex::{
    CellPoint, ChartPoint, Gluing, Orbifold, QuadComplex, Side, SideRef, ValidationReport,
    VertexInfo, VertexKind, Violation, Whisker,
};
pub use constructions::BuiltComplex;
pub use geodesic::{exact_distance, DistanceField, DistanceResult};
pub use graph::{EmbeddedGraph, FaceList};
pub use rational::Q;
