//! Poincaré-disk coordinates for the {4,5} tiling and the distortion of
//! graph distance against hyperbolic distance.
//!
//! This is the only floating-point module.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Div, Mul, Sub};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::constructions::Tess45;
use crate::graph::bfs;

/// Placement tolerance for edge lengths and angles.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum HyperbolicError {
    #[error("edge {u}-{v} has length {length}, expected {expected}")]
    NumericalDrift {
        u: usize,
        v: usize,
        length: f64,
        expected: f64,
    },
    #[error("vertex {0} is placed inconsistently by two faces")]
    InconsistentPlacement(usize),
    #[error("patch needs at least {0} rings")]
    TooFewRings(usize),
}

/// A point of the Poincaré disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint {
    pub u: f64,
    pub v: f64,
}

impl Add for HPoint {
    type Output = HPoint;
    fn add(self, o: HPoint) -> HPoint {
        HPoint::new(self.u + o.u, self.v + o.v)
    }
}

impl Sub for HPoint {
    type Output = HPoint;
    fn sub(self, o: HPoint) -> HPoint {
        HPoint::new(self.u - o.u, self.v - o.v)
    }
}

impl Mul for HPoint {
    type Output = HPoint;
    fn mul(self, o: HPoint) -> HPoint {
        HPoint::new(self.u * o.u - self.v * o.v, self.u * o.v + self.v * o.u)
    }
}

impl Div for HPoint {
    type Output = HPoint;
    fn div(self, o: HPoint) -> HPoint {
        let n = o.norm_sqr();
        HPoint::new(
            (self.u * o.u + self.v * o.v) / n,
            (self.v * o.u - self.u * o.v) / n,
        )
    }
}

impl HPoint {
    pub const ORIGIN: HPoint = HPoint { u: 0.0, v: 0.0 };

    pub fn new(u: f64, v: f64) -> Self {
        HPoint { u, v }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        HPoint::new(r * libm::cos(theta), r * libm::sin(theta))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u * self.u + self.v * self.v
    }

    fn conj(self) -> HPoint {
        HPoint::new(self.u, -self.v)
    }

    fn arg(self) -> f64 {
        libm::atan2(self.v, self.u)
    }
}

const ONE: HPoint = HPoint { u: 1.0, v: 0.0 };

/// `z ↦ (z − p) / (1 − p̄ z)`: the disk isometry sending `p` to the origin.
fn to_origin(p: HPoint, z: HPoint) -> HPoint {
    (z - p) / (ONE - p.conj() * z)
}

fn from_origin(p: HPoint, w: HPoint) -> HPoint {
    (w + p) / (ONE + p.conj() * w)
}

/// Reflection of `z` in the geodesic through `a` and `b`.
pub fn reflect(a: HPoint, b: HPoint, z: HPoint) -> HPoint {
    let theta = to_origin(a, b).arg();
    let w = to_origin(a, z);
    let rot = HPoint::polar(1.0, 2.0 * theta);
    from_origin(a, rot * w.conj())
}

pub fn hyperbolic_distance(p: HPoint, q: HPoint) -> f64 {
    let d = (p - q).norm_sqr();
    let x = 1.0 + 2.0 * d / ((1.0 - p.norm_sqr()) * (1.0 - q.norm_sqr()));
    libm::acosh(x.max(1.0))
}

/// Side length of the {4,5} square: `2·acosh(cos(π/4)/sin(π/5))`, from the
/// right triangle (centre, vertex, edge midpoint) with angles π/4 and π/5.
pub fn tile_side() -> f64 {
    2.0 * libm::acosh(libm::cos(PI / 4.0) / libm::sin(PI / 5.0))
}

/// Angle at `v` between the geodesics to `a` and `b`, in `[0, π]`.
pub fn angle_at(v: HPoint, a: HPoint, b: HPoint) -> f64 {
    let (a, b) = (to_origin(v, a), to_origin(v, b));
    let d = (b.arg() - a.arg()).abs();
    if d > PI {
        2.0 * PI - d
    } else {
        d
    }
}

/// Places the patch: the seed face as a regular square about the origin,
/// every other face by reflecting a placed neighbour across their shared
/// edge. Every edge is checked against [`tile_side`].
pub fn tess45_coordinates(t: &Tess45) -> Result<Vec<HPoint>, HyperbolicError> {
    let n = t.graph.vertex_count();
    let mut pos: Vec<Option<HPoint>> = vec![None; n];
    // circumradius R with cosh R = cot(π/5); disk radius tanh(R/2)
    let big_r = libm::acosh(1.0 / libm::tan(PI / 5.0));
    let r = libm::tanh(big_r / 2.0);
    for (k, &v) in t.faces[0].iter().enumerate() {
        pos[v] = Some(HPoint::polar(r, PI / 4.0 + k as f64 * PI / 2.0));
    }
    let faces = &t.faces;
    let mut edge_faces: alloc::collections::BTreeMap<(usize, usize), Vec<usize>> =
        Default::default();
    for (f, face) in faces.iter().enumerate() {
        for i in 0..4 {
            let (a, b) = (face[i], face[(i + 1) % 4]);
            edge_faces.entry((a.min(b), a.max(b))).or_default().push(f);
        }
    }
    let mut placed = vec![false; faces.len()];
    placed[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(g) = queue.pop_front() {
        let gf = faces[g];
        for i in 0..4 {
            let (a, b) = (gf[i], gf[(i + 1) % 4]);
            for &f in &edge_faces[&(a.min(b), a.max(b))] {
                if placed[f] {
                    continue;
                }
                let ff = faces[f];
                let (pa, pb) = (pos[a].unwrap(), pos[b].unwrap());
                for (k, &w) in ff.iter().enumerate() {
                    if w == a || w == b {
                        continue;
                    }
                    let prev = ff[(k + 3) % 4];
                    let next = ff[(k + 1) % 4];
                    let anchor = if prev == a || prev == b { prev } else { next };
                    // the vertex of g adjacent to the same anchor
                    let j = gf.iter().position(|&x| x == anchor).unwrap();
                    let (gp, gn) = (gf[(j + 3) % 4], gf[(j + 1) % 4]);
                    let src = if gp == a || gp == b { gn } else { gp };
                    let image = reflect(pa, pb, pos[src].unwrap());
                    match pos[w] {
                        None => pos[w] = Some(image),
                        Some(old) => {
                            if hyperbolic_distance(old, image) > TOLERANCE {
                                return Err(HyperbolicError::InconsistentPlacement(w));
                            }
                        }
                    }
                }
                placed[f] = true;
                queue.push_back(f);
            }
        }
    }
    let pos: Vec<HPoint> = pos
        .into_iter()
        .map(|p| p.expect("connected patch"))
        .collect();
    let a = tile_side();
    for (u, v) in t.graph.edges() {
        let length = hyperbolic_distance(pos[u], pos[v]);
        if (length - a).abs() > TOLERANCE {
            return Err(HyperbolicError::NumericalDrift {
                u,
                v,
                length,
                expected: a,
            });
        }
    }
    Ok(pos)
}

/// One vertex pair of a distortion experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub u: usize,
    pub v: usize,
    pub graph: usize,
    pub hyperbolic: f64,
}

impl Sample {
    pub fn ratio(&self) -> f64 {
        self.hyperbolic / self.graph as f64
    }
}

/// Ratios `d_hyp / d_graph` over vertex pairs at graph distance ≥ 2.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport {
    pub rings: usize,
    pub vertices: usize,
    pub pairs: usize,
    /// Least-squares `s` in `d_hyp ≈ s · d_graph`.
    pub scale: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Largest deviation of an edge's length from [`tile_side`].
    pub edge_error: f64,
}

impl DistortionReport {
    /// `ratio_max / ratio_min`.
    pub fn spread(&self) -> f64 {
        self.ratio_max / self.ratio_min
    }
}

#[derive(Default)]
struct Accumulator {
    pairs: usize,
    sxy: f64,
    sxx: f64,
    min: f64,
    max: f64,
}

impl Accumulator {
    fn add(&mut self, s: &Sample) {
        let (x, y) = (s.graph as f64, s.hyperbolic);
        let r = y / x;
        if self.pairs == 0 {
            self.min = r;
            self.max = r;
        } else {
            self.min = self.min.min(r);
            self.max = self.max.max(r);
        }
        self.pairs += 1;
        self.sxy += x * y;
        self.sxx += x * x;
    }
}

fn finish_report(t: &Tess45, pos: &[HPoint], rings: usize, acc: Accumulator) -> DistortionReport {
    let a = tile_side();
    let edge_error = t
        .graph
        .edges()
        .iter()
        .map(|&(u, v)| (hyperbolic_distance(pos[u], pos[v]) - a).abs())
        .fold(0.0, f64::max);
    DistortionReport {
        rings,
        vertices: pos.len(),
        pairs: acc.pairs,
        scale: if acc.sxx > 0.0 {
            acc.sxy / acc.sxx
        } else {
            0.0
        },
        ratio_min: acc.min,
        ratio_max: acc.max,
        edge_error,
    }
}

/// Distortion over every vertex pair at graph distance ≥ 2.
pub fn distortion_all_pairs(rings: usize) -> Result<DistortionReport, HyperbolicError> {
    if rings < 2 {
        return Err(HyperbolicError::TooFewRings(2));
    }
    let t = crate::constructions::tess45(rings);
    let pos = tess45_coordinates(&t)?;
    let adj = t.graph.rotation();
    let mut acc = Accumulator::default();
    for u in 0..pos.len() {
        let dist = bfs(adj, u);
        for v in u + 1..pos.len() {
            let g = dist[v].expect("connected patch");
            if g >= 2 {
                acc.add(&Sample {
                    u,
                    v,
                    graph: g,
                    hyperbolic: hyperbolic_distance(pos[u], pos[v]),
                });
            }
        }
    }
    Ok(finish_report(&t, &pos, rings, acc))
}

/// Distortion over `pairs` random vertex pairs at graph distance ≥ 2,
/// reproducible from `seed`.
pub fn distortion_sampled(
    rings: usize,
    pairs: usize,
    seed: u64,
) -> Result<(DistortionReport, Vec<Sample>), HyperbolicError> {
    if rings < 2 {
        return Err(HyperbolicError::TooFewRings(2));
    }
    let t = crate::constructions::tess45(rings);
    let pos = tess45_coordinates(&t)?;
    let adj = t.graph.rotation();
    let n = pos.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(pairs);
    let mut acc = Accumulator::default();
    while samples.len() < pairs {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let g = bfs(adj, u)[v].expect("connected patch");
        if g < 2 {
            continue;
        }
        let s = Sample {
            u,
            v,
            graph: g,
            hyperbolic: hyperbolic_distance(pos[u], pos[v]),
        };
        acc.add(&s);
        samples.push(s);
    }
    Ok((finish_report(&t, &pos, rings, acc), samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::tess45;

    #[test]
    fn side_length() {
        assert!((tile_side() - 1.2537).abs() < 1e-4);
    }

    #[test]
    fn distance_identities() {
        let p = HPoint::new(0.3, -0.2);
        assert_eq!(hyperbolic_distance(p, p), 0.0);
        let r: f64 = 0.6;
        let d = hyperbolic_distance(HPoint::ORIGIN, HPoint::new(r, 0.0));
        assert!((d - 2.0 * libm::atanh(r)).abs() < 1e-12);
    }

    #[test]
    fn reflection_is_an_isometry() {
        let (a, b) = (HPoint::new(0.1, 0.2), HPoint::new(-0.3, 0.4));
        let (z, w) = (HPoint::new(0.5, -0.1), HPoint::new(0.0, -0.6));
        let (rz, rw) = (reflect(a, b, z), reflect(a, b, w));
        assert!((hyperbolic_distance(z, w) - hyperbolic_distance(rz, rw)).abs() < 1e-12);
        assert!(hyperbolic_distance(reflect(a, b, a), a) < 1e-12);
        assert!(hyperbolic_distance(reflect(a, b, rz), z) < 1e-12);
    }

    #[test]
    fn seed_and_first_ring() {
        for rings in 0..3 {
            let t = tess45(rings);
            let pos = tess45_coordinates(&t).unwrap();
            assert!(pos.iter().all(|p| p.norm_sqr() < 1.0 - 1e-12));
        }
    }

    #[test]
    fn five_equal_angles_at_interior_vertices() {
        let t = tess45(2);
        let pos = tess45_coordinates(&t).unwrap();
        for v in 0..t.graph.vertex_count() {
            if !t.graph.is_interior_vertex(v) {
                continue;
            }
            let nb = t.graph.neighbors(v);
            assert_eq!(nb.len(), 5);
            for i in 0..5 {
                let angle = angle_at(pos[v], pos[nb[i]], pos[nb[(i + 1) % 5]]);
                assert!((angle - 2.0 * PI / 5.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let (a, sa) = distortion_sampled(2, 50, 3).unwrap();
        let (b, sb) = distortion_sampled(2, 50, 3).unwrap();
        assert_eq!(sa, sb);
        assert_eq!(a, b);
        assert!(a.ratio_min <= a.ratio_max);
    }
}
