//! Helly witnesses for families of balls.
//!
//! A witness for balls `B(c_i, r_i)` is a point `x` minimizing the excess
//! `max_i d(x, c_i) − r_i`. The search scans the lattice of every cell and
//! whisker at resolution `m0`, then doubles the resolution `levels` times,
//! each time rescanning only the units whose lattice minimum is within
//! `side/m` of the best value. The excess is 1-Lipschitz and every point of
//! a unit lies within `side/m` of a lattice point, so no unit holding the
//! true minimum is ever dropped.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::{ChartPoint, Orbifold};
use crate::geodesic::{DistanceField, GeodesicError};
use crate::rational::{q, Q};

/// A closed ball `{ x : d(center, x) ≤ radius }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ball {
    pub center: ChartPoint,
    pub radius: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HellyError {
    #[error("balls {0} and {1} do not intersect")]
    PairwiseNotIntersecting(usize, usize),
    #[error("no balls given")]
    NoBalls,
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
}

/// Outcome of a witness search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HellyReport {
    pub point: ChartPoint,
    /// `max_i d(point, c_i) − r_i`.
    pub excess: Q,
    /// Best excess after each level (index 0 is the initial scan).
    pub level_excess: Vec<Q>,
    pub m_final: usize,
    /// Largest witness cell count from `point` to a center.
    pub max_cells_traversed: usize,
    /// `4 · (side / m_final) · max_cells_traversed`.
    pub tau: Q,
}

impl HellyReport {
    pub fn is_witness(&self) -> bool {
        self.excess <= self.tau
    }
}

/// Whether two balls meet; in a geodesic space this is
/// `d(c1, c2) ≤ r1 + r2`.
pub fn balls_intersect(orb: &Orbifold, a: &Ball, b: &Ball) -> Result<bool, GeodesicError> {
    let d = DistanceField::new(orb, &a.center)?.distance(&b.center)?;
    Ok(d <= a.radius + b.radius)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Unit {
    Cell(usize),
    Whisker(usize),
}

fn unit_points(orb: &Orbifold, unit: Unit, m: usize) -> Vec<ChartPoint> {
    let step = orb.side() / Q::from(m as i64);
    let at = |i: usize| step * Q::from(i as i64);
    match unit {
        Unit::Cell(c) => {
            let mut out = Vec::with_capacity((m + 1) * (m + 1));
            for i in 0..=m {
                for j in 0..=m {
                    out.push(ChartPoint::cell(c, at(i), at(j)));
                }
            }
            out
        }
        Unit::Whisker(w) => {
            let len = orb.whiskers()[w].length;
            let mut out: Vec<ChartPoint> = (1..)
                .map(at)
                .take_while(|&o| o < len)
                .map(|o| ChartPoint::whisker(w, o))
                .collect();
            out.push(ChartPoint::whisker(w, len));
            out
        }
    }
}

fn units(orb: &Orbifold) -> Vec<Unit> {
    (0..orb.cell_count())
        .map(Unit::Cell)
        .chain((0..orb.whiskers().len()).map(Unit::Whisker))
        .collect()
}

/// Distinct lattice points of the whole complex at resolution `m`, in
/// canonical form.
pub fn lattice_points(orb: &Orbifold, m: usize) -> Vec<ChartPoint> {
    let mut set = BTreeSet::new();
    for u in units(orb) {
        for p in unit_points(orb, u, m) {
            set.insert(orb.canonicalize(&p).expect("lattice points are in bounds"));
        }
    }
    set.into_iter().collect()
}

/// Searches for a point in (or near) all of `balls`.
pub fn helly_witness(
    orb: &Orbifold,
    balls: &[Ball],
    m0: usize,
    levels: usize,
) -> Result<HellyReport, HellyError> {
    if balls.is_empty() {
        return Err(HellyError::NoBalls);
    }
    let fields = balls
        .iter()
        .map(|b| DistanceField::new(orb, &b.center))
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            if fields[i].distance(&balls[j].center)? > balls[i].radius + balls[j].radius {
                return Err(HellyError::PairwiseNotIntersecting(i, j));
            }
        }
    }
    let excess = |p: &ChartPoint| -> Result<Q, GeodesicError> {
        let mut worst: Option<Q> = None;
        for (f, b) in fields.iter().zip(balls) {
            let e = f.distance(p)? - b.radius;
            worst = Some(worst.map_or(e, |w: Q| w.max(e)));
        }
        Ok(worst.expect("nonempty"))
    };

    let s = orb.side();
    let mut candidates = units(orb);
    let mut m = m0.max(1);
    let mut best: Option<(Q, ChartPoint)> = None;
    let mut level_excess = Vec::with_capacity(levels + 1);
    for level in 0..=levels {
        let mut unit_min = Vec::with_capacity(candidates.len());
        for &u in &candidates {
            let mut lo: Option<Q> = None;
            for p in unit_points(orb, u, m) {
                let e = excess(&p)?;
                lo = Some(lo.map_or(e, |l: Q| l.min(e)));
                if best.is_none_or(|(b, _)| e < b) {
                    best = Some((e, p));
                }
            }
            unit_min.push(lo.expect("units have lattice points"));
        }
        let (b, _) = best.expect("some unit scanned");
        level_excess.push(b);
        if level == levels {
            break;
        }
        if b <= Q::from(0) {
            // already inside every ball; finer lattices cannot do better
            level_excess.resize(levels + 1, b);
            break;
        }
        let slack = s / Q::from(m as i64);
        candidates = candidates
            .iter()
            .zip(&unit_min)
            .filter(|(_, &lo)| lo <= b + slack)
            .map(|(&u, _)| u)
            .collect();
        m *= 2;
    }
    let m_final = m0.max(1) << levels;
    let (excess, point) = best.expect("some unit scanned");
    let point = orb.canonicalize(&point).expect("in bounds");
    let mut max_cells = 1;
    for f in &fields {
        max_cells = max_cells.max(f.witness(&point)?.cells_traversed());
    }
    let tau = Q::from(4) * s / Q::from(m_final as i64) * Q::from(max_cells as i64);
    Ok(HellyReport {
        point,
        excess,
        level_excess,
        m_final,
        max_cells_traversed: max_cells,
        tau,
    })
}

/// Random pairwise-intersecting triple: centers uniform over `lattice`,
/// radius `r_i = u_i · (d_ij + d_ik) / 2` with `u_i ∈ {8/16, …, 16/16}`,
/// resampled until the three balls meet pairwise.
pub fn random_triple<R: Rng>(
    orb: &Orbifold,
    lattice: &[ChartPoint],
    rng: &mut R,
) -> Result<[Ball; 3], GeodesicError> {
    loop {
        let c = [
            lattice[rng.gen_range(0..lattice.len())],
            lattice[rng.gen_range(0..lattice.len())],
            lattice[rng.gen_range(0..lattice.len())],
        ];
        let f0 = DistanceField::new(orb, &c[0])?;
        let f1 = DistanceField::new(orb, &c[1])?;
        let d01 = f0.distance(&c[1])?;
        let d02 = f0.distance(&c[2])?;
        let d12 = f1.distance(&c[2])?;
        let sums = [d01 + d02, d01 + d12, d02 + d12];
        let mut r = [Q::from(0); 3];
        for i in 0..3 {
            let u = q(rng.gen_range(8..=16), 16);
            r[i] = u * sums[i] / Q::from(2);
        }
        if d01 <= r[0] + r[1] && d02 <= r[0] + r[2] && d12 <= r[1] + r[2] {
            return Ok([0, 1, 2].map(|i| Ball {
                center: c[i],
                radius: r[i],
            }));
        }
    }
}

/// One randomized trial, reproducible from `(seed, index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trial {
    pub index: u64,
    pub balls: [Ball; 3],
    pub report: HellyReport,
}

pub fn run_trial(
    orb: &Orbifold,
    lattice: &[ChartPoint],
    seed: u64,
    index: u64,
    m0: usize,
    levels: usize,
) -> Result<Trial, HellyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let balls = random_triple(orb, lattice, &mut rng)?;
    let report = helly_witness(orb, &balls, m0, levels)?;
    Ok(Trial {
        index,
        balls,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::QuadComplex;
    use crate::constructions::wheel_span;
    use crate::rational::qi;

    fn unit_square() -> Orbifold {
        Orbifold::new(QuadComplex::new(qi(1), 1, alloc::vec![], alloc::vec![]).unwrap()).unwrap()
    }

    #[test]
    fn intersection_examples() {
        let o = unit_square();
        let ball = |x, y, r| Ball {
            center: ChartPoint::cell(0, qi(x), qi(y)),
            radius: r,
        };
        assert!(balls_intersect(&o, &ball(0, 0, qi(1)), &ball(0, 0, q(1, 3))).unwrap());
        assert!(balls_intersect(&o, &ball(0, 0, qi(1)), &ball(1, 1, qi(1))).unwrap());
        assert!(!balls_intersect(&o, &ball(0, 0, qi(1)), &ball(1, 1, q(1, 2))).unwrap());
    }

    #[test]
    fn concentric_balls() {
        let o = unit_square();
        let c = ChartPoint::cell(0, q(1, 2), q(1, 4));
        let balls = [qi(0), q(1, 2), qi(1)].map(|r| Ball {
            center: c,
            radius: r,
        });
        let r = helly_witness(&o, &balls, 8, 3).unwrap();
        assert_eq!(r.excess, qi(0));
        assert_eq!(r.point, c);
    }

    #[test]
    fn three_corners() {
        let o = unit_square();
        let corner = |x, y| ChartPoint::cell(0, qi(x), qi(y));
        let balls = [
            Ball {
                center: corner(0, 0),
                radius: qi(1) / 2,
            },
            Ball {
                center: corner(1, 0),
                radius: qi(1) / 2,
            },
            Ball {
                center: corner(1, 1),
                radius: qi(1) / 2,
            },
        ];
        assert_eq!(
            helly_witness(&o, &balls, 8, 3),
            Err(HellyError::PairwiseNotIntersecting(0, 2))
        );
        let balls = [
            Ball {
                center: corner(0, 0),
                radius: qi(1),
            },
            Ball {
                center: corner(1, 0),
                radius: q(1, 2),
            },
            Ball {
                center: corner(1, 1),
                radius: qi(1),
            },
        ];
        let r = helly_witness(&o, &balls, 8, 3).unwrap();
        assert!(r.is_witness());
        assert!(r.level_excess.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn wheel_trials() {
        let b = wheel_span(5).unwrap();
        let lattice = lattice_points(&b.orbifold, 8);
        for i in 0..20 {
            let t = run_trial(&b.orbifold, &lattice, 7, i, 8, 3).unwrap();
            assert!(t.report.is_witness(), "trial {i}: {:?}", t.report);
        }
    }
}
