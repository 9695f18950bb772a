//! SVG figures: plane graphs drawn with a barycentric layout, and nets of
//! square complexes unfolded along a spanning tree of the dual graph.

use std::collections::VecDeque;
use std::fmt::Write;

use orbifold_core::complex::{corner_xy, Side, SideRef};
use orbifold_core::graph::EmbeddedGraph;
use orbifold_core::rational::to_f64;
use orbifold_core::Orbifold;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;

/// Outer face on a circle, every other vertex at the average of its
/// neighbours.
pub fn barycentric_layout(g: &EmbeddedGraph) -> Vec<(f64, f64)> {
    let n = g.vertex_count();
    let mut pos = vec![(0.0, 0.0); n];
    let mut fixed = vec![false; n];
    let outer = g.outer_face();
    let k = outer.len();
    for (i, &v) in outer.iter().enumerate() {
        // the outer face is traced clockwise; go around the circle the same way
        let a = -2.0 * std::f64::consts::PI * i as f64 / k as f64;
        pos[v] = (a.cos(), a.sin());
        fixed[v] = true;
    }
    for _ in 0..20 * n + 100 {
        let mut moved: f64 = 0.0;
        for v in 0..n {
            if fixed[v] || g.degree(v) == 0 {
                continue;
            }
            let (mut x, mut y) = (0.0, 0.0);
            for &w in g.neighbors(v) {
                x += pos[w].0;
                y += pos[w].1;
            }
            let d = g.degree(v) as f64;
            let next = (x / d, y / d);
            moved = moved.max((next.0 - pos[v].0).abs() + (next.1 - pos[v].1).abs());
            pos[v] = next;
        }
        if moved < 1e-9 {
            break;
        }
    }
    pos
}

struct Frame {
    min: (f64, f64),
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
        for (x, y) in points {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
        if lo.0 > hi.0 {
            lo = (0.0, 0.0);
            hi = (1.0, 1.0);
        }
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
        Frame {
            min: lo,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    /// Flips y so the picture matches the usual orientation.
    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            MARGIN + (x - self.min.0) * self.scale,
            SIZE - MARGIN - (y - self.min.1) * self.scale,
        )
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">
<rect width="100%" height="100%" fill="white"/>"#
    );
}

pub fn graph_svg(g: &EmbeddedGraph) -> String {
    let pos = barycentric_layout(g);
    let frame = Frame::fit(pos.iter().copied());
    let mut out = String::new();
    header(&mut out);
    out.push_str("<g stroke=\"black\" stroke-width=\"1.5\">\n");
    for (u, v) in g.edges() {
        let (a, b) = (frame.map(pos[u]), frame.map(pos[v]));
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            a.0, a.1, b.0, b.1
        );
    }
    out.push_str("</g>\n<g font-family=\"sans-serif\" font-size=\"10\">\n");
    for (v, &p) in pos.iter().enumerate() {
        let (x, y) = frame.map(p);
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="white" stroke="black"/><text x="{:.2}" y="{:.2}">{v}</text>"#,
            x + 5.0,
            y - 5.0
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Orthogonal map of a cell chart into the plane: `p ↦ m·p + t`.
#[derive(Clone, Copy, Debug)]
struct Placement {
    m: [[i32; 2]; 2],
    t: (f64, f64),
}

impl Placement {
    fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            self.m[0][0] as f64 * x + self.m[0][1] as f64 * y + self.t.0,
            self.m[1][0] as f64 * x + self.m[1][1] as f64 * y + self.t.1,
        )
    }

    fn linear(&self, (x, y): (i32, i32)) -> (i32, i32) {
        (
            self.m[0][0] * x + self.m[0][1] * y,
            self.m[1][0] * x + self.m[1][1] * y,
        )
    }
}

fn corner(s: f64, k: usize) -> (f64, f64) {
    let (x, y) = corner_xy(orbifold_core::Q::from(1), k % 4);
    (to_f64(x) * s, to_f64(y) * s)
}

/// Unit direction of a side (start corner to end corner) and its inward
/// normal, in integer chart coordinates.
fn side_frame(side: Side) -> ((i32, i32), (i32, i32)) {
    match side {
        Side::East => ((0, 1), (-1, 0)),
        Side::North => ((-1, 0), (0, -1)),
        Side::West => ((0, -1), (1, 0)),
        Side::South => ((1, 0), (0, 1)),
    }
}

const ORTHOGONAL: [[[i32; 2]; 2]; 8] = [
    [[1, 0], [0, 1]],
    [[0, -1], [1, 0]],
    [[-1, 0], [0, -1]],
    [[0, 1], [-1, 0]],
    [[1, 0], [0, -1]],
    [[-1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1], [-1, 0]],
];

/// Places the cell behind side `b` so that it lies across side `a` of an
/// already placed cell.
fn place_across(s: f64, pa: &Placement, a: Side, b: Side, reversed: bool) -> Placement {
    let (da, na) = side_frame(a);
    let (db, nb) = side_frame(b);
    let da = pa.linear(da);
    let na = pa.linear(na);
    // non-reversed gluings run the two sides in opposite directions
    let want_d = if reversed { da } else { (-da.0, -da.1) };
    let want_n = (-na.0, -na.1);
    let m = *ORTHOGONAL
        .iter()
        .find(|m| {
            let p = Placement {
                m: **m,
                t: (0.0, 0.0),
            };
            p.linear(db) == want_d && p.linear(nb) == want_n
        })
        .expect("some orthogonal map matches");
    let anchor_a = pa.apply(corner(
        s,
        if reversed {
            a.start_corner()
        } else {
            a.end_corner()
        },
    ));
    let rot = Placement { m, t: (0.0, 0.0) };
    let local = rot.apply(corner(s, b.start_corner()));
    Placement {
        m,
        t: (anchor_a.0 - local.0, anchor_a.1 - local.1),
    }
}

pub fn complex_net_svg(orb: &Orbifold) -> String {
    let s = to_f64(orb.side());
    let n = orb.cell_count();
    let mut placed: Vec<Option<Placement>> = vec![None; n];
    let mut tree_sides = Vec::new();
    let mut offset = 0.0;
    for root in 0..n {
        if placed[root].is_some() {
            continue;
        }
        placed[root] = Some(Placement {
            m: ORTHOGONAL[0],
            t: (offset, 0.0),
        });
        offset += 2.0 * s;
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            let pc = placed[c].expect("queued cells are placed");
            for side in Side::ALL {
                if let Some((other, reversed)) = orb.partner(SideRef::new(c, side)) {
                    if placed[other.cell].is_none() {
                        placed[other.cell] = Some(place_across(s, &pc, side, other.side, reversed));
                        tree_sides.push((c, side));
                        queue.push_back(other.cell);
                    }
                }
            }
        }
    }
    let placed: Vec<Placement> = placed.into_iter().map(|p| p.expect("all placed")).collect();
    let mut whisker_lines = Vec::new();
    for w in orb.whiskers() {
        let p = &placed[w.attach.cell];
        let (x, y) = (to_f64(w.attach.x), to_f64(w.attach.y));
        let centre = p.apply((s / 2.0, s / 2.0));
        let a = p.apply((x, y));
        let (dx, dy) = (a.0 - centre.0, a.1 - centre.1);
        let norm = (dx * dx + dy * dy).sqrt().max(1e-9);
        let len = to_f64(w.length);
        whisker_lines.push((a, (a.0 + dx / norm * len, a.1 + dy / norm * len)));
    }
    let frame = Frame::fit(
        placed
            .iter()
            .flat_map(|p| (0..4).map(move |k| p.apply(corner(s, k))))
            .chain(whisker_lines.iter().flat_map(|&(a, b)| [a, b])),
    );
    let mut out = String::new();
    header(&mut out);
    out.push_str("<g fill=\"#eef3fb\" stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"10\">\n");
    for (c, p) in placed.iter().enumerate() {
        let pts: Vec<String> = (0..4)
            .map(|k| {
                let (x, y) = frame.map(p.apply(corner(s, k)));
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let (cx, cy) = frame.map(p.apply((s / 2.0, s / 2.0)));
        let _ = writeln!(
            out,
            r#"<polygon points="{}"/><text x="{cx:.2}" y="{cy:.2}" fill="black" stroke="none" text-anchor="middle">{c}</text>"#,
            pts.join(" ")
        );
    }
    out.push_str("</g>\n<g stroke=\"#c03030\" stroke-width=\"1\" stroke-dasharray=\"4 3\">\n");
    for &(c, side) in &tree_sides {
        let p = &placed[c];
        let (a, b) = (
            frame.map(p.apply(corner(s, side.start_corner()))),
            frame.map(p.apply(corner(s, side.end_corner()))),
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            a.0, a.1, b.0, b.1
        );
    }
    out.push_str("</g>\n<g stroke=\"#206020\" stroke-width=\"2\">\n");
    for &(a, b) in &whisker_lines {
        let (a, b) = (frame.map(a), frame.map(b));
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            a.0, a.1, b.0, b.1
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
