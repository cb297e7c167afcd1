use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = (f64, f64);

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Shoelace area, positive for counterclockwise order.
pub fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    // relative to the first vertex to limit cancellation
    let o = v[0];
    (1..n - 1)
        .map(|i| {
            let (a, b) = ((v[i].0 - o.0, v[i].1 - o.1), (v[i + 1].0 - o.0, v[i + 1].1 - o.1));
            a.0 * b.1 - a.1 * b.0
        })
        .sum::<f64>()
        * 0.5
}

/// Convex polygon with counterclockwise vertices, or a single point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Validates convexity, counterclockwise order and positive area.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Degenerate(format!("{} vertices", vertices.len())));
        }
        let area = signed_area(&vertices);
        let scale = vertices.iter().fold(0.0f64, |m, p| m.max(p.0.abs()).max(p.1.abs())).max(1e-300);
        if area <= 1e-14 * scale * scale {
            return Err(Error::Degenerate(format!("area {area:e} is not positive")));
        }
        let n = vertices.len();
        for i in 0..n {
            let c = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if c < -1e-12 * scale * scale {
                return Err(Error::Degenerate("vertices are not convex in counterclockwise order".into()));
            }
        }
        Ok(Self { vertices })
    }

    pub fn point(p: Point) -> Self {
        Self { vertices: vec![p] }
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn translate(&self, d: Point) -> Self {
        Self { vertices: self.vertices.iter().map(|p| (p.0 + d.0, p.1 + d.1)).collect() }
    }

    /// -P.
    pub fn reflect(&self) -> Self {
        Self { vertices: self.vertices.iter().map(|p| (-p.0, -p.1)).collect() }
    }

    pub fn centroid_of_vertices(&self) -> Point {
        let n = self.vertices.len() as f64;
        let (x, y) = self.vertices.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        (x / n, y / n)
    }

    /// Closed-set membership with a relative tolerance.
    pub fn contains(&self, p: Point) -> bool {
        if self.is_point() {
            return self.vertices[0] == p;
        }
        let n = self.vertices.len();
        let tol = 1e-12 * self.bbox_scale();
        (0..n).all(|i| {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let len = (b.0 - a.0).hypot(b.1 - a.1);
            cross(a, b, p) >= -tol * len
        })
    }

    fn bbox_scale(&self) -> f64 {
        let (x0, x1, y0, y1) = self.bbox();
        (x1 - x0).max(y1 - y0)
    }

    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        self.vertices.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), p| (a.min(p.0), b.max(p.0), c.min(p.1), d.max(p.1)),
        )
    }

    /// [ymin, ymax] of the intersection with the vertical line at x.
    pub fn vertical_section(&self, x: f64) -> Option<(f64, f64)> {
        let n = self.vertices.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let (xmin, xmax) = (a.0.min(b.0), a.0.max(b.0));
            if x < xmin || x > xmax {
                continue;
            }
            if a.0 == b.0 {
                lo = lo.min(a.1.min(b.1));
                hi = hi.max(a.1.max(b.1));
            } else {
                let t = (x - a.0) / (b.0 - a.0);
                let y = a.1 + t * (b.1 - a.1);
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// Exact Minkowski sum by merging the edge sequences in angular order. A
/// single-point operand translates the other.
pub fn minkowski_sum(a: &ConvexPolygon, b: &ConvexPolygon) -> Result<ConvexPolygon> {
    if a.is_point() {
        return Ok(b.translate(a.vertices[0]));
    }
    if b.is_point() {
        return Ok(a.translate(b.vertices[0]));
    }
    let start = |v: &[Point]| {
        (0..v.len())
            .min_by(|&i, &j| v[i].1.total_cmp(&v[j].1).then(v[i].0.total_cmp(&v[j].0)))
            .expect("nonempty")
    };
    let (pa, pb) = (a.vertices(), b.vertices());
    let (sa, sb) = (start(pa), start(pb));
    let (na, nb) = (pa.len(), pb.len());
    let edge = |v: &[Point], s: usize, k: usize| {
        let n = v.len();
        let (p, q) = (v[(s + k) % n], v[(s + k + 1) % n]);
        (q.0 - p.0, q.1 - p.1)
    };
    let mut out = Vec::with_capacity(na + nb);
    let (mut i, mut j) = (0, 0);
    let mut cur = (pa[sa].0 + pb[sb].0, pa[sa].1 + pb[sb].1);
    while i < na || j < nb {
        out.push(cur);
        let step = if i == na {
            j += 1;
            edge(pb, sb, j - 1)
        } else if j == nb {
            i += 1;
            edge(pa, sa, i - 1)
        } else {
            let (ea, eb) = (edge(pa, sa, i), edge(pb, sb, j));
            let c = ea.0 * eb.1 - ea.1 * eb.0;
            if c > 0.0 {
                i += 1;
                ea
            } else if c < 0.0 {
                j += 1;
                eb
            } else {
                i += 1;
                j += 1;
                (ea.0 + eb.0, ea.1 + eb.1)
            }
        };
        cur = (cur.0 + step.0, cur.1 + step.1);
    }
    // drop collinear vertices
    let n = out.len();
    let scale = out.iter().fold(0.0f64, |m, p| m.max(p.0.abs()).max(p.1.abs()));
    let kept: Vec<Point> = (0..n)
        .filter(|&k| cross(out[(k + n - 1) % n], out[k], out[(k + 1) % n]).abs() > 1e-15 * scale * scale)
        .map(|k| out[k])
        .collect();
    ConvexPolygon::new(kept)
}

/// Sutherland–Hodgman clip of a convex subject against a convex clipper;
/// returns the vertices of the intersection (possibly empty).
pub fn clip(subject: &[Point], clipper: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = subject.to_vec();
    let n = clipper.len();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clipper[i], clipper[(i + 1) % n]);
        let input = std::mem::take(&mut out);
        let m = input.len();
        for k in 0..m {
            let (p, q) = (input[k], input[(k + 1) % m]);
            let (cp, cq) = (cross(a, b, p), cross(a, b, q));
            if cp >= 0.0 {
                out.push(p);
            }
            if (cp >= 0.0) != (cq >= 0.0) {
                let t = cp / (cp - cq);
                out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
            }
        }
    }
    out
}

pub fn intersection_area(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    signed_area(&clip(a.vertices(), b.vertices())).max(0.0)
}
