//! Exact planar geometry on rational points: convex polygons, half-plane
//! clipping, lattice-point counts, and convex hulls of integer points.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::certified::compare_sqrt_sum;
use crate::exactnum::Rat;

pub type Point = (Rat, Rat);

pub fn pt(x: impl Into<Rat>, y: impl Into<Rat>) -> Point {
    (x.into(), y.into())
}

fn cross(o: &Point, a: &Point, b: &Point) -> Rat {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// `a·x + b·y <= c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfPlane {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl HalfPlane {
    pub fn new(a: impl Into<Rat>, b: impl Into<Rat>, c: impl Into<Rat>) -> Self {
        HalfPlane {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    fn slack(&self, p: &Point) -> Rat {
        &self.c - &(&self.a * &p.0 + &self.b * &p.1)
    }
}

/// Convex polygon with counter-clockwise vertices and no three collinear.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Validates convexity; accepts either orientation, drops repeated and
    /// collinear vertices.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let mut v: Vec<Point> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        let v = drop_collinear(v);
        if v.len() < 3 {
            return Err(Error::input("polygon needs three non-collinear vertices"));
        }
        let n = v.len();
        let mut sign = 0;
        for i in 0..n {
            let c = cross(&v[i], &v[(i + 1) % n], &v[(i + 2) % n]).signum();
            if c != 0 {
                if sign == 0 {
                    sign = c;
                } else if c != sign {
                    return Err(Error::input("polygon is not convex"));
                }
            }
        }
        let mut v = v;
        if sign < 0 {
            v.reverse();
        }
        let poly = ConvexPolygon { vertices: v };
        // a star-shaped winding (e.g. a pentagram) turns consistently but is not simple
        let turning: Rat = poly.twice_area();
        if !turning.is_positive() || !poly.is_simple_convex() {
            return Err(Error::input("polygon is not convex"));
        }
        Ok(poly)
    }

    fn is_simple_convex(&self) -> bool {
        // every vertex must lie on the inner side of every edge
        let n = self.vertices.len();
        (0..n).all(|i| {
            let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            self.vertices.iter().all(|p| !cross(a, b, p).is_negative())
        })
    }

    pub fn from_i64(vertices: &[(i64, i64)]) -> Result<Self> {
        ConvexPolygon::new(vertices.iter().map(|&(x, y)| pt(x, y)).collect())
    }

    /// Axis-aligned rectangle.
    pub fn rect(x0: &Rat, y0: &Rat, x1: &Rat, y1: &Rat) -> Result<Self> {
        ConvexPolygon::new(vec![
            (x0.clone(), y0.clone()),
            (x1.clone(), y0.clone()),
            (x1.clone(), y1.clone()),
            (x0.clone(), y1.clone()),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    fn twice_area(&self) -> Rat {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
                &a.0 * &b.1 - &a.1 * &b.0
            })
            .sum()
    }

    /// Exact area (shoelace formula).
    pub fn area(&self) -> Rat {
        self.twice_area() * Rat::new(1, 2)
    }

    /// Squared edge lengths; the perimeter is the sum of their square roots.
    pub fn squared_edges(&self) -> Vec<Rat> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
                let (dx, dy) = (&b.0 - &a.0, &b.1 - &a.1);
                &dx * &dx + &dy * &dy
            })
            .collect()
    }

    /// Compares the perimeter with a rational, deciding exactly.
    pub fn compare_perimeter(&self, r: &Rat) -> Result<Ordering> {
        let terms: Vec<(Rat, Rat)> = self.squared_edges().into_iter().map(|e| (Rat::one(), e)).collect();
        compare_sqrt_sum(&terms, r)
    }

    pub fn perimeter_f64(&self) -> f64 {
        self.squared_edges().iter().map(|e| e.to_f64().sqrt()).sum()
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative())
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let (mut cx, mut cy, mut a2) = (Rat::zero(), Rat::zero(), Rat::zero());
        for i in 0..n {
            let (p, q) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            let w = &p.0 * &q.1 - &q.0 * &p.1;
            cx += (&p.0 + &q.0) * &w;
            cy += (&p.1 + &q.1) * &w;
            a2 += w;
        }
        let six_a = a2 * Rat::from(3);
        (cx / &six_a, cy / &six_a)
    }

    /// Largest squared distance between two vertices.
    pub fn diameter_sq(&self) -> Rat {
        let mut best = Rat::zero();
        for a in &self.vertices {
            for b in &self.vertices {
                let (dx, dy) = (&a.0 - &b.0, &a.1 - &b.1);
                best = best.max(&dx * &dx + &dy * &dy);
            }
        }
        best
    }

    /// Edges as half-planes `a·x + b·y <= c`.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (p, q) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
                // inner side of a counter-clockwise edge: cross(p, q, x) >= 0
                let a = &q.1 - &p.1;
                let b = &p.0 - &q.0;
                let c = &a * &p.0 + &b * &p.1;
                HalfPlane { a, b, c }
            })
            .collect()
    }

    /// Intersection with a half-plane; `None` when the rest has no area.
    pub fn clip(&self, h: &HalfPlane) -> Option<ConvexPolygon> {
        let n = self.vertices.len();
        let mut out = Vec::new();
        for i in 0..n {
            let (p, q) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
            let (sp, sq) = (h.slack(p), h.slack(q));
            if !sp.is_negative() {
                out.push(p.clone());
            }
            if sp.signum() * sq.signum() < 0 {
                let t = &sp / &(&sp - &sq);
                out.push((&p.0 + &(&t * &(&q.0 - &p.0)), &p.1 + &(&t * &(&q.1 - &p.1))));
            }
        }
        ConvexPolygon::new(out).ok()
    }

    /// Number of integer points in the closed polygon, by exact column scan.
    pub fn lattice_point_count(&self) -> Result<u64> {
        let mut total = 0u64;
        self.for_each_column(|_, lo, hi| total += (hi - lo + 1) as u64)?;
        Ok(total)
    }

    pub fn lattice_points(&self) -> Result<Vec<(i64, i64)>> {
        let mut pts = Vec::new();
        self.for_each_column(|x, lo, hi| pts.extend((lo..=hi).map(|y| (x, y))))?;
        Ok(pts)
    }

    fn for_each_column(&self, mut f: impl FnMut(i64, i64, i64)) -> Result<()> {
        let to_i64 = |b: BigInt| b.to_i64().ok_or_else(|| Error::resource("coordinates exceed i64"));
        let xmin = to_i64(self.vertices.iter().map(|p| p.0.clone()).min().unwrap().ceil())?;
        let xmax = to_i64(self.vertices.iter().map(|p| p.0.clone()).max().unwrap().floor())?;
        let hps = self.half_planes();
        for x in xmin..=xmax {
            let xr = Rat::from(x);
            let (mut lo, mut hi): (Option<Rat>, Option<Rat>) = (None, None);
            let mut empty = false;
            for h in &hps {
                let rhs = &h.c - &(&h.a * &xr);
                match h.b.signum() {
                    0 => empty |= rhs.is_negative(),
                    s => {
                        let bound = rhs / &h.b;
                        if s > 0 {
                            hi = Some(hi.map_or(bound.clone(), |v| v.min(bound)));
                        } else {
                            lo = Some(lo.map_or(bound.clone(), |v| v.max(bound)));
                        }
                    }
                }
            }
            if empty {
                continue;
            }
            let (lo, hi) = (lo.expect("bounded polygon"), hi.expect("bounded polygon"));
            let (ylo, yhi) = (to_i64(lo.ceil())?, to_i64(hi.floor())?);
            if ylo <= yhi {
                f(x, ylo, yhi);
            }
        }
        Ok(())
    }
}

fn drop_collinear(v: Vec<Point>) -> Vec<Point> {
    let mut v = v;
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let idx = (0..n).find(|&i| cross(&v[(i + n - 1) % n], &v[i], &v[(i + 1) % n]).is_zero());
        match idx {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

/// Convex hull of integer points (Andrew's monotone chain), counter-clockwise,
/// without collinear boundary points.
pub fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut p: Vec<(i64, i64)> = points.to_vec();
    p.sort_unstable();
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cr = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i128 {
        (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
    };
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(2 * p.len());
    // lower chain, then upper chain; the upper one never pops into the lower
    for (pass, pts) in [p.clone(), p.iter().rev().copied().collect()].into_iter().enumerate() {
        let floor = if pass == 0 { 2 } else { hull.len() + 1 };
        for &pt in pts.iter().skip(pass) {
            while hull.len() >= floor && cr(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0 {
                hull.pop();
            }
            hull.push(pt);
        }
    }
    hull.pop();
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    hull
}

/// Whether a set of integer points has three that are not collinear.
pub fn has_noncollinear_triple(points: &[(i64, i64)]) -> bool {
    convex_hull(points).len() >= 3
}
