use num::traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{AffineMap2, RatPoint};
use crate::rational::{rat_int, Rational};

/// Where a point sits relative to a convex polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

/// Closed half-plane `{ x : normal . x >= offset }`.
#[derive(Clone, Debug)]
pub struct HalfPlane {
    pub normal: RatPoint,
    pub offset: Rational,
}

impl HalfPlane {
    pub fn new(normal: RatPoint, offset: Rational) -> Self {
        Self { normal, offset }
    }

    /// Signed slack `normal . p - offset`; nonnegative inside.
    fn slack(&self, p: &RatPoint) -> Rational {
        self.normal.dot(p) - &self.offset
    }
}

/// Strictly convex polygon with exact rational vertices.
///
/// Construction normalizes: duplicate and collinear consecutive vertices are
/// removed, orientation is forced counterclockwise, and the vertex list is
/// rotated so the lexicographically smallest vertex comes first. Equality of
/// normalized polygons is therefore plain structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConvexPolygon {
    vertices: Vec<RatPoint>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<RatPoint>) -> Result<Self> {
        let mut vs = dedup_cyclic(vertices);
        if vs.len() < 3 {
            return Err(Error::DegeneratePolygon("fewer than 3 distinct vertices".into()));
        }
        if signed_area_twice(&vs).is_negative() {
            vs.reverse();
        }
        vs = drop_collinear(vs);
        if vs.len() < 3 {
            return Err(Error::DegeneratePolygon("zero area".into()));
        }
        // strict convexity: every consecutive turn is a left turn
        let n = vs.len();
        for i in 0..n {
            let a = &vs[i];
            let b = &vs[(i + 1) % n];
            let c = &vs[(i + 2) % n];
            if !b.sub(a).cross(&c.sub(b)).is_positive() {
                return Err(Error::DegeneratePolygon("vertices not in convex position".into()));
            }
        }
        rotate_to_lex_min(&mut vs);
        Ok(Self { vertices: vs })
    }

    pub fn triangle(a: RatPoint, b: RatPoint, c: RatPoint) -> Result<Self> {
        Self::new(vec![a, b, c])
    }

    pub fn vertices(&self) -> &[RatPoint] {
        &self.vertices
    }

    /// Exact area by the shoelace formula.
    pub fn area(&self) -> Rational {
        signed_area_twice(&self.vertices) / rat_int(2)
    }

    /// Exact point location by edge sign tests.
    pub fn locate(&self, p: &RatPoint) -> Location {
        let n = self.vertices.len();
        let mut on_boundary = false;
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            let s = b.sub(a).cross(&p.sub(a));
            if s.is_negative() {
                return Location::Outside;
            }
            if s.is_zero() {
                on_boundary = true;
            }
        }
        if on_boundary {
            Location::Boundary
        } else {
            Location::Interior
        }
    }

    /// Clip against a half-plane (Sutherland-Hodgman step). Returns `None`
    /// when the exact intersection has zero area.
    pub fn clip_halfplane(&self, hp: &HalfPlane) -> Option<ConvexPolygon> {
        let n = self.vertices.len();
        let mut out: Vec<RatPoint> = Vec::with_capacity(n + 1);
        for i in 0..n {
            let cur = &self.vertices[i];
            let nxt = &self.vertices[(i + 1) % n];
            let sc = hp.slack(cur);
            let sn = hp.slack(nxt);
            if !sc.is_negative() {
                out.push(cur.clone());
            }
            // edge crosses the boundary strictly: add the exact crossing
            if (sc.is_positive() && sn.is_negative()) || (sc.is_negative() && sn.is_positive()) {
                let t = &sc / (&sc - &sn);
                out.push(cur.add(&nxt.sub(cur).scale(&t)));
            }
        }
        ConvexPolygon::new(out).ok()
    }

    /// Exact intersection by iterated clipping against the other polygon's
    /// edge half-planes. `None` means the intersection has zero area.
    pub fn intersect(&self, other: &ConvexPolygon) -> Option<ConvexPolygon> {
        let mut acc = self.clone();
        let n = other.vertices.len();
        for i in 0..n {
            let a = &other.vertices[i];
            let b = &other.vertices[(i + 1) % n];
            let dir = b.sub(a);
            // interior of a CCW polygon is to the left of each edge
            let normal = RatPoint::new(-dir.y.clone(), dir.x.clone());
            let offset = normal.dot(a);
            acc = acc.clip_halfplane(&HalfPlane::new(normal, offset))?;
        }
        Some(acc)
    }

    /// `other` is contained in `self` (closed containment). For convex
    /// polygons it suffices that no vertex of `other` is outside.
    pub fn contains_polygon(&self, other: &ConvexPolygon) -> bool {
        other.vertices.iter().all(|v| self.locate(v) != Location::Outside)
    }

    /// Exact affine image. The image of a strictly convex polygon under an
    /// invertible map is strictly convex; orientation is re-normalized.
    pub fn transform(&self, map: &AffineMap2) -> Result<ConvexPolygon> {
        ConvexPolygon::new(self.vertices.iter().map(|v| map.apply(v)).collect())
    }

    /// A rational point in the open interior: the vertex mean.
    pub fn interior_point(&self) -> RatPoint {
        let n = rat_int(self.vertices.len() as i64);
        let mut sum = RatPoint::origin();
        for v in &self.vertices {
            sum = sum.add(v);
        }
        sum.scale(&(rat_int(1) / n))
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (RatPoint, RatPoint) {
        let mut min = self.vertices[0].clone();
        let mut max = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            if v.x < min.x {
                min.x = v.x.clone();
            }
            if v.y < min.y {
                min.y = v.y.clone();
            }
            if v.x > max.x {
                max.x = v.x.clone();
            }
            if v.y > max.y {
                max.y = v.y.clone();
            }
        }
        (min, max)
    }
}

fn signed_area_twice(vs: &[RatPoint]) -> Rational {
    let n = vs.len();
    let mut acc = Rational::zero();
    for i in 0..n {
        acc += vs[i].cross(&vs[(i + 1) % n]);
    }
    acc
}

fn dedup_cyclic(vs: Vec<RatPoint>) -> Vec<RatPoint> {
    let mut out: Vec<RatPoint> = Vec::with_capacity(vs.len());
    for v in vs {
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

fn drop_collinear(mut vs: Vec<RatPoint>) -> Vec<RatPoint> {
    loop {
        let n = vs.len();
        if n < 3 {
            return vs;
        }
        let mut removed = false;
        let mut i = 0;
        while i < vs.len() && vs.len() >= 3 {
            let n = vs.len();
            let a = vs[(i + n - 1) % n].clone();
            let b = vs[i].clone();
            let c = vs[(i + 1) % n].clone();
            if b.sub(&a).cross(&c.sub(&b)).is_zero() {
                vs.remove(i);
                removed = true;
            } else {
                i += 1;
            }
        }
        if !removed {
            return vs;
        }
    }
}

fn rotate_to_lex_min(vs: &mut Vec<RatPoint>) {
    let mut best = 0;
    for i in 1..vs.len() {
        if !vs[best].lex_le(&vs[i]) {
            best = i;
        }
    }
    vs.rotate_left(best);
}
