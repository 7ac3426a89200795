//! Convex hulls of lattice sets: exact boxed hulls in the plane, recession
//! cones, and closed forms for the registered irrational families.

pub(crate) mod closure;

pub use closure::{analytic_closure, membership, registered_closure, validate_union, ClosureDescription, ClosurePiece, Membership, RegisteredClosure};

use rayon::prelude::*;

use num_traits::ToPrimitive;

use crate::arith::Quad;
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::model::{Constraint, ConstraintSystem, IntPoint, LatticeMembership, Sense};

pub type Point2 = [Quad; 2];

/// An axis-parallel rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Box2 {
    pub x0: Quad,
    pub x1: Quad,
    pub y0: Quad,
    pub y1: Quad,
}

impl Box2 {
    pub fn new(x0: Quad, x1: Quad, y0: Quad, y1: Quad) -> Result<Box2> {
        if x0 >= x1 || y0 >= y1 {
            return Err(Error::Precondition("box must have positive width and height".into()));
        }
        Ok(Box2 { x0, x1, y0, y1 })
    }

    pub fn from_ints(x0: i64, x1: i64, y0: i64, y1: i64) -> Result<Box2> {
        Box2::new(Quad::from_int(x0), Quad::from_int(x1), Quad::from_int(y0), Quad::from_int(y1))
    }

    /// The same box scaled by `factor` about its center.
    pub fn enlarged(&self, factor: &Quad) -> Box2 {
        let half = Quad::ratio(1, 2);
        let cx = &(&self.x0 + &self.x1) * &half;
        let cy = &(&self.y0 + &self.y1) * &half;
        let hx = &(&(&self.x1 - &self.x0) * &half) * factor;
        let hy = &(&(&self.y1 - &self.y0) * &half) * factor;
        Box2 { x0: &cx - &hx, x1: &cx + &hx, y0: &cy - &hy, y1: &cy + &hy }
    }

    pub fn contains(&self, p: &Point2) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    pub fn on_boundary(&self, p: &Point2) -> bool {
        self.contains(p) && (p[0] == self.x0 || p[0] == self.x1 || p[1] == self.y0 || p[1] == self.y1)
    }

    pub fn is_corner(&self, p: &Point2) -> bool {
        (p[0] == self.x0 || p[0] == self.x1) && (p[1] == self.y0 || p[1] == self.y1)
    }

    pub fn corners(&self) -> [Point2; 4] {
        [
            [self.x0.clone(), self.y0.clone()],
            [self.x1.clone(), self.y0.clone()],
            [self.x1.clone(), self.y1.clone()],
            [self.x0.clone(), self.y1.clone()],
        ]
    }

    /// The four sides as `a·p ≥ h`.
    fn halfplanes(&self) -> [([i64; 2], Quad); 4] {
        [([1, 0], self.x0.clone()), ([-1, 0], -&self.x1), ([0, 1], self.y0.clone()), ([0, -1], -&self.y1)]
    }

    /// Integer points of the box, row by row.
    pub fn integer_range(&self) -> Option<((i64, i64), (i64, i64))> {
        Some(((self.x0.ceil().to_i64()?, self.x1.floor().to_i64()?), (self.y0.ceil().to_i64()?, self.y1.floor().to_i64()?)))
    }
}

/// A convex polygon with vertices in counter-clockwise order, starting at
/// the lexicographically smallest one. Segments (two
/// vertices) and single points are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope2D {
    pub vertices: Vec<Point2>,
}

/// Where a vertex of a clipped hull comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    LatticePoint,
    BoxCorner,
    BoxEdge,
}

impl Polytope2D {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Whether `p` lies in the polygon (boundary included).
    pub fn contains(&self, p: &Point2) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0] == *p,
            2 => on_segment(&self.vertices[0], &self.vertices[1], p),
            _ => (0..self.vertices.len()).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % self.vertices.len()], p).is_negative()),
        }
    }

    pub fn classify_vertex(&self, v: &Point2, bx: &Box2, set: &dyn LatticeMembership) -> Option<VertexKind> {
        if bx.is_corner(v) {
            return Some(VertexKind::BoxCorner);
        }
        if bx.on_boundary(v) {
            return Some(VertexKind::BoxEdge);
        }
        let p = [v[0].to_i64()?, v[1].to_i64()?];
        (v[0].is_integer() && v[1].is_integer() && set.contains_point(&p)).then_some(VertexKind::LatticePoint)
    }

    /// Minimum of `c·p` over the polygon, at a vertex.
    pub fn minimize(&self, c: &Point2) -> Option<(Point2, Quad)> {
        self.vertices.iter().map(|v| (v.clone(), &c[0] * &v[0] + &c[1] * &v[1])).min_by(|a, b| a.1.cmp(&b.1))
    }
}

/// `(b − a) × (p − a)`.
pub fn cross(a: &Point2, b: &Point2, p: &Point2) -> Quad {
    &(&b[0] - &a[0]) * &(&p[1] - &a[1]) - &(&b[1] - &a[1]) * &(&p[0] - &a[0])
}

fn on_segment(a: &Point2, b: &Point2, p: &Point2) -> bool {
    cross(a, b, p).is_zero() && p[0] >= a[0].clone().min(b[0].clone()) && p[0] <= a[0].clone().max(b[0].clone()) && p[1] >= a[1].clone().min(b[1].clone()) && p[1] <= a[1].clone().max(b[1].clone())
}

/// Convex hull of integer points by monotone chain, counter-clockwise,
/// without collinear boundary points.
pub fn integer_hull(points: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: &[i64; 2], a: &[i64; 2], b: &[i64; 2]| -> i128 {
        (a[0] as i128 - o[0] as i128) * (b[1] as i128 - o[1] as i128) - (a[1] as i128 - o[1] as i128) * (b[0] as i128 - o[0] as i128)
    };
    let mut lower: Vec<[i64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[i64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn to_point(p: &[i64; 2]) -> Point2 {
    [Quad::from_int(p[0]), Quad::from_int(p[1])]
}

/// Drops repeated and collinear vertices of a closed polygon.
fn simplify(mut v: Vec<Point2>) -> Vec<Point2> {
    v.dedup();
    while v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let drop = (0..n).find(|&i| cross(&v[(i + n - 1) % n], &v[i], &v[(i + 1) % n]).is_zero());
        match drop {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

/// Sutherland–Hodgman clipping against the box, exact.
pub fn clip_to_box(poly: &[Point2], bx: &Box2) -> Vec<Point2> {
    if poly.len() <= 2 {
        return clip_segment(poly, bx);
    }
    let mut out = poly.to_vec();
    for (a, h) in bx.halfplanes() {
        let side = |p: &Point2| &(&p[0].scale_int(a[0]) + &p[1].scale_int(a[1])) - &h;
        let input = std::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let cur = &input[i];
            let prev = &input[(i + n - 1) % n];
            let (sc, sp) = (side(cur), side(prev));
            if !sc.is_negative() {
                if sp.is_negative() {
                    out.push(intersect(prev, cur, &sp, &sc));
                }
                out.push(cur.clone());
            } else if !sp.is_negative() {
                out.push(intersect(prev, cur, &sp, &sc));
            }
        }
        if out.is_empty() {
            return out;
        }
    }
    simplify(out)
}

fn intersect(p: &Point2, q: &Point2, sp: &Quad, sq: &Quad) -> Point2 {
    let t = sp / &(sp - sq);
    [&p[0] + &(&t * &(&q[0] - &p[0])), &p[1] + &(&t * &(&q[1] - &p[1]))]
}

fn clip_segment(seg: &[Point2], bx: &Box2) -> Vec<Point2> {
    match seg.len() {
        0 => vec![],
        1 => {
            if bx.contains(&seg[0]) {
                seg.to_vec()
            } else {
                vec![]
            }
        }
        _ => {
            // parametric clip of p + t(q − p), t ∈ [0, 1]
            let (p, q) = (&seg[0], &seg[1]);
            let mut lo = Quad::zero();
            let mut hi = Quad::one();
            for (a, h) in bx.halfplanes() {
                let sp = &(&p[0].scale_int(a[0]) + &p[1].scale_int(a[1])) - &h;
                let sq = &(&q[0].scale_int(a[0]) + &q[1].scale_int(a[1])) - &h;
                let d = &sq - &sp;
                if d.is_zero() {
                    if sp.is_negative() {
                        return vec![];
                    }
                    continue;
                }
                let t = -&sp / &d;
                if d.is_positive() {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
            }
            if lo > hi {
                return vec![];
            }
            let at = |t: &Quad| [&p[0] + &(t * &(&q[0] - &p[0])), &p[1] + &(t * &(&q[1] - &p[1]))];
            let mut v = vec![at(&lo), at(&hi)];
            v.dedup();
            v
        }
    }
}

/// Lattice points of `set` inside `bx`, sorted.
pub fn lattice_points_in(set: &dyn LatticeMembership, bx: &Box2) -> Vec<[i64; 2]> {
    let Some(((xl, xh), (yl, yh))) = bx.integer_range() else { return vec![] };
    (yl..=yh)
        .into_par_iter()
        .flat_map_iter(|y| (xl..=xh).filter(move |&x| set.contains_point(&[x, y])).map(move |x| [x, y]))
        .collect()
}

/// Hull of the lattice points in the box enlarged by `enlargement`, clipped to the box.
pub fn boxed_hull_2d(set: &dyn LatticeMembership, bx: &Box2, enlargement: &Quad) -> Result<Polytope2D> {
    if set.dim() != 2 {
        return Err(Error::Dimension(format!("boxed hulls are planar; lattice set has dimension {}", set.dim())));
    }
    if enlargement < &Quad::one() {
        return Err(Error::Precondition("enlargement factor must be at least 1".into()));
    }
    let big = bx.enlarged(enlargement);
    let pts = lattice_points_in(set, &big);
    if pts.is_empty() {
        return Err(Error::EmptyRegion(format!("no lattice points in the enlarged box [{}, {}] × [{}, {}]", big.x0, big.x1, big.y0, big.y1)));
    }
    let hull: Vec<Point2> = integer_hull(&pts).iter().map(to_point).collect();
    let clipped = clip_to_box(&hull, bx);
    if clipped.is_empty() {
        return Err(Error::EmptyRegion("the hull of the lattice points misses the box".into()));
    }
    let mut vertices = clipped;
    if let Some(i) = (0..vertices.len()).min_by(|&a, &b| vertices[a].cmp(&vertices[b])) {
        vertices.rotate_left(i);
    }
    Ok(Polytope2D { vertices })
}

/// `{x : Gx ⋈ 0}` with rows implied by the others removed.
pub fn recession_cone(system: &ConstraintSystem) -> ConstraintSystem {
    let mut rows: Vec<Constraint> = system.homogenized().rows().to_vec();
    let mut i = 0;
    while i < rows.len() {
        let r = &rows[i];
        let others: Vec<Constraint> = rows.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r.clone()).collect();
        let implied = |form: &crate::model::LinearForm| matches!(lp::minimize(form.coeffs(), &others), LpOutcome::Optimal { .. });
        let redundant = match r.sense {
            Sense::Ge => implied(&r.form),
            Sense::Le => implied(&r.form.neg()),
            Sense::Eq => implied(&r.form) && implied(&r.form.neg()),
        } || r.form.is_zero();
        if redundant {
            rows.remove(i);
        } else {
            i += 1;
        }
    }
    ConstraintSystem::with_rows(system.dim(), rows).expect("same dimension")
}

/// Whether the cone `{x : Gx ⋈ 0}` is `{0}`.
pub fn cone_is_trivial(cone: &ConstraintSystem) -> bool {
    let n = cone.dim();
    (0..n).all(|i| {
        let mut e = vec![Quad::zero(); n];
        e[i] = Quad::one();
        let rows = cone.homogenized();
        matches!(lp::maximize(&e, rows.rows()), LpOutcome::Optimal { .. }) && matches!(lp::minimize(&e, rows.rows()), LpOutcome::Optimal { .. })
    })
}

/// Whether every point of `{Ax ⋈ 0}` satisfies `B`, by one LP per row of `B`.
pub fn cone_contains(outer: &ConstraintSystem, inner: &ConstraintSystem) -> bool {
    let inner = inner.homogenized();
    outer.homogenized().rows().iter().flat_map(Constraint::ge_rows).all(|r| matches!(lp::minimize(r.form.coeffs(), inner.rows()), LpOutcome::Optimal { .. }))
}

pub fn same_cone(a: &ConstraintSystem, b: &ConstraintSystem) -> bool {
    cone_contains(a, b) && cone_contains(b, a)
}

/// Points of `set` in the box, as full integer points.
pub fn points_in_box(set: &dyn LatticeMembership, bx: &Box2) -> Vec<IntPoint> {
    lattice_points_in(set, bx).into_iter().map(|p| p.to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin, LatticeSetSpec, LinearForm};

    struct Parabola;
    impl LatticeMembership for Parabola {
        fn dim(&self) -> usize {
            2
        }
        fn contains_point(&self, p: &[i64]) -> bool {
            p[1] >= p[0] * p[0]
        }
    }

    #[test]
    fn parabola_hull() {
        let bx = Box2::from_ints(-3, 3, 0, 9).unwrap();
        let h = boxed_hull_2d(&Parabola, &bx, &Quad::from_int(2)).unwrap();
        let expected: Vec<Point2> = [[-3, 9], [-2, 4], [-1, 1], [0, 0], [1, 1], [2, 4], [3, 9]].iter().map(to_point).collect();
        let mut got = h.vertices.clone();
        got.sort();
        let mut exp = expected;
        exp.sort();
        assert_eq!(got, exp);
    }

    #[test]
    fn singleton_hull() {
        let spec = LatticeSetSpec::finite(2, vec![vec![0, 0]]).unwrap();
        let h = boxed_hull_2d(&spec, &Box2::from_ints(-1, 1, -1, 1).unwrap(), &Quad::one()).unwrap();
        assert_eq!(h.vertices, vec![[Quad::zero(), Quad::zero()]]);
    }

    #[test]
    fn ex1_hull_vertices_are_lattice_or_box() {
        let p = builtin("ex1").unwrap();
        let bx = Box2::from_ints(0, 20, 0, 30).unwrap();
        let h = boxed_hull_2d(&p.lattice, &bx, &Quad::from_int(2)).unwrap();
        for v in &h.vertices {
            assert!(h.classify_vertex(v, &bx, &p.lattice).is_some(), "{v:?}");
        }
        // the chord to (29, 41) dominates inside the box
        assert_eq!(h.vertices, vec![to_point(&[0, 0]), to_point(&[20, 0]), [Quad::from_int(20), Quad::ratio(820, 29)]]);
        let tight = boxed_hull_2d(&p.lattice, &bx, &Quad::one()).unwrap();
        assert_eq!(tight.vertices, vec![to_point(&[0, 0]), to_point(&[20, 0]), to_point(&[20, 28]), to_point(&[17, 24])]);
    }

    #[test]
    fn ex1_enlargement_is_monotone() {
        let p = builtin("ex1").unwrap();
        let bx = Box2::from_ints(0, 20, 0, 30).unwrap();
        let top = |k: i64| {
            let h = boxed_hull_2d(&p.lattice, &bx, &Quad::from_int(k)).unwrap();
            h.vertices.iter().filter(|v| v[0] == Quad::from_int(20)).map(|v| v[1].clone()).max().unwrap()
        };
        let limit = Quad::from_ints(0, 20, 2);
        let tops: Vec<Quad> = [1, 2, 4, 8].iter().map(|&k| top(k)).collect();
        assert!(tops.windows(2).all(|w| w[0] <= w[1]));
        assert!(tops.iter().all(|t| t < &limit));
    }

    #[test]
    fn degenerate_box_rejected() {
        assert!(Box2::from_ints(0, 0, 0, 1).is_err());
    }

    #[test]
    fn recession_cones() {
        let p = builtin("ex2").unwrap();
        let crate::model::LatticeSet::Union(pieces) = &p.lattice.set else { panic!() };
        let c2 = recession_cone(&pieces[1]);
        assert_eq!(c2.len(), 3);
        assert!(same_cone(&c2, &pieces[0]));
        assert_eq!(recession_cone(&pieces[0]), pieces[0].clone());
        let bounded = ConstraintSystem::with_rows(
            1,
            vec![Constraint::ge(LinearForm::from_ints(&[1]), Quad::zero()), Constraint::le(LinearForm::from_ints(&[1]), Quad::one())],
        )
        .unwrap();
        assert!(cone_is_trivial(&recession_cone(&bounded)));
    }
}
