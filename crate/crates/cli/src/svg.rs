//! Static SVG rendering of a planar lattice set, its points and a boxed hull.

use std::fmt::Write as _;

use lagrange_gap::hull::{Box2, Polytope2D};
use lagrange_gap::model::{Constraint, LatticeSetSpec, Sense};

const SIZE: f64 = 640.0;
const MARGIN: f64 = 32.0;

type P = (f64, f64);

pub struct Scene<'a> {
    pub bx: &'a Box2,
    pub set: &'a LatticeSetSpec,
    pub points: &'a [Vec<i64>],
    pub hull: &'a Polytope2D,
    pub timestamp: Option<u64>,
}

fn clip(poly: &[P], a: (f64, f64), b: f64) -> Vec<P> {
    let side = |p: &P| a.0 * p.0 + a.1 * p.1 - b;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sp, sq) = (side(&p), side(&q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    out
}

fn row_f64(r: &Constraint) -> ((f64, f64), f64) {
    let c = r.form.coeffs();
    ((c[0].to_f64(), c[1].to_f64()), r.rhs.to_f64())
}

/// The line `a·x = b` across the box, if it crosses it.
fn boundary_segment(r: &Constraint, corners: &[P]) -> Option<(P, P)> {
    let (a, b) = row_f64(r);
    let mut hits: Vec<P> = Vec::new();
    for i in 0..4 {
        let (p, q) = (corners[i], corners[(i + 1) % 4]);
        let (sp, sq) = (a.0 * p.0 + a.1 * p.1 - b, a.0 * q.0 + a.1 * q.1 - b);
        if sp == 0.0 {
            hits.push(p);
        } else if sp * sq < 0.0 {
            let t = sp / (sp - sq);
            hits.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    hits.dedup();
    (hits.len() >= 2).then(|| (hits[0], hits[1]))
}

pub fn render(scene: &Scene) -> String {
    let bx = scene.bx;
    let corners: Vec<P> = bx.corners().iter().map(|c| (c[0].to_f64(), c[1].to_f64())).collect();
    let (x0, x1) = (bx.x0.to_f64(), bx.x1.to_f64());
    let (y0, y1) = (bx.y0.to_f64(), bx.y1.to_f64());
    let scale = (SIZE - 2.0 * MARGIN) / (x1 - x0).max(y1 - y0);
    let (w, h) = ((x1 - x0) * scale + 2.0 * MARGIN, (y1 - y0) * scale + 2.0 * MARGIN);
    let tx = |p: P| (MARGIN + (p.0 - x0) * scale, h - MARGIN - (p.1 - y0) * scale);
    let path = |poly: &[P]| -> String {
        poly.iter()
            .map(|&p| {
                let (u, v) = tx(p);
                format!("{u:.3},{v:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#);
    if let Some(t) = scene.timestamp {
        let _ = writeln!(s, "<!-- generated at unix time {t} -->");
    }
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{w:.3}" height="{h:.3}" fill="#ffffff"/>"##);
    let _ = writeln!(s, r##"<polygon points="{}" fill="none" stroke="#888888" stroke-width="1"/>"##, path(&corners));

    let mut boundary = Vec::new();
    for piece in scene.set.pieces() {
        let mut region = corners.clone();
        for r in piece.rows() {
            let (a, b) = row_f64(r);
            match r.sense {
                Sense::Ge => region = clip(&region, a, b),
                Sense::Le => region = clip(&region, (-a.0, -a.1), -b),
                Sense::Eq => {
                    region = clip(&region, a, b);
                    region = clip(&region, (-a.0, -a.1), -b);
                }
            }
            if !r.is_rational() {
                boundary.push(r.clone());
            }
        }
        if region.len() >= 3 {
            let _ = writeln!(s, r##"<polygon class="region" points="{}" fill="#3b6fd8" fill-opacity="0.25" stroke="#3b6fd8" stroke-width="1"/>"##, path(&region));
        }
    }
    for r in &boundary {
        if let Some((p, q)) = boundary_segment(r, &corners) {
            let ((u1, v1), (u2, v2)) = (tx(p), tx(q));
            let _ = writeln!(s, r##"<line class="boundary" x1="{u1:.3}" y1="{v1:.3}" x2="{u2:.3}" y2="{v2:.3}" stroke="#1a3f8f" stroke-width="1.5" stroke-dasharray="6,3"/>"##);
        }
    }
    let hull: Vec<P> = scene.hull.vertices.iter().map(|v| (v[0].to_f64(), v[1].to_f64())).collect();
    if !hull.is_empty() {
        let _ = writeln!(s, r##"<polygon class="hull" points="{}" fill="#d83b3b" fill-opacity="0.25" stroke="#d83b3b" stroke-width="2"/>"##, path(&hull));
    }
    let radius = (scale / 6.0).clamp(1.0, 4.0);
    for p in scene.points {
        let (u, v) = tx((p[0] as f64, p[1] as f64));
        let _ = writeln!(s, r##"<circle class="lattice" cx="{u:.3}" cy="{v:.3}" r="{radius:.2}" fill="#000000"/>"##);
    }
    for v in &scene.hull.vertices {
        let (u, vv) = tx((v[0].to_f64(), v[1].to_f64()));
        let _ = writeln!(s, r##"<circle class="vertex" cx="{u:.3}" cy="{vv:.3}" r="{:.2}" fill="#d83b3b"/>"##, radius + 1.0);
    }
    s.push_str("</svg>\n");
    s
}

/// `x,y` in exact form plus decimals and the vertex kind.
pub fn vertex_csv(hull: &Polytope2D, kinds: &[String]) -> String {
    let mut s = String::from("x,y,x_approx,y_approx,kind\n");
    for (v, k) in hull.vertices.iter().zip(kinds) {
        let _ = writeln!(s, "{:#},{:#},{},{},{k}", v[0], v[1], v[0].approx(9), v[1].approx(9));
    }
    s
}
