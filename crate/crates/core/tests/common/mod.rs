#![allow(dead_code)]

use lagrange_gap::lp::{self, LpOutcome};
use lagrange_gap::model::{Constraint, ConstraintSystem, IntPoint, LatticeSetSpec, LinearForm, Problem, Sense};
use lagrange_gap::Quad;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SIDE: i64 = 6;

pub fn q(n: i64) -> Quad {
    Quad::from_int(n)
}

pub fn grid(n: usize, lo: i64, hi: i64) -> Vec<IntPoint> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|p: Vec<i64>| (lo..=hi).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    out
}

fn rand_form(rng: &mut ChaCha8Rng, n: usize, r: i64) -> LinearForm {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-r..=r)).collect();
        if v.iter().any(|&x| x != 0) {
            return LinearForm::from_ints(&v);
        }
    }
}

/// A lattice set inside `[0, 6]ⁿ`: a random finite list or a random
/// rational polytope intersected with the box.
pub fn random_lattice(rng: &mut ChaCha8Rng, n: usize) -> LatticeSetSpec {
    let all = grid(n, 0, SIDE);
    if rng.gen_bool(0.4) {
        let k = rng.gen_range(3..=14);
        let mut pts: Vec<IntPoint> = all.choose_multiple(rng, k).cloned().collect();
        pts.sort();
        return LatticeSetSpec::finite(n, pts).unwrap();
    }
    loop {
        let mut rows: Vec<Constraint> = (0..n)
            .flat_map(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                [Constraint::ge(LinearForm::from_ints(&e), q(0)), Constraint::le(LinearForm::from_ints(&e), q(SIDE))]
            })
            .collect();
        for _ in 0..rng.gen_range(1..=2) {
            let a = rand_form(rng, n, 3);
            let centre = vec![SIDE / 2; n];
            let rhs = Quad::ratio(a.eval_int(&centre).to_i64().unwrap() * 2 + rng.gen_range(-3..=3), 2);
            rows.push(Constraint::ge(a, rhs));
        }
        let s = ConstraintSystem::with_rows(n, rows).unwrap();
        if all.iter().filter(|p| s.contains_int(p)).count() >= 2 {
            return LatticeSetSpec::poly(s).unwrap();
        }
    }
}

/// Exhaustive scan of `[0, 6]ⁿ`.
pub fn points_of(spec: &LatticeSetSpec) -> Vec<IntPoint> {
    grid(spec.dim, 0, SIDE).into_iter().filter(|p| spec.contains(p)).collect()
}

/// A random rational problem with `m` coupling rows satisfied by a lattice point.
pub fn random_problem(rng: &mut ChaCha8Rng, n: usize, m: usize, tag: usize) -> Problem {
    let lattice = random_lattice(rng, n);
    let pts = points_of(&lattice);
    let z = pts.choose(rng).unwrap().clone();
    let rows: Vec<Constraint> = (0..m)
        .map(|_| {
            let a = rand_form(rng, n, 3);
            let az = a.eval_int(&z);
            match rng.gen_range(0..10) {
                0 => Constraint::eq(a, az),
                1..=3 => Constraint::le(a, &az + &Quad::ratio(rng.gen_range(0..=3), 2)),
                _ => Constraint::ge(a, &az - &Quad::ratio(rng.gen_range(0..=3), 2)),
            }
        })
        .collect();
    let c = rand_form(rng, n, 5);
    Problem::new(&format!("random-{tag}"), c, ConstraintSystem::with_rows(n, rows).unwrap(), lattice).unwrap()
}

/// `min c·x` over `conv(points) ∩ {Ax ⋈ b}` as an LP in the weights.
pub fn hull_lp(problem: &Problem, points: &[IntPoint]) -> Option<Quad> {
    let k = points.len();
    let mut rows: Vec<Constraint> = problem
        .coupling
        .rows()
        .iter()
        .map(|r| Constraint::new(LinearForm(points.iter().map(|p| r.form.eval_int(p)).collect()), r.sense, r.rhs.clone()))
        .collect();
    rows.push(Constraint::eq(LinearForm(vec![q(1); k]), q(1)));
    let obj: Vec<Quad> = points.iter().map(|p| problem.objective.eval_int(p)).collect();
    match lp::minimize_with_signs(&obj, &rows, &vec![true; k]) {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    }
}

/// The same value for one coupling row without an LP: the optimum of a
/// linear function over `conv(P) ∩ H` is attained at a point of `P ∩ H`
/// or where a segment between two points crosses the hyperplane.
pub fn single_row_brute(problem: &Problem, points: &[IntPoint]) -> Option<Quad> {
    let r = &problem.coupling.rows()[0];
    let val = |p: &IntPoint| (r.slack_int(p), problem.objective.eval_int(p));
    let data: Vec<(Quad, Quad)> = points.iter().map(val).collect();
    let ok = |s: &Quad| match r.sense {
        Sense::Ge => !s.is_negative(),
        Sense::Le => !s.is_positive(),
        Sense::Eq => s.is_zero(),
    };
    let mut best: Option<Quad> = None;
    let mut take = |v: Quad| {
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    };
    for (s, c) in &data {
        if ok(s) {
            take(c.clone());
        }
    }
    for (s1, c1) in &data {
        for (s2, c2) in &data {
            if s1.is_negative() && s2.is_positive() {
                // the point of the segment with zero slack
                let t = s2 / &(s2 - s1);
                take(&(&t * c1) + &(&(&Quad::one() - &t) * c2));
            }
        }
    }
    best
}

pub type P2 = [Quad; 2];

fn cross_i(o: [i64; 2], a: [i64; 2], b: [i64; 2]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

/// `conv(points) ∩ box` by brute force: supporting lines of the point set
/// (every pair with all points on one side) together with the box sides,
/// and every pairwise line intersection that satisfies all of them.
pub fn boxed_hull_oracle(points: &[[i64; 2]], bx: [i64; 4]) -> Vec<P2> {
    let [x0, x1, y0, y1] = bx;
    // a·p ≥ h with a, h integral
    let mut lines: Vec<([i64; 2], i64)> = vec![([1, 0], x0), ([-1, 0], -x1), ([0, 1], y0), ([0, -1], -y1)];
    let k = points.len();
    let collinear = (0..k).all(|i| (0..k).all(|j| cross_i(points[0], points[i], points[j]) == 0));
    if collinear {
        // a segment or a point: bound it by its own line and its ends
        let (lo, hi) = (*points.iter().min().unwrap(), *points.iter().max().unwrap());
        if lo == hi {
            lines.extend([([1, 0], lo[0]), ([-1, 0], -lo[0]), ([0, 1], lo[1]), ([0, -1], -lo[1])]);
        } else {
            let d = [hi[0] - lo[0], hi[1] - lo[1]];
            let nrm = [-d[1], d[0]];
            let h = nrm[0] * lo[0] + nrm[1] * lo[1];
            lines.extend([(nrm, h), ([-nrm[0], -nrm[1]], -h), (d, d[0] * lo[0] + d[1] * lo[1]), ([-d[0], -d[1]], -(d[0] * hi[0] + d[1] * hi[1]))]);
        }
    } else {
        for &p in points {
            for &q in points {
                if p != q && points.iter().all(|&r| cross_i(p, q, r) >= 0) {
                    // left of p → q
                    let a = [-(q[1] - p[1]), q[0] - p[0]];
                    lines.push((a, a[0] * p[0] + a[1] * p[1]));
                }
            }
        }
        lines.sort();
        lines.dedup();
    }
    let holds = |v: &P2| lines.iter().all(|(a, h)| &(&v[0].scale_int(a[0]) + &v[1].scale_int(a[1])) >= &q(*h));
    let mut out: Vec<P2> = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let ((a, h), (b, g)) = (lines[i], lines[j]);
            let det = a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128;
            if det == 0 {
                continue;
            }
            let det = det as i64;
            let x = Quad::ratio(h * b[1] - a[1] * g, det);
            let y = Quad::ratio(a[0] * g - h * b[0], det);
            let v = [x, y];
            if holds(&v) && !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out.sort();
    out
}

/// Planar lattice sets: rational polygons, irrational half-planes, finite
/// lists and unions.
pub fn random_planar_spec(rng: &mut ChaCha8Rng) -> LatticeSetSpec {
    let row = |rng: &mut ChaCha8Rng| {
        let a = rand_form(rng, 2, 4);
        let h = Quad::ratio(rng.gen_range(-12..=12), rng.gen_range(1..=3));
        Constraint::ge(a, h)
    };
    match rng.gen_range(0..4) {
        0 => {
            let k = rng.gen_range(1..=10);
            let mut pts: Vec<IntPoint> = (0..k).map(|_| vec![rng.gen_range(-6..=8), rng.gen_range(-6..=8)]).collect();
            pts.sort();
            pts.dedup();
            LatticeSetSpec::finite(2, pts).unwrap()
        }
        1 => {
            let d = *[2u32, 3, 5].choose(rng).unwrap();
            let s = Quad::from_ints(0, rng.gen_range(1..=2), d);
            let f = LinearForm(vec![s, q(-rng.gen_range(1..=2))]);
            let mut rows = vec![Constraint::ge(f, q(rng.gen_range(-3..=3)))];
            if rng.gen_bool(0.5) {
                rows.push(row(rng));
            }
            let spec = LatticeSetSpec::poly(ConstraintSystem::with_rows(2, rows).unwrap()).unwrap();
            if rng.gen_bool(0.5) {
                spec.with_nonneg(&[0, 1]).unwrap()
            } else {
                spec
            }
        }
        2 => {
            let rows: Vec<Constraint> = (0..rng.gen_range(1..=4)).map(|_| row(rng)).collect();
            LatticeSetSpec::poly(ConstraintSystem::with_rows(2, rows).unwrap()).unwrap()
        }
        _ => {
            let pieces: Vec<ConstraintSystem> = (0..2).map(|_| ConstraintSystem::with_rows(2, (0..rng.gen_range(1..=3)).map(|_| row(rng)).collect()).unwrap()).collect();
            LatticeSetSpec::union(2, pieces).unwrap()
        }
    }
}

/// One randomized instance of the boxed-hull check: `Ok(true)` when it
/// matched, `Ok(false)` when the enlarged box holds no lattice points.
pub fn lemma1_case(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    use lagrange_gap::hull::{boxed_hull_2d, Box2};
    let spec = random_planar_spec(rng);
    let (x0, y0) = (rng.gen_range(-6..=4), rng.gen_range(-6..=4));
    let bx = [x0, x0 + rng.gen_range(1..=10), y0, y0 + rng.gen_range(1..=10)];
    let k = [Quad::one(), Quad::ratio(3, 2), q(2), q(3)].choose(rng).unwrap().clone();
    let b = Box2::from_ints(bx[0], bx[1], bx[2], bx[3]).unwrap();
    // enlarged about the centre, enumerated independently
    let half = Quad::ratio(1, 2);
    let (cx, cy) = (&q(bx[0] + bx[1]) * &half, &q(bx[2] + bx[3]) * &half);
    let (hx, hy) = (&(&q(bx[1] - bx[0]) * &half) * &k, &(&q(bx[3] - bx[2]) * &half) * &k);
    let rng_of = |c: &Quad, h: &Quad| ((c - h).ceil().to_string().parse::<i64>().unwrap(), (c + h).floor().to_string().parse::<i64>().unwrap());
    let ((xl, xh), (yl, yh)) = (rng_of(&cx, &hx), rng_of(&cy, &hy));
    let pts: Vec<[i64; 2]> = (xl..=xh).flat_map(|x| (yl..=yh).map(move |y| [x, y])).filter(|p| spec.contains(p)).collect();
    let got = boxed_hull_2d(&spec, &b, &k);
    if pts.is_empty() {
        return match got {
            Err(lagrange_gap::Error::EmptyRegion(_)) => Ok(false),
            other => Err(format!("expected an empty region, got {other:?}")),
        };
    }
    let want = boxed_hull_oracle(&pts, bx);
    let got = match got {
        Ok(h) => h,
        Err(lagrange_gap::Error::EmptyRegion(_)) if want.is_empty() => return Ok(false),
        Err(e) => return Err(format!("{e} for {spec:?} in {bx:?}")),
    };
    let mut sorted = got.vertices.clone();
    sorted.sort();
    if sorted != want {
        return Err(format!("vertex sets differ for {spec:?} in {bx:?} (k = {k}): got {sorted:?}, want {want:?}"));
    }
    for v in &got.vertices {
        if !b.on_boundary(v) {
            let ok = v[0].is_integer() && v[1].is_integer() && spec.contains(&[v[0].to_i64().unwrap(), v[1].to_i64().unwrap()]);
            if !ok {
                return Err(format!("interior vertex {v:?} is not a lattice point of X"));
            }
        }
    }
    Ok(true)
}
