//! Certified linear minimization `inf{w·x : x ∈ X}` over a lattice set.
//!
//! Finite lists are scanned. Each polyhedral piece goes through the exact LP
//! relaxation first, then:
//!
//! * unbounded relaxation: small integer rays, then (in two free
//!   coordinates) irrational extreme rays handled by a facet walk or by
//!   continued-fraction rays;
//! * bounded relaxation: an incumbent near the LP optimum, exhaustive
//!   enumeration of the sublevel set when it is bounded, and in two free
//!   coordinates a convergent probe proving that the LP value is an
//!   infimum that no lattice point attains.
//!
//! Anything else comes back [`MinOutcome::Inconclusive`].

mod witness;

pub use witness::{pell_convergents, Generator, WitnessSequence};

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use crate::arith::{convergents, Quad};
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::model::{Constraint, ConstraintSystem, ExtReal, IntPoint, LatticeSet, LatticeSetSpec, LinearForm, Sense};

/// Enumeration limits for one oracle call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Integer ray candidates range over `[−R, R]ⁿ`.
    pub ray_radius: i64,
    /// Incumbent search radius around the LP optimum.
    pub search_radius: i64,
    /// Largest box that may be enumerated exhaustively.
    pub max_points: u64,
    /// Continued-fraction terms tried for irrational directions.
    pub cf_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { ray_radius: 5, search_radius: 3, max_points: 200_000, cf_terms: 60 }
    }
}

impl Budget {
    pub fn scaled(&self, factor: i64) -> Budget {
        Budget {
            ray_radius: self.ray_radius * factor,
            search_radius: self.search_radius * factor,
            max_points: self.max_points.saturating_mul(factor.max(1) as u64),
            cf_terms: self.cf_terms * factor as usize,
        }
    }
}

/// Work done by one call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Spent {
    pub lp_solves: u64,
    pub points: u64,
    pub rays: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinOutcome {
    Attained { point: IntPoint, value: Quad },
    Unbounded(WitnessSequence),
    /// The infimum is `value` and no lattice point attains it.
    InfimumOnly { value: Quad, certificate: WitnessSequence },
    /// `best_value_seen` is an upper bound on the infimum.
    Inconclusive { best_value_seen: ExtReal, budget_spent: Spent },
}

impl MinOutcome {
    /// The certified infimum, `None` when inconclusive.
    pub fn value(&self) -> Option<ExtReal> {
        match self {
            MinOutcome::Attained { value, .. } | MinOutcome::InfimumOnly { value, .. } => Some(ExtReal::Finite(value.clone())),
            MinOutcome::Unbounded(_) => Some(ExtReal::NegInfinity),
            MinOutcome::Inconclusive { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&WitnessSequence> {
        match self {
            MinOutcome::Unbounded(c) | MinOutcome::InfimumOnly { certificate: c, .. } => Some(c),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MinOutcome::Attained { .. } => "attained",
            MinOutcome::Unbounded(_) => "unbounded",
            MinOutcome::InfimumOnly { .. } => "infimum-only",
            MinOutcome::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// `a·x ≥ h` over the free coordinates of a piece.
#[derive(Clone, Debug)]
struct Row {
    a: Vec<Quad>,
    h: Quad,
}

impl Row {
    fn slack_int(&self, p: &[i64]) -> Quad {
        let mut s = -&self.h;
        for (c, &v) in self.a.iter().zip(p) {
            if v != 0 && !c.is_zero() {
                s += &c.scale_int(v);
            }
        }
        s
    }

    fn dot(&self, x: &[Quad]) -> Quad {
        self.a.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// A piece with coordinates fixed by one-variable equalities substituted out.
struct Reduced {
    n: usize,
    free: Vec<usize>,
    base: IntPoint,
    rows: Vec<Row>,
    w: Vec<Quad>,
    w_const: Quad,
}

impl Reduced {
    fn k(&self) -> usize {
        self.free.len()
    }

    fn lift(&self, p: &[i64]) -> IntPoint {
        let mut x = self.base.clone();
        for (&i, &v) in self.free.iter().zip(p) {
            x[i] = v;
        }
        x
    }

    fn contains(&self, p: &[i64]) -> bool {
        self.rows.iter().all(|r| !r.slack_int(p).is_negative())
    }

    fn value(&self, p: &[i64]) -> Quad {
        let mut v = self.w_const.clone();
        for (c, &x) in self.w.iter().zip(p) {
            if x != 0 && !c.is_zero() {
                v += &c.scale_int(x);
            }
        }
        v
    }

    fn in_cone(&self, r: &[i64]) -> bool {
        self.rows.iter().all(|row| !row.a.iter().zip(r).map(|(c, &v)| c.scale_int(v)).sum::<Quad>().is_negative())
    }

    fn in_cone_q(&self, r: &[Quad]) -> bool {
        self.rows.iter().all(|row| !row.dot(r).is_negative())
    }

    fn lp_rows(&self) -> Vec<Constraint> {
        self.rows.iter().map(|r| Constraint::ge(LinearForm(r.a.clone()), r.h.clone())).collect()
    }

    fn full_row(&self, r: &Row) -> Constraint {
        let mut a = vec![Quad::zero(); self.n];
        for (&i, c) in self.free.iter().zip(&r.a) {
            a[i] = c.clone();
        }
        let mut h = r.h.clone();
        // fixed coordinates sit in `base`; the full row must account for them
        let full = LinearForm(a);
        let lifted = full.eval_int(&self.base);
        h += &lifted;
        Constraint::ge(full, h)
    }
}

fn reduce(sys: &ConstraintSystem, w: &LinearForm) -> Option<Reduced> {
    let n = sys.dim();
    let mut fixed: Vec<Option<i64>> = vec![None; n];
    for r in sys.rows() {
        if r.sense != Sense::Eq {
            continue;
        }
        let nz: Vec<usize> = (0..n).filter(|&i| !r.form.coeffs()[i].is_zero()).collect();
        if nz.len() != 1 {
            continue;
        }
        let v = &r.rhs / &r.form.coeffs()[nz[0]];
        if !v.is_integer() {
            return None;
        }
        let iv = v.to_i64()?;
        match fixed[nz[0]] {
            Some(old) if old != iv => return None,
            _ => fixed[nz[0]] = Some(iv),
        }
    }
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let base: IntPoint = fixed.iter().map(|f| f.unwrap_or(0)).collect();
    let mut rows = Vec::new();
    for r in sys.rows().iter().flat_map(Constraint::ge_rows) {
        let shift = r.form.eval_int(&base);
        let a: Vec<Quad> = free.iter().map(|&i| r.form.coeffs()[i].clone()).collect();
        let h = &r.rhs - &shift;
        if a.iter().all(Quad::is_zero) {
            if h.is_positive() {
                return None;
            }
            continue;
        }
        rows.push(Row { a, h });
    }
    let w_const = w.eval_int(&base);
    let wr = free.iter().map(|&i| w.coeffs()[i].clone()).collect();
    Some(Reduced { n, free, base, rows, w: wr, w_const })
}

/// Calls `f` on every integer point of the box until it returns `false`.
fn for_each_in_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64]) -> bool) {
    let k = lo.len();
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return;
    }
    let mut p = lo.to_vec();
    loop {
        if !f(&p) {
            return;
        }
        let mut i = 0;
        loop {
            if i == k {
                return;
            }
            if p[i] < hi[i] {
                p[i] += 1;
                break;
            }
            p[i] = lo[i];
            i += 1;
        }
    }
}

/// Nonzero integer vectors of `[−r, r]^k`, by ℓ¹ norm and then lexicographically.
pub fn small_rays(k: usize, r: i64) -> Vec<IntPoint> {
    let mut out = Vec::new();
    for_each_in_box(&vec![-r; k], &vec![r; k], |p| {
        if p.iter().any(|&v| v != 0) {
            out.push(p.to_vec());
        }
        true
    });
    out.sort_by(|a, b| {
        let na: i64 = a.iter().map(|v| v.abs()).sum();
        let nb: i64 = b.iter().map(|v| v.abs()).sum();
        na.cmp(&nb).then_with(|| a.cmp(b))
    });
    out
}

fn round_point(x: &[Quad]) -> Option<IntPoint> {
    x.iter().map(|v| (v + &Quad::ratio(1, 2)).floor().to_i64()).collect()
}

/// Best lattice point within growing ℓ∞ balls around `center`.
fn incumbent(red: &Reduced, center: &[Quad], radius: i64, spent: &mut Spent) -> Option<(IntPoint, Quad)> {
    let c = round_point(center)?;
    let mut best: Option<(IntPoint, Quad)> = None;
    for r in 0..=radius {
        let lo: Vec<i64> = c.iter().map(|v| v - r).collect();
        let hi: Vec<i64> = c.iter().map(|v| v + r).collect();
        for_each_in_box(&lo, &hi, |p| {
            if p.iter().zip(&c).any(|(a, b)| (a - b).abs() == r) {
                spent.points += 1;
                if red.contains(p) {
                    let v = red.value(p);
                    if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                        best = Some((p.to_vec(), v));
                    }
                }
            }
            true
        });
        if best.is_some() {
            return best;
        }
    }
    best
}

fn lattice_point(red: &Reduced, hint: &[Quad], budget: &Budget, spent: &mut Spent) -> Option<IntPoint> {
    let zero = vec![0; red.k()];
    if red.contains(&zero) {
        return Some(zero);
    }
    if let Some((p, _)) = incumbent(red, hint, budget.search_radius, spent) {
        return Some(p);
    }
    let origin = vec![Quad::zero(); red.k()];
    incumbent(red, &origin, budget.search_radius, spent).map(|(p, _)| p)
}

/// Integer box containing `{x : rows, extra}`, or `None` if unbounded or infeasible.
fn bounding_box(k: usize, rows: &[Constraint], spent: &mut Spent) -> Option<(Vec<i64>, Vec<i64>)> {
    let mut lo = Vec::with_capacity(k);
    let mut hi = Vec::with_capacity(k);
    for i in 0..k {
        let mut e = vec![Quad::zero(); k];
        e[i] = Quad::one();
        spent.lp_solves += 2;
        let min = lp::minimize(&e, rows);
        let max = lp::maximize(&e, rows);
        match (min, max) {
            (LpOutcome::Optimal { value: a, .. }, LpOutcome::Optimal { value: b, .. }) => {
                lo.push(a.ceil().to_i64()?);
                hi.push(b.floor().to_i64()?);
            }
            _ => return None,
        }
    }
    Some((lo, hi))
}

fn box_volume(lo: &[i64], hi: &[i64]) -> u64 {
    lo.iter().zip(hi).map(|(l, h)| if h < l { 0 } else { (h - l + 1) as u64 }).fold(1u64, |a, b| a.saturating_mul(b))
}

enum PieceResult {
    Empty,
    Found(MinOutcome),
    Open { lp_bound: ExtReal, best: Option<(IntPoint, Quad)> },
}

fn ray_witness(red: &Reduced, base: &[i64], step: &[i64], objective: &LinearForm) -> WitnessSequence {
    let mut full_step = vec![0; red.n];
    for (&i, &v) in red.free.iter().zip(step) {
        full_step[i] = v;
    }
    WitnessSequence { generator: Generator::Ray { base: red.lift(base), step: full_step }, objective: objective.clone(), limit: ExtReal::NegInfinity }
}

/// Integer multiple of a rational direction.
fn integer_direction(e: &[Quad]) -> Option<IntPoint> {
    if !e.iter().all(Quad::is_rational) {
        return None;
    }
    let mut l = num_bigint::BigInt::from(1);
    for v in e {
        l = num_integer::Integer::lcm(&l, v.rational_part().denom());
    }
    let ints: Vec<num_bigint::BigInt> = e.iter().map(|v| (v.rational_part() * num_rational::BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::from(0), |a, b| num_integer::Integer::gcd(&a, b));
    ints.iter().map(|v| (v / &g).to_i64()).collect()
}

/// Boundary directions of the 2D cone `{r : row·r ≥ 0}`.
fn extreme_rays_2d(red: &Reduced) -> Vec<Vec<Quad>> {
    let mut out: Vec<Vec<Quad>> = Vec::new();
    for row in &red.rows {
        let d = vec![-&row.a[1], row.a[0].clone()];
        for cand in [d.clone(), d.iter().map(|v| -v).collect::<Vec<_>>()] {
            if red.in_cone_q(&cand) && !out.iter().any(|o| same_direction(o, &cand)) {
                out.push(cand);
            }
        }
    }
    out
}

fn same_direction(a: &[Quad], b: &[Quad]) -> bool {
    (&a[0] * &b[1] - &a[1] * &b[0]).is_zero() && !(&a[0] * &b[0] + &a[1] * &b[1]).is_negative()
}

/// Walks the facet containing the irrational ray `e`. See [`Generator::FacetFloor`].
fn facet_walk(red: &Reduced, e: &[Quad], lp_point: &[Quad], objective: &LinearForm) -> Option<WitnessSequence> {
    let w_e = &red.w[0] * &e[0] + &red.w[1] * &e[1];
    for facet in red.rows.iter().filter(|r| r.dot(e).is_zero()) {
        let i = if facet.a[1].is_zero() { 0 } else { 1 };
        let j = 1 - i;
        if e[j].is_zero() {
            continue;
        }
        let s: i64 = if e[j].is_positive() { 1 } else { -1 };
        let ej = e[j].abs();
        let e1: Vec<Quad> = e.iter().map(|v| v / &ej).collect();
        let we1 = &w_e / &ej;
        let stride = (&red.w[i].abs() / &we1.abs()).floor().to_i64()? + 1;
        let round_up = facet.a[i].is_positive();
        let facet_x_i = |a: i64| (&facet.h - &facet.a[j].scale_int(a)) / &facet.a[i];
        let valid = |a: i64| {
            red.rows.iter().all(|row| {
                if std::ptr::eq(row, facet) {
                    return true;
                }
                if row.dot(&e1).is_negative() {
                    return false;
                }
                let mut q0 = vec![Quad::zero(); 2];
                q0[j] = Quad::from_int(a);
                q0[i] = facet_x_i(a);
                let worst = if round_up { if row.a[i].is_negative() { row.a[i].clone() } else { Quad::zero() } } else if row.a[i].is_positive() { -&row.a[i] } else { Quad::zero() };
                !(row.dot(&q0) - &row.h + worst).is_negative()
            })
        };
        let a0 = (&lp_point[j] + &Quad::ratio(1, 2)).floor().to_i64()?;
        let start = (0..=400).map(|t| a0 + s * t).find(|&a| valid(a))?;
        let facet_full = red.full_row(facet);
        let gen = Generator::FacetFloor { base: red.base.clone(), free: red.free[j], dep: red.free[i], start, stride: s * stride, row: facet_full };
        return Some(WitnessSequence { generator: gen, objective: objective.clone(), limit: ExtReal::NegInfinity });
    }
    None
}

/// Rays `(q, p)` from continued-fraction convergents of the slope of `e`.
fn cf_ray(red: &Reduced, e: &[Quad], terms: usize, spent: &mut Spent) -> Option<IntPoint> {
    let (j, i) = if e[0].is_zero() { (1, 0) } else { (0, 1) };
    let s: i64 = if e[j].is_positive() { 1 } else { -1 };
    let slope = &e[i] / &e[j];
    for (p, q) in convergents(&slope).take(terms) {
        spent.rays += 1;
        let (p, q) = (p.to_i64()?, q.to_i64()?);
        let mut r = vec![0; 2];
        r[j] = s * q;
        r[i] = s * p;
        if red.in_cone(&r) && red.value(&r) < red.w_const {
            return Some(r);
        }
    }
    None
}

fn unbounded_stage(red: &Reduced, lp_point: &[Quad], lp_ray: &[Quad], objective: &LinearForm, budget: &Budget, spent: &mut Spent) -> PieceResult {
    let base = lattice_point(red, lp_point, budget, spent);
    let open = |base: &Option<IntPoint>| PieceResult::Open {
        lp_bound: ExtReal::NegInfinity,
        best: base.as_ref().map(|p| (p.clone(), red.value(p))),
    };
    let zero = &red.w_const;
    if let Some(b) = &base {
        for r in small_rays(red.k(), budget.ray_radius) {
            spent.rays += 1;
            if red.value(&r) < *zero && red.in_cone(&r) {
                return PieceResult::Found(MinOutcome::Unbounded(ray_witness(red, b, &r, objective)));
            }
        }
        if let Some(r) = integer_direction(lp_ray) {
            if red.value(&r) < *zero && red.in_cone(&r) {
                return PieceResult::Found(MinOutcome::Unbounded(ray_witness(red, b, &r, objective)));
            }
        }
    }
    if red.k() != 2 {
        return open(&base);
    }
    let w_dot = |e: &[Quad]| &red.w[0] * &e[0] + &red.w[1] * &e[1];
    for e in extreme_rays_2d(red).into_iter().filter(|e| w_dot(e).is_negative()) {
        if let Some(r) = integer_direction(&e) {
            if let Some(b) = &base {
                return PieceResult::Found(MinOutcome::Unbounded(ray_witness(red, b, &r, objective)));
            }
            continue;
        }
        if let Some(wit) = facet_walk(red, &e, lp_point, objective) {
            return PieceResult::Found(MinOutcome::Unbounded(wit));
        }
        if let (Some(b), Some(r)) = (&base, cf_ray(red, &e, budget.cf_terms, spent)) {
            return PieceResult::Found(MinOutcome::Unbounded(ray_witness(red, b, &r, objective)));
        }
    }
    open(&base)
}

/// Splits `v = r + s·√d` into its two rational coordinates.
fn split(v: &Quad) -> (Quad, Quad) {
    (Quad::rational(v.rational_part().clone()), Quad::rational(v.surd_part().clone()))
}

/// In two free coordinates with LP value `l`, proves that no lattice point
/// attains `l` and builds convergent witnesses approaching it.
fn pell_probe(red: &Reduced, l: &Quad, objective: &LinearForm) -> Option<MinOutcome> {
    // the only point of the line w·x = l that can be integral solves the rational split
    let target = l - &red.w_const;
    let (w0r, w0s) = split(&red.w[0]);
    let (w1r, w1s) = split(&red.w[1]);
    let (tr, ts) = split(&target);
    let det = &w0r * &w1s - &w1r * &w0s;
    if det.is_zero() {
        return None;
    }
    let x0 = (&tr * &w1s - &w1r * &ts) / &det;
    let x1 = (&w0r * &ts - &tr * &w0s) / &det;
    if !(x0.is_integer() && x1.is_integer()) {
        return None;
    }
    let anchor = vec![x0.to_i64()?, x1.to_i64()?];
    if red.contains(&anchor) {
        return Some(MinOutcome::Attained { point: red.lift(&anchor), value: l.clone() });
    }
    let d = vec![-&red.w[1], red.w[0].clone()];
    let e = if red.in_cone_q(&d) {
        d
    } else {
        let nd: Vec<Quad> = d.iter().map(|v| -v).collect();
        if !red.in_cone_q(&nd) {
            return None;
        }
        nd
    };
    let (j, i) = if e[0].is_zero() { (1, 0) } else { (0, 1) };
    let slope = &e[i] / &e[j];
    if slope.is_rational() {
        return None;
    }
    let sign: i64 = if e[j].is_positive() { 1 } else { -1 };
    // value(anchor + sign·(q, p)) = l + sign·w_i·(p − slope·q)
    let side = red.w[i].signum() * sign as i8;
    if side == 0 {
        return None;
    }
    let base_full = red.lift(&anchor);
    let mut gen = Generator::Pell { base: base_full, free: red.free[j], dep: red.free[i], sign, slope, side, skip: 0 };
    let probe = WitnessSequence { generator: gen.clone(), objective: objective.clone(), limit: ExtReal::Finite(l.clone()) };
    let pts = probe.points(12);
    let to_red = |p: &IntPoint| -> Vec<i64> { red.free.iter().map(|&f| p[f]).collect() };
    let skip = pts.iter().position(|p| red.contains(&to_red(p)))?;
    if !pts[skip..].iter().all(|p| red.contains(&to_red(p))) {
        return None;
    }
    if let Generator::Pell { skip: s, .. } = &mut gen {
        *s = skip;
    }
    Some(MinOutcome::InfimumOnly { value: l.clone(), certificate: WitnessSequence { generator: gen, objective: objective.clone(), limit: ExtReal::Finite(l.clone()) } })
}

fn enumerate_min(red: &Reduced, lo: &[i64], hi: &[i64], spent: &mut Spent) -> Option<(IntPoint, Quad)> {
    let mut best: Option<(IntPoint, Quad)> = None;
    for_each_in_box(lo, hi, |p| {
        spent.points += 1;
        if red.contains(p) {
            let v = red.value(p);
            if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                best = Some((p.to_vec(), v));
            }
        }
        true
    });
    best
}

fn bounded_stage(red: &Reduced, x_star: &[Quad], l: &Quad, budget: &Budget, spent: &mut Spent, objective: &LinearForm) -> PieceResult {
    let inc = incumbent(red, x_star, budget.search_radius, spent);
    if let Some((p, v)) = &inc {
        if v == l {
            return PieceResult::Found(MinOutcome::Attained { point: red.lift(p), value: v.clone() });
        }
    }
    let mut rows = red.lp_rows();
    if let Some((_, v)) = &inc {
        rows.push(Constraint::le(LinearForm(red.w.clone()), v - &red.w_const));
    }
    if let Some((lo, hi)) = bounding_box(red.k(), &rows, spent) {
        if box_volume(&lo, &hi) <= budget.max_points {
            return match enumerate_min(red, &lo, &hi, spent) {
                Some((p, v)) => PieceResult::Found(MinOutcome::Attained { point: red.lift(&p), value: v }),
                None if inc.is_none() => PieceResult::Empty,
                None => unreachable!("the incumbent lies in the enumerated box"),
            };
        }
    }
    if red.k() == 2 {
        if let Some(out) = pell_probe(red, l, objective) {
            return PieceResult::Found(out);
        }
    }
    PieceResult::Open { lp_bound: ExtReal::Finite(l.clone()), best: inc.map(|(p, v)| (red.lift(&p), v)) }
}

fn piece_min(sys: &ConstraintSystem, w: &LinearForm, budget: &Budget, spent: &mut Spent) -> PieceResult {
    let Some(red) = reduce(sys, w) else { return PieceResult::Empty };
    if red.k() == 0 {
        return if red.contains(&[]) {
            PieceResult::Found(MinOutcome::Attained { point: red.base.clone(), value: red.w_const.clone() })
        } else {
            PieceResult::Empty
        };
    }
    spent.lp_solves += 1;
    match lp::minimize(&red.w, &red.lp_rows()) {
        LpOutcome::Infeasible => PieceResult::Empty,
        LpOutcome::Unbounded { point, ray } => unbounded_stage(&red, &point, &ray, w, budget, spent),
        LpOutcome::Optimal { x, value } => bounded_stage(&red, &x, &(&value + &red.w_const), budget, spent, w),
    }
}

/// Minimum of `w` over an explicit point list, with an integer fast path
/// for rational weights.
pub fn scan_finite(points: &[IntPoint], w: &LinearForm) -> Option<(IntPoint, Quad)> {
    if points.is_empty() {
        return None;
    }
    if let Some(ints) = integer_weights(w) {
        let best = points
            .iter()
            .filter_map(|p| p.iter().zip(&ints).try_fold(0i128, |acc, (&x, &c)| acc.checked_add((x as i128).checked_mul(c)?)).map(|v| (v, p)))
            .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        if let Some((_, p)) = best {
            return Some((p.clone(), w.eval_int(p)));
        }
    }
    points.iter().map(|p| (w.eval_int(p), p)).min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1))).map(|(v, p)| (p.clone(), v))
}

/// `w` scaled to integers when it is rational and small enough.
fn integer_weights(w: &LinearForm) -> Option<Vec<i128>> {
    if !w.is_rational() {
        return None;
    }
    let mut l = num_bigint::BigInt::from(1);
    for c in w.coeffs() {
        l = num_integer::Integer::lcm(&l, c.rational_part().denom());
    }
    w.coeffs().iter().map(|c| (c.rational_part() * num_rational::BigRational::from_integer(l.clone())).to_integer().to_i128()).collect()
}

/// Certified `inf{w·x : x ∈ X}`.
pub fn linear_min(spec: &LatticeSetSpec, w: &LinearForm, budget: &Budget) -> Result<MinOutcome> {
    if w.dim() != spec.dim {
        return Err(Error::Dimension(format!("weights have {} entries, lattice set has dimension {}", w.dim(), spec.dim)));
    }
    if let LatticeSet::Finite(points) = &spec.set {
        let pts: Vec<IntPoint> = points.iter().filter(|p| spec.contains(p)).cloned().collect();
        let (point, value) = scan_finite(&pts, w).ok_or(Error::EmptySet)?;
        return Ok(MinOutcome::Attained { point, value });
    }
    let mut spent = Spent::default();
    let mut results = Vec::new();
    for piece in spec.pieces() {
        let r = piece_min(&piece, w, budget, &mut spent);
        if let PieceResult::Found(MinOutcome::Unbounded(c)) = r {
            return Ok(MinOutcome::Unbounded(c));
        }
        results.push(r);
    }
    combine(results, spent)
}

fn combine(results: Vec<PieceResult>, spent: Spent) -> Result<MinOutcome> {
    let mut best: Option<MinOutcome> = None;
    let mut opens = Vec::new();
    for r in results {
        match r {
            PieceResult::Empty => {}
            PieceResult::Found(o) => {
                let better = match &best {
                    None => true,
                    // ties favour attained values
                    Some(b) => o.value() < b.value() || (o.value() == b.value() && matches!(o, MinOutcome::Attained { .. })),
                };
                if better {
                    best = Some(o);
                }
            }
            PieceResult::Open { lp_bound, best } => opens.push((lp_bound, best)),
        }
    }
    let certified = best.as_ref().and_then(MinOutcome::value);
    // an open piece is harmless when its relaxation bound cannot beat the certified value
    let undecided: Vec<_> = opens.into_iter().filter(|(lb, _)| certified.as_ref().is_none_or(|c| lb < c)).collect();
    if undecided.is_empty() {
        return best.ok_or(Error::EmptySet);
    }
    let mut seen = certified.unwrap_or(ExtReal::PosInfinity);
    for (_, b) in &undecided {
        if let Some((_, v)) = b {
            seen = seen.min(ExtReal::Finite(v.clone()));
        }
    }
    Ok(MinOutcome::Inconclusive { best_value_seen: seen, budget_spent: spent })
}

/// All lattice points of `X` when every piece has a bounded relaxation.
pub fn enumerate_points(spec: &LatticeSetSpec, budget: &Budget) -> Option<Vec<IntPoint>> {
    if let LatticeSet::Finite(points) = &spec.set {
        return Some(points.iter().filter(|p| spec.contains(p)).cloned().collect::<BTreeSet<_>>().into_iter().collect());
    }
    let mut all = BTreeSet::new();
    let mut spent = Spent::default();
    for piece in spec.pieces() {
        let Some(red) = reduce(&piece, &LinearForm::zeros(spec.dim)) else { continue };
        if red.k() == 0 {
            if red.contains(&[]) {
                all.insert(red.base.clone());
            }
            continue;
        }
        let rows = red.lp_rows();
        spent.lp_solves += 1;
        match lp::minimize(&vec![Quad::zero(); red.k()], &rows) {
            LpOutcome::Infeasible => continue,
            _ => {
                let (lo, hi) = bounding_box(red.k(), &rows, &mut spent)?;
                if box_volume(&lo, &hi) > budget.max_points {
                    return None;
                }
                for_each_in_box(&lo, &hi, |p| {
                    if red.contains(p) {
                        all.insert(red.lift(p));
                    }
                    true
                });
            }
        }
    }
    Some(all.into_iter().collect())
}
