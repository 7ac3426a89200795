//! Checkers for the sufficient conditions under which `v_L = v̄*`: Slater
//! points, Farkas multipliers at an optimum, the planar trichotomy, and the
//! single rational row classifier.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::Quad;
use crate::dual::eval_G;
use crate::error::{Error, Result};
use crate::hull::closure::{closure_lp, split_form};
use crate::hull::{registered_closure, ClosureDescription, Point2};
use crate::lp::{self, pad, LpOutcome};
use crate::model::{Constraint, ConstraintSystem, ExtReal, IntPoint, LatticeSet, LatticeSetSpec, LinearForm, Problem, Sense};
use crate::oracle::{self, Budget, MinOutcome};
use crate::relax::{feasible_lattice_point, gap_report, local_description, GapReport};

/// A point of `relint conv(X)` satisfying the coupling rows, as a convex
/// combination of lattice points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlaterWitness {
    pub point: Vec<Quad>,
    pub combination: Vec<(IntPoint, Quad)>,
    /// The support affinely spans the affine hull of `X`.
    pub spanning: bool,
}

impl SlaterWitness {
    pub fn verify(&self, problem: &Problem) -> bool {
        let total: Quad = self.combination.iter().map(|(_, w)| w.clone()).sum();
        let n = problem.dim;
        let combo: Vec<Quad> = (0..n).map(|j| self.combination.iter().map(|(p, w)| w.scale_int(p[j])).sum()).collect();
        total == Quad::one()
            && self.combination.iter().all(|(p, w)| w.is_positive() && problem.lattice.contains(p))
            && combo == self.point
            && problem.coupling.contains(&self.point)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlaterOutcome {
    Holds(SlaterWitness),
    FailsCertified(String),
    Inconclusive(String),
}

fn affine_rank(points: &[IntPoint]) -> usize {
    let Some(p0) = points.first() else { return 0 };
    let n = p0.len();
    let mut basis: Vec<Vec<BigRational>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for p in &points[1..] {
        let mut v: Vec<BigRational> = p.iter().zip(p0).map(|(a, b)| BigRational::from_integer(BigInt::from(a - b))).collect();
        for (b, &c) in basis.iter().zip(&pivots) {
            if !v[c].is_zero() {
                let f = v[c].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(c) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[c].recip();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            for (b, _) in basis.iter_mut().zip(&pivots) {
                if !b[c].is_zero() {
                    let f = b[c].clone();
                    for (x, y) in b.iter_mut().zip(&v) {
                        *x -= &f * y;
                    }
                }
            }
            basis.push(v);
            pivots.push(c);
            if basis.len() == n {
                break;
            }
        }
    }
    basis.len()
}

/// Lattice points of `X` available for exact reasoning, and whether they are all of `X`.
fn sample_points(spec: &LatticeSetSpec, budget: &Budget, radius: i64) -> (Vec<IntPoint>, bool) {
    if let LatticeSet::Finite(p) = &spec.set {
        return (p.clone(), true);
    }
    if let Some(p) = oracle::enumerate_points(spec, budget) {
        return (p, true);
    }
    let n = spec.dim;
    let side = (2 * radius + 1) as u64;
    let total = side.saturating_pow(n as u32).min(budget.max_points);
    let pts = (0..total)
        .into_par_iter()
        .filter_map(|mut k| {
            let p: IntPoint = (0..n)
                .map(|_| {
                    let v = (k % side) as i64 - radius;
                    k /= side;
                    v
                })
                .collect();
            spec.contains(&p).then_some(p)
        })
        .collect();
    (pts, false)
}

/// Upper bound on `dim aff(X)` from the implicit equalities of the pieces.
fn piece_dimension(spec: &LatticeSetSpec) -> usize {
    let n = spec.dim;
    spec.pieces()
        .iter()
        .map(|s| {
            let mut eqs: Vec<Vec<Quad>> = Vec::new();
            for r in s.rows() {
                let implicit = match r.sense {
                    Sense::Eq => true,
                    _ => {
                        let g = &r.ge_rows()[0];
                        matches!(lp::maximize(g.form.coeffs(), s.rows()), LpOutcome::Optimal { value, .. } if value == g.rhs)
                    }
                };
                if implicit {
                    eqs.push(r.form.0.clone());
                }
            }
            n - quad_rank(eqs)
        })
        .max()
        .unwrap_or(n)
}

fn quad_rank(mut m: Vec<Vec<Quad>>) -> usize {
    let mut rank = 0;
    let cols = m.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = m[rank][c].recip().expect("nonzero");
        let pr: Vec<Quad> = m[rank].iter().map(|x| x * &inv).collect();
        for row in m.iter_mut().skip(rank + 1) {
            let f = row[c].clone();
            if !f.is_zero() {
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x -= &(&f * y);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Tests the uniform average of the feasible lattice points in growing
/// `L∞` balls once they span the affine hull of `X`; a finite `X` uses all
/// of its feasible points.
pub fn slater_check(problem: &Problem, budget: &Budget) -> Result<SlaterOutcome> {
    let radius = (budget.search_radius * 2).max(6);
    let (points, exhaustive) = sample_points(&problem.lattice, budget, radius);
    if points.is_empty() {
        return Ok(SlaterOutcome::Inconclusive("no lattice points of X found".into()));
    }
    let full = affine_rank(&points);
    let spanning = exhaustive || full == problem.dim || full == piece_dimension(&problem.lattice);
    let mut feasible: Vec<IntPoint> = points.iter().filter(|p| problem.coupling.contains_int(p)).cloned().collect();
    feasible.sort();
    let reach = feasible.iter().map(|p| p.iter().map(|v| v.abs()).max().unwrap_or(0)).max().unwrap_or(0);
    let first = if matches!(problem.lattice.set, LatticeSet::Finite(_)) { reach } else { 0 };
    for r in first..=reach {
        let s: Vec<IntPoint> = feasible.iter().filter(|p| p.iter().all(|v| v.abs() <= r)).cloned().collect();
        if s.is_empty() || affine_rank(&s) < full {
            continue;
        }
        if !spanning {
            break;
        }
        let w = Quad::ratio(1, s.len() as i64);
        let point: Vec<Quad> = (0..problem.dim).map(|j| w.scale_int(s.iter().map(|p| p[j]).sum())).collect();
        let combination = s.into_iter().map(|p| (p, w.clone())).collect();
        return Ok(SlaterOutcome::Holds(SlaterWitness { point, combination, spanning }));
    }
    if let Some(reason) = boundary_certificate(problem, &points) {
        return Ok(SlaterOutcome::FailsCertified(reason));
    }
    Ok(SlaterOutcome::Inconclusive(format!("feasible lattice points span {} of {full} affine dimensions", affine_rank(&feasible))))
}

/// Some facet of a registered closure is tight on the whole closed feasible
/// region but not on the closure itself.
fn boundary_certificate(problem: &Problem, points: &[IntPoint]) -> Option<String> {
    let reg = registered_closure(&problem.lattice)?;
    let facets: Vec<Constraint> = match &reg.closure {
        ClosureDescription::HalfspaceForm(s) => s.rows().iter().filter(|r| r.sense != Sense::Eq).flat_map(Constraint::ge_rows).collect(),
        _ => reg.open_facets.clone(),
    };
    let cut = closure_lp(&reg.closure, problem.coupling.rows()).ok()?;
    let lifted: Vec<Constraint> = facets.iter().map(|f| pad(f, cut.nvars)).collect();
    let t1 = lp::max_margin(cut.nvars, &cut.rows, &lifted).map(|(_, t)| t);
    let loose = facets.iter().all(|f| points.iter().any(|p| f.slack_int(p).is_positive()));
    (loose && t1.is_none_or(|t| !t.is_positive()))
        .then(|| format!("the feasible region of the closed relaxation lies on a proper face of the {} closure", reg.family))
}

/// Multipliers `λ ≥ 0` (free on equality rows) and `μ ≥ 0` for the active
/// rows `Dx ≥ e` at `x*` with `λᵀA + μᵀD = c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub lambda: Vec<Quad>,
    pub mu: Vec<Quad>,
    /// Active rows in `≥` / `=` form.
    pub active_rows: ConstraintSystem,
    pub bound: Quad,
}

/// Coupling rows in `≥` / `=` form.
fn ge_or_eq(rows: &[Constraint]) -> Vec<Constraint> {
    rows.iter()
        .map(|r| match r.sense {
            Sense::Le => Constraint::ge(r.form.neg(), -&r.rhs),
            _ => r.clone(),
        })
        .collect()
}

impl FarkasCertificate {
    /// Re-checks the identity, the signs and `bound ≥ v_bar` exactly.
    pub fn verify(&self, problem: &Problem, v_bar: &Quad) -> bool {
        let a = ge_or_eq(problem.coupling.rows());
        let d = self.active_rows.rows();
        if self.lambda.len() != a.len() || self.mu.len() != d.len() {
            return false;
        }
        let signs = a.iter().zip(&self.lambda).chain(d.iter().zip(&self.mu)).all(|(r, v)| r.sense == Sense::Eq || !v.is_negative());
        let combo: Vec<Quad> = (0..problem.dim).map(|j| a.iter().zip(&self.lambda).chain(d.iter().zip(&self.mu)).map(|(r, v)| &r.form.0[j] * v).sum()).collect();
        let bound: Quad = a.iter().zip(&self.lambda).chain(d.iter().zip(&self.mu)).map(|(r, v)| &r.rhs * v).sum();
        signs && combo == problem.objective.0 && bound == self.bound && &bound >= v_bar
    }
}

pub fn farkas_certificate(problem: &Problem, x_star: &[Quad], polytope: &ConstraintSystem) -> Result<FarkasCertificate> {
    let n = problem.dim;
    if x_star.len() != n || polytope.dim() != n {
        return Err(Error::Dimension("x* and the local description must live in the problem dimension".into()));
    }
    let a = ge_or_eq(problem.coupling.rows());
    let d: Vec<Constraint> = ge_or_eq(polytope.rows()).into_iter().filter(|r| r.slack(x_star).is_zero()).collect();
    let (m, k) = (a.len(), d.len());
    let all: Vec<&Constraint> = a.iter().chain(&d).collect();
    let rows: Vec<Constraint> = (0..n).map(|j| Constraint::eq(LinearForm(all.iter().map(|r| r.form.0[j].clone()).collect()), problem.objective.0[j].clone())).collect();
    let obj: Vec<Quad> = all.iter().map(|r| -&r.rhs).collect();
    let signs: Vec<bool> = all.iter().map(|r| r.sense != Sense::Eq).collect();
    let (mult, bound) = match lp::minimize_with_signs(&obj, &rows, &signs) {
        LpOutcome::Optimal { x, value } => (x, -value),
        LpOutcome::Unbounded { .. } => return Err(Error::CertificateNotFound("multiplier objective is unbounded; x* is not feasible".into())),
        LpOutcome::Infeasible => return Err(Error::CertificateNotFound("no multipliers reproduce c from the active rows".into())),
    };
    let v = problem.objective.eval(x_star);
    if bound < v {
        return Err(Error::CertificateNotFound(format!("best bound {bound} is below c·x* = {v}")));
    }
    Ok(FarkasCertificate { lambda: mult[..m].to_vec(), mu: mult[m..m + k].to_vec(), active_rows: ConstraintSystem::with_rows(n, d)?, bound })
}

/// The three cases of the single-row argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowCase {
    /// `X ⊆ {a·x ≥ b}`.
    CaseI,
    /// Lattice points of `X` on two levels `b ≤ β₁ < β₂`.
    CaseII { beta1: BigInt, beta2: BigInt, witnesses: [IntPoint; 2] },
    /// `X ∩ {a·x ≥ b} ⊆ {a·x = b}`.
    CaseIII,
}

/// The large-multiplier argument replayed on a case III instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseIIIReplay {
    pub v_star: Quad,
    pub inf_cx: Quad,
    /// Multiplier for the integral row.
    pub lambda: Quad,
    /// `min(v*, λ + inf c·x)`.
    pub bound: Quad,
    /// `G` at the same multiplier on the original row.
    pub dual_value: ExtReal,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowClassification {
    pub case: RowCase,
    /// The factor that made the row integral.
    pub scale: Quad,
    /// The integral row `a·x ≥ b`.
    pub row: Constraint,
    pub inf_cx: Option<ExtReal>,
    /// `inf{c·x : x ∈ X}` is certified finite, so `v_L = v̄* = v*`.
    pub equality_certified: bool,
    pub replay: Option<CaseIIIReplay>,
}

fn with_rows(spec: &LatticeSetSpec, extra: &[Constraint]) -> Result<LatticeSetSpec> {
    let add = |s: &ConstraintSystem| -> Result<ConstraintSystem> {
        let mut s = s.clone();
        for r in extra {
            s.push(r.clone())?;
        }
        Ok(s)
    };
    let set = match &spec.set {
        LatticeSet::Finite(p) => LatticeSet::Finite(p.iter().filter(|p| extra.iter().all(|r| r.holds_int(p))).cloned().collect()),
        LatticeSet::Poly(s) => LatticeSet::Poly(add(s)?),
        LatticeSet::Union(ps) => LatticeSet::Union(ps.iter().map(add).collect::<Result<_>>()?),
    };
    Ok(LatticeSetSpec { dim: spec.dim, set, nonneg: spec.nonneg.clone() })
}

/// A certified lower bound on `inf{w·x : x ∈ spec}`, `None` when the oracle
/// cannot tell.
fn certified_inf(spec: &LatticeSetSpec, w: &LinearForm, budget: &Budget) -> Result<Option<ExtReal>> {
    match oracle::linear_min(spec, w, budget) {
        Ok(MinOutcome::Attained { value, .. }) | Ok(MinOutcome::InfimumOnly { value, .. }) => Ok(Some(ExtReal::Finite(value))),
        Ok(MinOutcome::Unbounded(_)) => Ok(Some(ExtReal::NegInfinity)),
        Ok(MinOutcome::Inconclusive { .. }) => Ok(None),
        Err(Error::EmptySet) => Ok(Some(ExtReal::PosInfinity)),
        Err(e) => Err(e),
    }
}

pub fn classify_single_row(problem: &Problem, budget: &Budget) -> Result<RowClassification> {
    if problem.num_rows() != 1 {
        return Err(Error::NotApplicable(format!("{} coupling rows; the classifier only handles a single row", problem.num_rows())));
    }
    let r0 = &problem.coupling.rows()[0];
    if !r0.is_rational() {
        return Err(Error::NotApplicable("the coupling row has irrational data".into()));
    }
    let ge = match r0.sense {
        Sense::Ge => r0.clone(),
        Sense::Le => Constraint::ge(r0.form.neg(), -&r0.rhs),
        Sense::Eq => return Err(Error::NotApplicable("the coupling row is an equation".into())),
    };
    let den = ge.form.0.iter().chain([&ge.rhs]).fold(BigInt::one(), |acc, q| acc.lcm(q.rational_part().denom()));
    let scale = Quad::from_bigint(den);
    let row = Constraint::ge(ge.form.scaled(&scale), &ge.rhs * &scale);
    let b = row.rhs.to_integer().expect("integral after scaling");
    let spec = &problem.lattice;
    let inf_cx = certified_inf(spec, &problem.objective, budget)?;
    let equality_certified = inf_cx.as_ref().is_some_and(ExtReal::is_finite);

    let min_a = certified_inf(spec, &row.form, budget)?;
    let case = if min_a.as_ref().is_some_and(|v| *v >= ExtReal::Finite(row.rhs.clone())) {
        RowCase::CaseI
    } else {
        let (points, _) = sample_points(spec, budget, (budget.search_radius * 2).max(6));
        let mut levels: Vec<(BigInt, IntPoint)> = points
            .iter()
            .filter_map(|p| {
                let v = row.form.eval_int(p).to_integer()?;
                (v >= b).then(|| (v, p.clone()))
            })
            .collect();
        levels.sort();
        let mut distinct: Vec<(BigInt, IntPoint)> = Vec::new();
        for (v, p) in levels {
            match distinct.last_mut() {
                Some((lv, lp)) if *lv == v => *lp = p,
                _ => distinct.push((v, p)),
            }
        }
        if distinct.len() >= 2 {
            let (b1, w1) = distinct[0].clone();
            let (b2, w2) = distinct[1].clone();
            RowCase::CaseII { beta1: b1, beta2: b2, witnesses: [w1, w2] }
        } else {
            let upper = with_rows(spec, std::slice::from_ref(&row))?;
            let max_a = certified_inf(&upper, &row.form.neg(), budget)?;
            if max_a.as_ref().is_some_and(|v| *v >= ExtReal::Finite(-&row.rhs)) {
                RowCase::CaseIII
            } else {
                return Err(Error::Undecided("lattice points found on at most one level, and the level structure is not certified".into()));
            }
        }
    };
    let replay = match (&case, &inf_cx) {
        (RowCase::CaseIII, Some(ExtReal::Finite(inf))) => {
            let on = with_rows(spec, &[Constraint::eq(row.form.clone(), row.rhs.clone())])?;
            match certified_inf(&on, &problem.objective, budget)? {
                Some(ExtReal::Finite(v_star)) => {
                    let lambda = &(&v_star - inf) + &Quad::one();
                    let bound = v_star.clone().min(&lambda + inf);
                    let dual_value = eval_G(problem, &[&lambda * &scale])?.value;
                    let holds = bound >= v_star && dual_value >= ExtReal::Finite(v_star.clone());
                    Some(CaseIIIReplay { v_star, inf_cx: inf.clone(), lambda, bound, dual_value, holds })
                }
                _ => None,
            }
        }
        _ => None,
    };
    Ok(RowClassification { case, scale, row, inf_cx, equality_certified, replay })
}

/// Half-planes of a counter-clockwise polygon; segments and points become
/// equations plus bounds.
pub fn polygon_rows(vertices: &[Point2]) -> ConstraintSystem {
    let line = |a: &Point2, b: &Point2| {
        // (b − a) × (p − a) ≥ 0
        let (dx, dy) = (&b[0] - &a[0], &b[1] - &a[1]);
        let form = LinearForm(vec![-&dy, dx.clone()]);
        let rhs = &(-&dy) * &a[0] + &dx * &a[1];
        Constraint::ge(form, rhs)
    };
    let rows = match vertices.len() {
        0 => vec![Constraint::ge(LinearForm::zeros(2), Quad::one())],
        1 => (0..2)
            .map(|j| {
                let mut e = vec![Quad::zero(); 2];
                e[j] = Quad::one();
                Constraint::eq(LinearForm(e), vertices[0][j].clone())
            })
            .collect(),
        2 => {
            let (a, b) = (&vertices[0], &vertices[1]);
            let l = line(a, b);
            let dir = LinearForm(vec![&b[0] - &a[0], &b[1] - &a[1]]);
            vec![Constraint::eq(l.form, l.rhs), Constraint::ge(dir.clone(), dir.eval(a)), Constraint::le(dir.clone(), dir.eval(b))]
        }
        k => (0..k).map(|i| line(&vertices[i], &vertices[(i + 1) % k])).collect(),
    };
    ConstraintSystem::with_rows(2, rows).expect("planar rows")
}

/// Which branch of the planar trichotomy applies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dim2Branch {
    /// The closed relaxation has an optimum.
    Optimum(FarkasCertificate),
    /// No optimum and a one-dimensional feasible region: `v̄* = −∞`.
    Divergence { base: Vec<Quad>, ray: Vec<Quad> },
    /// No optimum and a two-dimensional feasible region.
    Slater(SlaterWitness),
}

#[derive(Clone, Debug)]
pub struct Dim2Outcome {
    pub branch: Dim2Branch,
    pub report: GapReport,
    /// `v_L = v̄*` for the computed values.
    pub equality: bool,
}

fn feasible_region_full(problem: &Problem, budget: &Budget) -> bool {
    if let Some(reg) = registered_closure(&problem.lattice) {
        let Ok(u) = closure_lp(&reg.closure, problem.coupling.rows()) else { return false };
        let strict: Vec<Constraint> = match &reg.closure {
            ClosureDescription::HalfspaceForm(s) => s.rows().iter().chain(problem.coupling.rows()).cloned().collect(),
            _ => reg.open_facets.iter().chain(problem.coupling.rows()).cloned().collect(),
        };
        let strict: Vec<Constraint> = strict.iter().map(|r| pad(r, u.nvars)).collect();
        return lp::max_margin(u.nvars, &u.rows, &strict).is_some_and(|(_, t)| t.is_positive());
    }
    let (points, _) = sample_points(&problem.lattice, budget, 8);
    let feasible: Vec<IntPoint> = points.into_iter().filter(|p| problem.coupling.contains_int(p)).collect();
    affine_rank(&feasible) == problem.dim
}

pub fn dim2_pipeline(problem: &Problem) -> Result<Dim2Outcome> {
    if problem.dim > 2 {
        return Err(Error::Precondition(format!("the planar pipeline needs n ≤ 2, got {}", problem.dim)));
    }
    let budget = Budget::default();
    if feasible_lattice_point(problem, &budget).is_none() {
        return Err(Error::Precondition("no feasible lattice point found; feasibility of the integer program is not established".into()));
    }
    let report = gap_report(problem)?;
    let branch = if report.closed.attained {
        let x = report.closed.witness.clone().expect("attained values carry a witness");
        let local = local_description(problem, &x).ok_or_else(|| Error::Unsupported("no local description of the hull at the optimum".into()))?;
        Dim2Branch::Optimum(farkas_certificate(problem, &x, &local)?)
    } else if !feasible_region_full(problem, &budget) {
        match (&report.closed.witness, &report.closed.ray) {
            (Some(base), Some(ray)) => Dim2Branch::Divergence { base: base.clone(), ray: ray.clone() },
            _ => return Err(Error::Undecided("relaxation has no optimum but no divergent ray was found".into())),
        }
    } else {
        match slater_check(problem, &budget)? {
            SlaterOutcome::Holds(w) => Dim2Branch::Slater(w),
            other => return Err(Error::Undecided(format!("two-dimensional feasible region but no Slater point: {other:?}"))),
        }
    };
    let equality = report.v_l == report.v_bar_star;
    Ok(Dim2Outcome { branch, report, equality })
}

/// Outcome of the search for rational hyperplanes separating the coupling
/// region from a half-space closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationReport {
    /// Distinct rational coefficient values per coordinate.
    pub values_per_coordinate: usize,
    /// Coefficient vectors tested exactly.
    pub examined: u64,
    pub rational_separators: Vec<Vec<BigRational>>,
    /// The closure's own hyperplane separates the two sets.
    pub closure_hyperplane_separates: bool,
    /// A common point of the coupling region and the closure, if they touch.
    pub touching: Option<Vec<Quad>>,
}

/// Reduced fractions `p/q` with `1 ≤ q ≤ max_den` and `|p| ≤ max_num`.
pub fn bounded_fractions(max_den: i64, max_num: i64) -> Vec<BigRational> {
    let mut v: Vec<BigRational> = (1..=max_den)
        .flat_map(|q| (-max_num..=max_num).filter(move |p| p.gcd(&q) == 1 || *p == 0 && q == 1).map(move |p| BigRational::new(p.into(), q.into())))
        .collect();
    v.sort();
    v.dedup();
    v
}

fn cross_i(a: &[i128; 3], b: &[i128; 3]) -> [i128; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn integral(v: &[BigRational]) -> [i128; 3] {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let c = content(&ints);
    let c = if c.is_zero() { BigInt::one() } else { c };
    let mut out = [0i128; 3];
    for (o, x) in out.iter_mut().zip(&ints) {
        *o = (x / &c).to_i128().expect("small closure normal");
    }
    out
}

fn cross(a: &[BigRational], b: &[BigRational]) -> [BigRational; 3] {
    [&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
}

/// Searches rational `a` with coefficients in [`bounded_fractions`] for a
/// hyperplane `a·x = β` separating `{Ax ⋈ b}` from the closure
/// `T = {g·x ≥ h}` of a three-dimensional half-space lattice set.
///
/// A rational lineality direction `d` of `T` forces `a·d = 0`, so one
/// coordinate of `a` is solved for; `T ⊆ {a·x ≥ β}` or `T ⊆ {a·x ≤ β}` then
/// needs `a ∥ g`, tested through the rational and surd parts of `g`.
pub fn separation_search(problem: &Problem, max_den: i64) -> Result<SeparationReport> {
    let reg = registered_closure(&problem.lattice).ok_or_else(|| Error::NotApplicable("the lattice set has no registered closure".into()))?;
    let ClosureDescription::HalfspaceForm(t) = &reg.closure else { return Err(Error::NotApplicable("closure is not a half-space".into())) };
    if t.len() != 1 || problem.dim != 3 {
        return Err(Error::NotApplicable("separation search needs a single half-space in dimension three".into()));
    }
    let g = t.rows()[0].ge_rows().remove(0);
    let (gr, gs) = split_form(&g.form);
    let rat = |f: &LinearForm| -> Vec<BigRational> { f.0.iter().map(|q| q.rational_part().clone()).collect() };
    let (gr, gs) = (rat(&gr), rat(&gs));
    let d = integral(&cross(&gr, &gs));
    let k = d.iter().position(|x| *x != 0).ok_or_else(|| Error::NotApplicable("closure normal is rational".into()))?;
    let others: Vec<usize> = (0..3).filter(|&j| j != k).collect();
    let (gr, gs) = (integral(&gr), integral(&gs));
    let values = bounded_fractions(max_den, max_den);
    let small: Vec<(i128, i128)> = values.iter().map(|v| (v.numer().to_i128().unwrap_or(0), v.denom().to_i128().unwrap_or(1))).collect();
    let found: Vec<Vec<BigRational>> = small
        .par_iter()
        .flat_map_iter(|&(p0, q0)| {
            let (d, others, gr, gs, small) = (&d, &others, &gr, &gs, &small);
            small.iter().filter_map(move |&(p1, q1)| {
                let num = -(p0 * d[others[0]] * q1 + p1 * d[others[1]] * q0);
                let den = q0 * q1 * d[k];
                let g = num.gcd(&den) * den.signum();
                let (pk, qk) = if g == 0 { (0, 1) } else { (num / g, den / g) };
                if qk > max_den as i128 || pk.abs() > max_den as i128 || (p0 == 0 && p1 == 0 && pk == 0) {
                    return None;
                }
                let mut a = [0i128; 3];
                let l = q0.lcm(&q1).lcm(&qk);
                a[others[0]] = p0 * (l / q0);
                a[others[1]] = p1 * (l / q1);
                a[k] = pk * (l / qk);
                if cross_i(&a, gr) != [0; 3] || cross_i(&a, gs) != [0; 3] {
                    return None;
                }
                let a: Vec<BigRational> = a.iter().map(|x| BigRational::new(BigInt::from(*x), BigInt::from(l))).collect();
                separates_lp(problem, t, &a).then_some(a)
            })
        })
        .collect();
    let examined = (values.len() as u64).pow(2);
    let pmax = match lp::maximize(g.form.coeffs(), problem.coupling.rows()) {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    };
    let closure_hyperplane_separates = pmax.as_ref().is_some_and(|v| *v <= g.rhs);
    let mut both = problem.coupling.rows().to_vec();
    both.push(g.clone());
    let touching = lp::feasible_point(3, &both);
    Ok(SeparationReport { values_per_coordinate: values.len(), examined, rational_separators: found, closure_hyperplane_separates, touching })
}

fn separates_lp(problem: &Problem, t: &ConstraintSystem, a: &[BigRational]) -> bool {
    let a: Vec<Quad> = a.iter().map(|x| Quad::rational(x.clone())).collect();
    let neg: Vec<Quad> = a.iter().map(|x| -x).collect();
    let bound = |c: &[Quad], rows: &[Constraint]| match lp::minimize(c, rows) {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    };
    let (t_min, t_max) = (bound(&a, t.rows()), bound(&neg, t.rows()).map(|v| -v));
    let (p_min, p_max) = (bound(&a, problem.coupling.rows()), bound(&neg, problem.coupling.rows()).map(|v| -v));
    matches!((&t_min, &p_max), (Some(x), Some(y)) if x >= y) || matches!((&t_max, &p_min), (Some(x), Some(y)) if x <= y)
}

/// The integer gcd of a vector.
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x)).abs()
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin;

    fn q(n: i64) -> Quad {
        Quad::from_int(n)
    }

    fn triangle(k: i64, row: Constraint, c: &[i64]) -> Problem {
        let x = ConstraintSystem::with_rows(2, vec![Constraint::le(LinearForm::from_ints(&[1, 1]), q(k))]).unwrap();
        let lattice = LatticeSetSpec::poly(x).unwrap().with_nonneg(&[0, 1]).unwrap();
        Problem::new("triangle", LinearForm::from_ints(c), ConstraintSystem::with_rows(2, vec![row]).unwrap(), lattice).unwrap()
    }

    #[test]
    fn slater_examples() {
        let p = triangle(3, Constraint::ge(LinearForm::from_ints(&[1, 1]), q(1)), &[1, 1]);
        let SlaterOutcome::Holds(w) = slater_check(&p, &Budget::default()).unwrap() else { panic!() };
        assert_eq!(w.point, vec![Quad::ratio(2, 3), Quad::ratio(2, 3)]);
        assert!(w.spanning && w.verify(&p));

        let line = LatticeSetSpec::finite(2, (0..=3).map(|t| vec![t, t]).collect()).unwrap();
        let p = Problem::new("line", LinearForm::from_ints(&[1, 0]), ConstraintSystem::with_rows(2, vec![Constraint::ge(LinearForm::from_ints(&[1, 0]), q(0))]).unwrap(), line).unwrap();
        let SlaterOutcome::Holds(w) = slater_check(&p, &Budget::default()).unwrap() else { panic!() };
        assert_eq!(w.point, vec![Quad::ratio(3, 2), Quad::ratio(3, 2)]);
        assert!(w.verify(&p));

        let ex1 = builtin("ex1").unwrap();
        assert!(matches!(slater_check(&ex1, &Budget::default()).unwrap(), SlaterOutcome::FailsCertified(_)));
        let ex2 = builtin("ex2").unwrap();
        assert!(matches!(slater_check(&ex2, &Budget::default()).unwrap(), SlaterOutcome::FailsCertified(_)));
    }

    #[test]
    fn farkas_examples() {
        let ex3 = builtin("ex3").unwrap();
        let t = registered_closure(&ex3.lattice).unwrap();
        let ClosureDescription::HalfspaceForm(s) = t.closure else { panic!() };
        let f = farkas_certificate(&ex3, &[q(1), q(1), q(1)], &s).unwrap();
        assert_eq!(f.bound, q(1));
        assert!(f.verify(&ex3, &q(1)));

        let bx = ConstraintSystem::with_rows(
            2,
            vec![Constraint::ge(LinearForm::from_ints(&[1, 0]), q(0)), Constraint::le(LinearForm::from_ints(&[1, 0]), q(2)), Constraint::ge(LinearForm::from_ints(&[0, 1]), q(0)), Constraint::le(LinearForm::from_ints(&[0, 1]), q(2))],
        )
        .unwrap();
        let lattice = LatticeSetSpec::poly(bx.clone()).unwrap();
        let p = Problem::new("box", LinearForm::from_ints(&[1, 0]), ConstraintSystem::with_rows(2, vec![Constraint::ge(LinearForm::from_ints(&[1, 0]), q(1))]).unwrap(), lattice).unwrap();
        let f = farkas_certificate(&p, &[q(1), q(1)], &bx).unwrap();
        assert_eq!((f.lambda.clone(), f.mu.len(), f.bound.clone()), (vec![q(1)], 0, q(1)));

        // x* interior with c not a combination of A: no certificate
        let p2 = Problem::new("box2", LinearForm::from_ints(&[0, 1]), p.coupling.clone(), p.lattice.clone()).unwrap();
        assert!(matches!(farkas_certificate(&p2, &[q(1), q(1)], &bx), Err(Error::CertificateNotFound(_))));
    }

    #[test]
    fn row_cases() {
        let b = Budget::default();
        let p = triangle(4, Constraint::ge(LinearForm::from_ints(&[1, 1]), q(1)), &[1, 1]);
        let c = classify_single_row(&p, &b).unwrap();
        assert_eq!(c.case, RowCase::CaseII { beta1: 1.into(), beta2: 2.into(), witnesses: [vec![1, 0], vec![2, 0]] });

        let origin = LatticeSetSpec::finite(2, vec![vec![0, 0]]).unwrap();
        let p = Problem::new("origin", LinearForm::from_ints(&[1, 1]), ConstraintSystem::with_rows(2, vec![Constraint::ge(LinearForm::from_ints(&[1, 1]), q(0))]).unwrap(), origin).unwrap();
        assert_eq!(classify_single_row(&p, &b).unwrap().case, RowCase::CaseI);

        let strip = ConstraintSystem::with_rows(2, vec![Constraint::le(LinearForm::from_ints(&[0, 1]), q(1))]).unwrap();
        let lattice = LatticeSetSpec::poly(strip).unwrap().with_nonneg(&[0, 1]).unwrap();
        let p = Problem::new("strip", LinearForm::from_ints(&[1, -1]), ConstraintSystem::with_rows(2, vec![Constraint::ge(LinearForm::from_ints(&[0, -1]), q(0))]).unwrap(), lattice).unwrap();
        let c = classify_single_row(&p, &b).unwrap();
        assert_eq!(c.case, RowCase::CaseIII);
        let r = c.replay.unwrap();
        assert!(r.holds);
        assert_eq!((r.v_star, r.inf_cx, r.lambda), (q(0), q(-1), q(2)));

        let ex3 = builtin("ex3").unwrap();
        assert!(matches!(classify_single_row(&ex3, &b), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn scaled_row() {
        let p = triangle(4, Constraint::ge(LinearForm(vec![Quad::ratio(1, 2), Quad::ratio(1, 3)]), Quad::ratio(1, 6)), &[1, 1]);
        let c = classify_single_row(&p, &Budget::default()).unwrap();
        assert_eq!(c.scale, q(6));
        assert_eq!(c.row, Constraint::ge(LinearForm::from_ints(&[3, 2]), q(1)));
    }

    #[test]
    fn planar_pipeline() {
        let ex1 = builtin("ex1").unwrap();
        let o = dim2_pipeline(&ex1).unwrap();
        assert!(matches!(o.branch, Dim2Branch::Divergence { .. }));
        assert!(o.equality && o.report.v_l == ExtReal::NegInfinity);

        let p = triangle(3, Constraint::ge(LinearForm::from_ints(&[1, 1]), q(1)), &[1, 2]);
        let o = dim2_pipeline(&p).unwrap();
        assert!(matches!(o.branch, Dim2Branch::Optimum(_)));
        assert!(o.equality && o.report.v_star == o.report.v_l);

        let quadrant = LatticeSetSpec::poly(ConstraintSystem::new(2)).unwrap().with_nonneg(&[0, 1]).unwrap();
        let p = Problem::new("quadrant", LinearForm::from_ints(&[-1, 0]), ConstraintSystem::with_rows(2, vec![Constraint::ge(LinearForm::from_ints(&[1, 1]), q(1))]).unwrap(), quadrant).unwrap();
        let o = dim2_pipeline(&p).unwrap();
        assert!(matches!(o.branch, Dim2Branch::Slater(_)), "{:?}", o.branch);
        assert!(o.equality);

        let diag = LatticeSetSpec::poly(ConstraintSystem::with_rows(2, vec![Constraint::eq(LinearForm::from_ints(&[1, -1]), q(0))]).unwrap()).unwrap();
        let p = Problem::new("diagonal", LinearForm::from_ints(&[-1, -1]), ConstraintSystem::with_rows(2, vec![Constraint::ge(LinearForm::from_ints(&[1, 0]), q(0))]).unwrap(), diag).unwrap();
        let o = dim2_pipeline(&p).unwrap();
        assert!(matches!(o.branch, Dim2Branch::Divergence { .. }), "{:?}", o.branch);
        assert!(o.equality);
    }

    #[test]
    fn no_rational_separator_small() {
        let ex3 = builtin("ex3").unwrap();
        let r = separation_search(&ex3, 6).unwrap();
        assert!(r.rational_separators.is_empty());
        assert!(r.closure_hyperplane_separates);
        assert_eq!(r.touching, Some(vec![q(1), q(1), q(1)]));
    }
}
