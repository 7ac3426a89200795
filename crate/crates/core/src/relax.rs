//! The convex relaxations `min{c·x : Ax ⋈ b, x ∈ conv(X)}` (value `v*`) and
//! `min{c·x : Ax ⋈ b, x ∈ closed-conv(X)}` (value `v̄*`), and the report
//! comparing them with the Lagrangian bound `v_L`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::Quad;
use crate::conditions::{self, FarkasCertificate, RowClassification, SlaterOutcome, SlaterWitness};
use crate::dual::{maximize_dual, AscentOptions, DualBound};
use crate::error::{Error, Result};
use crate::hull::closure::{closure_lp, lattice_equations};
use crate::hull::{boxed_hull_2d, registered_closure, Box2, ClosureDescription, RegisteredClosure};
use crate::lp::{self, pad, LpOutcome};
use crate::model::{to_quads, Constraint, ConstraintSystem, ExtReal, IntPoint, LatticeSet, LinearForm, Problem, Sense};
use crate::oracle::{self, small_rays, Budget};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelaxMethod {
    Analytic,
    Boxed2d,
    FiniteLp,
}

impl fmt::Display for RelaxMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelaxMethod::Analytic => "analytic",
            RelaxMethod::Boxed2d => "boxed-2d",
            RelaxMethod::FiniteLp => "finite-lp",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxValue {
    pub value: ExtReal,
    pub attained: bool,
    /// An optimal point when `attained`; a feasible base point of `ray` when the value is `−∞`.
    pub witness: Option<Vec<Quad>>,
    /// A feasible recession direction with `c·ray < 0` when the value is `−∞`.
    pub ray: Option<Vec<Quad>>,
    pub method: RelaxMethod,
}

impl RelaxValue {
    fn infeasible(method: RelaxMethod) -> RelaxValue {
        RelaxValue { value: ExtReal::PosInfinity, attained: false, witness: None, ray: None, method }
    }

    fn from_lp(outcome: LpOutcome, n: usize, method: RelaxMethod) -> RelaxValue {
        match outcome {
            LpOutcome::Optimal { mut x, value } => {
                x.truncate(n);
                RelaxValue { value: ExtReal::Finite(value), attained: true, witness: Some(x), ray: None, method }
            }
            LpOutcome::Unbounded { mut point, mut ray } => {
                point.truncate(n);
                ray.truncate(n);
                RelaxValue { value: ExtReal::NegInfinity, attained: false, witness: Some(point), ray: Some(ray), method }
            }
            LpOutcome::Infeasible => RelaxValue::infeasible(method),
        }
    }
}

fn objective_lifted(problem: &Problem, nvars: usize) -> Vec<Quad> {
    let mut c = problem.objective.0.clone();
    c.resize(nvars, Quad::zero());
    c
}

/// `min c·Σμₚp` over convex weights with `A·Σμₚp ⋈ b`.
pub fn finite_lp(problem: &Problem, points: &[IntPoint]) -> RelaxValue {
    if points.is_empty() {
        return RelaxValue::infeasible(RelaxMethod::FiniteLp);
    }
    let k = points.len();
    let mut rows: Vec<Constraint> = problem
        .coupling
        .rows()
        .iter()
        .map(|r| Constraint::new(LinearForm(points.iter().map(|p| r.form.eval_int(p)).collect()), r.sense, r.rhs.clone()))
        .collect();
    rows.push(Constraint::eq(LinearForm(vec![Quad::one(); k]), Quad::one()));
    let c: Vec<Quad> = points.iter().map(|p| problem.objective.eval_int(p)).collect();
    match lp::minimize_with_signs(&c, &rows, &vec![true; k]) {
        LpOutcome::Optimal { x: mu, value } => {
            let n = problem.dim;
            let x: Vec<Quad> = (0..n).map(|j| points.iter().zip(&mu).filter(|(_, m)| !m.is_zero()).map(|(p, m)| m.scale_int(p[j])).sum()).collect();
            RelaxValue { value: ExtReal::Finite(value), attained: true, witness: Some(x), ray: None, method: RelaxMethod::FiniteLp }
        }
        _ => RelaxValue::infeasible(RelaxMethod::FiniteLp),
    }
}

/// A feasible integer point of the original problem and an integer
/// recession direction of `X` and of `{Ax ⋈ b}` along which `c` decreases.
fn lattice_ray_certificate(problem: &Problem, budget: &Budget) -> Option<(IntPoint, IntPoint)> {
    let LatticeSet::Poly(_) = &problem.lattice.set else { return None };
    let pieces = problem.lattice.pieces();
    let cone = pieces[0].homogenized();
    let qcone = problem.coupling.homogenized();
    let ray = small_rays(problem.dim, budget.ray_radius)
        .into_iter()
        .filter(|r| problem.objective.eval_int(r).is_negative() && cone.contains_int(r) && qcone.contains_int(r))
        .min_by_key(|r| r.iter().map(|v| v.abs()).sum::<i64>())?;
    let base = feasible_lattice_point(problem, budget)?;
    Some((base, ray))
}

/// Some integer point feasible for the original problem.
pub fn feasible_lattice_point(problem: &Problem, budget: &Budget) -> Option<IntPoint> {
    if let LatticeSet::Finite(pts) = &problem.lattice.set {
        return pts.iter().filter(|p| problem.is_feasible_point(p)).min().cloned();
    }
    let r = (budget.search_radius * 4).max(8);
    let n = problem.dim;
    let side = (2 * r + 1) as u64;
    let total = side.checked_pow(n as u32).filter(|&t| t <= budget.max_points)?;
    let mut best: Option<IntPoint> = None;
    for mut k in 0..total {
        let p: IntPoint = (0..n)
            .map(|_| {
                let v = (k % side) as i64 - r;
                k /= side;
                v
            })
            .collect();
        if problem.is_feasible_point(&p) && best.as_ref().is_none_or(|b| norm1(&p) < norm1(b)) {
            best = Some(p);
        }
    }
    best
}

fn norm1(p: &[i64]) -> i64 {
    p.iter().map(|v| v.abs()).sum()
}

/// `v̄*`.
pub fn solve_closed_conv(problem: &Problem) -> Result<RelaxValue> {
    solve_closed_conv_with(problem, &Budget::default())
}

pub fn solve_closed_conv_with(problem: &Problem, budget: &Budget) -> Result<RelaxValue> {
    if let LatticeSet::Finite(points) = &problem.lattice.set {
        return Ok(finite_lp(problem, points));
    }
    if let Some(reg) = registered_closure(&problem.lattice) {
        let u = closure_lp(&reg.closure, problem.coupling.rows())?;
        let c = objective_lifted(problem, u.nvars);
        return Ok(RelaxValue::from_lp(lp::minimize(&c, &u.rows), problem.dim, RelaxMethod::Analytic));
    }
    if let Some(points) = oracle::enumerate_points(&problem.lattice, budget) {
        return Ok(finite_lp(problem, &points));
    }
    if let Some((base, ray)) = lattice_ray_certificate(problem, budget) {
        return Ok(RelaxValue { value: ExtReal::NegInfinity, attained: false, witness: Some(to_quads(&base)), ray: Some(to_quads(&ray)), method: RelaxMethod::Analytic });
    }
    if problem.dim == 2 {
        return boxed_2d(problem);
    }
    Err(Error::Unsupported(format!("no closed form for the hull of {} in dimension {}", problem.name, problem.dim)))
}

/// Optimizes over hulls of growing boxes and accepts a value once it is
/// reached strictly inside two consecutive boxes.
fn boxed_2d(problem: &Problem) -> Result<RelaxValue> {
    let mut last: Option<RelaxValue> = None;
    for r in [16, 32, 64, 128] {
        let bx = Box2::from_ints(-r, r, -r, r)?;
        let hull = match boxed_hull_2d(&problem.lattice, &bx, &Quad::one()) {
            Ok(h) => h,
            Err(Error::EmptyRegion(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut v = polygon_lp(problem, &hull.vertices);
        v.method = RelaxMethod::Boxed2d;
        let inside = v.witness.as_ref().is_some_and(|w| !bx.on_boundary(&[w[0].clone(), w[1].clone()]));
        if inside && last.as_ref().is_some_and(|l| l.value == v.value) {
            return Ok(v);
        }
        last = inside.then_some(v);
    }
    Err(Error::Undecided(format!("{}: boxed hull values did not settle", problem.name)))
}

fn polygon_lp(problem: &Problem, vertices: &[[Quad; 2]]) -> RelaxValue {
    let k = vertices.len();
    let mut rows: Vec<Constraint> = problem
        .coupling
        .rows()
        .iter()
        .map(|r| Constraint::new(LinearForm(vertices.iter().map(|v| r.form.eval(v)).collect()), r.sense, r.rhs.clone()))
        .collect();
    rows.push(Constraint::eq(LinearForm(vec![Quad::one(); k]), Quad::one()));
    let c: Vec<Quad> = vertices.iter().map(|v| problem.objective.eval(v)).collect();
    match lp::minimize_with_signs(&c, &rows, &vec![true; k]) {
        LpOutcome::Optimal { x: mu, value } => {
            let x: Vec<Quad> = (0..2).map(|j| vertices.iter().zip(&mu).map(|(v, m)| &v[j] * m).sum()).collect();
            RelaxValue { value: ExtReal::Finite(value), attained: true, witness: Some(x), ray: None, method: RelaxMethod::Boxed2d }
        }
        _ => RelaxValue::infeasible(RelaxMethod::Boxed2d),
    }
}

/// `v*`.
pub fn solve_conv(problem: &Problem) -> Result<RelaxValue> {
    solve_conv_with(problem, &Budget::default())
}

pub fn solve_conv_with(problem: &Problem, budget: &Budget) -> Result<RelaxValue> {
    match registered_closure(&problem.lattice) {
        Some(reg) => conv_registered(problem, &reg),
        // finite sets and rational polyhedra have closed hulls
        None if problem.lattice.is_rational() => solve_closed_conv_with(problem, budget),
        None => match oracle::enumerate_points(&problem.lattice, budget) {
            Some(points) => Ok(finite_lp(problem, &points)),
            None => Err(Error::Unsupported(format!("{}: the hull of an unregistered irrational lattice set is not closed in general", problem.name))),
        },
    }
}

/// Lattice points `base + k·dir`, `lo ≤ k ≤ hi`, on an open facet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSegment {
    pub base: Vec<Quad>,
    pub dir: Vec<Quad>,
    pub lo: Option<Quad>,
    pub hi: Option<Quad>,
}

/// `conv(X)` of a registered family is the closure with every open facet
/// `F` replaced by `conv(X ∩ F)`. The optimum is the better of the part off
/// the open facets and the parts on them.
fn conv_registered(problem: &Problem, reg: &RegisteredClosure) -> Result<RelaxValue> {
    let n = problem.dim;
    let u = closure_lp(&reg.closure, problem.coupling.rows())?;
    let facets: Vec<Constraint> = reg.open_facets.iter().map(|f| pad(f, u.nvars)).collect();
    let c = objective_lifted(problem, u.nvars);
    let mut candidates: Vec<RelaxValue> = Vec::new();
    if let Some((_, tau)) = lp::max_margin(u.nvars, &u.rows, &facets) {
        if tau.is_positive() {
            match lp::minimize(&c, &u.rows) {
                LpOutcome::Unbounded { ray, .. } => {
                    let (x, _) = lp::max_margin(u.nvars, &u.rows, &facets).expect("feasible");
                    return Ok(RelaxValue { value: ExtReal::NegInfinity, attained: false, witness: Some(x[..n].to_vec()), ray: Some(ray[..n].to_vec()), method: RelaxMethod::Analytic });
                }
                LpOutcome::Optimal { value, .. } => {
                    let mut rows = u.rows.clone();
                    rows.push(Constraint::eq(LinearForm(c.clone()), value.clone()));
                    let (x, t) = lp::max_margin(u.nvars, &rows, &facets).expect("optimal face is nonempty");
                    let attained = t.is_positive();
                    candidates.push(RelaxValue { value: ExtReal::Finite(value), attained, witness: attained.then(|| x[..n].to_vec()), ray: None, method: RelaxMethod::Analytic });
                }
                LpOutcome::Infeasible => {}
            }
        }
    }
    for f in &reg.open_facets {
        let mut segments = Vec::new();
        for piece in &reg.pieces {
            if let Some(s) = facet_lattice(piece, f)? {
                segments.push(s);
            }
        }
        if !segments.is_empty() {
            candidates.push(segments_lp(problem, &segments));
        }
    }
    let best = candidates.iter().min_by(|a, b| a.value.cmp(&b.value)).cloned();
    let Some(mut best) = best else { return Ok(RelaxValue::infeasible(RelaxMethod::Analytic)) };
    if !best.attained {
        if let Some(a) = candidates.iter().find(|c| c.attained && c.value == best.value) {
            best = a.clone();
        }
    }
    best.method = RelaxMethod::Analytic;
    Ok(best)
}

/// Solves rational equations; returns a particular solution and a basis of
/// the solutions of the homogeneous system.
fn solve_affine(n: usize, eqs: &[Constraint]) -> Option<(Vec<Quad>, Vec<Vec<Quad>>)> {
    let mut m: Vec<Vec<Quad>> = eqs.iter().map(|r| r.form.0.iter().cloned().chain([r.rhs.clone()]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].recip().ok()?;
        for v in m[row].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pr = m[row].clone();
                for (v, p) in m[i].iter_mut().zip(&pr) {
                    *v -= &(&f * p);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x = vec![Quad::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][n].clone();
    }
    let basis = (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![Quad::zero(); n];
            v[f] = Quad::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -&m[i][f];
            }
            v
        })
        .collect();
    Some((x, basis))
}

/// The rational vector as a primitive integer vector.
fn primitive(v: &[Quad]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::from(1), |acc, q| acc.lcm(q.rational_part().denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| (q.rational_part() * num_rational::BigRational::from(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| x / &g).collect()
}

/// Lattice points of `piece` on the hyperplane of `facet`, when they form a
/// set of dimension at most one.
pub fn facet_lattice(piece: &ConstraintSystem, facet: &Constraint) -> Result<Option<LatticeSegment>> {
    let n = piece.dim();
    let mut eqs: Vec<Constraint> = lattice_equations(facet).to_vec();
    for r in piece.rows().iter().filter(|r| r.sense == Sense::Eq) {
        if r.is_rational() {
            eqs.push(r.clone());
        } else {
            eqs.extend(lattice_equations(r));
        }
    }
    let Some((p, basis)) = solve_affine(n, &eqs) else { return Ok(None) };
    let (base, dir) = match basis.len() {
        0 => {
            if !p.iter().all(Quad::is_integer) {
                return Ok(None);
            }
            (p, vec![Quad::zero(); n])
        }
        1 => {
            let d = primitive(&basis[0]);
            let j = d.iter().position(|x| !x.is_zero()).expect("nonzero direction");
            let dq: Vec<Quad> = d.iter().map(|x| Quad::from_bigint(x.clone())).collect();
            let span = d[j].abs().to_i64().ok_or_else(|| Error::Unsupported("facet lattice direction too large".into()))?;
            let found = (0..span).find_map(|v| {
                let s = &(&Quad::from_int(v) - &p[j]) / &dq[j];
                let z: Vec<Quad> = p.iter().zip(&dq).map(|(a, b)| a + &(&s * b)).collect();
                z.iter().all(Quad::is_integer).then_some(z)
            });
            let Some(z) = found else { return Ok(None) };
            (z, dq)
        }
        k => return Err(Error::Unsupported(format!("lattice points on an open facet span {k} dimensions"))),
    };
    let (mut lo, mut hi): (Option<Quad>, Option<Quad>) = (None, None);
    for r in piece.rows().iter().flat_map(Constraint::ge_rows) {
        let ad = r.form.eval(&dir);
        let slack = r.slack(&base);
        if ad.is_zero() {
            if slack.is_negative() {
                return Ok(None);
            }
            continue;
        }
        // slack + k·ad ≥ 0
        let t = -&slack / &ad;
        if ad.is_positive() {
            let k = Quad::from_bigint(t.ceil());
            lo = Some(lo.map_or(k.clone(), |l| l.max(k)));
        } else {
            let k = Quad::from_bigint(t.floor());
            hi = Some(hi.map_or(k.clone(), |h| h.min(k)));
        }
    }
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if l > h {
            return Ok(None);
        }
    }
    Ok(Some(LatticeSegment { base, dir, lo, hi }))
}

/// `min c·x` over `conv(∪ segments) ∩ {Ax ⋈ b}` (Balas over the segments).
fn segments_lp(problem: &Problem, segs: &[LatticeSegment]) -> RelaxValue {
    let n = problem.dim;
    let k = segs.len();
    // variables: x (n), then (μᵢ, νᵢ) per segment
    let nvars = n + 2 * k;
    let mut rows: Vec<Constraint> = problem.coupling.rows().iter().map(|r| pad(r, nvars)).collect();
    let zero = || vec![Quad::zero(); nvars];
    for j in 0..n {
        let mut c = zero();
        c[j] = Quad::one();
        for (i, s) in segs.iter().enumerate() {
            c[n + 2 * i] = -&s.base[j];
            c[n + 2 * i + 1] = -&s.dir[j];
        }
        rows.push(Constraint::eq(LinearForm(c), Quad::zero()));
    }
    let mut sum = zero();
    for (i, s) in segs.iter().enumerate() {
        let (mu, nu) = (n + 2 * i, n + 2 * i + 1);
        sum[mu] = Quad::one();
        let mut c = zero();
        c[mu] = Quad::one();
        rows.push(Constraint::ge(LinearForm(c), Quad::zero()));
        if let Some(lo) = &s.lo {
            let mut c = zero();
            c[nu] = Quad::one();
            c[mu] = -lo;
            rows.push(Constraint::ge(LinearForm(c), Quad::zero()));
        }
        if let Some(hi) = &s.hi {
            let mut c = zero();
            c[nu] = Quad::one();
            c[mu] = -hi;
            rows.push(Constraint::le(LinearForm(c), Quad::zero()));
        }
    }
    rows.push(Constraint::eq(LinearForm(sum), Quad::one()));
    RelaxValue::from_lp(lp::minimize(&objective_lifted(problem, nvars), &rows), n, RelaxMethod::Analytic)
}

/// A strict inequality among `v_L ≤ v̄* ≤ v*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gap {
    LagrangeBelowClosed,
    ClosedBelowConv,
    LagrangeBelowConv,
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gap::LagrangeBelowClosed => "v^L < v̄*",
            Gap::ClosedBelowConv => "v̄* < v*",
            Gap::LagrangeBelowConv => "v^L < v*",
        })
    }
}

/// Why `v_L = v̄*` holds for an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certification {
    /// Multipliers for the active description at an optimum of the closed relaxation.
    Theorem1(FarkasCertificate),
    /// A relative-interior point of the hull satisfying the coupling rows.
    Slater(SlaterWitness),
    /// The planar trichotomy.
    Theorem2(String),
    /// A single rational coupling row.
    Theorem3(RowClassification),
    /// Both values are `−∞`, each with an explicit witness.
    Divergence,
    /// `X` is finite or the lattice points of a rational polyhedron.
    Geoffrion,
}

impl Certification {
    pub fn label(&self) -> &'static str {
        match self {
            Certification::Theorem1(_) => "Theorem 1 (Farkas certificate)",
            Certification::Slater(_) => "Slater",
            Certification::Theorem2(_) => "Theorem 2 (dimension two)",
            Certification::Theorem3(_) => "Theorem 3 (single rational row)",
            Certification::Divergence => "divergence witnesses",
            Certification::Geoffrion => "Geoffrion (rational or finite X)",
        }
    }
}

/// Label for instances whose closed relaxation has no optimal solution and
/// where no theorem settles `v_L = v̄*`.
pub const OPEN_Q1: &str = "OPEN-Q1";

#[derive(Clone, Debug)]
pub struct GapReport {
    pub problem: String,
    pub v_l: ExtReal,
    pub v_bar_star: ExtReal,
    pub v_star: ExtReal,
    pub ordering_ok: bool,
    pub gaps: Vec<Gap>,
    pub dual: DualBound,
    pub closed: RelaxValue,
    pub conv: RelaxValue,
    pub certifications: Vec<Certification>,
    pub labels: Vec<&'static str>,
}

impl GapReport {
    pub fn has_gap(&self, g: Gap) -> bool {
        self.gaps.contains(&g)
    }

    /// Text report: exact values first, decimals second.
    pub fn render(&self) -> String {
        use fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(s, "problem: {}", self.problem);
        let value = |name: &str, v: &ExtReal, s: &mut String| {
            let _ = writeln!(s, "{name:<5} = {v:#}    (≈ {})", v.approx(12));
        };
        value("v^L", &self.v_l, &mut s);
        value("v̄*", &self.v_bar_star, &mut s);
        value("v*", &self.v_star, &mut s);
        let _ = writeln!(s, "ordering v^L ≤ v̄* ≤ v*: {}", if self.ordering_ok { "ok" } else { "VIOLATED" });
        let flags: Vec<String> = self.gaps.iter().map(Gap::to_string).collect();
        let _ = writeln!(s, "gaps: {}", if flags.is_empty() { "none".to_string() } else { flags.join(", ") });
        let _ = writeln!(s, "dual: {:?} ({})", self.dual.status, self.dual.reason);
        if let Some(w) = &self.dual.divergence {
            let _ = writeln!(s, "  divergence witness: {}", w.describe());
            let pts: Vec<String> = w.points(5).iter().map(|p| format!("{p:?}")).collect();
            let _ = writeln!(s, "  first points: {} …", pts.join(" "));
        }
        for (name, r) in [("closed-conv", &self.closed), ("conv", &self.conv)] {
            let _ = write!(s, "{name}: {:#} via {}", r.value, r.method);
            if r.attained {
                let _ = write!(s, ", attained at {}", fmt_vec(r.witness.as_deref().unwrap_or_default()));
            } else if let Some(ray) = &r.ray {
                let _ = write!(s, ", ray {} from {}", fmt_vec(ray), fmt_vec(r.witness.as_deref().unwrap_or_default()));
            } else {
                let _ = write!(s, ", not attained");
            }
            let _ = writeln!(s);
        }
        for c in &self.certifications {
            let _ = writeln!(s, "certified v^L = v̄* by {}", c.label());
            if let Certification::Theorem1(f) = c {
                let _ = writeln!(s, "  λ = {}, μ = {}, bound = {:#}", fmt_vec(&f.lambda), fmt_vec(&f.mu), f.bound);
            }
        }
        for l in &self.labels {
            let _ = writeln!(s, "label: {l}");
        }
        s
    }
}

pub fn fmt_vec(v: &[Quad]) -> String {
    let parts: Vec<String> = v.iter().map(|q| format!("{q:#}")).collect();
    format!("({})", parts.join(", "))
}

fn gaps_of(v_l: &ExtReal, v_bar: &ExtReal, v_star: &ExtReal) -> Vec<Gap> {
    let mut g = Vec::new();
    if v_l < v_bar {
        g.push(Gap::LagrangeBelowClosed);
    }
    if v_bar < v_star {
        g.push(Gap::ClosedBelowConv);
    }
    if v_l < v_star {
        g.push(Gap::LagrangeBelowConv);
    }
    g
}

/// The local description of the closed hull around `x` used for Farkas certificates.
pub fn local_description(problem: &Problem, x: &[Quad]) -> Option<ConstraintSystem> {
    match registered_closure(&problem.lattice).map(|r| r.closure) {
        Some(ClosureDescription::HalfspaceForm(s)) => Some(s),
        Some(_) => None,
        None if problem.dim == 2 => {
            let r = 8;
            let (cx, cy) = (x[0].floor().to_i64()?, x[1].floor().to_i64()?);
            let bx = Box2::from_ints(cx - r, cx + r, cy - r, cy + r).ok()?;
            let poly = boxed_hull_2d(&problem.lattice, &bx, &Quad::from_int(2)).ok()?;
            Some(conditions::polygon_rows(&poly.vertices))
        }
        None => None,
    }
}

/// Runs the dual and both relaxations and checks `v_L ≤ v̄* ≤ v*`.
pub fn gap_report(problem: &Problem) -> Result<GapReport> {
    gap_report_with(problem, &AscentOptions::default())
}

pub fn gap_report_with(problem: &Problem, ascent: &AscentOptions) -> Result<GapReport> {
    let (dual, (closed, conv)) = rayon::join(|| maximize_dual(problem, ascent), || rayon::join(|| solve_closed_conv_with(problem, &ascent.budget), || solve_conv_with(problem, &ascent.budget)));
    let (dual, closed, conv) = (dual?, closed?, conv?);
    let (v_l, v_bar, v_star) = (dual.v_l.clone(), closed.value.clone(), conv.value.clone());
    let ordering_ok = v_l <= v_bar && v_bar <= v_star;
    let gaps = gaps_of(&v_l, &v_bar, &v_star);
    let mut certifications = Vec::new();
    let mut labels = Vec::new();
    if v_l == ExtReal::NegInfinity && v_bar == ExtReal::NegInfinity && dual.divergence.is_some() && closed.ray.is_some() {
        certifications.push(Certification::Divergence);
    }
    if closed.attained {
        if let (Some(x), ExtReal::Finite(vb)) = (&closed.witness, &v_bar) {
            if let Some(local) = local_description(problem, x) {
                if let Ok(f) = conditions::farkas_certificate(problem, x, &local) {
                    if f.verify(problem, vb) {
                        certifications.push(Certification::Theorem1(f));
                    }
                }
            }
        }
    }
    if let Ok(SlaterOutcome::Holds(w)) = conditions::slater_check(problem, &ascent.budget) {
        certifications.push(Certification::Slater(w));
    }
    if problem.dim <= 2 && v_l == v_bar {
        certifications.push(Certification::Theorem2(if closed.attained {
            "optimum exists".into()
        } else if v_bar == ExtReal::NegInfinity {
            "unbounded relaxation".into()
        } else {
            "no optimum".into()
        }));
    }
    if let Ok(c) = conditions::classify_single_row(problem, &ascent.budget) {
        if c.equality_certified {
            certifications.push(Certification::Theorem3(c));
        }
    }
    if problem.lattice.is_rational() {
        certifications.push(Certification::Geoffrion);
    }
    if v_bar.is_finite() && !closed.attained && certifications.is_empty() {
        labels.push(OPEN_Q1);
    }
    Ok(GapReport { problem: problem.name.clone(), v_l, v_bar_star: v_bar, v_star, ordering_ok, gaps, dual, closed, conv, certifications, labels })
}
