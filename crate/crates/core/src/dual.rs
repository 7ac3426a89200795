//! The dual function `G(λ) = inf{c·x + λ·(b − Ax) : x ∈ X}` and its maximization.
//!
//! `≤` rows are negated into `≥` form, so every inequality multiplier is
//! nonnegative; equality rows carry a free multiplier.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::arith::Quad;
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::model::{Constraint, ConstraintSystem, ExtReal, IntPoint, LatticeSet, LatticeSetSpec, LinearForm, Problem, Sense};
use crate::oracle::{self, Budget, Generator, MinOutcome, WitnessSequence};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualEval {
    pub lambda: Vec<Quad>,
    /// Exact `G(λ)` when `certified`, otherwise an upper bound on it.
    pub value: ExtReal,
    pub minimizer: Option<IntPoint>,
    /// `b − A·x*` for the minimizer.
    pub supergradient: Option<Vec<Quad>>,
    pub certificate: Option<WitnessSequence>,
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualStatus {
    Certified,
    BestEffort,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBound {
    pub v_l: ExtReal,
    pub best_lambda: Option<Vec<Quad>>,
    pub status: DualStatus,
    pub trace: Vec<DualEval>,
    /// For `v_L = −∞`: points of `X` with `c·x → −∞` and `b − Ax` bounded,
    /// which drive `G(λ)` to `−∞` for every `λ` at once.
    pub divergence: Option<WitnessSequence>,
    /// How the status was reached.
    pub reason: String,
}

impl DualBound {
    /// `lambda,value,certified` per trace row; vectors are `;`-separated,
    /// values exact, `-inf` for `−∞`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,value,certified\n");
        for e in &self.trace {
            let lam: Vec<String> = e.lambda.iter().map(|v| format!("{v:#}")).collect();
            let val = match &e.value {
                ExtReal::Finite(q) => format!("{q:#}"),
                other => other.to_string(),
            };
            let _ = writeln!(out, "{},{},{}", lam.join(";"), val, e.certified);
        }
        out
    }
}

/// Coupling rows in `≥` form, with a flag for free (equality) multipliers.
fn ge_rows(problem: &Problem) -> Vec<(Vec<Quad>, Quad, bool)> {
    problem
        .coupling
        .rows()
        .iter()
        .map(|r| match r.sense {
            Sense::Ge => (r.form.coeffs().to_vec(), r.rhs.clone(), false),
            Sense::Le => (r.form.neg().0, -&r.rhs, false),
            Sense::Eq => (r.form.coeffs().to_vec(), r.rhs.clone(), true),
        })
        .collect()
}

/// Evaluates `G` on one problem, caching the point list of a bounded `X`.
pub struct DualFunction<'a> {
    problem: &'a Problem,
    rows: Vec<(Vec<Quad>, Quad, bool)>,
    budget: Budget,
    points: Option<Vec<IntPoint>>,
}

impl<'a> DualFunction<'a> {
    pub fn new(problem: &'a Problem, budget: Budget) -> Self {
        let points = oracle::enumerate_points(&problem.lattice, &budget);
        DualFunction { problem, rows: ge_rows(problem), budget, points }
    }

    pub fn problem(&self) -> &Problem {
        self.problem
    }

    /// Whether the multiplier for row `i` is sign-free.
    pub fn is_free(&self, i: usize) -> bool {
        self.rows[i].2
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// `c − Aᵀλ` in `≥` form.
    pub fn weights(&self, lambda: &[Quad]) -> LinearForm {
        let mut w = self.problem.objective.0.clone();
        for ((a, _, _), l) in self.rows.iter().zip(lambda) {
            if l.is_zero() {
                continue;
            }
            for (wj, aj) in w.iter_mut().zip(a) {
                if !aj.is_zero() {
                    *wj -= &(aj * l);
                }
            }
        }
        LinearForm(w)
    }

    /// `b − A·x` in `≥` form.
    pub fn slack_gradient(&self, x: &[i64]) -> Vec<Quad> {
        self.rows.iter().map(|(a, b, _)| b - &LinearForm(a.clone()).eval_int(x)).collect()
    }

    pub fn lambda_dot_b(&self, lambda: &[Quad]) -> Quad {
        self.rows.iter().zip(lambda).map(|((_, b, _), l)| b * l).sum()
    }

    pub fn eval(&self, lambda: &[Quad]) -> Result<DualEval> {
        if lambda.len() != self.m() {
            return Err(Error::Dimension(format!("λ has {} entries, expected {}", lambda.len(), self.m())));
        }
        if let Some(i) = (0..self.m()).find(|&i| !self.is_free(i) && lambda[i].is_negative()) {
            return Err(Error::Domain(format!("multiplier {} of inequality row {} is negative", lambda[i], i + 1)));
        }
        let w = self.weights(lambda);
        let lb = self.lambda_dot_b(lambda);
        let outcome = match &self.points {
            Some(points) => {
                let (point, value) = oracle::scan_finite(points, &w).ok_or(Error::EmptySet)?;
                MinOutcome::Attained { point, value }
            }
            None => oracle::linear_min(&self.problem.lattice, &w, &self.budget)?,
        };
        let lambda = lambda.to_vec();
        Ok(match outcome {
            MinOutcome::Attained { point, value } => {
                let g = self.slack_gradient(&point);
                DualEval { lambda, value: ExtReal::Finite(&lb + &value), minimizer: Some(point), supergradient: Some(g), certificate: None, certified: true }
            }
            MinOutcome::Unbounded(c) => DualEval { lambda, value: ExtReal::NegInfinity, minimizer: None, supergradient: None, certificate: Some(c), certified: true },
            MinOutcome::InfimumOnly { value, certificate } => {
                DualEval { lambda, value: ExtReal::Finite(&lb + &value), minimizer: None, supergradient: None, certificate: Some(certificate), certified: true }
            }
            MinOutcome::Inconclusive { best_value_seen, .. } => DualEval { lambda, value: best_value_seen.plus(&lb), minimizer: None, supergradient: None, certificate: None, certified: false },
        })
    }

    /// Points of `X ∩ {b − Ax ≤ β}` (two-sided on equality rows) along which
    /// `c·x → −∞`. When they exist `G ≡ −∞`.
    pub fn divergence_certificate(&self, beta: &Quad) -> Result<Option<WitnessSequence>> {
        let n = self.problem.dim;
        let mut extra = Vec::new();
        for (a, b, free) in &self.rows {
            let form = LinearForm(a.clone());
            extra.push(Constraint::ge(form.clone(), b - beta));
            if *free {
                extra.push(Constraint::le(form, b + beta));
            }
        }
        let spec = &self.problem.lattice;
        let with = |s: &ConstraintSystem| -> Result<ConstraintSystem> {
            let mut s = s.clone();
            for r in &extra {
                s.push(r.clone())?;
            }
            Ok(s)
        };
        let set = match &spec.set {
            LatticeSet::Finite(_) => return Ok(None),
            LatticeSet::Poly(s) => LatticeSet::Poly(with(s)?),
            LatticeSet::Union(ps) => LatticeSet::Union(ps.iter().map(with).collect::<Result<_>>()?),
        };
        let restricted = LatticeSetSpec { dim: n, set, nonneg: spec.nonneg.clone() };
        match oracle::linear_min(&restricted, &self.problem.objective, &self.budget) {
            Ok(MinOutcome::Unbounded(c)) => Ok(Some(c)),
            Ok(_) | Err(Error::EmptySet) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// `G(λ)` with the default budget.
#[allow(non_snake_case)]
pub fn eval_G(problem: &Problem, lambda: &[Quad]) -> Result<DualEval> {
    DualFunction::new(problem, Budget::default()).eval(lambda)
}

/// Options for the certified one-multiplier search.
#[derive(Clone, Debug)]
pub struct Dual1dOptions {
    /// Sample points; negative entries are used only for equality rows.
    pub grid: Vec<Quad>,
    /// Stop refining once the bracket is this tight (zero: exact).
    pub tolerance: Quad,
    pub max_iterations: usize,
    pub budget: Budget,
}

impl Default for Dual1dOptions {
    fn default() -> Self {
        Dual1dOptions { grid: geometric_grid(-4, 8), tolerance: Quad::zero(), max_iterations: 200, budget: Budget::default() }
    }
}

/// `{0} ∪ {2^lo, …, 2^hi}`.
pub fn geometric_grid(lo: i32, hi: i32) -> Vec<Quad> {
    let mut g = vec![Quad::zero()];
    for k in lo..=hi {
        g.push(pow2(k));
    }
    g
}

fn pow2(k: i32) -> Quad {
    let two = BigInt::from(2);
    if k >= 0 {
        Quad::from_bigint(two.pow(k as u32))
    } else {
        Quad::rational(BigRational::new(BigInt::from(1), two.pow((-k) as u32)))
    }
}

fn finite(e: &DualEval) -> Option<&Quad> {
    e.value.finite().filter(|_| e.certified)
}

fn certified_bound(v: ExtReal, lambda: Option<Vec<Quad>>, trace: Vec<DualEval>, reason: impl Into<String>) -> DualBound {
    DualBound { v_l: v, best_lambda: lambda, status: DualStatus::Certified, trace, divergence: None, reason: reason.into() }
}

fn best_effort(trace: Vec<DualEval>, reason: impl Into<String>) -> DualBound {
    let best = trace.iter().filter(|e| e.certified).max_by(|a, b| a.value.cmp(&b.value));
    let (v, l) = match best {
        Some(e) => (e.value.clone(), Some(e.lambda.clone())),
        None => (ExtReal::NegInfinity, None),
    };
    DualBound { v_l: v, best_lambda: l, status: DualStatus::BestEffort, trace, divergence: None, reason: reason.into() }
}

/// Certified search for `v_L` with a single coupling row.
///
/// Uses concavity of `G`: identically `−∞` is certified by a multiplier-free
/// divergence sequence; a value attained at three certified samples is the
/// maximum; otherwise supporting lines from supergradients are intersected
/// until the intersection value is attained.
pub fn maximize_dual_1d(problem: &Problem, options: &Dual1dOptions) -> Result<DualBound> {
    if problem.num_rows() != 1 {
        return Err(Error::Dimension(format!("one-multiplier search needs exactly one coupling row, found {}", problem.num_rows())));
    }
    let f = DualFunction::new(problem, options.budget.clone());
    let free = f.is_free(0);
    let mut grid: Vec<Quad> = options.grid.iter().filter(|l| !l.is_negative()).cloned().collect();
    if free {
        grid.extend(options.grid.iter().filter(|l| l.is_positive()).map(|l| -l));
    }
    grid.sort();
    grid.dedup();
    let mut trace: Vec<DualEval> = grid.par_iter().map(|l| f.eval(std::slice::from_ref(l))).collect::<Result<_>>()?;

    if trace.iter().all(|e| e.certified && e.value == ExtReal::NegInfinity) {
        let cert = f.divergence_certificate(&Quad::one())?;
        let mut out = match &cert {
            Some(_) => certified_bound(ExtReal::NegInfinity, None, trace, "every sample is −∞ and a multiplier-free divergent sequence exists"),
            None => best_effort(trace, "every sample is −∞ but no multiplier-free divergence certificate was found"),
        };
        out.divergence = cert;
        return Ok(out);
    }

    // a value reached at three certified samples bounds G everywhere by concavity
    if let Some(m) = trace.iter().filter_map(finite).max() {
        let hits: Vec<&DualEval> = trace.iter().filter(|e| finite(e) == Some(m)).collect();
        let upper_ok = trace.iter().all(|e| e.certified || e.value >= ExtReal::Finite(m.clone()));
        if hits.len() >= 3 && upper_ok {
            let l = hits[0].lambda.clone();
            let m = m.clone();
            return Ok(certified_bound(ExtReal::Finite(m), Some(l), trace, "constant on three certified samples"));
        }
    }

    let sg = |e: &DualEval| e.supergradient.as_ref().map(|g| g[0].clone());
    if let Some(e) = trace.iter().find(|e| e.certified && sg(e).is_some_and(|g| g.is_zero())) {
        let (v, l) = (e.value.clone(), e.lambda.clone());
        return Ok(certified_bound(v, Some(l), trace, "zero supergradient"));
    }
    if !free {
        if let Some(e0) = trace.iter().find(|e| e.lambda[0].is_zero()) {
            if sg(e0).is_some_and(|g| g.is_negative()) {
                let (v, l) = (e0.value.clone(), e0.lambda.clone());
                return Ok(certified_bound(v, Some(l), trace, "nonpositive supergradient at λ = 0"));
            }
        }
    }

    // bracket: rightmost attained sample with g > 0, leftmost with g < 0
    let pick = |trace: &[DualEval], pos: bool| -> Option<(Quad, Quad, Quad)> {
        let cands = trace.iter().filter(|e| e.certified).filter_map(|e| Some((e.lambda[0].clone(), e.value.finite()?.clone(), sg(e)?))).filter(|(_, _, g)| if pos { g.is_positive() } else { g.is_negative() });
        if pos {
            cands.max_by(|a, b| a.0.cmp(&b.0))
        } else {
            cands.min_by(|a, b| a.0.cmp(&b.0))
        }
    };
    let mut lo = pick(&trace, true);
    let mut hi = pick(&trace, false);
    // push outward when the bracket is open on one side
    for _ in 0..64 {
        match (&lo, &hi) {
            (Some(_), Some(_)) => break,
            (Some((l, _, _)), None) => {
                let next = if l.is_zero() { Quad::one() } else { l.scale_int(4) };
                let e = f.eval(&[next])?;
                trace.push(e);
            }
            (None, Some((h, _, _))) if free => {
                let next = if h.is_zero() { Quad::from_int(-1) } else if h.is_negative() { h.scale_int(4) } else { -h };
                let e = f.eval(&[next])?;
                trace.push(e);
            }
            _ => return Ok(best_effort(trace, "no supergradient bracket around the maximum")),
        }
        lo = pick(&trace, true);
        hi = pick(&trace, false);
        if let Some(e) = trace.last().filter(|e| sg(e).is_some_and(|g| g.is_zero())) {
            let (v, l) = (e.value.clone(), e.lambda.clone());
            return Ok(certified_bound(v, Some(l), trace, "zero supergradient"));
        }
    }
    let (Some(mut lo), Some(mut hi)) = (lo, hi) else {
        return Ok(best_effort(trace, "supergradients never change sign"));
    };
    for _ in 0..options.max_iterations {
        let (l1, v1, g1) = &lo;
        let (l2, v2, g2) = &hi;
        let star = (v2 - v1 + g1 * l1 - g2 * l2) / (g1 - g2);
        let top = v1 + &(g1 * &(&star - l1));
        let e = f.eval(std::slice::from_ref(&star))?;
        let got = e.value.clone();
        let g = sg(&e);
        trace.push(e);
        if got == ExtReal::Finite(top.clone()) && trace.last().is_some_and(|e| e.certified) {
            return Ok(certified_bound(got, Some(vec![star]), trace, "supporting lines meet on the graph of G"));
        }
        let Some(g) = g else {
            return Ok(best_effort(trace, "no supergradient at the cutting-plane point"));
        };
        if g.is_zero() {
            return Ok(certified_bound(got, Some(vec![star]), trace, "zero supergradient"));
        }
        if let ExtReal::Finite(v) = &got {
            if &top - v <= options.tolerance {
                return Ok(best_effort(trace, "bracket below tolerance"));
            }
            if g.is_positive() {
                lo = (star, v.clone(), g);
            } else {
                hi = (star, v.clone(), g);
            }
        }
    }
    Ok(best_effort(trace, "iteration limit"))
}

#[derive(Clone, Debug)]
pub enum StepRule {
    /// `t_k = t₀/√k`, rounded to a dyadic rational.
    Diminishing { t0: Quad },
    /// `t_k = (target − G(λ_k))/‖g_k‖²`.
    Polyak { target: Quad },
}

#[derive(Clone, Debug)]
pub struct AscentOptions {
    pub steps: usize,
    pub rule: StepRule,
    pub start: Option<Vec<Quad>>,
    /// Extra multipliers evaluated before the ascent starts.
    pub seeds: Vec<Vec<Quad>>,
    pub budget: Budget,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions { steps: 500, rule: StepRule::Diminishing { t0: Quad::one() }, start: None, seeds: Vec::new(), budget: Budget::default() }
    }
}

const GRID_BITS: u32 = 40;

/// Nearest multiple of `2^-40`.
fn to_grid(q: &Quad) -> Quad {
    let s = Quad::from_bigint(BigInt::from(1u64 << GRID_BITS));
    let n = (q * &s + Quad::ratio(1, 2)).floor();
    Quad::rational(BigRational::new(n, BigInt::from(1u64 << GRID_BITS)))
}

fn dyadic(x: f64) -> Quad {
    let n = (x * (1u64 << GRID_BITS) as f64).round() as i64;
    Quad::rational(BigRational::new(BigInt::from(n), BigInt::from(1u64 << GRID_BITS)))
}

/// Direction of a divergent witness sequence, as an integer vector.
fn witness_direction(w: &WitnessSequence) -> Option<Vec<i64>> {
    match &w.generator {
        Generator::Ray { step, .. } => Some(step.clone()),
        _ => {
            let pts = w.points(21);
            let (a, b) = (pts.first()?, pts.last()?);
            Some(b.iter().zip(a).map(|(x, y)| x - y).collect())
        }
    }
}

/// Projected supergradient ascent. The result is the best certified value
/// seen and is always a valid lower bound on `v_L`.
pub fn maximize_dual_nd(problem: &Problem, options: &AscentOptions) -> Result<DualBound> {
    let f = DualFunction::new(problem, options.budget.clone());
    let m = f.m();
    let project = |l: Vec<Quad>| -> Vec<Quad> { l.into_iter().enumerate().map(|(i, v)| if !f.is_free(i) && v.is_negative() { Quad::zero() } else { to_grid(&v) }).collect() };
    let mut trace = Vec::new();
    for s in &options.seeds {
        trace.push(f.eval(s)?);
    }
    let mut lambda = options.start.clone().unwrap_or_else(|| vec![Quad::zero(); m]);
    for k in 1..=options.steps {
        let e = f.eval(&lambda)?;
        let next = match (&e.value, &e.supergradient) {
            (ExtReal::Finite(v), Some(g)) if e.certified => {
                let gg: Quad = g.iter().map(|x| x * x).sum();
                if gg.is_zero() {
                    trace.push(e);
                    break;
                }
                let t = match &options.rule {
                    StepRule::Diminishing { t0 } => t0 * &dyadic(1.0 / (k as f64).sqrt()),
                    StepRule::Polyak { target } => {
                        let gap = target - v;
                        if !gap.is_positive() {
                            trace.push(e);
                            break;
                        }
                        &gap / &gg
                    }
                };
                project(lambda.iter().zip(g).map(|(l, gi)| l + &(&t * gi)).collect())
            }
            (ExtReal::NegInfinity, _) => {
                // cut: keep (c − Aᵀλ)·r ≥ 0 for the divergent direction r
                let Some(r) = e.certificate.as_ref().and_then(witness_direction) else {
                    trace.push(e);
                    break;
                };
                let u: Vec<Quad> = (0..m).map(|i| LinearForm(f.rows[i].0.clone()).eval_int(&r)).collect();
                let cr = problem.objective.eval_int(&r);
                let uu: Quad = u.iter().map(|x| x * x).sum();
                if uu.is_zero() {
                    trace.push(e);
                    break;
                }
                let viol = lambda.iter().zip(&u).map(|(l, x)| l * x).sum::<Quad>() - &cr;
                let t = &viol / &uu;
                let moved: Vec<Quad> = lambda.iter().zip(&u).map(|(l, x)| l - &(&t * x)).collect();
                project(moved)
            }
            _ => {
                trace.push(e);
                break;
            }
        };
        trace.push(e);
        if next == lambda {
            break;
        }
        lambda = next;
    }
    if f.points.is_some() {
        if let Some(v) = refine(&f, &mut trace, 64)? {
            let best = trace.iter().filter(|e| e.certified && e.value == v).map(|e| e.lambda.clone()).next();
            return Ok(certified_bound(v, best, trace, "ascent, then a cutting-plane model matched by G"));
        }
    }
    Ok(best_effort(trace, "projected supergradient ascent"))
}

/// Kelley iterations on the minimizers collected so far, inside a box around
/// the ascent iterates. Returns the exact `v_L` once the model maximum is
/// attained by `G` away from the box.
fn refine(f: &DualFunction, trace: &mut Vec<DualEval>, rounds: usize) -> Result<Option<ExtReal>> {
    let m = f.m();
    let mut cuts: Vec<IntPoint> = trace.iter().filter_map(|e| e.minimizer.clone()).collect();
    cuts.sort();
    cuts.dedup();
    if cuts.is_empty() {
        return Ok(None);
    }
    let reach = trace.iter().flat_map(|e| e.lambda.iter().map(Quad::abs)).max().unwrap_or_else(Quad::zero);
    let cap = &(&reach * &Quad::from_int(4)) + &Quad::from_int(64);
    let mut signs: Vec<bool> = (0..m).map(|i| !f.is_free(i)).collect();
    signs.push(false);
    for _ in 0..rounds {
        let mut rows = Vec::with_capacity(cuts.len() + 2 * m);
        for p in &cuts {
            // t − λ·(b − Ap) ≤ c·p
            let mut a: Vec<Quad> = f.slack_gradient(p).iter().map(|g| -g).collect();
            a.push(Quad::one());
            rows.push(Constraint::le(LinearForm(a), f.problem.objective.eval_int(p)));
        }
        for i in 0..m {
            let mut e = vec![Quad::zero(); m + 1];
            e[i] = Quad::one();
            rows.push(Constraint::le(LinearForm(e.clone()), cap.clone()));
            if f.is_free(i) {
                rows.push(Constraint::ge(LinearForm(e), -&cap));
            }
        }
        let mut obj = vec![Quad::zero(); m + 1];
        obj[m] = Quad::from_int(-1);
        let LpOutcome::Optimal { x, value } = lp::minimize_with_signs(&obj, &rows, &signs) else { return Ok(None) };
        let model = -value;
        let lambda = x[..m].to_vec();
        let e = f.eval(&lambda)?;
        let on_box = lambda.iter().any(|l| l.abs() == cap);
        let done = e.certified && e.value == ExtReal::Finite(model.clone());
        let next = e.minimizer.clone();
        trace.push(e);
        if done {
            return Ok((!on_box).then_some(ExtReal::Finite(model)));
        }
        match next {
            Some(p) if !cuts.contains(&p) => cuts.push(p),
            _ => return Ok(None),
        }
    }
    Ok(None)
}

/// One multiplier: certified search; more: ascent.
pub fn maximize_dual(problem: &Problem, ascent: &AscentOptions) -> Result<DualBound> {
    if problem.num_rows() == 1 {
        maximize_dual_1d(problem, &Dual1dOptions { budget: ascent.budget.clone(), ..Dual1dOptions::default() })
    } else {
        maximize_dual_nd(problem, ascent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin, LatticeSetSpec};

    fn finite_toy() -> Problem {
        let lat = LatticeSetSpec::finite(2, vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let rows = ConstraintSystem::with_rows(2, vec![Constraint::ge(LinearForm::from_ints(&[1, 1]), Quad::one())]).unwrap();
        Problem::new("toy", LinearForm::from_ints(&[-1, -1]), rows, lat).unwrap()
    }

    #[test]
    fn ex1_values() {
        let p = builtin("ex1").unwrap();
        let e = eval_G(&p, &[Quad::one()]).unwrap();
        assert_eq!(e.value, ExtReal::NegInfinity);
        assert!(e.certificate.is_some());
        let d = maximize_dual_1d(&p, &Dual1dOptions::default()).unwrap();
        assert_eq!(d.v_l, ExtReal::NegInfinity);
        assert_eq!(d.status, DualStatus::Certified);
        assert_eq!(d.trace.len(), 14);
        assert!(d.divergence.is_some());
    }

    #[test]
    fn ex2_values() {
        let p = builtin("ex2").unwrap();
        let e0 = eval_G(&p, &[Quad::zero()]).unwrap();
        assert_eq!(e0.value, ExtReal::from(-1));
        assert!(e0.minimizer.is_some());
        let e5 = eval_G(&p, &[Quad::from_int(5)]).unwrap();
        assert_eq!(e5.value, ExtReal::from(-1));
        assert!(e5.minimizer.is_none() && e5.certificate.is_some());
        let d = maximize_dual_1d(&p, &Dual1dOptions::default()).unwrap();
        assert_eq!((d.v_l, d.status), (ExtReal::from(-1), DualStatus::Certified));
    }

    #[test]
    fn finite_toy_value() {
        let d = maximize_dual_1d(&finite_toy(), &Dual1dOptions::default()).unwrap();
        assert_eq!((d.v_l, d.status), (ExtReal::from(-1), DualStatus::Certified));
    }

    #[test]
    fn ex3_ascent_reaches_one() {
        let p = builtin("ex3").unwrap();
        let d = maximize_dual_nd(&p, &AscentOptions { steps: 20, ..AscentOptions::default() }).unwrap();
        assert_eq!(d.v_l, ExtReal::from(1));
    }

    #[test]
    fn lambda_zero_identity() {
        let p = finite_toy();
        let e = eval_G(&p, &[Quad::zero()]).unwrap();
        let direct = oracle::linear_min(&p.lattice, &p.objective, &Budget::default()).unwrap();
        assert_eq!(Some(e.value), direct.value());
    }

    #[test]
    fn negative_multiplier_rejected() {
        assert!(matches!(eval_G(&finite_toy(), &[Quad::from_int(-1)]), Err(Error::Domain(_))));
    }

    #[test]
    fn csv_uses_inf_token() {
        let p = builtin("ex1").unwrap();
        let d = maximize_dual_1d(&p, &Dual1dOptions::default()).unwrap();
        let csv = d.to_csv();
        assert!(csv.starts_with("lambda,value,certified\n"));
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",-inf,true")));
    }
}
