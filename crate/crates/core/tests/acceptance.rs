//! End-to-end acceptance checks. Run with
//! `cargo test -p lagrange-gap --test acceptance`; prints one line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use lagrange_gap::conditions::{classify_single_row, separation_search, RowCase};
use lagrange_gap::dual::{maximize_dual, maximize_dual_1d, maximize_dual_nd, AscentOptions, Dual1dOptions};
use lagrange_gap::hull::{membership, registered_closure, Membership};
use lagrange_gap::model::{Constraint, ConstraintSystem, ExtReal, LatticeSetSpec, LinearForm, Sense};
use lagrange_gap::oracle::{pell_convergents, Budget};
use lagrange_gap::relax::{gap_report, solve_closed_conv, solve_conv, Certification, Gap};
use lagrange_gap::{builtin, Problem, Quad, Rational};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// `(problem, v^L, v̄*, v*)` for every run that feeds the ordering check.
type Runs = Vec<(String, ExtReal, ExtReal, ExtReal)>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fin(v: i64) -> ExtReal {
    ExtReal::Finite(Quad::from_int(v))
}

fn quads(v: &[i64]) -> Vec<Quad> {
    v.iter().map(|x| Quad::from_int(*x)).collect()
}

fn holds(row: &Constraint, value: &Quad) -> bool {
    match row.sense {
        Sense::Ge => !value.is_negative(),
        Sense::Le => !value.is_positive(),
        Sense::Eq => value.is_zero(),
    }
}

fn ex1(runs: &mut Runs) -> Outcome {
    let p = builtin("ex1").map_err(|e| e.to_string())?;
    let r = gap_report(&p).map_err(|e| e.to_string())?;
    runs.push((p.name.clone(), r.v_l.clone(), r.v_bar_star.clone(), r.v_star.clone()));
    ensure!(r.v_l == ExtReal::NegInfinity, "v^L = {}", r.v_l);
    let w = r.dual.divergence.as_ref().ok_or("no divergence witness")?;
    w.verify(&p.lattice, 20).map_err(|e| e.to_string())?;
    ensure!(w.points(20).iter().all(|x| p.lattice.contains(x)), "witness leaves X");
    let mut per_lambda = 0;
    for e in r.dual.trace.iter().filter(|e| e.value == ExtReal::NegInfinity) {
        let c = e.certificate.as_ref().ok_or_else(|| format!("G({:?}) = −∞ without a witness", e.lambda))?;
        c.verify(&p.lattice, 20).map_err(|err| format!("λ = {:?}: {err}", e.lambda))?;
        per_lambda += 1;
    }
    ensure!(per_lambda > 0, "no −∞ samples in the trace");

    ensure!(r.v_bar_star == ExtReal::NegInfinity, "v̄* = {}", r.v_bar_star);
    let (base, ray) = (r.closed.witness.as_ref().ok_or("no base point")?, r.closed.ray.as_ref().ok_or("no ray")?);
    ensure!(p.objective.eval(ray).is_negative(), "c·r is not negative");
    for row in p.coupling.rows() {
        ensure!(holds(row, &row.form.eval(ray)), "ray leaves the coupling cone at {row}");
    }
    let closure = registered_closure(&p.lattice).ok_or("ex1 has no registered closure")?.closure;
    for t in 0..=8 {
        let x: Vec<Quad> = base.iter().zip(ray).map(|(b, d)| b + &d.scale(&Rational::from_integer(t.into()))).collect();
        ensure!(membership(&closure, &x).map_err(|e| e.to_string())? != Membership::Outside, "base + {t}·ray leaves the closure");
        for row in p.coupling.rows() {
            ensure!(holds(row, &(&row.form.eval(&x) - &row.rhs)), "base + {t}·ray violates {row}");
        }
    }

    ensure!(r.v_star == fin(0), "v* = {}", r.v_star);
    ensure!(r.conv.attained && r.conv.witness == Some(quads(&[0, 0])), "v* not attained at (0,0): {:?}", r.conv.witness);
    Ok(format!("v^L = v̄* = −∞ ({} λ samples, witnesses verified to 20 points), v* = 0 at (0,0)", per_lambda))
}

fn ex2(runs: &mut Runs) -> Outcome {
    let p = builtin("ex2").map_err(|e| e.to_string())?;
    let r = gap_report(&p).map_err(|e| e.to_string())?;
    runs.push((p.name.clone(), r.v_l.clone(), r.v_bar_star.clone(), r.v_star.clone()));
    ensure!(r.v_l == fin(-1), "v^L = {}", r.v_l);
    let zero = r.dual.trace.iter().find(|e| e.lambda.iter().all(Quad::is_zero)).ok_or("G(0) not sampled")?;
    ensure!(zero.value == fin(-1) && zero.minimizer.is_some() && zero.certified, "G(0) is not −1 attained: {} {:?}", zero.value, zero.minimizer);
    let inf_only: Vec<_> = r
        .dual
        .trace
        .iter()
        .filter(|e| e.value == fin(-1) && e.minimizer.is_none() && e.certificate.is_some() && e.certified && !e.lambda.iter().all(Quad::is_zero))
        .collect();
    ensure!(inf_only.len() >= 2, "only {} infimum-only samples at −1", inf_only.len());
    for e in &inf_only {
        e.certificate.as_ref().unwrap().verify(&p.lattice, 10).map_err(|err| format!("λ = {:?}: {err}", e.lambda))?;
    }
    ensure!(r.v_bar_star == fin(0), "v̄* = {}", r.v_bar_star);
    ensure!(r.closed.attained && r.closed.witness == Some(quads(&[0, 0, 0])), "v̄* not attained at (0,0,0): {:?}", r.closed.witness);
    ensure!(r.has_gap(Gap::LagrangeBelowClosed), "gap flag v^L < v̄* missing");
    Ok(format!("v^L = −1 (G(0) attained, {} infimum-only samples), v̄* = 0 at (0,0,0), v^L < v̄*", inf_only.len()))
}

fn ex3(runs: &mut Runs) -> Outcome {
    let p = builtin("ex3").map_err(|e| e.to_string())?;
    let r = gap_report(&p).map_err(|e| e.to_string())?;
    runs.push((p.name.clone(), r.v_l.clone(), r.v_bar_star.clone(), r.v_star.clone()));
    ensure!(r.v_l == fin(1) && r.v_bar_star == fin(1) && r.v_star == fin(1), "values {} {} {}", r.v_l, r.v_bar_star, r.v_star);
    ensure!(r.closed.witness == Some(quads(&[1, 1, 1])), "x* = {:?}", r.closed.witness);
    let f = r
        .certifications
        .iter()
        .find_map(|c| match c {
            Certification::Theorem1(f) => Some(f),
            _ => None,
        })
        .ok_or("no Farkas certificate")?;
    ensure!(f.verify(&p, &Quad::one()), "certificate does not re-verify");
    Ok(format!("v^L = v̄* = v* = 1, Farkas λ = {:?} re-verified", f.lambda.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

fn random_suite(runs: &mut Runs) -> Outcome {
    let mut worst = 0f64;
    let (mut single, mut multi) = (0, 0);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xacc0_0000 + seed);
        let n = 2 + (seed % 2) as usize;
        let m = if seed < 50 { 1 } else { rng.gen_range(2..=3) };
        let p = random_problem(&mut rng, n, m, seed as usize);
        let pts = points_of(&p.lattice);
        let v = hull_lp(&p, &pts).ok_or_else(|| format!("seed {seed}: hull LP infeasible"))?;
        let closed = solve_closed_conv(&p).map_err(|e| e.to_string())?.value;
        let conv = solve_conv(&p).map_err(|e| e.to_string())?.value;
        let b = if m == 1 {
            let b = maximize_dual_1d(&p, &Dual1dOptions::default()).map_err(|e| format!("seed {seed}: {e}"))?;
            ensure!(single_row_brute(&p, &pts).as_ref() == Some(&v), "seed {seed}: LP and pairwise oracles disagree");
            ensure!(b.v_l == ExtReal::Finite(v.clone()), "seed {seed}: v^L = {} but the hull LP gives {v}", b.v_l);
            single += 1;
            b
        } else {
            let b = maximize_dual_nd(&p, &AscentOptions { steps: 500, ..AscentOptions::default() }).map_err(|e| format!("seed {seed}: {e}"))?;
            let ExtReal::Finite(l) = &b.v_l else { return Err(format!("seed {seed}: v^L = {}", b.v_l)) };
            let err = (&v - l).to_f64().abs();
            ensure!(err <= 1e-6, "seed {seed}: |v^L − hull| = {err:e}");
            worst = worst.max(err);
            multi += 1;
            b
        };
        runs.push((p.name.clone(), b.v_l, closed, conv));
    }
    Ok(format!("{single} single-row runs exact, {multi} multi-row runs within {worst:e}"))
}

fn ordering(runs: &Runs) -> Outcome {
    ensure!(runs.len() >= 103, "only {} runs recorded", runs.len());
    for (name, l, c, v) in runs {
        ensure!(l <= c && c <= v, "{name}: {l} ≤ {c} ≤ {v} fails");
    }
    Ok(format!("v^L ≤ v̄* ≤ v* on {} runs", runs.len()))
}

fn boxed_hulls() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e33a1);
    let (mut matched, mut tries) = (0, 0);
    while matched < 50 {
        tries += 1;
        ensure!(tries <= 1000, "too many empty boxes");
        if lemma1_case(&mut rng)? {
            matched += 1;
        }
    }
    Ok(format!("{matched} specs matched the brute-force hull ({tries} drawn)"))
}

fn arithmetic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa417);
    let rat = |rng: &mut ChaCha8Rng| Rational::new(rng.gen_range(-99i64..=99).into(), rng.gen_range(1i64..=16).into());
    for i in 0..10_000 {
        let d = [2u32, 3, 5, 6, 7, 10][rng.gen_range(0..6)];
        let (x, y, z) = (Quad::new(rat(&mut rng), rat(&mut rng), d), Quad::new(rat(&mut rng), rat(&mut rng), d), Quad::new(rat(&mut rng), rat(&mut rng), d));
        ensure!(&x * &(&y + &z) == &(&x * &y) + &(&x * &z), "#{i}: distributivity for {x}, {y}, {z}");
        ensure!(&(&x * &y) * &z == &x * &(&y * &z), "#{i}: associativity");
        if !x.is_zero() {
            ensure!(&(&y / &x) * &x == y, "#{i}: division");
        }
        let f = x.to_f64();
        if f.abs() > 1e-9 {
            ensure!(x.signum() as f64 == f.signum(), "#{i}: sign of {x}");
        }
        ensure!((x < y) == (&y - &x).is_positive(), "#{i}: order");
        let fl = Quad::from_bigint(x.floor());
        let fr = x.frac();
        ensure!(fl <= x && x < &fl + &Quad::one(), "#{i}: floor of {x}");
        ensure!(&fl + &fr == x && !fr.is_negative() && fr < Quad::one(), "#{i}: frac of {x}");
    }
    let pell = pell_convergents(40);
    for (k, (p, q)) in pell.iter().enumerate() {
        let n = p * p - BigInt::from(2) * q * q;
        ensure!(n == BigInt::from(1) || n == BigInt::from(-1), "k = {k}: p² − 2q² = {n}");
    }
    Ok("10000 field/sign/floor checks, Pell k ≤ 40".into())
}

fn row_classifier() -> Outcome {
    let b = Budget::default();
    let q = Quad::from_int;
    let origin = LatticeSetSpec::finite(2, vec![vec![0, 0]]).map_err(|e| e.to_string())?;
    let p1 = Problem::new("origin", LinearForm::from_ints(&[1, 1]), ConstraintSystem::with_rows(2, vec![Constraint::ge(LinearForm::from_ints(&[1, 1]), q(0))]).unwrap(), origin).unwrap();
    let tri = ConstraintSystem::with_rows(2, vec![Constraint::le(LinearForm::from_ints(&[1, 1]), q(4))]).unwrap();
    let tri = LatticeSetSpec::poly(tri).unwrap().with_nonneg(&[0, 1]).unwrap();
    let p2 = Problem::new("triangle", LinearForm::from_ints(&[1, 1]), ConstraintSystem::with_rows(2, vec![Constraint::ge(LinearForm::from_ints(&[1, 1]), q(1))]).unwrap(), tri).unwrap();
    let strip = ConstraintSystem::with_rows(2, vec![Constraint::le(LinearForm::from_ints(&[0, 1]), q(1))]).unwrap();
    let strip = LatticeSetSpec::poly(strip).unwrap().with_nonneg(&[0, 1]).unwrap();
    let p3 = Problem::new("strip", LinearForm::from_ints(&[1, -1]), ConstraintSystem::with_rows(2, vec![Constraint::ge(LinearForm::from_ints(&[0, -1]), q(0))]).unwrap(), strip).unwrap();

    let c1 = classify_single_row(&p1, &b).map_err(|e| e.to_string())?;
    ensure!(c1.case == RowCase::CaseI, "origin: {:?}", c1.case);
    let c2 = classify_single_row(&p2, &b).map_err(|e| e.to_string())?;
    ensure!(matches!(c2.case, RowCase::CaseII { .. }), "triangle: {:?}", c2.case);
    let c3 = classify_single_row(&p3, &b).map_err(|e| e.to_string())?;
    ensure!(c3.case == RowCase::CaseIII, "strip: {:?}", c3.case);
    let r = c3.replay.ok_or("no CaseIII replay")?;
    ensure!(r.holds && r.dual_value >= ExtReal::Finite(r.v_star.clone()), "replay: G(λ) = {} < v* = {}", r.dual_value, r.v_star);
    let full = maximize_dual(&p3, &AscentOptions::default()).map_err(|e| e.to_string())?;
    ensure!(full.v_l >= ExtReal::Finite(r.v_star.clone()), "v^L = {} < v* = {}", full.v_l, r.v_star);
    Ok(format!("CaseI, CaseII, CaseIII; replay λ = {} gives {} ≥ v* = {}", r.lambda, r.dual_value, r.v_star))
}

fn separation() -> Outcome {
    let p = builtin("ex3").map_err(|e| e.to_string())?;
    let r = separation_search(&p, 50).map_err(|e| e.to_string())?;
    ensure!(r.rational_separators.is_empty(), "found {} rational separators", r.rational_separators.len());
    ensure!(r.closure_hyperplane_separates, "√2(x−y) + z = 1 does not separate");
    ensure!(r.touching == Some(quads(&[1, 1, 1])), "P and T touch at {:?}", r.touching);
    Ok(format!("no separator among {} coefficient pairs ({} values per coordinate); √2(x−y) + z = 1 separates, touching at (1,1,1)", r.examined, r.values_per_coordinate))
}

fn main() -> ExitCode {
    let mut runs = Runs::new();
    let mut failed = 0;
    let mut report = |id: usize, name: &str, limit: u64, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let t = start.elapsed();
        let limit = Duration::from_secs(limit);
        let out = match out {
            Ok(s) if t > limit => Err(format!("{s}; too slow")),
            o => o,
        };
        let (tag, msg) = match &out {
            Ok(s) => ("PASS", s),
            Err(s) => ("FAIL", s),
        };
        if out.is_err() {
            failed += 1;
        }
        println!("{tag} criterion {id} ({name}): {msg} [{:.2}s / {}s]", t.as_secs_f64(), limit.as_secs());
    };
    report(1, "ex1", 5, &mut || ex1(&mut runs));
    report(2, "ex2", 5, &mut || ex2(&mut runs));
    report(3, "ex3", 5, &mut || ex3(&mut runs));
    report(4, "random rational problems", 120, &mut || random_suite(&mut runs));
    report(5, "weak duality", 1, &mut || ordering(&runs));
    report(6, "boxed hulls", 60, &mut boxed_hulls);
    report(7, "arithmetic", 10, &mut arithmetic);
    report(8, "single-row classifier", 5, &mut row_classifier);
    report(9, "rational separation", 30, &mut separation);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
