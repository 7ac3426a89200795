use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lagrange_gap::conditions::{self, SlaterOutcome};
use lagrange_gap::dual::{self, geometric_grid, AscentOptions, Dual1dOptions, DualStatus};
use lagrange_gap::hull::{boxed_hull_2d, points_in_box, Box2, VertexKind};
use lagrange_gap::model::{parse_problem, ExtReal, LinearForm};
use lagrange_gap::oracle::{self, Budget, MinOutcome};
use lagrange_gap::relax::{self, fmt_vec, gap_report_with, Certification, Gap, GapReport, RelaxValue};
use lagrange_gap::{builtin, Problem, Quad};

use crate::svg;
use crate::{Cli, Command, ProblemArg, Which};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] lagrange_gap::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("reproduction mismatch:\n{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn load(arg: &ProblemArg) -> Result<Problem> {
    let path = Path::new(&arg.problem);
    if path.is_file() {
        return Ok(parse_problem(&fs::read_to_string(path)?)?);
    }
    let stem = arg.problem.trim_end_matches(".prob");
    let stem = Path::new(stem).file_name().and_then(|s| s.to_str()).unwrap_or(stem);
    match builtin(stem) {
        Ok(p) => Ok(p),
        Err(_) => Err(CliError::Usage(format!("no problem file or built-in named `{}`", arg.problem))),
    }
}

fn quads(s: &str, surd: u32, len: usize, what: &str) -> Result<Vec<Quad>> {
    let v = s
        .split(',')
        .map(|t| Quad::parse_with_surd(t.trim(), surd).map_err(|e| CliError::Usage(format!("{what}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != len {
        return Err(CliError::Usage(format!("{what}: expected {len} entries, got {}", v.len())));
    }
    Ok(v)
}

fn budget(cli: &Cli) -> Budget {
    Budget { search_radius: cli.budget.search_radius, ray_radius: cli.budget.ray_radius, ..Budget::default() }
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// Prints `stdout` and writes `files` into `<out>/<run>/`.
fn emit(cli: &Cli, run: &str, stdout: &str, files: &[(&str, &str)]) -> Result<()> {
    print!("{stdout}");
    if cli.no_files || files.is_empty() {
        return Ok(());
    }
    let dir = cli.out.join(slug(run));
    fs::create_dir_all(&dir)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn ext(v: &ExtReal) -> String {
    match v {
        ExtReal::Finite(q) => format!("{q:#}"),
        other => other.to_string(),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::EvalDual { problem, lambda } => {
            let p = load(problem)?;
            let lam = quads(lambda, p.surd, p.num_rows(), "--lambda")?;
            let f = dual::DualFunction::new(&p, budget(cli));
            let e = f.eval(&lam)?;
            let mut s = String::from("lambda,value,certified,minimizer,certificate\n");
            let lam: Vec<String> = e.lambda.iter().map(|v| format!("{v:#}")).collect();
            let minimizer = e.minimizer.as_ref().map(|m| m.iter().map(i64::to_string).collect::<Vec<_>>().join(";")).unwrap_or_default();
            let cert = e.certificate.as_ref().map(|c| c.describe().replace(',', ";")).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{},{}", lam.join(";"), ext(&e.value), e.certified, minimizer, cert);
            emit(cli, &format!("eval-dual-{}", p.name), &s, &[("eval.csv", &s)])
        }
        Command::MaxDual { problem, grid, steps } => {
            let p = load(problem)?;
            let b = budget(cli);
            let bound = if p.num_rows() == 1 {
                let grid = match grid {
                    None => geometric_grid(-4, 8),
                    Some(g) => parse_grid(g, p.surd)?,
                };
                dual::maximize_dual_1d(&p, &Dual1dOptions { grid, budget: b, ..Dual1dOptions::default() })?
            } else {
                dual::maximize_dual_nd(&p, &AscentOptions { steps: *steps as usize, budget: b, ..AscentOptions::default() })?
            };
            let csv = bound.to_csv();
            let status = match bound.status {
                DualStatus::Certified => "certified",
                DualStatus::BestEffort => "best-effort",
            };
            eprintln!("v^L = {} ({status}: {})", ext(&bound.v_l), bound.reason);
            emit(cli, &format!("max-dual-{}", p.name), &csv, &[("dual.csv", &csv)])
        }
        Command::Hull { problem, bx, enlarge, timestamp } => {
            let p = load(problem)?;
            if p.dim != 2 {
                return Err(lagrange_gap::Error::Dimension(format!("hull needs a planar problem, got n = {}", p.dim)).into());
            }
            let c: Vec<i64> = bx.split(',').map(|t| t.trim().parse::<i64>()).collect::<std::result::Result<_, _>>().map_err(|e| CliError::Usage(format!("--box: {e}")))?;
            if c.len() != 4 {
                return Err(CliError::Usage("--box expects x0,x1,y0,y1".into()));
            }
            let bx = Box2::from_ints(c[0], c[1], c[2], c[3])?;
            let k = Quad::parse_with_surd(enlarge, p.surd).map_err(|e| CliError::Usage(format!("--enlarge: {e}")))?;
            let hull = boxed_hull_2d(&p.lattice, &bx, &k)?;
            let kinds: Vec<String> = hull
                .vertices
                .iter()
                .map(|v| match hull.classify_vertex(v, &bx, &p.lattice) {
                    Some(VertexKind::LatticePoint) => "lattice".to_string(),
                    Some(VertexKind::BoxCorner) => "box-corner".to_string(),
                    Some(VertexKind::BoxEdge) => "box-edge".to_string(),
                    None => "unclassified".to_string(),
                })
                .collect();
            let csv = svg::vertex_csv(&hull, &kinds);
            let points = points_in_box(&p.lattice, &bx);
            let ts = timestamp.then(|| std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
            let picture = svg::render(&svg::Scene { bx: &bx, set: &p.lattice, points: &points, hull: &hull, timestamp: ts });
            emit(cli, &format!("hull-{}", p.name), &csv, &[("hull.csv", &csv), ("hull.svg", &picture)])
        }
        Command::Solve { problem, which } => {
            let p = load(problem)?;
            let b = budget(cli);
            let mut s = format!("problem: {}\n", p.name);
            if matches!(which, Which::Closed | Which::Both) {
                let _ = writeln!(s, "closed-conv: {}", describe(&relax::solve_closed_conv_with(&p, &b)?));
            }
            if matches!(which, Which::Conv | Which::Both) {
                let _ = writeln!(s, "conv: {}", describe(&relax::solve_conv_with(&p, &b)?));
            }
            emit(cli, &format!("solve-{}", p.name), &s, &[("solve.txt", &s)])
        }
        Command::Report { problem } => {
            let p = load(problem)?;
            let r = gap_report_with(&p, &AscentOptions { budget: budget(cli), ..AscentOptions::default() })?;
            let s = r.render();
            emit(cli, &format!("report-{}", p.name), &s, &[("report.txt", &s), ("dual.csv", &r.dual.to_csv())])
        }
        Command::Classify { problem } => {
            let p = load(problem)?;
            let c = conditions::classify_single_row(&p, &budget(cli))?;
            let mut s = format!("problem: {}\nrow (scaled by {:#}): {}\ncase: {:?}\n", p.name, c.scale, c.row, c.case);
            let _ = writeln!(s, "inf c·x over X: {}", c.inf_cx.as_ref().map(ext).unwrap_or_else(|| "unknown".into()));
            let _ = writeln!(s, "v^L = v̄* = v* certified: {}", c.equality_certified);
            if let Some(r) = &c.replay {
                let _ = writeln!(s, "replay: v* = {:#}, λ = {:#}, bound = {:#}, G(λ) = {}, holds: {}", r.v_star, r.lambda, r.bound, ext(&r.dual_value), r.holds);
            }
            emit(cli, &format!("classify-{}", p.name), &s, &[("classify.txt", &s)])
        }
        Command::Certify { problem, xstar } => {
            let p = load(problem)?;
            let x = quads(xstar, p.surd, p.dim, "--xstar")?;
            if !p.coupling.contains(&x) {
                return Err(lagrange_gap::Error::Precondition(format!("x* = {} violates the coupling rows", fmt_vec(&x))).into());
            }
            let local = relax::local_description(&p, &x).ok_or_else(|| lagrange_gap::Error::Unsupported("no local description of the closed hull at x*".into()))?;
            let f = conditions::farkas_certificate(&p, &x, &local)?;
            let v = p.objective.eval(&x);
            let mut s = format!("problem: {}\nx* = {}\nc·x* = {:#}\n", p.name, fmt_vec(&x), v);
            let _ = writeln!(s, "λ = {}\nμ = {}\nactive rows:", fmt_vec(&f.lambda), fmt_vec(&f.mu));
            for r in f.active_rows.rows() {
                let _ = writeln!(s, "  {r}");
            }
            let _ = writeln!(s, "bound = {:#} (≈ {})\nverified: {}", f.bound, f.bound.approx(12), f.verify(&p, &v));
            emit(cli, &format!("certify-{}", p.name), &s, &[("certificate.txt", &s)])
        }
        Command::Slater { problem } => {
            let p = load(problem)?;
            let mut s = format!("problem: {}\n", p.name);
            match conditions::slater_check(&p, &budget(cli))? {
                SlaterOutcome::Holds(w) => {
                    let _ = writeln!(s, "Slater point: {}\nspanning: {}\nverified: {}", fmt_vec(&w.point), w.spanning, w.verify(&p));
                    for (pt, wt) in &w.combination {
                        let _ = writeln!(s, "  {wt:#} × {pt:?}");
                    }
                }
                SlaterOutcome::FailsCertified(r) => {
                    let _ = writeln!(s, "Slater fails: {r}");
                }
                SlaterOutcome::Inconclusive(r) => {
                    let _ = writeln!(s, "inconclusive: {r}");
                }
            }
            emit(cli, &format!("slater-{}", p.name), &s, &[("slater.txt", &s)])
        }
        Command::Oracle { problem, weights } => {
            let p = load(problem)?;
            let w = LinearForm(quads(weights, p.surd, p.dim, "--weights")?);
            let out = oracle::linear_min(&p.lattice, &w, &budget(cli))?;
            let mut s = format!("problem: {}\nweights: {}\noutcome: {}\n", p.name, fmt_vec(&w.0), out.kind());
            match &out {
                MinOutcome::Attained { point, value } => {
                    let _ = writeln!(s, "value: {value:#}\npoint: {point:?}");
                }
                MinOutcome::Unbounded(c) => {
                    let _ = writeln!(s, "value: -inf\nwitness: {}", c.describe());
                }
                MinOutcome::InfimumOnly { value, certificate } => {
                    let _ = writeln!(s, "infimum: {value:#}\nwitness: {}", certificate.describe());
                }
                MinOutcome::Inconclusive { best_value_seen, .. } => {
                    let _ = writeln!(s, "best value seen: {}", ext(best_value_seen));
                }
            }
            emit(cli, &format!("oracle-{}", p.name), &s, &[("oracle.txt", &s)])
        }
        Command::Reproduce { name } => {
            let p = builtin(name)?;
            let r = gap_report_with(&p, &AscentOptions { budget: budget(cli), ..AscentOptions::default() })?;
            let checks = expectations(name, &p, &r);
            let mut s = r.render();
            s.push_str("checks:\n");
            for (what, ok, got) in &checks {
                let _ = writeln!(s, "  [{}] {what} (got {got})", if *ok { "ok" } else { "MISMATCH" });
            }
            emit(cli, &format!("reproduce-{name}"), &s, &[("report.txt", &s), ("dual.csv", &r.dual.to_csv())])?;
            let bad: Vec<String> = checks.iter().filter(|c| !c.1).map(|(w, _, g)| format!("- expected {w}\n+ got {g}")).collect();
            if bad.is_empty() {
                Ok(())
            } else {
                Err(CliError::Mismatch(bad.join("\n")))
            }
        }
    }
}

fn parse_grid(g: &str, surd: u32) -> Result<Vec<Quad>> {
    if let Some((lo, hi)) = g.split_once(':') {
        let lo: i32 = lo.trim().parse().map_err(|e| CliError::Usage(format!("--grid: {e}")))?;
        let hi: i32 = hi.trim().parse().map_err(|e| CliError::Usage(format!("--grid: {e}")))?;
        if lo > hi {
            return Err(CliError::Usage("--grid: lo must not exceed hi".into()));
        }
        return Ok(geometric_grid(lo, hi));
    }
    g.split(',').map(|t| Quad::parse_with_surd(t.trim(), surd).map_err(|e| CliError::Usage(format!("--grid: {e}")))).collect()
}

fn describe(r: &RelaxValue) -> String {
    let mut s = format!("{} (≈ {}) via {}", ext(&r.value), r.value.approx(12), r.method);
    if r.attained {
        let _ = write!(s, ", attained at {}", fmt_vec(r.witness.as_deref().unwrap_or_default()));
    } else if let Some(ray) = &r.ray {
        let _ = write!(s, ", ray {} from {}", fmt_vec(ray), fmt_vec(r.witness.as_deref().unwrap_or_default()));
    } else {
        s.push_str(", not attained");
    }
    s
}

/// The known values of the built-in examples.
fn expectations(name: &str, p: &Problem, r: &GapReport) -> Vec<(String, bool, String)> {
    let fin = |n: i64| ExtReal::Finite(Quad::from_int(n));
    let mut c = Vec::new();
    let mut value = |label: &str, got: &ExtReal, want: ExtReal| c.push((format!("{label} = {}", ext(&want)), *got == want, ext(got)));
    match name {
        "ex1" => {
            value("v^L", &r.v_l, ExtReal::NegInfinity);
            value("v̄*", &r.v_bar_star, ExtReal::NegInfinity);
            value("v*", &r.v_star, fin(0));
        }
        "ex2" => {
            value("v^L", &r.v_l, fin(-1));
            value("v̄*", &r.v_bar_star, fin(0));
            value("v*", &r.v_star, fin(0));
        }
        _ => {
            value("v^L", &r.v_l, fin(1));
            value("v̄*", &r.v_bar_star, fin(1));
            value("v*", &r.v_star, fin(1));
        }
    }
    let flags: Vec<String> = r.gaps.iter().map(Gap::to_string).collect();
    let flag = |g: Gap, c: &mut Vec<(String, bool, String)>| c.push((format!("flag \"{g}\""), r.has_gap(g), flags.join(", ")));
    match name {
        "ex1" => {
            flag(Gap::LagrangeBelowConv, &mut c);
            let ok = r.dual.divergence.as_ref().is_some_and(|w| w.verify(&p.lattice, 20).is_ok());
            c.push(("divergence witness verified on 20 points".into(), ok, ok.to_string()));
            let origin = r.conv.attained && r.conv.witness.as_deref() == Some(&[Quad::zero(), Quad::zero()][..]);
            c.push(("v* attained at (0, 0)".into(), origin, describe(&r.conv)));
        }
        "ex2" => {
            flag(Gap::LagrangeBelowClosed, &mut c);
            let certified = r.dual.status == DualStatus::Certified;
            c.push(("v^L certified".into(), certified, format!("{:?}", r.dual.status)));
        }
        _ => {
            let cert = r.certifications.iter().find_map(|x| match x {
                Certification::Theorem1(f) => Some(f),
                _ => None,
            });
            let ok = cert.is_some_and(|f| f.verify(p, &Quad::one()));
            c.push(("Theorem 1 certificate re-verifies".into(), ok, cert.map(|f| format!("bound {:#}", f.bound)).unwrap_or_else(|| "none".into())));
            let none = r.gaps.is_empty();
            c.push(("no gaps".into(), none, flags.join(", ")));
        }
    }
    c.push(("ordering v^L ≤ v̄* ≤ v*".into(), r.ordering_ok, r.ordering_ok.to_string()));
    c
}
