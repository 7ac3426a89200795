//! Line-oriented problem files.
//!
//! ```text
//! # Example
//! name ex1
//! dim 2
//! surd 2
//! min -1 0
//! row -sqrt(2) 1 >= 0
//! lattice poly
//! lrow -sqrt(2) 1 <= 0
//! nonneg 1 2
//! ```
//!
//! `lattice finite` takes `point` lines, `lattice union` takes
//! `piece` … `endpiece` blocks of `lrow` lines. Number literals may not
//! contain spaces (`-1+sqrt(2)`, `1/2*sqrt(2)`). Coordinates in `nonneg`
//! are 1-based.

use std::fmt::Write as _;

use crate::arith::{is_square_free, Quad, DEFAULT_SURD};
use crate::error::{Error, Result};

use super::{Constraint, ConstraintSystem, IntPoint, LatticeSet, LatticeSetSpec, LinearForm, Problem, Sense};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

#[derive(PartialEq)]
enum Block {
    None,
    Finite,
    Poly,
    Union,
    Piece,
}

struct Parser {
    name: Option<String>,
    dim: Option<usize>,
    surd: u32,
    objective: Option<LinearForm>,
    coupling: Vec<Constraint>,
    block: Block,
    points: Vec<IntPoint>,
    lrows: Vec<Constraint>,
    pieces: Vec<ConstraintSystem>,
    piece_rows: Vec<Constraint>,
    nonneg: Vec<usize>,
    lattice_seen: bool,
}

impl Parser {
    fn dim(&self, line: usize) -> Result<usize> {
        self.dim.ok_or_else(|| perr(line, 1, "`dim` must come first"))
    }

    fn quad(&self, tok: &Token<'_>, line: usize) -> Result<Quad> {
        Quad::parse_with_surd(tok.text, self.surd).map_err(|e| match e {
            Error::Parse { column, message, .. } => perr(line, tok.column + column.saturating_sub(1), message),
            other => perr(line, tok.column, other.to_string()),
        })
    }

    fn row(&self, toks: &[Token<'_>], line: usize) -> Result<Constraint> {
        let n = self.dim(line)?;
        let sense_at = toks
            .iter()
            .position(|t| t.text.parse::<Sense>().is_ok())
            .ok_or_else(|| perr(line, toks.first().map_or(1, |t| t.column), "missing `>=`, `<=` or `=`"))?;
        if sense_at != n {
            return Err(Error::Dimension(format!("line {line}: row has {sense_at} coefficients, expected {n}")));
        }
        if toks.len() != n + 2 {
            return Err(perr(line, toks[sense_at].column, "expected exactly one right-hand side"));
        }
        let coeffs = toks[..n].iter().map(|t| self.quad(t, line)).collect::<Result<Vec<_>>>()?;
        let sense = toks[n].text.parse().expect("checked");
        let rhs = self.quad(&toks[n + 1], line)?;
        Ok(Constraint::new(LinearForm(coeffs), sense, rhs))
    }
}

/// Parses a problem file. Errors carry 1-based line and column numbers.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let mut p = Parser {
        name: None,
        dim: None,
        surd: DEFAULT_SURD,
        objective: None,
        coupling: Vec::new(),
        block: Block::None,
        points: Vec::new(),
        lrows: Vec::new(),
        pieces: Vec::new(),
        piece_rows: Vec::new(),
        nonneg: Vec::new(),
        lattice_seen: false,
    };
    // `surd` may appear anywhere before its first use; pick it up first
    for (i, raw) in text.lines().enumerate() {
        let toks = tokens(raw.split('#').next().unwrap_or(""));
        if toks.first().map(|t| t.text) == Some("surd") {
            let d: u64 = toks.get(1).and_then(|t| t.text.parse().ok()).ok_or_else(|| perr(i + 1, 1, "`surd` takes an integer"))?;
            if !is_square_free(d) {
                return Err(Error::Domain(format!("line {}: surd {d} is not a square-free integer ≥ 2", i + 1)));
            }
            p.surd = d as u32;
        }
    }

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw.split('#').next().unwrap_or(""));
        let Some(head) = toks.first() else { continue };
        let args = &toks[1..];
        match head.text {
            "name" => {
                p.name = Some(args.iter().map(|t| t.text).collect::<Vec<_>>().join(" "));
            }
            "dim" => {
                let n: usize = args.first().and_then(|t| t.text.parse().ok()).filter(|&n| n > 0).ok_or_else(|| perr(line, head.column, "`dim` takes a positive integer"))?;
                p.dim = Some(n);
            }
            "surd" => {}
            "min" => {
                let n = p.dim(line)?;
                if args.len() != n {
                    return Err(Error::Dimension(format!("line {line}: objective has {} coefficients, expected {n}", args.len())));
                }
                p.objective = Some(LinearForm(args.iter().map(|t| p.quad(t, line)).collect::<Result<_>>()?));
            }
            "row" => {
                let r = p.row(args, line)?;
                p.coupling.push(r);
            }
            "lattice" => {
                if p.lattice_seen {
                    return Err(perr(line, head.column, "only one `lattice` block is allowed"));
                }
                p.lattice_seen = true;
                p.block = match args.first().map(|t| t.text) {
                    Some("poly") => Block::Poly,
                    Some("finite") => Block::Finite,
                    Some("union") => Block::Union,
                    _ => return Err(perr(line, head.column, "expected `lattice poly|finite|union`")),
                };
            }
            "lrow" => {
                let r = p.row(args, line)?;
                match p.block {
                    Block::Poly => p.lrows.push(r),
                    Block::Piece => p.piece_rows.push(r),
                    _ => return Err(perr(line, head.column, "`lrow` outside a poly lattice or union piece")),
                }
            }
            "point" => {
                if p.block != Block::Finite {
                    return Err(perr(line, head.column, "`point` outside a finite lattice"));
                }
                let n = p.dim(line)?;
                if args.len() != n {
                    return Err(Error::Dimension(format!("line {line}: point has {} coordinates, expected {n}", args.len())));
                }
                let pt = args.iter().map(|t| t.text.parse::<i64>().map_err(|_| perr(line, t.column, "expected an integer"))).collect::<Result<_>>()?;
                p.points.push(pt);
            }
            "piece" => {
                if p.block != Block::Union {
                    return Err(perr(line, head.column, "`piece` outside a union lattice"));
                }
                p.block = Block::Piece;
            }
            "endpiece" => {
                if p.block != Block::Piece {
                    return Err(perr(line, head.column, "`endpiece` without `piece`"));
                }
                let n = p.dim(line)?;
                let rows = std::mem::take(&mut p.piece_rows);
                p.pieces.push(ConstraintSystem::with_rows(n, rows)?);
                p.block = Block::Union;
            }
            "nonneg" => {
                if !p.lattice_seen {
                    return Err(perr(line, head.column, "`nonneg` belongs inside the lattice block"));
                }
                let n = p.dim(line)?;
                for t in args {
                    let c: usize = t.text.parse().ok().filter(|&c| (1..=n).contains(&c)).ok_or_else(|| perr(line, t.column, format!("coordinate must be in 1..={n}")))?;
                    p.nonneg.push(c - 1);
                }
            }
            other => return Err(perr(line, head.column, format!("unknown directive `{other}`"))),
        }
    }
    if p.block == Block::Piece {
        return Err(perr(text.lines().count(), 1, "unterminated `piece`"));
    }
    let n = p.dim(1)?;
    let objective = p.objective.ok_or_else(|| perr(1, 1, "missing `min` line"))?;
    let coupling = ConstraintSystem::with_rows(n, p.coupling)?;
    let set = match (p.lattice_seen, p.block) {
        (false, _) => return Err(perr(1, 1, "missing `lattice` block")),
        (_, Block::Finite) => LatticeSet::Finite(p.points),
        (_, Block::Poly) => LatticeSet::Poly(ConstraintSystem::with_rows(n, p.lrows)?),
        _ => LatticeSet::Union(p.pieces),
    };
    let mut nonneg = vec![false; n];
    for c in p.nonneg {
        nonneg[c] = true;
    }
    let lattice = LatticeSetSpec { dim: n, set, nonneg };
    let problem = Problem { name: p.name.unwrap_or_else(|| "problem".into()), dim: n, surd: p.surd, objective, coupling, lattice };
    problem.validate()?;
    Ok(problem)
}

fn write_row(out: &mut String, key: &str, r: &Constraint) {
    let _ = write!(out, "{key}");
    for c in r.form.coeffs() {
        let _ = write!(out, " {c:#}");
    }
    let _ = writeln!(out, " {} {:#}", r.sense.symbol(), r.rhs);
}

/// Prints a problem in the file format; `parse_problem` reads it back unchanged.
pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name {}", p.name);
    let _ = writeln!(out, "dim {}", p.dim);
    let _ = writeln!(out, "surd {}", p.surd);
    let _ = write!(out, "min");
    for c in p.objective.coeffs() {
        let _ = write!(out, " {c:#}");
    }
    out.push('\n');
    for r in p.coupling.rows() {
        write_row(&mut out, "row", r);
    }
    match &p.lattice.set {
        LatticeSet::Finite(points) => {
            out.push_str("lattice finite\n");
            for pt in points {
                let coords: Vec<String> = pt.iter().map(i64::to_string).collect();
                let _ = writeln!(out, "point {}", coords.join(" "));
            }
        }
        LatticeSet::Poly(s) => {
            out.push_str("lattice poly\n");
            for r in s.rows() {
                write_row(&mut out, "lrow", r);
            }
        }
        LatticeSet::Union(pieces) => {
            out.push_str("lattice union\n");
            for s in pieces {
                out.push_str("piece\n");
                for r in s.rows() {
                    write_row(&mut out, "lrow", r);
                }
                out.push_str("endpiece\n");
            }
        }
    }
    let nn: Vec<String> = p.lattice.nonneg.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| (i + 1).to_string()).collect();
    if !nn.is_empty() {
        let _ = writeln!(out, "nonneg {}", nn.join(" "));
    }
    out
}
