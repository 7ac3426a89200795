//! Problem data: the objective, the coupling system `Ax ⋈ b`, and the
//! lattice set `X` the integer variables live in.

mod builtin;
mod format;

pub use builtin::{builtin, BUILTIN_NAMES};
pub use format::{parse_problem, print_problem};

use std::fmt;

use crate::arith::{Quad, DEFAULT_SURD};
use crate::error::{Error, Result};

/// An integer point of `Zⁿ`.
pub type IntPoint = Vec<i64>;

pub fn to_quads(p: &[i64]) -> Vec<Quad> {
    p.iter().map(|&v| Quad::from_int(v)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        }
    }

    /// Whether a slack `lhs − rhs` with the given sign satisfies the sense.
    pub fn accepts(self, slack_sign: i8) -> bool {
        match self {
            Sense::Ge => slack_sign >= 0,
            Sense::Le => slack_sign <= 0,
            Sense::Eq => slack_sign == 0,
        }
    }
}

impl std::str::FromStr for Sense {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sense> {
        match s {
            ">=" | "≥" => Ok(Sense::Ge),
            "<=" | "≤" => Ok(Sense::Le),
            "=" | "==" => Ok(Sense::Eq),
            other => Err(Error::Parse { line: 0, column: 0, message: format!("unknown sense `{other}`") }),
        }
    }
}

/// A linear form `x ↦ Σ coefficients[i]·x[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm(pub Vec<Quad>);

impl LinearForm {
    pub fn new(coefficients: Vec<Quad>) -> Self {
        LinearForm(coefficients)
    }

    pub fn from_ints(coefficients: &[i64]) -> Self {
        LinearForm(to_quads(coefficients))
    }

    pub fn zeros(n: usize) -> Self {
        LinearForm(vec![Quad::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[Quad] {
        &self.0
    }

    pub fn eval(&self, x: &[Quad]) -> Quad {
        debug_assert_eq!(x.len(), self.0.len());
        self.0.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn eval_int(&self, p: &[i64]) -> Quad {
        debug_assert_eq!(p.len(), self.0.len());
        self.0.iter().zip(p).filter(|(_, &v)| v != 0).map(|(c, &v)| c.scale_int(v)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Quad::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.0.iter().all(Quad::is_rational)
    }

    pub fn scaled(&self, k: &Quad) -> LinearForm {
        LinearForm(self.0.iter().map(|c| c * k).collect())
    }

    pub fn neg(&self) -> LinearForm {
        LinearForm(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        LinearForm(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        LinearForm(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

/// One row `form·x ⋈ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub form: LinearForm,
    pub sense: Sense,
    pub rhs: Quad,
}

impl Constraint {
    pub fn new(form: LinearForm, sense: Sense, rhs: Quad) -> Self {
        Constraint { form, sense, rhs }
    }

    pub fn ge(form: LinearForm, rhs: Quad) -> Self {
        Constraint::new(form, Sense::Ge, rhs)
    }

    pub fn le(form: LinearForm, rhs: Quad) -> Self {
        Constraint::new(form, Sense::Le, rhs)
    }

    pub fn eq(form: LinearForm, rhs: Quad) -> Self {
        Constraint::new(form, Sense::Eq, rhs)
    }

    /// `form·x − rhs`.
    pub fn slack(&self, x: &[Quad]) -> Quad {
        self.form.eval(x) - &self.rhs
    }

    pub fn slack_int(&self, p: &[i64]) -> Quad {
        self.form.eval_int(p) - &self.rhs
    }

    pub fn holds(&self, x: &[Quad]) -> bool {
        self.sense.accepts(self.slack(x).signum())
    }

    pub fn holds_int(&self, p: &[i64]) -> bool {
        self.sense.accepts(self.slack_int(p).signum())
    }

    pub fn is_rational(&self) -> bool {
        self.form.is_rational() && self.rhs.is_rational()
    }

    /// The same half-space written as `≥`; equalities become two rows.
    pub fn ge_rows(&self) -> Vec<Constraint> {
        match self.sense {
            Sense::Ge => vec![self.clone()],
            Sense::Le => vec![Constraint::ge(self.form.neg(), -&self.rhs)],
            Sense::Eq => vec![
                Constraint::ge(self.form.clone(), self.rhs.clone()),
                Constraint::ge(self.form.neg(), -&self.rhs),
            ],
        }
    }

    /// `form·x ⋈ 0`.
    pub fn homogenized(&self) -> Constraint {
        Constraint::new(self.form.clone(), self.sense, Quad::zero())
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.form.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *c == Quad::one() {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "({c})·x{}", i + 1)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " {} {}", self.sense.symbol(), self.rhs)
    }
}

/// A finite system of linear rows in a fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstraintSystem {
    dim: usize,
    rows: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn new(dim: usize) -> Self {
        ConstraintSystem { dim, rows: Vec::new() }
    }

    pub fn with_rows(dim: usize, rows: Vec<Constraint>) -> Result<Self> {
        let mut s = ConstraintSystem::new(dim);
        for r in rows {
            s.push(r)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, row: Constraint) -> Result<()> {
        if row.form.dim() != self.dim {
            return Err(Error::Dimension(format!("row has {} coefficients, expected {}", row.form.dim(), self.dim)));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, x: &[Quad]) -> bool {
        self.rows.iter().all(|r| r.holds(x))
    }

    pub fn contains_int(&self, p: &[i64]) -> bool {
        self.rows.iter().all(|r| r.holds_int(p))
    }

    pub fn is_rational(&self) -> bool {
        self.rows.iter().all(Constraint::is_rational)
    }

    /// Every row rewritten as `≥`, equalities split in two.
    pub fn to_ge_form(&self) -> ConstraintSystem {
        ConstraintSystem { dim: self.dim, rows: self.rows.iter().flat_map(Constraint::ge_rows).collect() }
    }

    /// `{x : Gx ⋈ 0}`.
    pub fn homogenized(&self) -> ConstraintSystem {
        ConstraintSystem { dim: self.dim, rows: self.rows.iter().map(Constraint::homogenized).collect() }
    }

    /// Concatenation of two systems in the same dimension.
    pub fn and(&self, other: &ConstraintSystem) -> ConstraintSystem {
        debug_assert_eq!(self.dim, other.dim);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        ConstraintSystem { dim: self.dim, rows }
    }

    pub fn nonneg_rows(dim: usize, flags: &[bool]) -> Vec<Constraint> {
        flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| {
                let mut e = vec![Quad::zero(); dim];
                e[i] = Quad::one();
                Constraint::ge(LinearForm(e), Quad::zero())
            })
            .collect()
    }
}

/// The lattice set `X`, in one of the supported descriptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeSet {
    /// An explicit list of integer points.
    Finite(Vec<IntPoint>),
    /// `{x ∈ Zⁿ : Gx ⋈ h}`.
    Poly(ConstraintSystem),
    /// `(P¹ ∪ … ∪ Pᵏ) ∩ Zⁿ`.
    Union(Vec<ConstraintSystem>),
}

/// `X` together with its dimension and per-coordinate nonnegativity flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSetSpec {
    pub dim: usize,
    pub set: LatticeSet,
    pub nonneg: Vec<bool>,
}

impl LatticeSetSpec {
    pub fn finite(dim: usize, points: Vec<IntPoint>) -> Result<Self> {
        Self::build(dim, LatticeSet::Finite(points), vec![false; dim])
    }

    pub fn poly(system: ConstraintSystem) -> Result<Self> {
        let dim = system.dim();
        Self::build(dim, LatticeSet::Poly(system), vec![false; dim])
    }

    pub fn union(dim: usize, pieces: Vec<ConstraintSystem>) -> Result<Self> {
        Self::build(dim, LatticeSet::Union(pieces), vec![false; dim])
    }

    pub fn with_nonneg(mut self, coords: &[usize]) -> Result<Self> {
        for &c in coords {
            if c >= self.dim {
                return Err(Error::Dimension(format!("nonneg coordinate {} out of range", c + 1)));
            }
            self.nonneg[c] = true;
        }
        Ok(self)
    }

    fn build(dim: usize, set: LatticeSet, nonneg: Vec<bool>) -> Result<Self> {
        let spec = LatticeSetSpec { dim, set, nonneg };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nonneg.len() != self.dim {
            return Err(Error::Dimension("nonnegativity flags".into()));
        }
        match &self.set {
            LatticeSet::Finite(points) => {
                if let Some(p) = points.iter().find(|p| p.len() != self.dim) {
                    return Err(Error::Dimension(format!("point {p:?} in dimension {}", self.dim)));
                }
            }
            LatticeSet::Poly(s) => {
                if s.dim() != self.dim {
                    return Err(Error::Dimension("lattice system".into()));
                }
            }
            LatticeSet::Union(pieces) => {
                if pieces.iter().any(|s| s.dim() != self.dim) {
                    return Err(Error::Dimension("union piece".into()));
                }
            }
        }
        Ok(())
    }

    /// Polyhedral pieces with the nonnegativity rows folded in. Empty for finite lists.
    pub fn pieces(&self) -> Vec<ConstraintSystem> {
        let extra = ConstraintSystem::nonneg_rows(self.dim, &self.nonneg);
        let fold = |s: &ConstraintSystem| {
            let mut s = s.clone();
            for r in &extra {
                s.push(r.clone()).expect("same dimension");
            }
            s
        };
        match &self.set {
            LatticeSet::Finite(_) => Vec::new(),
            LatticeSet::Poly(s) => vec![fold(s)],
            LatticeSet::Union(ps) => ps.iter().map(fold).collect(),
        }
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        if p.len() != self.dim {
            return false;
        }
        if self.nonneg.iter().zip(p).any(|(&f, &v)| f && v < 0) {
            return false;
        }
        match &self.set {
            LatticeSet::Finite(points) => points.iter().any(|q| q.as_slice() == p),
            LatticeSet::Poly(s) => s.contains_int(p),
            LatticeSet::Union(ps) => ps.iter().any(|s| s.contains_int(p)),
        }
    }

    /// Whether every coefficient of the description is rational.
    pub fn is_rational(&self) -> bool {
        match &self.set {
            LatticeSet::Finite(_) => true,
            LatticeSet::Poly(s) => s.is_rational(),
            LatticeSet::Union(ps) => ps.iter().all(ConstraintSystem::is_rational),
        }
    }
}

/// A lattice set that can answer point membership.
pub trait LatticeMembership: Sync {
    fn dim(&self) -> usize;
    fn contains_point(&self, p: &[i64]) -> bool;
}

impl LatticeMembership for LatticeSetSpec {
    fn dim(&self) -> usize {
        self.dim
    }
    fn contains_point(&self, p: &[i64]) -> bool {
        self.contains(p)
    }
}

/// `minimize c·x  s.t.  Ax ⋈ b,  x ∈ X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub dim: usize,
    pub surd: u32,
    pub objective: LinearForm,
    pub coupling: ConstraintSystem,
    pub lattice: LatticeSetSpec,
}

impl Problem {
    pub fn new(name: impl Into<String>, objective: LinearForm, coupling: ConstraintSystem, lattice: LatticeSetSpec) -> Result<Self> {
        let dim = objective.dim();
        let p = Problem { name: name.into(), dim, surd: DEFAULT_SURD, objective, coupling, lattice };
        p.validate()?;
        Ok(p)
    }

    pub fn with_surd(mut self, d: u32) -> Result<Self> {
        self.surd = d;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.dim() != self.dim {
            return Err(Error::Dimension(format!("objective has {} coefficients, expected {}", self.objective.dim(), self.dim)));
        }
        if self.coupling.dim() != self.dim || self.lattice.dim != self.dim {
            return Err(Error::Dimension("coupling system and lattice set must share the problem dimension".into()));
        }
        self.lattice.validate()?;
        let mut systems: Vec<&ConstraintSystem> = vec![&self.coupling];
        match &self.lattice.set {
            LatticeSet::Poly(s) => systems.push(s),
            LatticeSet::Union(ps) => systems.extend(ps.iter()),
            LatticeSet::Finite(_) => {}
        }
        let mut quads: Vec<&Quad> = self.objective.0.iter().collect();
        for s in systems {
            for r in s.rows() {
                quads.extend(r.form.0.iter());
                quads.push(&r.rhs);
            }
        }
        if let Some(q) = quads.iter().find(|q| !q.is_rational() && q.surd() != self.surd) {
            return Err(Error::Domain(format!("coefficient {q} does not use the problem surd √{}", self.surd)));
        }
        Ok(())
    }

    pub fn num_rows(&self) -> usize {
        self.coupling.len()
    }

    /// Feasible for the original integer program.
    pub fn is_feasible_point(&self, p: &[i64]) -> bool {
        self.lattice.contains(p) && self.coupling.contains_int(p)
    }
}

/// A value of `R ∪ {±∞}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtReal {
    NegInfinity,
    Finite(Quad),
    PosInfinity,
}

impl ExtReal {
    pub fn finite(&self) -> Option<&Quad> {
        match self {
            ExtReal::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// Decimal rendering, `-inf` / `+inf` for the infinities.
    pub fn approx(&self, precision: u32) -> String {
        match self {
            ExtReal::NegInfinity => "-inf".into(),
            ExtReal::PosInfinity => "+inf".into(),
            ExtReal::Finite(q) => q.approx(precision),
        }
    }

    /// `self + q`, with infinities absorbing.
    pub fn plus(&self, q: &Quad) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v + q),
            other => other.clone(),
        }
    }
}

impl From<Quad> for ExtReal {
    fn from(q: Quad) -> ExtReal {
        ExtReal::Finite(q)
    }
}

impl From<i64> for ExtReal {
    fn from(n: i64) -> ExtReal {
        ExtReal::Finite(Quad::from_int(n))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInfinity => write!(f, "-inf"),
            ExtReal::PosInfinity => write!(f, "+inf"),
            ExtReal::Finite(q) => q.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_real_order() {
        let a = ExtReal::from(Quad::from_ints(0, -1, 2));
        assert!(ExtReal::NegInfinity < a);
        assert!(a < ExtReal::from(-1));
        assert!(ExtReal::from(1) < ExtReal::PosInfinity);
    }

    #[test]
    fn dimension_checks() {
        let mut s = ConstraintSystem::new(2);
        assert!(s.push(Constraint::ge(LinearForm::from_ints(&[1, 2, 3]), Quad::zero())).is_err());
        assert!(LatticeSetSpec::finite(2, vec![vec![1]]).is_err());
    }

    #[test]
    fn equality_rows_split_into_two_ge_rows() {
        let r = Constraint::eq(LinearForm::from_ints(&[1, 0]), Quad::one());
        let ge = r.ge_rows();
        assert_eq!(ge.len(), 2);
        assert!(ge.iter().all(|g| g.sense == Sense::Ge && g.holds_int(&[1, 7])));
        assert!(!ge.iter().all(|g| g.holds_int(&[2, 0])));
    }
}
